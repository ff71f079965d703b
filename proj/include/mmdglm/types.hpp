#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mmdglm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Family { gaussian, binomial };

// full: K_x-weighted double sum over all pairs, O(n^2).
// local: diagonal terms only, O(n).
enum class Variant { full, local };

struct Dataset {
  MatrixXd x;  // n x p, one observation per row
  VectorXd y;
  Family family = Family::gaussian;

  Index n() const noexcept { return x.rows(); }
  Index p() const noexcept { return x.cols(); }
};

// Throws ContractViolation on shape problems or non-binary binomial responses.
void validate(const Dataset& data);

Dataset subset_rows(const Dataset& data, const std::vector<Index>& rows);

std::string_view to_string(Family family);
std::string_view to_string(Variant variant);
Family parse_family(std::string_view text);
Variant parse_variant(std::string_view text);

}  // namespace mmdglm

#include "mmdglm/types.hpp"

#include <string>

#include "mmdglm/errors.hpp"

namespace mmdglm {

void validate(const Dataset& data) {
  if (data.x.rows() != data.y.size()) {
    throw ContractViolation("dataset has " + std::to_string(data.x.rows()) + " rows but " +
                            std::to_string(data.y.size()) + " responses");
  }
  if (data.n() == 0) throw ContractViolation("dataset is empty");
  if (!data.x.allFinite() || !data.y.allFinite()) {
    throw NumericInputError("dataset contains non-finite values");
  }
  if (data.family == Family::binomial) {
    for (Index i = 0; i < data.n(); ++i) {
      if (data.y[i] != 0.0 && data.y[i] != 1.0) {
        throw ContractViolation("binomial response at row " + std::to_string(i) +
                                " is not 0 or 1");
      }
    }
  }
}

Dataset subset_rows(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.family = data.family;
  out.x.resize(static_cast<Index>(rows.size()), data.p());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.x.row(static_cast<Index>(k)) = data.x.row(rows[k]);
    out.y[static_cast<Index>(k)] = data.y[rows[k]];
  }
  return out;
}

std::string_view to_string(Family family) {
  return family == Family::gaussian ? "gaussian" : "binomial";
}

std::string_view to_string(Variant variant) {
  return variant == Variant::full ? "full" : "local";
}

Family parse_family(std::string_view text) {
  if (text == "gaussian") return Family::gaussian;
  if (text == "binomial") return Family::binomial;
  throw InputError("unknown family '" + std::string(text) + "' (expected gaussian|binomial)");
}

Variant parse_variant(std::string_view text) {
  if (text == "full") return Variant::full;
  if (text == "local") return Variant::local;
  throw InputError("unknown variant '" + std::string(text) + "' (expected full|local)");
}

}  // namespace mmdglm

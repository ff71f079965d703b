#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mmdglm/types.hpp"

namespace mmdglm {

// Dataset files: header "y,x1,...,xp", one observation per line, comma
// separated, no index column. Errors name the 1-based line and column.
Dataset csv_read(const std::string& path, Family family);
Dataset csv_parse(std::istream& in, Family family, std::string_view source = "<stream>");

void csv_write(const std::string& path, const Dataset& data);
void csv_write(std::ostream& out, const Dataset& data);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace mmdglm

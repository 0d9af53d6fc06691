#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace ridgeshift {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Row-oriented result set with a fixed header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Doubles in scientific notation with 10 significant digits, integers and
/// strings verbatim.
std::string format_cell(const Cell& cell);

/// Header line then one line per row; comma separated, '\n' terminated.
/// Throws InvalidArgument when a row width differs from the header.
void write_csv(std::ostream& out, const Table& table);

}  // namespace ridgeshift

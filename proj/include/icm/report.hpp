#pragma once

// Byte-stable CSV rendering: fixed column order, LF line endings, numbers with
// 17 significant digits and the token "inf" for +infinity.

#include <span>
#include <string>
#include <vector>

#include "icm/bounds.hpp"

namespace icm {

/// Shortest-round-trip-safe decimal with 17 significant digits; "inf"/"-inf".
std::string format_number(double value);

/// Header line of the bound report.
std::string report_header();
std::string report_row(const BoundReport& row);
/// Header plus one line per row.
std::string emit_report(std::span<const BoundReport> rows);

/// Generic CSV: header and rows of preformatted cells.
std::string emit_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace icm

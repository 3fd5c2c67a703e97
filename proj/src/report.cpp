#include "icm/report.hpp"

#include <charconv>
#include <cmath>

namespace icm {

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string report_header() {
  return "bound_id,mode,n,lambda,rho,gamma,alpha,t,delta,lhs,lhs_se,rhs,slack,verdict";
}

std::string report_row(const BoundReport& r) {
  std::string line = r.bound_id;
  auto cell = [&line](const std::string& s) {
    line += ',';
    line += s;
  };
  cell(std::string(to_string(r.mode)));
  cell(std::to_string(r.n));
  for (double v : {r.lambda, r.rho, r.gamma, r.alpha, r.t, r.delta, r.lhs, r.lhs_se, r.rhs, r.slack}) {
    cell(format_number(v));
  }
  cell(std::string(to_string(r.verdict)));
  return line;
}

std::string emit_report(std::span<const BoundReport> rows) {
  std::string out = report_header() + "\n";
  for (const auto& r : rows) out += report_row(r) + "\n";
  return out;
}

std::string emit_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + "\n";
  };
  std::string out = join(header);
  for (const auto& r : rows) out += join(r);
  return out;
}

}  // namespace icm

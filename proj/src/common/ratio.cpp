#include "dbfuzz/common/ratio.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace dbfuzz {

std::string format_fixed(double value, int decimals) {
  const int size = std::snprintf(nullptr, 0, "%.*f", decimals, value);
  std::vector<char> buf(static_cast<std::size_t>(size) + 1);
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
  std::string out(buf.data(), static_cast<std::size_t>(size));
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string Ratio::render(int decimals) const { return format_fixed(value(), decimals); }

std::optional<double> relative_improvement(double baseline, double treatment) {
  if (baseline == 0.0) return std::nullopt;
  return (treatment - baseline) / baseline;
}

std::string format_improvement(std::optional<double> improvement, int decimals) {
  if (!improvement) return "undefined";
  std::string body = format_fixed(*improvement * 100.0, decimals);
  if (body.front() != '-') body.insert(body.begin(), '+');
  return body + "%";
}

}  // namespace dbfuzz

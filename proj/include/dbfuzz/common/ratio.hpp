#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dbfuzz {

/// An exact count ratio. Arithmetic stays in integers until `value()`.
struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  std::string render(int decimals) const;
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Fixed-point rendering ("%.Nf").
std::string format_fixed(double value, int decimals);

/// Rounds half away from zero at `decimals` places.
double round_to(double value, int decimals);

/// (treatment - baseline) / baseline; nullopt when the baseline is zero.
std::optional<double> relative_improvement(double baseline, double treatment);

/// "+159.35%" style rendering, or "undefined" for a zero baseline.
std::string format_improvement(std::optional<double> improvement, int decimals = 2);

}  // namespace dbfuzz

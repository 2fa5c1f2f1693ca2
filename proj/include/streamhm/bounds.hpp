#pragma once

#include <cstdint>

namespace streamhm {

/// Two-sided confidence interval.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const { return lower <= v && v <= upper; }
  double width() const { return upper - lower; }
};

/// Hoeffding deviation bound for the mean of a per-case succession
/// difference/sum whose per-case range is xi_ab + xi_ba:
/// sqrt((xi_ab + xi_ba)^2 * ln(2/delta) / (2 * nc)).
/// Holds with probability at least 1 - delta after nc observed cases.
double epsilon_pair(double xi_ab, double xi_ba, double delta, std::uint64_t nc);

/// Same bound for the two branch successions of a split, range
/// xi_ab + xi_ac.
double epsilon_triple(double xi_ab, double xi_ac, double delta, std::uint64_t nc);

/// Confidence interval around the dependency measure of (a, b), computed
/// from per-case succession means rho and per-case maxima xi. Each side
/// holds with probability at least 1 - delta. With epsilon forced to zero
/// (nc -> infinity) both sides collapse onto the count-form measure.
Interval dependency_bounds(double rho_ab, double rho_ba, double xi_ab, double xi_ba,
                           double delta, std::uint64_t nc);

/// Confidence interval around the AND measure of a split a -> (b, c).
/// Numerator deviation is bounded by the (b, c) pair epsilon, denominator
/// deviation by the (a -> b, a -> c) triple epsilon.
Interval and_bounds(double rho_bc, double rho_cb, double rho_ab, double rho_ac,
                    double xi_bc, double xi_cb, double xi_ab, double xi_ac,
                    double delta, std::uint64_t nc);

}  // namespace streamhm

#include "streamhm/bounds.hpp"

#include <cmath>

#include "streamhm/errors.hpp"

namespace streamhm {

namespace {

void validate(double xi_a, double xi_b, double delta, std::uint64_t nc) {
  if (xi_a < 0.0 || xi_b < 0.0) throw InvalidArgument("xi must be non-negative");
  if (!(delta > 0.0) || delta > 1.0) throw InvalidArgument("delta must be in (0, 1]");
  if (nc == 0) throw InvalidArgument("nc must be positive");
}

double epsilon(double range, double delta, std::uint64_t nc) {
  return range * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(nc)));
}

Interval ratio_bounds(double x, double y, double eps_x, double eps_y, std::uint64_t nc) {
  const double inv_nc = 1.0 / static_cast<double>(nc);
  const double denom_upper = y - eps_y + inv_nc;
  if (denom_upper <= 0.0)
    throw InvalidArgument("vacuous bound: epsilon exceeds observed support");
  return {(x - eps_x) / (y + eps_y + inv_nc), (x + eps_x) / denom_upper};
}

}  // namespace

double epsilon_pair(double xi_ab, double xi_ba, double delta, std::uint64_t nc) {
  validate(xi_ab, xi_ba, delta, nc);
  return epsilon(xi_ab + xi_ba, delta, nc);
}

double epsilon_triple(double xi_ab, double xi_ac, double delta, std::uint64_t nc) {
  validate(xi_ab, xi_ac, delta, nc);
  return epsilon(xi_ab + xi_ac, delta, nc);
}

Interval dependency_bounds(double rho_ab, double rho_ba, double xi_ab, double xi_ba,
                           double delta, std::uint64_t nc) {
  const double eps = epsilon_pair(xi_ab, xi_ba, delta, nc);
  return ratio_bounds(rho_ab - rho_ba, rho_ab + rho_ba, eps, eps, nc);
}

Interval and_bounds(double rho_bc, double rho_cb, double rho_ab, double rho_ac,
                    double xi_bc, double xi_cb, double xi_ab, double xi_ac,
                    double delta, std::uint64_t nc) {
  const double eps_x = epsilon_pair(xi_bc, xi_cb, delta, nc);
  const double eps_y = epsilon_triple(xi_ab, xi_ac, delta, nc);
  return ratio_bounds(rho_bc + rho_cb, rho_ab + rho_ac, eps_x, eps_y, nc);
}

}  // namespace streamhm

#include "fliess/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fliess/error.hpp"

namespace fliess {

namespace {

using sym::Expr;

Expr z(int i) { return Expr::variable(i - 1); }
Expr num(double v) { return Expr::constant(v); }

// sin((1 - k) alpha) / (L cos(k alpha))
Expr heading_rate(const CarParams& p) {
  return sym::sin(num(1.0 - p.k) * z(4)) / (num(p.L) * sym::cos(num(p.k) * z(4)));
}

double wrap(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

void CarParams::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("CarParams: L must be positive");
  if (!std::isfinite(k)) throw std::invalid_argument("CarParams: k must be finite");
}

Eigen::VectorXd SectionInit::state() const {
  Eigen::VectorXd s(5);
  s << z1, z2, z3, z4, z5;
  return s;
}

Realization car_realization(const CarParams& p, const Eigen::Vector4d& z0) {
  p.validate();
  const Expr zero = num(0.0);
  std::vector<std::vector<Expr>> g{
      {zero, zero, zero, zero},
      {sym::cos(z(3) + z(4)), sym::sin(z(3) + z(4)), heading_rate(p), zero},
      {zero, zero, zero, num(1.0)},
  };
  return Realization(std::move(g), {z(1), z(2)}, Eigen::VectorXd(z0));
}

Realization augmented_realization(const CarParams& p, const SectionInit& init) {
  p.validate();
  const Expr zero = num(0.0);
  std::vector<std::vector<Expr>> g{
      {z(5) * sym::cos(z(3) + z(4)), z(5) * sym::sin(z(3) + z(4)), z(5) * heading_rate(p), zero, zero},
      {zero, zero, zero, num(1.0), zero},
      {zero, zero, zero, zero, num(1.0)},
  };
  return Realization(std::move(g), {z(1), z(2)}, init.state());
}

SteerSpeed solve_first_order_match(double v1, double v2, double z3, const CarParams& p, Branch branch) {
  const double speed = std::hypot(v1, v2);
  if (speed == 0.0) throw std::invalid_argument("solve_first_order_match: zero target velocity");
  const double forward = std::atan2(v2, v1);
  const double backward = std::atan2(-v2, -v1);
  auto sec_ok = [&](double z4) { return std::abs(std::cos(p.k * z4)) >= sym::kPoleTolerance; };
  switch (branch) {
    case Branch::kPositiveSpeed:
    case Branch::kNegativeSpeed: {
      const bool pos = branch == Branch::kPositiveSpeed;
      const SteerSpeed s{(pos ? forward : backward) - z3, pos ? speed : -speed};
      if (!sec_ok(s.z4)) throw SingularityError("solve_first_order_match: cos(k z4) vanishes");
      return s;
    }
    case Branch::kMinimal:
      break;
  }
  SteerSpeed a{wrap(forward - z3), speed};
  SteerSpeed b{wrap(backward - z3), -speed};
  if (std::abs(b.z4) < std::abs(a.z4)) std::swap(a, b);
  for (const SteerSpeed& s : {a, b}) {
    if (std::abs(p.k * s.z4) < std::numbers::pi / 2 && sec_ok(s.z4)) return s;
  }
  throw SingularityError("solve_first_order_match: |k z4| >= pi/2 on both branches (k = " +
                         std::to_string(p.k) + ")");
}

GrowthConstants growth_constants(const CarParams& p, const SectionInit& init, bool augmented) {
  p.validate();
  const double c = std::cos(p.k * init.z4);
  if (std::abs(c) < sym::kPoleTolerance) {
    throw SingularityError("growth_constants: sec(k z4) is singular");
  }
  const double base = (std::abs(1.0 - p.k) + std::abs(p.k)) / std::min(p.L, 1.0) / std::abs(c);
  GrowthConstants out{std::max({1.0, std::abs(init.z1), std::abs(init.z2)}), base};
  if (augmented) {
    out.k = std::max(out.k, std::abs(init.z5));
    out.m *= std::max(1.0, std::abs(init.z5));
  }
  return out;
}

}  // namespace fliess

#pragma once

#include <Eigen/Dense>

#include "fliess/realization.hpp"

namespace fliess {

/// Bi-steerable car geometry: wheelbase L and rear steering f(alpha) = k alpha.
struct CarParams {
  double L = 1.0;
  double k = -0.7;

  void validate() const;
};

/// Initial state of one planned section: position (z1, z2), heading z3, front
/// steering angle z4 and speed z5.
struct SectionInit {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
  double z4 = 0.0;
  double z5 = 0.0;

  Eigen::VectorXd state() const;
};

/// Kinematic car with state (x, y, theta, alpha), inputs (u1 speed, u2 steering
/// rate) and outputs (x, y). Letter x1 is u1, x2 is u2.
Realization car_realization(const CarParams& p, const Eigen::Vector4d& z0);

/// Dynamic extension on the speed: z5 = u1 becomes a state, the inputs are u2
/// (steering rate, letter x1) and ubar1 = du1/dt (letter x2).
Realization augmented_realization(const CarParams& p, const SectionInit& init);

/// Sign choice for solve_first_order_match.
enum class Branch {
  kMinimal,        // z4 wrapped to (-pi, pi], speed sign minimizing |z4|
  kPositiveSpeed,  // z5 > 0, z4 = atan2(v2, v1) - z3 unwrapped
  kNegativeSpeed,  // z5 < 0, z4 = atan2(-v2, -v1) - z3 unwrapped
};

struct SteerSpeed {
  double z4;
  double z5;
};

/// (z4, z5) with z5 cos(z3 + z4) = v1 and z5 sin(z3 + z4) = v2. Throws
/// std::invalid_argument for v = 0 and SingularityError when cos(k z4)
/// vanishes (or, for kMinimal, when |k z4| >= pi/2 on both branches).
SteerSpeed solve_first_order_match(double v1, double v2, double z3, const CarParams& p,
                                   Branch branch = Branch::kMinimal);

/// Conservative growth constants |(c, eta)| <= K M^|eta| |eta|!. Absolute
/// values are used for the positions and speed, K and the speed factor of M
/// are at least 1 (unit coefficients such as (c_1, x0 x2) = co need it), and
/// the factor 2.4 of the k = -0.7 case is (|1 - k| + |k|) / min(L, 1) in general.
struct GrowthConstants {
  double k;
  double m;
};
GrowthConstants growth_constants(const CarParams& p, const SectionInit& init, bool augmented);

}  // namespace fliess

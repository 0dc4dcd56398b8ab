#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fliess/series.hpp"

namespace fliess {

/// Matching tolerance on the constrained output coefficients.
inline constexpr double kMatchingTolerance = 1e-9;
/// Relative singular-value threshold of the decoupling matrix rank test.
inline constexpr double kRankTolerance = 1e-10;

struct RelativeDegree {
  std::vector<int> r;
  /// A(i, j) = (c_i, x0^{r_i - 1} x_j).
  Eigen::MatrixXd decoupling;
};

/// Per-channel drift coefficients (c, x0^k), k = 0..K. A channel's signal is
/// y(t) = sum_k coeffs[k] t^k / k!.
struct TaylorOutput {
  std::vector<std::vector<double>> outputs;

  std::size_t size() const noexcept { return outputs.size(); }
  /// Coefficient k of channel i, zero past the stored length.
  double at(std::size_t i, std::size_t k) const {
    return k < outputs[i].size() ? outputs[i][k] : 0.0;
  }
  /// Value at time t.
  double evaluate(std::size_t i, double t) const;
  /// d/dt of channel i at time t.
  double derivative(std::size_t i, double t) const;

  /// Monomial coefficients a_k = coeffs[k] / k!.
  static std::vector<double> to_monomial(const std::vector<double>& series);
  static std::vector<double> from_monomial(const std::vector<double>& monomial);
};

/// Vector relative degree of c. Throws InversionError(kNoRelativeDegree) when a
/// component has no forced part or its first forced word is not linear, and
/// SingularDecouplingError when A is rank deficient.
RelativeDegree relative_degree(const VectorSeries& c);

/// Taylor coefficients of the unique analytic input u with F_c[u] = y, through
/// degree n. The result has min(n, c.max_degree() - max r_i) + 1 coefficients
/// per input.
///
/// Throws InversionError(kMatchingViolation) when (c_y_i, x0^k) differs from
/// (c_i, x0^k) by more than kMatchingTolerance for some k < r_i.
TaylorOutput left_invert(const VectorSeries& c, const TaylorOutput& c_y, int n);

/// Inputs as drift-only series over an alphabet of `alphabet_size` letters.
VectorSeries embed_inputs(const TaylorOutput& c_u, int alphabet_size, int max_degree);

/// Drift coefficients of c o c_u, k = 0..min(K, c.max_degree()).
TaylorOutput predicted_output(const VectorSeries& c, const TaylorOutput& c_u, int k_max);

/// (c_y - c o c_u, x0^k) per output for k = 0..min(K, c.max_degree()).
TaylorOutput tracking_error_series(const VectorSeries& c, const TaylorOutput& c_u,
                                   const TaylorOutput& c_y, int k_max);

}  // namespace fliess

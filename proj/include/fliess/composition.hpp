#pragma once

#include "fliess/series.hpp"

namespace fliess {

/// Represents delta + base, where delta is the (never stored) generating series
/// of the identity operator.
struct DeltaSeries {
  VectorSeries base;
};

/// Composition product c o d realizing F_c o F_d. `d` has one component per
/// non-drift letter of c's alphabet; the result lives over d's alphabet.
///   x0 eta o d = x0 (eta o d),  x_i eta o d = x0 (d_i sh (eta o d)),  1 o d = 1.
Series compose(const Series& c, const VectorSeries& d, int n);
VectorSeries compose(const VectorSeries& c, const VectorSeries& d, int n);

/// Modified composition realizing (delta + c) o (delta + d) = delta + d + c~d:
///   x0 eta ~ d = x0 (eta ~ d),  x_i eta ~ d = x_i (eta ~ d) + x0 (d_i sh (eta ~ d)).
Series modified_compose(const Series& c, const VectorSeries& d, int n);
VectorSeries modified_compose(const VectorSeries& c, const VectorSeries& d, int n);

/// Composition of delta-series: (delta + c) o (delta + d).
DeltaSeries compose(const DeltaSeries& c, const DeltaSeries& d, int n);

/// e with (delta + c) o (delta + e) = delta through degree n, from the fixed
/// point e = -(c ~ e) iterated exactly n + 1 times.
VectorSeries group_inverse(const VectorSeries& c, int n);

/// Natural (drift-only) part of group_inverse(c, n). Only drift words of the
/// inverse feed back into its own drift part, so this runs the same fixed point
/// inside the commutative algebra over x0.
VectorSeries natural_group_inverse(const VectorSeries& c, int n);

/// Feedback product c @ d = c o (delta - d o c)^{o -1}.
VectorSeries feedback_product(const VectorSeries& c, const VectorSeries& d, int n);

namespace detail {
/// compose() without the drift-only fast path; kept for cross-checking.
VectorSeries compose_general(const VectorSeries& c, const VectorSeries& d, int n);
}  // namespace detail

}  // namespace fliess

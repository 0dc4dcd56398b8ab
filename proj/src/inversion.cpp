#include "fliess/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "fliess/composition.hpp"
#include "fliess/error.hpp"

namespace fliess {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double TaylorOutput::evaluate(std::size_t i, double t) const {
  const std::vector<double>& c = outputs[i];
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t / static_cast<double>(k + 1) + c[k];
  return acc;
}

double TaylorOutput::derivative(std::size_t i, double t) const {
  const std::vector<double>& c = outputs[i];
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * t / static_cast<double>(k) + c[k];
  return acc;
}

std::vector<double> TaylorOutput::to_monomial(const std::vector<double>& series) {
  std::vector<double> out(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) out[k] = series[k] / factorial(static_cast<int>(k));
  return out;
}

std::vector<double> TaylorOutput::from_monomial(const std::vector<double>& monomial) {
  std::vector<double> out(monomial.size());
  for (std::size_t k = 0; k < monomial.size(); ++k) {
    out[k] = monomial[k] * factorial(static_cast<int>(k));
  }
  return out;
}

RelativeDegree relative_degree(const VectorSeries& c) {
  const std::size_t m = c.size();
  if (m == 0 || c.alphabet_size() != static_cast<int>(m) + 1) {
    throw std::invalid_argument("relative_degree: need one output per input letter");
  }
  const WordCodec& codec = c[0].codec();
  RelativeDegree out;
  out.decoupling = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    int lead = std::numeric_limits<int>::max();
    for (const Term& t : c[i].terms()) {
      if (!WordCodec::is_drift(t.key)) lead = std::min(lead, codec.leading_drift(t.key));
    }
    if (lead == std::numeric_limits<int>::max()) {
      throw InversionError(InversionError::Kind::kNoRelativeDegree,
                           "no relative degree for component " + std::to_string(i + 1) +
                               ": output does not depend on the inputs up to degree " +
                               std::to_string(c.max_degree()));
    }
    bool linear = false;
    for (std::size_t j = 0; j < m; ++j) {
      Word w = Word::drift_power(lead) + Word{static_cast<int>(j) + 1};
      const double a = c[i].coeff(w);
      out.decoupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a;
      linear = linear || a != 0.0;
    }
    if (!linear) {
      throw InversionError(InversionError::Kind::kNoRelativeDegree,
                           "no relative degree for component " + std::to_string(i + 1) +
                               ": no linear word x0^" + std::to_string(lead) + "x_j in its support");
    }
    out.r.push_back(lead + 1);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.decoupling);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(s.size() - 1) <= kRankTolerance * s(0)) {
    throw SingularDecouplingError("decoupling matrix singular (sigma_min / sigma_max = " +
                                  fmt(s(0) == 0.0 ? 0.0 : s(s.size() - 1) / s(0)) + ")");
  }
  return out;
}

TaylorOutput left_invert(const VectorSeries& c, const TaylorOutput& c_y, int n) {
  if (n < 0) throw std::invalid_argument("left_invert: negative degree");
  const RelativeDegree rd = relative_degree(c);
  const std::size_t m = c.size();
  if (c_y.size() != m) {
    throw std::invalid_argument("left_invert: " + std::to_string(c_y.size()) + " outputs given, " +
                                std::to_string(m) + " expected");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (int k = 0; k < rd.r[i]; ++k) {
      const double want = c[i].coeff(WordCodec::drift(k));
      const double have = c_y.at(i, static_cast<std::size_t>(k));
      if (std::abs(want - have) > kMatchingTolerance) {
        throw InversionError(InversionError::Kind::kMatchingViolation,
                             "matching condition violated for output " + std::to_string(i + 1) +
                                 " at x0^" + std::to_string(k) + ": c_y has " + fmt(have) +
                                 ", c has " + fmt(want) + " (|diff| = " + fmt(std::abs(want - have)) +
                                 ")");
      }
    }
  }

  const int a = c.alphabet_size();
  const int r_max = *std::max_element(rd.r.begin(), rd.r.end());
  const int degree = std::min(n, c.max_degree() - r_max);
  if (degree < 0) {
    throw std::invalid_argument("left_invert: series degree " + std::to_string(c.max_degree()) +
                                " is below the relative degree");
  }

  std::vector<Series> entries;
  std::vector<Series> residual;
  for (std::size_t i = 0; i < m; ++i) {
    const int r = rd.r[i];
    for (std::size_t j = 0; j < m; ++j) {
      const Word prefix = Word::drift_power(r - 1) + Word{static_cast<int>(j) + 1};
      entries.push_back(truncate(left_shift(prefix, c[i]), degree));
    }
    std::vector<double> y(static_cast<std::size_t>(c.max_degree()) + 1, 0.0);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = c_y.at(i, k);
    const Series target = Series::drift(a, c.max_degree(), y);
    residual.push_back(truncate(left_shift(Word::drift_power(r), c[i] - target), degree));
  }
  const MatrixSeries big_c(m, std::move(entries));
  const VectorSeries d = shuffle(shuffle_inverse(big_c, degree), VectorSeries(std::move(residual)), degree);
  const VectorSeries e = natural_group_inverse(d, degree);

  TaylorOutput out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> coeffs = e[i].drift_coefficients();
    coeffs.resize(static_cast<std::size_t>(degree) + 1, 0.0);
    out.outputs.push_back(std::move(coeffs));
  }
  return out;
}

VectorSeries embed_inputs(const TaylorOutput& c_u, int alphabet_size, int max_degree) {
  std::vector<Series> comps;
  for (const auto& coeffs : c_u.outputs) {
    std::vector<double> head(coeffs.begin(),
                             coeffs.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                                  coeffs.size(), static_cast<std::size_t>(max_degree) + 1)));
    comps.push_back(Series::drift(alphabet_size, max_degree, head));
  }
  return VectorSeries(std::move(comps));
}

TaylorOutput predicted_output(const VectorSeries& c, const TaylorOutput& c_u, int k_max) {
  const int k = std::min(k_max, c.max_degree());
  if (k < 0) throw std::invalid_argument("predicted_output: negative degree");
  const VectorSeries y = compose(c, embed_inputs(c_u, c.alphabet_size(), k), k);
  TaylorOutput out;
  for (const Series& s : y.components()) {
    std::vector<double> coeffs = s.drift_coefficients();
    coeffs.resize(static_cast<std::size_t>(k) + 1, 0.0);
    out.outputs.push_back(std::move(coeffs));
  }
  return out;
}

TaylorOutput tracking_error_series(const VectorSeries& c, const TaylorOutput& c_u,
                                   const TaylorOutput& c_y, int k_max) {
  TaylorOutput out = predicted_output(c, c_u, k_max);
  if (c_y.size() != out.size()) throw std::invalid_argument("tracking_error_series: output count mismatch");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = 0; k < out.outputs[i].size(); ++k) {
      out.outputs[i][k] = c_y.at(i, k) - out.outputs[i][k];
    }
  }
  return out;
}

}  // namespace fliess

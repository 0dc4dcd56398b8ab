#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "fliess/series.hpp"

namespace testing {

using Letters = std::vector<int>;
/// Plain word -> coefficient map used by the oracles.
using Naive = std::map<Letters, double>;

inline Naive to_naive(const fliess::Series& c) {
  Naive out;
  for (const auto& [w, v] : c.to_word_terms()) out[w.letters()] = v;
  return out;
}

inline fliess::Series from_naive(int alphabet, int degree, const Naive& m) {
  std::vector<std::pair<fliess::Word, double>> terms;
  for (const auto& [w, v] : m) terms.emplace_back(fliess::Word(w), v);
  return fliess::Series::from_terms(alphabet, degree, terms);
}

/// Every interleaving of a and b, enumerated through the set of positions
/// taken by a's letters. Counts multiplicities.
inline Naive interleavings(const Letters& a, const Letters& b) {
  const int n = static_cast<int>(a.size() + b.size());
  Naive out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<int>(a.size())) continue;
    Letters w(static_cast<std::size_t>(n));
    std::size_t ia = 0, ib = 0;
    for (int p = 0; p < n; ++p) w[static_cast<std::size_t>(p)] = (mask >> p & 1u) ? a[ia++] : b[ib++];
    out[w] += 1.0;
  }
  return out;
}

/// All words over `alphabet` letters with length <= n.
inline std::vector<Letters> all_words(int alphabet, int n) {
  std::vector<Letters> out{{}};
  std::size_t begin = 0;
  for (int len = 1; len <= n; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int l = 0; l < alphabet; ++l) {
        Letters w = out[i];
        w.push_back(l);
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

/// Dense random series: each word kept with probability `density`, uniform
/// coefficients in [-1, 1].
inline fliess::Series random_series(std::mt19937_64& rng, int alphabet, int degree, double density = 0.6,
                                    double constant = std::nan("")) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  std::vector<std::pair<fliess::Word, double>> terms;
  for (const Letters& w : all_words(alphabet, degree)) {
    if (w.empty() && !std::isnan(constant)) {
      terms.emplace_back(fliess::Word{}, constant);
      continue;
    }
    if (keep(rng) < density) terms.emplace_back(fliess::Word(w), coef(rng));
  }
  return fliess::Series::from_terms(alphabet, degree, terms);
}

inline fliess::Series random_proper(std::mt19937_64& rng, int alphabet, int degree, double density = 0.6) {
  return random_series(rng, alphabet, degree, density, 0.0);
}

/// Largest |a_w - b_w| over the union of stored words.
inline double max_diff(const fliess::Series& a, const fliess::Series& b) {
  double m = 0.0;
  for (const auto& [w, v] : to_naive(a)) m = std::max(m, std::abs(v - b.coeff(fliess::Word(w))));
  for (const auto& [w, v] : to_naive(b)) m = std::max(m, std::abs(v - a.coeff(fliess::Word(w))));
  return m;
}

inline double max_diff(const fliess::VectorSeries& a, const fliess::VectorSeries& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_diff(a[i], b[i]));
  return m;
}

/// Polynomial in t, monomial coefficients.
struct Poly {
  std::vector<double> a;

  static Poly one() { return Poly{{1.0}}; }
  double operator()(double t) const {
    double s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * t + *it;
    return s;
  }
  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.a.empty() || q.a.empty()) return Poly{};
    Poly r{std::vector<double>(p.a.size() + q.a.size() - 1, 0.0)};
    for (std::size_t i = 0; i < p.a.size(); ++i)
      for (std::size_t j = 0; j < q.a.size(); ++j) r.a[i + j] += p.a[i] * q.a[j];
    return r;
  }
  friend Poly operator+(const Poly& p, const Poly& q) {
    Poly r{std::vector<double>(std::max(p.a.size(), q.a.size()), 0.0)};
    for (std::size_t i = 0; i < p.a.size(); ++i) r.a[i] += p.a[i];
    for (std::size_t i = 0; i < q.a.size(); ++i) r.a[i] += q.a[i];
    return r;
  }
  friend Poly operator*(double s, const Poly& p) {
    Poly r = p;
    for (double& v : r.a) v *= s;
    return r;
  }
  /// Antiderivative vanishing at 0.
  Poly integral() const {
    Poly r{std::vector<double>(a.size() + 1, 0.0)};
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i + 1] = a[i] / static_cast<double>(i + 1);
    return r;
  }
};

/// Series-convention coefficients c_k (signal sum c_k t^k / k!) as a Poly.
inline Poly poly_from_series(const std::vector<double>& c) {
  Poly p{c};
  double f = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k > 0) f *= static_cast<double>(k);
    p.a[k] = c[k] / f;
  }
  return p;
}

/// F_c[u] for polynomial inputs, exactly: E_{x_i eta}[u] = int_0^t u_i E_eta[u].
/// u[0] must be the constant 1.
inline Poly fliess_exact(const fliess::Series& c, const std::vector<Poly>& u) {
  std::map<Letters, Poly> memo;
  std::function<const Poly&(const Letters&)> E = [&](const Letters& w) -> const Poly& {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    Poly p = Poly::one();
    if (!w.empty()) {
      const Letters rest(w.begin() + 1, w.end());
      p = (u[static_cast<std::size_t>(w[0])] * E(rest)).integral();
    }
    return memo.emplace(w, std::move(p)).first->second;
  };
  Poly y;
  for (const auto& [w, v] : to_naive(c)) y = y + v * E(w);
  return y;
}

inline double sup_diff(const Poly& p, const Poly& q, double horizon, int points = 200) {
  double m = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double t = horizon * i / points;
    m = std::max(m, std::abs(p(t) - q(t)));
  }
  return m;
}

}  // namespace testing

#include "fliess/composition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "detail/term_accumulator.hpp"

namespace fliess {

namespace {

std::vector<Series> components_of(const Series& c) { return {c}; }

void check_shapes(const std::vector<Series>& c, const VectorSeries& d, bool modified) {
  if (c.empty()) throw std::invalid_argument("compose: empty left argument");
  const int a = c.front().alphabet_size();
  for (const Series& s : c) require_same_alphabet(s, c.front(), "compose");
  if (d.size() != static_cast<std::size_t>(a - 1)) {
    throw std::invalid_argument("compose: right argument has " + std::to_string(d.size()) +
                                " components, left alphabet needs " + std::to_string(a - 1));
  }
  if (modified && d.size() > 0 && d.alphabet_size() != a) {
    throw std::invalid_argument("modified_compose: arguments must share an alphabet");
  }
}

// All suffixes of all stored words of the left argument.
std::unordered_set<WordKey> suffix_closure(const std::vector<Series>& c) {
  std::unordered_set<WordKey> out;
  const WordCodec& codec = c.front().codec();
  for (const Series& s : c) {
    for (const Term& t : s.terms()) {
      const int len = WordCodec::length(t.key);
      for (int k = 0; k <= len; ++k) out.insert(codec.drop_front(t.key, k));
    }
  }
  return out;
}

// Walks the suffix tree of c's support. value(s) is s o d (or s ~ d) and each
// node adds (c_k, s) * value(s) to output component k.
class SuffixWalker {
 public:
  SuffixWalker(const std::vector<Series>& c, const VectorSeries& d, int out_alphabet, int n,
               bool modified)
      : c_(c),
        d_(d),
        codec_(c.front().codec()),
        suffixes_(suffix_closure(c)),
        out_alphabet_(out_alphabet),
        n_(n),
        modified_(modified),
        acc_(c.size()) {}

  std::vector<Series> run() {
    visit(WordKey{0}, Series::constant(out_alphabet_, n_, 1.0));
    std::vector<Series> out;
    for (auto& terms : acc_) out.push_back(Series::from_keys(out_alphabet_, n_, std::move(terms)));
    return out;
  }

 private:
  void visit(WordKey s, const Series& value) {
    for (std::size_t k = 0; k < c_.size(); ++k) {
      const double w = c_[k].coeff(s);
      if (w == 0.0) continue;
      for (const Term& t : value.terms()) acc_[k].push_back({t.key, w * t.coeff});
    }
    if (n_ == 0) return;
    for (int letter = 0; letter < codec_.alphabet_size(); ++letter) {
      const WordKey child = codec_.prepend(letter, s);
      if (!suffixes_.contains(child)) continue;
      Series next = step(letter, value);
      if (!next.is_zero()) visit(child, next);
    }
  }

  Series step(int letter, const Series& value) const {
    if (letter == 0) return prepend_letter(0, value, n_);
    const Series& di = d_[static_cast<std::size_t>(letter - 1)];
    Series forced = prepend_letter(0, shuffle(di, value, n_ - 1), n_);
    if (!modified_) return forced;
    return prepend_letter(letter, value, n_) + forced;
  }

  const std::vector<Series>& c_;
  const VectorSeries& d_;
  const WordCodec& codec_;
  std::unordered_set<WordKey> suffixes_;
  int out_alphabet_;
  int n_;
  bool modified_;
  std::vector<std::vector<Term>> acc_;
};

// Same walk when every d_i is drift-only: values are polynomials in x0 and the
// shuffle reduces to binomial convolution of drift coefficients.
class DriftWalker {
 public:
  DriftWalker(const std::vector<Series>& c, const VectorSeries& d, int out_alphabet, int n)
      : c_(c),
        codec_(c.front().codec()),
        suffixes_(suffix_closure(c)),
        out_alphabet_(out_alphabet),
        n_(n),
        acc_(c.size(), std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)) {
    for (const Series& di : d.components()) {
      std::vector<double> coeffs = di.drift_coefficients();
      coeffs.resize(static_cast<std::size_t>(n) + 1, 0.0);
      d_.push_back(std::move(coeffs));
    }
    binom_.assign(static_cast<std::size_t>(n) + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= i; ++j) binom_[i][j] = detail::binomial(i, j);
    }
  }

  std::vector<Series> run() {
    std::vector<double> one(static_cast<std::size_t>(n_) + 1, 0.0);
    one[0] = 1.0;
    visit(WordKey{0}, one);
    std::vector<Series> out;
    for (const auto& coeffs : acc_) out.push_back(Series::drift(out_alphabet_, n_, coeffs));
    return out;
  }

 private:
  void visit(WordKey s, const std::vector<double>& value) {
    for (std::size_t k = 0; k < c_.size(); ++k) {
      const double w = c_[k].coeff(s);
      if (w == 0.0) continue;
      for (int j = 0; j <= n_; ++j) acc_[k][j] += w * value[j];
    }
    if (n_ == 0) return;
    for (int letter = 0; letter < codec_.alphabet_size(); ++letter) {
      const WordKey child = codec_.prepend(letter, s);
      if (!suffixes_.contains(child)) continue;
      std::vector<double> next(static_cast<std::size_t>(n_) + 1, 0.0);
      bool nonzero = false;
      if (letter == 0) {
        for (int j = 0; j < n_; ++j) next[j + 1] = value[j];
      } else {
        const std::vector<double>& di = d_[static_cast<std::size_t>(letter - 1)];
        for (int p = 0; p < n_; ++p) {
          if (di[p] == 0.0) continue;
          for (int q = 0; p + q < n_; ++q) {
            if (value[q] != 0.0) next[p + q + 1] += binom_[p + q][p] * di[p] * value[q];
          }
        }
      }
      for (double v : next) nonzero = nonzero || std::abs(v) >= kDropTolerance;
      if (nonzero) visit(child, next);
    }
  }

  const std::vector<Series>& c_;
  const WordCodec& codec_;
  std::unordered_set<WordKey> suffixes_;
  int out_alphabet_;
  int n_;
  std::vector<std::vector<double>> d_;
  std::vector<std::vector<double>> binom_;
  std::vector<std::vector<double>> acc_;
};

bool all_drift(const VectorSeries& d) {
  return std::all_of(d.components().begin(), d.components().end(),
                     [](const Series& s) { return s.is_drift_only(); });
}

std::vector<Series> compose_impl(const std::vector<Series>& c, const VectorSeries& d, int n,
                                 bool modified, bool allow_fast) {
  check_shapes(c, d, modified);
  if (n < 0) throw std::invalid_argument("compose: negative truncation degree");
  const int out_alphabet = d.size() > 0 ? d.alphabet_size() : c.front().alphabet_size();
  if (!modified && allow_fast && all_drift(d)) return DriftWalker(c, d, out_alphabet, n).run();
  return SuffixWalker(c, d, out_alphabet, n, modified).run();
}

}  // namespace

Series compose(const Series& c, const VectorSeries& d, int n) {
  return compose_impl(components_of(c), d, n, false, true).front();
}

VectorSeries compose(const VectorSeries& c, const VectorSeries& d, int n) {
  return VectorSeries(compose_impl(c.components(), d, n, false, true));
}

Series modified_compose(const Series& c, const VectorSeries& d, int n) {
  return compose_impl(components_of(c), d, n, true, false).front();
}

VectorSeries modified_compose(const VectorSeries& c, const VectorSeries& d, int n) {
  return VectorSeries(compose_impl(c.components(), d, n, true, false));
}

DeltaSeries compose(const DeltaSeries& c, const DeltaSeries& d, int n) {
  return DeltaSeries{truncate(d.base, n) + modified_compose(c.base, d.base, n)};
}

namespace {

void check_square(const VectorSeries& c, const char* op) {
  if (c.size() == 0 || c.size() != static_cast<std::size_t>(c.alphabet_size() - 1)) {
    throw std::invalid_argument(std::string(op) +
                                ": need one component per non-drift letter of the alphabet");
  }
}

template <class Step>
VectorSeries fixed_point(const VectorSeries& c, int n, Step step, const char* op) {
  check_square(c, op);
  if (n < 0) throw std::invalid_argument(std::string(op) + ": negative truncation degree");
  const int a = c.alphabet_size();
  VectorSeries e(c.size(), a, 0);
  // Iteration k fixes the degree-k part, so it only needs to carry degree k.
  for (int k = 0; k <= n; ++k) e = -step(c, e, k);
  const VectorSeries check = -step(c, e, n);
  const double scale = std::max(1.0, e.max_abs());
  if ((check - e).max_abs() > 1e-9 * scale) {
    throw std::logic_error(std::string(op) + ": fixed point did not settle after " +
                           std::to_string(n + 1) + " iterations");
  }
  return e;
}

}  // namespace

VectorSeries group_inverse(const VectorSeries& c, int n) {
  return fixed_point(
      c, n,
      [](const VectorSeries& cc, const VectorSeries& e, int k) {
        return modified_compose(cc, e, k);
      },
      "group_inverse");
}

VectorSeries natural_group_inverse(const VectorSeries& c, int n) {
  return fixed_point(
      c, n,
      [](const VectorSeries& cc, const VectorSeries& e, int k) { return compose(cc, e, k); },
      "natural_group_inverse");
}

VectorSeries feedback_product(const VectorSeries& c, const VectorSeries& d, int n) {
  const VectorSeries loop = compose(d, c, n);
  const VectorSeries e = group_inverse(-loop, n);
  return modified_compose(c, e, n);
}

namespace detail {

VectorSeries compose_general(const VectorSeries& c, const VectorSeries& d, int n) {
  return VectorSeries(compose_impl(c.components(), d, n, false, false));
}

}  // namespace detail

}  // namespace fliess

#include "fliess/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "detail/term_accumulator.hpp"
#include "fliess/error.hpp"

namespace fliess {

namespace {

bool key_less(const Term& a, const Term& b) { return a.key < b.key; }

// Merges two sorted term lists as alpha*a + beta*b.
std::vector<Term> merge_terms(std::span<const Term> a, double alpha, std::span<const Term> b,
                              double beta) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto push = [&out](WordKey k, double v) {
    if (std::abs(v) >= kDropTolerance) out.push_back({k, v});
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].key < b[j].key)) {
      push(a[i].key, alpha * a[i].coeff);
      ++i;
    } else if (i == a.size() || b[j].key < a[i].key) {
      push(b[j].key, beta * b[j].coeff);
      ++j;
    } else {
      push(a[i].key, alpha * a[i].coeff + beta * b[j].coeff);
      ++i;
      ++j;
    }
  }
  return out;
}

Series combine(const Series& a, double alpha, const Series& b, double beta) {
  require_same_alphabet(a, b, "series addition");
  const int n = std::max(a.max_degree(), b.max_degree());
  std::vector<Term> merged = merge_terms(a.terms(), alpha, b.terms(), beta);
  return Series::from_keys(a.alphabet_size(), n, std::move(merged));
}

}  // namespace

Series::Series(int alphabet_size, int max_degree) : codec_(alphabet_size), max_degree_(max_degree) {
  if (max_degree < 0) throw std::invalid_argument("Series: negative truncation degree");
  if (max_degree > codec_.max_length()) {
    throw std::invalid_argument("Series: truncation degree " + std::to_string(max_degree) +
                                " exceeds the supported word length " +
                                std::to_string(codec_.max_length()));
  }
}

Series Series::constant(int alphabet_size, int max_degree, double value) {
  Series s(alphabet_size, max_degree);
  if (std::abs(value) >= kDropTolerance) s.terms_.push_back({WordKey{0}, value});
  return s;
}

Series Series::word(int alphabet_size, int max_degree, const Word& w, double coeff) {
  return from_terms(alphabet_size, max_degree, {{w, coeff}});
}

Series Series::from_terms(int alphabet_size, int max_degree,
                          const std::vector<std::pair<Word, double>>& terms) {
  Series probe(alphabet_size, max_degree);
  std::vector<Term> keyed;
  keyed.reserve(terms.size());
  for (const auto& [w, c] : terms) {
    if (w.size() > max_degree) {
      throw std::invalid_argument("Series: word " + w.to_string() + " exceeds truncation degree " +
                                  std::to_string(max_degree));
    }
    keyed.push_back({probe.codec_.encode(w), c});
  }
  return from_keys(alphabet_size, max_degree, std::move(keyed));
}

Series Series::drift(int alphabet_size, int max_degree, std::span<const double> coeffs) {
  std::vector<Term> keyed;
  for (std::size_t k = 0; k < coeffs.size() && static_cast<int>(k) <= max_degree; ++k) {
    keyed.push_back({WordCodec::drift(static_cast<int>(k)), coeffs[k]});
  }
  return from_keys(alphabet_size, max_degree, std::move(keyed));
}

Series Series::from_keys(int alphabet_size, int max_degree, std::vector<Term> terms) {
  Series s(alphabet_size, max_degree);
  std::sort(terms.begin(), terms.end(), key_less);
  std::vector<Term>& out = s.terms_;
  out.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size();) {
    const WordKey k = terms[i].key;
    double sum = 0.0;
    for (; i < terms.size() && terms[i].key == k; ++i) sum += terms[i].coeff;
    if (WordCodec::length(k) > max_degree) continue;
    if (std::abs(sum) >= kDropTolerance) out.push_back({k, sum});
  }
  return s;
}

double Series::coeff(const Word& w) const {
  if (w.size() > max_degree_) return 0.0;
  return coeff(codec_.encode(w));
}

double Series::coeff(WordKey key) const noexcept {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), Term{key, 0.0}, key_less);
  return (it != terms_.end() && it->key == key) ? it->coeff : 0.0;
}

bool Series::is_drift_only() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return WordCodec::is_drift(t.key); });
}

std::vector<double> Series::drift_coefficients() const {
  std::vector<double> out(static_cast<std::size_t>(max_degree_) + 1, 0.0);
  for (const Term& t : terms_) {
    if (WordCodec::is_drift(t.key)) out[static_cast<std::size_t>(WordCodec::length(t.key))] = t.coeff;
  }
  return out;
}

int Series::degree() const noexcept {
  return terms_.empty() ? -1 : WordCodec::length(terms_.back().key);
}

std::vector<std::pair<Word, double>> Series::to_word_terms() const {
  std::vector<std::pair<Word, double>> out;
  out.reserve(terms_.size());
  for (const Term& t : terms_) out.emplace_back(codec_.decode(t.key), t.coeff);
  return out;
}

Series Series::operator-() const {
  Series s = *this;
  for (Term& t : s.terms_) t.coeff = -t.coeff;
  return s;
}

Series& Series::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const Term& t : terms_) {
    const double v = t.coeff * s;
    if (std::abs(v) >= kDropTolerance) out.push_back({t.key, v});
  }
  terms_ = std::move(out);
  return *this;
}

Series operator+(const Series& a, const Series& b) { return combine(a, 1.0, b, 1.0); }
Series operator-(const Series& a, const Series& b) { return combine(a, 1.0, b, -1.0); }
Series operator*(double s, const Series& a) {
  Series out = a;
  out *= s;
  return out;
}

bool Series::approx_equal(const Series& other, double tol) const {
  if (alphabet_size() != other.alphabet_size()) return false;
  const std::vector<Term> diff = merge_terms(terms_, 1.0, other.terms_, -1.0);
  return std::all_of(diff.begin(), diff.end(),
                     [tol](const Term& t) { return std::abs(t.coeff) <= tol; });
}

double Series::max_abs() const noexcept {
  double m = 0.0;
  for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

void require_same_alphabet(const Series& a, const Series& b, const char* op) {
  if (a.alphabet_size() != b.alphabet_size()) {
    throw std::invalid_argument(std::string(op) + ": alphabet mismatch (" +
                                std::to_string(a.alphabet_size()) + " vs " +
                                std::to_string(b.alphabet_size()) + ")");
  }
}

Series truncate(const Series& c, int n) {
  n = std::min(n, c.max_degree());
  std::vector<Term> kept;
  for (const Term& t : c.terms()) {
    if (WordCodec::length(t.key) > n) break;
    kept.push_back(t);
  }
  return Series::from_keys(c.alphabet_size(), n, std::move(kept));
}

Series relabel_degree(const Series& c, int n) {
  if (c.degree() > n) throw std::invalid_argument("relabel_degree: stored word longer than target");
  std::vector<Term> terms(c.terms().begin(), c.terms().end());
  return Series::from_keys(c.alphabet_size(), n, std::move(terms));
}

Series concat(const Series& c, const Series& d, int n) {
  require_same_alphabet(c, d, "concat");
  n = std::min(n, c.max_degree() + d.max_degree());
  const WordCodec& codec = c.codec();
  detail::TermAccumulator acc(codec, n, c.size() * d.size());
  for (const Term& tc : c.terms()) {
    const int lc = WordCodec::length(tc.key);
    if (lc > n) break;
    for (const Term& td : d.terms()) {
      if (lc + WordCodec::length(td.key) > n) break;
      acc.add(codec.concat(tc.key, td.key), tc.coeff * td.coeff);
    }
  }
  return std::move(acc).finish();
}

Series prepend_letter(int letter, const Series& c, int n) {
  if (letter < 0 || letter >= c.alphabet_size()) {
    throw std::invalid_argument("prepend_letter: letter outside alphabet");
  }
  n = std::min(n, c.max_degree() + 1);
  std::vector<Term> out;
  out.reserve(c.size());
  for (const Term& t : c.terms()) {
    if (WordCodec::length(t.key) + 1 > n) break;
    out.push_back({c.codec().prepend(letter, t.key), t.coeff});
  }
  return Series::from_keys(c.alphabet_size(), n, std::move(out));
}

Series shuffle(const Series& a, const Series& b, int n) {
  require_same_alphabet(a, b, "shuffle");
  n = std::min(n, a.max_degree() + b.max_degree());
  if (n < 0) n = 0;
  const WordCodec& codec = a.codec();
  const std::span<const Term> ta = a.terms();
  const std::span<const Term> tb = b.terms();
  detail::TermAccumulator acc(codec, n, ta.size() * tb.size());
  for (const Term& x : ta) {
    const int p = WordCodec::length(x.key);
    if (p > n) break;
    const std::uint64_t ru = WordCodec::rank(x.key);
    for (const Term& y : tb) {
      const int q = WordCodec::length(y.key);
      if (p + q > n) break;
      const double coeff = x.coeff * y.coeff;
      const std::uint64_t rv = WordCodec::rank(y.key);
      if (ru == 0 && rv == 0) {
        acc.add(WordCodec::drift(p + q), coeff * detail::binomial(p + q, p));
        continue;
      }
      const int len = p + q;
      auto emit = [&acc, len, coeff](std::uint64_t r) { acc.add(WordCodec::make(len, r), coeff); };
      detail::shuffle_words(codec, ru, p, rv, q, 0, emit);
    }
  }
  return std::move(acc).finish();
}

Series left_shift(const Word& prefix, const Series& c) {
  const int lp = prefix.size();
  const int n = std::max(0, c.max_degree() - lp);
  if (lp > c.max_degree()) return Series(c.alphabet_size(), n);
  const WordCodec& codec = c.codec();
  const WordKey pk = codec.encode(prefix);
  std::vector<Term> out;
  for (const Term& t : c.terms()) {
    if (codec.has_prefix(t.key, pk)) out.push_back({codec.drop_front(t.key, lp), t.coeff});
  }
  return Series::from_keys(c.alphabet_size(), n, std::move(out));
}

std::pair<Series, Series> natural_forced_split(const Series& c) {
  std::vector<Term> natural, forced;
  for (const Term& t : c.terms()) {
    (WordCodec::is_drift(t.key) ? natural : forced).push_back(t);
  }
  return {Series::from_keys(c.alphabet_size(), c.max_degree(), std::move(natural)),
          Series::from_keys(c.alphabet_size(), c.max_degree(), std::move(forced))};
}

Series natural_part(const Series& c) { return natural_forced_split(c).first; }

// ---------------------------------------------------------------------------
// VectorSeries

VectorSeries::VectorSeries(std::vector<Series> components) : components_(std::move(components)) {
  for (const Series& s : components_) {
    if (s.alphabet_size() != components_.front().alphabet_size() ||
        s.max_degree() != components_.front().max_degree()) {
      throw std::invalid_argument("VectorSeries: components disagree on alphabet or degree");
    }
  }
}

VectorSeries::VectorSeries(std::size_t count, int alphabet_size, int max_degree)
    : components_(count, Series(alphabet_size, max_degree)) {}

int VectorSeries::alphabet_size() const {
  if (components_.empty()) throw std::logic_error("VectorSeries: empty");
  return components_.front().alphabet_size();
}

int VectorSeries::max_degree() const {
  if (components_.empty()) throw std::logic_error("VectorSeries: empty");
  return components_.front().max_degree();
}

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": component count mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

VectorSeries operator+(const VectorSeries& a, const VectorSeries& b) {
  require_same_size(a.size(), b.size(), "vector series addition");
  std::vector<Series> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
  return VectorSeries(std::move(out));
}

VectorSeries operator-(const VectorSeries& a, const VectorSeries& b) {
  require_same_size(a.size(), b.size(), "vector series subtraction");
  std::vector<Series> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
  return VectorSeries(std::move(out));
}

VectorSeries operator*(double s, const VectorSeries& a) {
  std::vector<Series> out;
  for (const Series& c : a.components()) out.push_back(s * c);
  return VectorSeries(std::move(out));
}

double VectorSeries::max_abs() const noexcept {
  double m = 0.0;
  for (const Series& s : components_) m = std::max(m, s.max_abs());
  return m;
}

VectorSeries truncate(const VectorSeries& c, int n) {
  std::vector<Series> out;
  for (const Series& s : c.components()) out.push_back(truncate(s, n));
  return VectorSeries(std::move(out));
}

VectorSeries left_shift(const Word& prefix, const VectorSeries& c) {
  std::vector<Series> out;
  for (const Series& s : c.components()) out.push_back(left_shift(prefix, s));
  return VectorSeries(std::move(out));
}

VectorSeries shuffle(const VectorSeries& c, const Series& d, int n) {
  std::vector<Series> out;
  for (const Series& s : c.components()) out.push_back(shuffle(s, d, n));
  return VectorSeries(std::move(out));
}

// ---------------------------------------------------------------------------
// MatrixSeries

MatrixSeries::MatrixSeries(std::size_t dim, std::vector<Series> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim * dim) throw std::invalid_argument("MatrixSeries: entry count != dim^2");
  for (const Series& s : entries_) {
    if (s.alphabet_size() != entries_.front().alphabet_size() ||
        s.max_degree() != entries_.front().max_degree()) {
      throw std::invalid_argument("MatrixSeries: entries disagree on alphabet or degree");
    }
  }
}

MatrixSeries MatrixSeries::identity(std::size_t dim, int alphabet_size, int max_degree) {
  std::vector<Series> e;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      e.push_back(Series::constant(alphabet_size, max_degree, i == j ? 1.0 : 0.0));
    }
  }
  return MatrixSeries(dim, std::move(e));
}

MatrixSeries MatrixSeries::zero(std::size_t dim, int alphabet_size, int max_degree) {
  return MatrixSeries(dim, std::vector<Series>(dim * dim, Series(alphabet_size, max_degree)));
}

int MatrixSeries::alphabet_size() const {
  if (entries_.empty()) throw std::logic_error("MatrixSeries: empty");
  return entries_.front().alphabet_size();
}

int MatrixSeries::max_degree() const {
  if (entries_.empty()) throw std::logic_error("MatrixSeries: empty");
  return entries_.front().max_degree();
}

MatrixSeries operator+(const MatrixSeries& a, const MatrixSeries& b) {
  require_same_size(a.dim(), b.dim(), "matrix series addition");
  std::vector<Series> e;
  for (std::size_t k = 0; k < a.entries().size(); ++k) e.push_back(a.entries()[k] + b.entries()[k]);
  return MatrixSeries(a.dim(), std::move(e));
}

MatrixSeries operator-(const MatrixSeries& a, const MatrixSeries& b) {
  require_same_size(a.dim(), b.dim(), "matrix series subtraction");
  std::vector<Series> e;
  for (std::size_t k = 0; k < a.entries().size(); ++k) e.push_back(a.entries()[k] - b.entries()[k]);
  return MatrixSeries(a.dim(), std::move(e));
}

std::vector<double> MatrixSeries::constant_matrix() const {
  std::vector<double> out;
  for (const Series& s : entries_) out.push_back(s.constant_term());
  return out;
}

namespace {

// Sum of shuffle products sum_k a_k (shuffle) b_k, all at degree n.
Series shuffle_dot(const std::vector<const Series*>& lhs, const std::vector<const Series*>& rhs,
                   int n) {
  Series acc(lhs.front()->alphabet_size(),
             std::min(n, lhs.front()->max_degree() + rhs.front()->max_degree()));
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (lhs[k]->is_zero() || rhs[k]->is_zero()) continue;
    acc = acc + shuffle(*lhs[k], *rhs[k], n);
  }
  return acc;
}

// Right-multiplies a matrix series by a constant matrix.
MatrixSeries scale_right(const MatrixSeries& s, const Eigen::MatrixXd& m) {
  const std::size_t dim = s.dim();
  std::vector<Series> e;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Series acc(s.alphabet_size(), s.max_degree());
      for (std::size_t k = 0; k < dim; ++k) {
        const double w = m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        if (w != 0.0) acc = acc + w * s(i, k);
      }
      e.push_back(std::move(acc));
    }
  }
  return MatrixSeries(dim, std::move(e));
}

MatrixSeries scale_left(const Eigen::MatrixXd& m, const MatrixSeries& s) {
  const std::size_t dim = s.dim();
  std::vector<Series> e;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Series acc(s.alphabet_size(), s.max_degree());
      for (std::size_t k = 0; k < dim; ++k) {
        const double w = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        if (w != 0.0) acc = acc + w * s(k, j);
      }
      e.push_back(std::move(acc));
    }
  }
  return MatrixSeries(dim, std::move(e));
}

}  // namespace

MatrixSeries shuffle(const MatrixSeries& a, const MatrixSeries& b, int n) {
  require_same_size(a.dim(), b.dim(), "matrix shuffle");
  const std::size_t dim = a.dim();
  std::vector<Series> e;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      std::vector<const Series*> lhs, rhs;
      for (std::size_t k = 0; k < dim; ++k) {
        lhs.push_back(&a(i, k));
        rhs.push_back(&b(k, j));
      }
      e.push_back(shuffle_dot(lhs, rhs, n));
    }
  }
  return MatrixSeries(dim, std::move(e));
}

VectorSeries shuffle(const MatrixSeries& a, const VectorSeries& v, int n) {
  require_same_size(a.dim(), v.size(), "matrix-vector shuffle");
  std::vector<Series> out;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    std::vector<const Series*> lhs, rhs;
    for (std::size_t k = 0; k < a.dim(); ++k) {
      lhs.push_back(&a(i, k));
      rhs.push_back(&v[k]);
    }
    out.push_back(shuffle_dot(lhs, rhs, n));
  }
  return VectorSeries(std::move(out));
}

MatrixSeries shuffle_inverse(const MatrixSeries& c, int n) {
  const std::size_t dim = c.dim();
  const auto d = static_cast<Eigen::Index>(dim);
  const std::vector<double> flat = c.constant_matrix();
  Eigen::MatrixXd a0(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a0(i, j) = flat[static_cast<std::size_t>(i * d + j)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a0);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0 || sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    throw SingularityError("shuffle_inverse: constant term matrix is singular");
  }
  const Eigen::MatrixXd a0_inv = a0.inverse();

  const int alphabet = c.alphabet_size();
  const MatrixSeries c_trunc = MatrixSeries(dim, [&] {
    std::vector<Series> e;
    for (const Series& s : c.entries()) e.push_back(truncate(s, n));
    return e;
  }());
  // C' = I - A0^{-1} C is proper; drop the (numerically) cancelled constant term.
  const MatrixSeries scaled = scale_left(a0_inv, c_trunc);
  std::vector<Series> proper;
  for (const Series& s : scaled.entries()) {
    proper.push_back(Series::constant(alphabet, s.max_degree(), s.constant_term()) - s);
  }
  const int deg = c_trunc.max_degree();
  const MatrixSeries c_prime(dim, std::move(proper));

  MatrixSeries sum = MatrixSeries::identity(dim, alphabet, n);
  MatrixSeries power = MatrixSeries::identity(dim, alphabet, deg);
  for (int k = 1; k <= n; ++k) {
    power = shuffle(power, c_prime, n);
    if (std::all_of(power.entries().begin(), power.entries().end(),
                    [](const Series& s) { return s.is_zero(); })) {
      break;
    }
    std::vector<Series> e;
    for (std::size_t idx = 0; idx < dim * dim; ++idx) {
      e.push_back(relabel_degree(sum.entries()[idx] + power.entries()[idx], n));
    }
    sum = MatrixSeries(dim, std::move(e));
  }
  return scale_right(sum, a0_inv);
}

Series shuffle_inverse(const Series& c, int n) {
  return shuffle_inverse(MatrixSeries(1, {c}), n)(0, 0);
}

}  // namespace fliess

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fliess/word.hpp"

namespace fliess {

/// Coefficients whose magnitude falls below this after arithmetic are dropped.
inline constexpr double kDropTolerance = 1e-15;

/// One stored (word, coefficient) pair.
struct Term {
  WordKey key;
  double coeff;
};

/// Truncated noncommutative formal power series over {x0, ..., x_{a-1}}.
///
/// Terms are kept sorted by WordKey (degree, then lexicographic) and never hold
/// a zero coefficient or a word longer than max_degree(). A Series is a
/// polynomial in the words: anything beyond max_degree() is treated as zero.
class Series {
 public:
  Series() : Series(1, 0) {}
  Series(int alphabet_size, int max_degree);

  static Series constant(int alphabet_size, int max_degree, double value);
  static Series word(int alphabet_size, int max_degree, const Word& w, double coeff = 1.0);
  static Series from_terms(int alphabet_size, int max_degree,
                           const std::vector<std::pair<Word, double>>& terms);
  /// Drift-only series sum_k coeffs[k] x0^k.
  static Series drift(int alphabet_size, int max_degree, std::span<const double> coeffs);
  /// Builds from unsorted keyed terms; duplicates are summed, words beyond
  /// `max_degree` and near-zero sums are dropped.
  static Series from_keys(int alphabet_size, int max_degree, std::vector<Term> terms);

  int alphabet_size() const noexcept { return codec_.alphabet_size(); }
  int max_degree() const noexcept { return max_degree_; }
  const WordCodec& codec() const noexcept { return codec_; }

  std::span<const Term> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  double coeff(const Word& w) const;
  double coeff(WordKey key) const noexcept;
  double constant_term() const noexcept { return coeff(WordKey{0}); }
  bool is_proper() const noexcept { return constant_term() == 0.0; }
  /// True when every stored word is a power of x0.
  bool is_drift_only() const noexcept;
  /// Coefficients (c, x0^k) for k = 0..max_degree().
  std::vector<double> drift_coefficients() const;
  /// Highest stored word length, or -1 for the zero series.
  int degree() const noexcept;

  std::vector<std::pair<Word, double>> to_word_terms() const;

  Series operator-() const;
  Series& operator*=(double s);
  friend Series operator+(const Series& a, const Series& b);
  friend Series operator-(const Series& a, const Series& b);
  friend Series operator*(double s, const Series& a);
  friend Series operator*(const Series& a, double s) { return s * a; }

  /// Coefficient-wise equality up to `tol` (absolute).
  bool approx_equal(const Series& other, double tol) const;
  /// Largest absolute coefficient.
  double max_abs() const noexcept;

 private:
  WordCodec codec_;
  int max_degree_;
  std::vector<Term> terms_;
};

Series truncate(const Series& c, int n);
/// Same terms, new truncation label; throws if a stored word is longer than `n`.
Series relabel_degree(const Series& c, int n);
/// Catenation product, truncated at `n` (capped by the sum of operand degrees).
Series concat(const Series& c, const Series& d, int n);
/// Prefixes every word with `letter` (degree label grows by one, capped at `n`).
Series prepend_letter(int letter, const Series& c, int n);

/// Checks that two series share an alphabet; throws std::invalid_argument otherwise.
void require_same_alphabet(const Series& a, const Series& b, const char* op);

/// Shuffle product truncated at `n`, capped by deg(a) + deg(b).
Series shuffle(const Series& a, const Series& b, int n);

/// Left shift (prefix)^{-1}(c): keeps words starting with `prefix`, with the
/// prefix removed.
Series left_shift(const Word& prefix, const Series& c);

/// c = c_N + c_F with c_N the drift-only part.
std::pair<Series, Series> natural_forced_split(const Series& c);
Series natural_part(const Series& c);

/// Fixed-length list of series sharing an alphabet and truncation degree.
class VectorSeries {
 public:
  VectorSeries() = default;
  explicit VectorSeries(std::vector<Series> components);
  VectorSeries(std::size_t count, int alphabet_size, int max_degree);

  std::size_t size() const noexcept { return components_.size(); }
  const Series& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<Series>& components() const noexcept { return components_; }
  int alphabet_size() const;
  int max_degree() const;

  friend VectorSeries operator+(const VectorSeries& a, const VectorSeries& b);
  friend VectorSeries operator-(const VectorSeries& a, const VectorSeries& b);
  friend VectorSeries operator*(double s, const VectorSeries& a);
  VectorSeries operator-() const { return -1.0 * *this; }

  double max_abs() const noexcept;

 private:
  std::vector<Series> components_;
};

VectorSeries truncate(const VectorSeries& c, int n);
VectorSeries left_shift(const Word& prefix, const VectorSeries& c);
/// Componentwise shuffle against one scalar series.
VectorSeries shuffle(const VectorSeries& c, const Series& d, int n);

/// Square matrix of series (row-major).
class MatrixSeries {
 public:
  MatrixSeries() = default;
  MatrixSeries(std::size_t dim, std::vector<Series> entries);
  static MatrixSeries identity(std::size_t dim, int alphabet_size, int max_degree);
  static MatrixSeries zero(std::size_t dim, int alphabet_size, int max_degree);

  std::size_t dim() const noexcept { return dim_; }
  const Series& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  const std::vector<Series>& entries() const noexcept { return entries_; }
  int alphabet_size() const;
  int max_degree() const;

  friend MatrixSeries operator+(const MatrixSeries& a, const MatrixSeries& b);
  friend MatrixSeries operator-(const MatrixSeries& a, const MatrixSeries& b);

  /// (C, empty word) as a row-major dim x dim array.
  std::vector<double> constant_matrix() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Series> entries_;
};

/// Matrix product with the shuffle as scalar multiplication.
MatrixSeries shuffle(const MatrixSeries& a, const MatrixSeries& b, int n);
VectorSeries shuffle(const MatrixSeries& a, const VectorSeries& v, int n);

/// C^{shuffle -1} = (C')^{shuffle *} (C, empty)^{-1} with C' = I - (C, empty)^{-1} C.
/// Throws SingularityError when the constant term is numerically singular.
MatrixSeries shuffle_inverse(const MatrixSeries& c, int n);
Series shuffle_inverse(const Series& c, int n);

}  // namespace fliess

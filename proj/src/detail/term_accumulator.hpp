#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fliess/series.hpp"

namespace fliess::detail {

// Collects (word, coefficient) contributions and produces a canonical Series.
// Uses a dense buffer indexed by WordCodec::dense_index when the word space is
// small relative to the expected number of contributions, sort-merge otherwise.
class TermAccumulator {
 public:
  TermAccumulator(const WordCodec& codec, int max_degree, std::size_t expected)
      : codec_(&codec), max_degree_(max_degree) {
    const std::uint64_t words = codec.word_count(max_degree);
    dense_ = words <= 4096 || (words <= (std::uint64_t{1} << 22) && words <= 8 * expected);
    if (dense_) {
      buffer_.assign(static_cast<std::size_t>(words), 0.0);
    } else {
      terms_.reserve(expected);
    }
  }

  void add(WordKey key, double c) {
    if (dense_) {
      buffer_[static_cast<std::size_t>(codec_->dense_index(key))] += c;
    } else {
      terms_.push_back({key, c});
    }
  }

  Series finish() && {
    const int a = codec_->alphabet_size();
    if (!dense_) return Series::from_keys(a, max_degree_, std::move(terms_));
    std::vector<Term> out;
    std::size_t idx = 0;
    for (int len = 0; len <= max_degree_; ++len) {
      const std::uint64_t count = codec_->power(len);
      for (std::uint64_t r = 0; r < count; ++r, ++idx) {
        const double v = buffer_[idx];
        if (std::abs(v) >= kDropTolerance) out.push_back({WordCodec::make(len, r), v});
      }
    }
    // Already sorted and duplicate-free.
    return Series::from_keys(a, max_degree_, std::move(out));
  }

 private:
  const WordCodec* codec_;
  int max_degree_;
  bool dense_ = false;
  std::vector<double> buffer_;
  std::vector<Term> terms_;
};

// Enumerates every interleaving of two words given as (rank, length) pairs and
// calls emit(rank) with the rank of the resulting word of length p + q.
template <class Emit>
void shuffle_words(const WordCodec& codec, std::uint64_t ru, int p, std::uint64_t rv, int q,
                   std::uint64_t prefix, Emit& emit) {
  if (p == 0) {
    emit(prefix * codec.power(q) + rv);
    return;
  }
  if (q == 0) {
    emit(prefix * codec.power(p) + ru);
    return;
  }
  const std::uint64_t a = static_cast<std::uint64_t>(codec.alphabet_size());
  const std::uint64_t pu = codec.power(p - 1);
  const std::uint64_t pv = codec.power(q - 1);
  shuffle_words(codec, ru % pu, p - 1, rv, q, prefix * a + ru / pu, emit);
  shuffle_words(codec, ru, p, rv % pv, q - 1, prefix * a + rv / pv, emit);
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace fliess::detail

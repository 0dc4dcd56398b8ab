#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace fliess {

/// A word over the alphabet {x0, ..., xm}. Letter 0 is the drift letter x0.
/// The first stored letter is the leftmost one, i.e. the outermost integral of
/// the corresponding iterated integral.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters);
  explicit Word(std::vector<int> letters);

  static Word drift_power(int k);

  const std::vector<int>& letters() const noexcept { return letters_; }
  int size() const noexcept { return static_cast<int>(letters_.size()); }
  bool empty() const noexcept { return letters_.empty(); }
  int operator[](int i) const { return letters_[static_cast<std::size_t>(i)]; }
  int max_letter() const noexcept;

  /// Catenation `*this` followed by `other`.
  Word operator+(const Word& other) const;

  /// "x0x1x2"; the empty word prints as "1".
  std::string to_string() const;

  auto operator<=>(const Word&) const = default;

 private:
  std::vector<int> letters_;
};

/// Packed word key: length in the top 8 bits, base-`alphabet` rank of the
/// letters (leftmost most significant) in the low 56 bits. Sorting keys gives
/// degree-then-lexicographic order, and drift words x0^k have rank 0.
using WordKey = std::uint64_t;

class WordCodec {
 public:
  static constexpr int kRankBits = 56;

  explicit WordCodec(int alphabet_size);

  int alphabet_size() const noexcept { return alphabet_; }
  /// Longest word length representable for this alphabet.
  int max_length() const noexcept { return max_length_; }

  static int length(WordKey key) noexcept { return static_cast<int>(key >> kRankBits); }
  static std::uint64_t rank(WordKey key) noexcept { return key & kRankMask; }
  static WordKey make(int length, std::uint64_t rank) noexcept {
    return (static_cast<std::uint64_t>(length) << kRankBits) | rank;
  }
  static WordKey drift(int k) noexcept { return make(k, 0); }
  static bool is_drift(WordKey key) noexcept { return rank(key) == 0; }

  std::uint64_t power(int k) const { return powers_[static_cast<std::size_t>(k)]; }

  WordKey encode(const Word& w) const;
  Word decode(WordKey key) const;

  WordKey prepend(int letter, WordKey key) const noexcept {
    const int len = length(key);
    return make(len + 1, static_cast<std::uint64_t>(letter) * powers_[len] + rank(key));
  }
  WordKey append(WordKey key, int letter) const noexcept {
    return make(length(key) + 1, rank(key) * alphabet_ + static_cast<std::uint64_t>(letter));
  }
  WordKey concat(WordKey a, WordKey b) const noexcept {
    const int lb = length(b);
    return make(length(a) + lb, rank(a) * powers_[lb] + rank(b));
  }
  int first_letter(WordKey key) const noexcept {
    const int len = length(key);
    return static_cast<int>(rank(key) / powers_[len - 1]);
  }
  /// Drops the first `k` letters.
  WordKey drop_front(WordKey key, int k) const noexcept {
    const int len = length(key) - k;
    return make(len, rank(key) % powers_[len]);
  }
  /// True when `prefix` is a prefix of `key`.
  bool has_prefix(WordKey key, WordKey prefix) const noexcept {
    const int lk = length(key);
    const int lp = length(prefix);
    return lk >= lp && rank(key) / powers_[lk - lp] == rank(prefix);
  }
  /// Number of leading x0 letters.
  int leading_drift(WordKey key) const noexcept;

  /// Number of words of length <= n, and the dense index of a key in that range.
  std::uint64_t word_count(int n) const { return offsets_[static_cast<std::size_t>(n) + 1]; }
  std::uint64_t dense_index(WordKey key) const noexcept {
    return offsets_[length(key)] + rank(key);
  }

 private:
  static constexpr std::uint64_t kRankMask = (std::uint64_t{1} << kRankBits) - 1;

  int alphabet_;
  int max_length_;
  std::vector<std::uint64_t> powers_;
  std::vector<std::uint64_t> offsets_;
};

}  // namespace fliess

#include "fliess/word.hpp"

#include <stdexcept>

namespace fliess {

Word::Word(std::initializer_list<int> letters) : letters_(letters) {
  for (int l : letters_) {
    if (l < 0) throw std::invalid_argument("Word: negative letter index");
  }
}

Word::Word(std::vector<int> letters) : letters_(std::move(letters)) {
  for (int l : letters_) {
    if (l < 0) throw std::invalid_argument("Word: negative letter index");
  }
}

Word Word::drift_power(int k) {
  if (k < 0) throw std::invalid_argument("Word::drift_power: negative exponent");
  return Word(std::vector<int>(static_cast<std::size_t>(k), 0));
}

int Word::max_letter() const noexcept {
  int m = -1;
  for (int l : letters_) m = l > m ? l : m;
  return m;
}

Word Word::operator+(const Word& other) const {
  std::vector<int> out = letters_;
  out.insert(out.end(), other.letters_.begin(), other.letters_.end());
  return Word(std::move(out));
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (int l : letters_) s += "x" + std::to_string(l);
  return s;
}

WordCodec::WordCodec(int alphabet_size) : alphabet_(alphabet_size) {
  if (alphabet_size < 1) throw std::invalid_argument("WordCodec: alphabet size must be >= 1");
  powers_.push_back(1);
  offsets_.push_back(0);
  // Keep a^len within the rank bits; the unary alphabet is capped at 255 letters.
  const std::uint64_t limit = std::uint64_t{1} << kRankBits;
  max_length_ = 0;
  while (max_length_ < 255) {
    const std::uint64_t p = powers_.back();
    offsets_.push_back(offsets_.back() + p);
    if (alphabet_ > 1 && p > (limit - 1) / static_cast<std::uint64_t>(alphabet_)) break;
    powers_.push_back(p * static_cast<std::uint64_t>(alphabet_));
    ++max_length_;
  }
  offsets_.push_back(offsets_.back() + powers_.back());
}

WordKey WordCodec::encode(const Word& w) const {
  if (w.size() > max_length_) throw std::invalid_argument("WordCodec: word too long");
  std::uint64_t r = 0;
  for (int l : w.letters()) {
    if (l >= alphabet_) {
      throw std::invalid_argument("WordCodec: letter x" + std::to_string(l) +
                                  " outside alphabet of size " + std::to_string(alphabet_));
    }
    r = r * static_cast<std::uint64_t>(alphabet_) + static_cast<std::uint64_t>(l);
  }
  return make(w.size(), r);
}

Word WordCodec::decode(WordKey key) const {
  const int len = length(key);
  std::vector<int> letters(static_cast<std::size_t>(len));
  std::uint64_t r = rank(key);
  for (int i = len - 1; i >= 0; --i) {
    letters[static_cast<std::size_t>(i)] = static_cast<int>(r % alphabet_);
    r /= alphabet_;
  }
  return Word(std::move(letters));
}

int WordCodec::leading_drift(WordKey key) const noexcept {
  const int len = length(key);
  const std::uint64_t r = rank(key);
  int k = 0;
  while (k < len && r / powers_[len - 1 - k] == 0) ++k;
  return k;
}

}  // namespace fliess

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnotasym {

/// Bitstring for `value` over `num_bits` bits, bit 0 rightmost.
inline std::string to_bitstring(std::uint64_t value, int num_bits) {
  std::string s(static_cast<std::size_t>(num_bits), '0');
  for (int b = 0; b < num_bits; ++b)
    if ((value >> b) & 1U) s[static_cast<std::size_t>(num_bits - 1 - b)] = '1';
  return s;
}

inline std::uint64_t from_bitstring(const std::string& bits) {
  std::uint64_t v = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("bitstring contains '" + std::string(1, ch) + "'");
    v = (v << 1) | static_cast<std::uint64_t>(ch == '1');
  }
  return v;
}

/// Shot histogram keyed by bitstring.
class Counts {
 public:
  Counts() = default;
  explicit Counts(int num_bits) : num_bits_(num_bits) {}
  Counts(int num_bits, const std::map<std::string, std::uint64_t>& histogram) : num_bits_(num_bits) {
    for (const auto& [k, v] : histogram) add(k, v);
  }

  void add(const std::string& key, std::uint64_t n = 1) {
    if (static_cast<int>(key.size()) != num_bits_) throw std::invalid_argument("bitstring length mismatch");
    from_bitstring(key);
    if (n == 0) return;
    histogram_[key] += n;
    total_ += n;
  }

  std::uint64_t operator[](const std::string& key) const {
    auto it = histogram_.find(key);
    return it == histogram_.end() ? 0 : it->second;
  }

  int num_bits() const noexcept { return num_bits_; }
  std::uint64_t total() const noexcept { return total_; }
  const std::map<std::string, std::uint64_t>& histogram() const noexcept { return histogram_; }

  /// Counts indexed by outcome value (length 2^num_bits).
  std::vector<std::uint64_t> dense() const {
    std::vector<std::uint64_t> out(std::size_t{1} << num_bits_, 0);
    for (const auto& [k, v] : histogram_) out[from_bitstring(k)] = v;
    return out;
  }

  Counts& operator+=(const Counts& other) {
    if (other.num_bits_ != num_bits_) throw std::invalid_argument("merging counts of different widths");
    for (const auto& [k, v] : other.histogram_) add(k, v);
    return *this;
  }

  friend bool operator==(const Counts&, const Counts&) = default;

 private:
  int num_bits_ = 0;
  std::map<std::string, std::uint64_t> histogram_;
  std::uint64_t total_ = 0;
};

/// Probability vector over 2^num_bits outcomes, outcome bit j = clbit j.
struct Distribution {
  int num_bits = 0;
  std::vector<double> probs;

  double operator[](const std::string& key) const { return probs.at(from_bitstring(key)); }

  static Distribution from_counts(const Counts& c) {
    if (c.total() == 0) throw std::invalid_argument("counts are empty");
    Distribution d{c.num_bits(), std::vector<double>(std::size_t{1} << c.num_bits(), 0.0)};
    for (const auto& [k, v] : c.histogram())
      d.probs[from_bitstring(k)] = static_cast<double>(v) / static_cast<double>(c.total());
    return d;
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

}  // namespace cnotasym

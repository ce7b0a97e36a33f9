#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace stratint {

// Multi-index alpha = (alpha_1, ..., alpha_q) with entries in {1, 2}. The
// family G_n collects all alpha of order sum(alpha) = n; |G_n| follows the
// Fibonacci recurrence |G_n| = |G_{n-1}| + |G_{n-2}| (1, 2, 3, 5, 8, 13, ...).
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    if (entries_.empty())
      throw std::invalid_argument("MultiIndex: needs at least one entry");
    for (int e : entries_)
      if (e != 1 && e != 2)
        throw std::invalid_argument("MultiIndex: entries must be 1 or 2");
  }

  const std::vector<int>& entries() const { return entries_; }
  std::size_t length() const { return entries_.size(); }  // q

  int order() const {  // n = sum of entries
    return std::accumulate(entries_.begin(), entries_.end(), 0);
  }

  bool operator==(const MultiIndex& other) const { return entries_ == other.entries_; }
  bool operator<(const MultiIndex& other) const { return entries_ < other.entries_; }

 private:
  std::vector<int> entries_;
};

// Weight 2^{q - n} attached to alpha in the order-n sum: each 2-entry replaces
// two stochastic factors by one time integral and contributes a factor 1/2.
inline double weight(const MultiIndex& alpha) {
  return std::ldexp(1.0, static_cast<int>(alpha.length()) - alpha.order());
}

// All of G_n in lexicographic order (1-prefixed block before 2-prefixed block,
// recursively). Built bottom-up from G_{n-1} and G_{n-2}.
inline std::vector<MultiIndex> enumerate_gn(int n) {
  if (n < 1) throw std::invalid_argument("enumerate_gn: n must be >= 1");
  std::vector<std::vector<std::vector<int>>> table(static_cast<std::size_t>(n) + 1);
  table[0] = {{}};
  if (n >= 1) table[1] = {{1}};
  for (int k = 2; k <= n; ++k) {
    auto& out = table[static_cast<std::size_t>(k)];
    for (const auto& tail : table[static_cast<std::size_t>(k - 1)]) {
      std::vector<int> e{1};
      e.insert(e.end(), tail.begin(), tail.end());
      out.push_back(std::move(e));
    }
    for (const auto& tail : table[static_cast<std::size_t>(k - 2)]) {
      std::vector<int> e{2};
      e.insert(e.end(), tail.begin(), tail.end());
      out.push_back(std::move(e));
    }
  }
  std::vector<MultiIndex> result;
  result.reserve(table[static_cast<std::size_t>(n)].size());
  for (auto& e : table[static_cast<std::size_t>(n)]) result.emplace_back(std::move(e));
  return result;
}

}  // namespace stratint

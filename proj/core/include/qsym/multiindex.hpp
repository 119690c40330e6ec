#ifndef QSYM_MULTIINDEX_HPP
#define QSYM_MULTIINDEX_HPP

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qsym/errors.hpp"

namespace qsym {

/// Derivative multiindex alpha = (alpha_1, ..., alpha_n) over the independent
/// variables of a context.  |alpha| == 0 denotes the dependent variable itself.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int n) : counts_(static_cast<size_t>(n), 0) {
    if (n < 0) throw math_error("MultiIndex: negative dimension");
  }
  MultiIndex(std::initializer_list<int> counts) : counts_(counts) {
    for (int c : counts_)
      if (c < 0) throw math_error("MultiIndex: negative entry");
  }

  static MultiIndex unit(int n, int i) {
    MultiIndex m(n);
    m.counts_.at(static_cast<size_t>(i)) = 1;
    return m;
  }

  int size() const { return static_cast<int>(counts_.size()); }
  int operator[](int i) const { return counts_.at(static_cast<size_t>(i)); }

  int order() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }
  bool is_zero() const { return order() == 0; }

  /// Componentwise sum.
  MultiIndex plus(const MultiIndex& o) const {
    check_same_size(o);
    MultiIndex r = *this;
    for (int i = 0; i < size(); ++i) r.counts_[static_cast<size_t>(i)] += o[i];
    return r;
  }
  MultiIndex plus(int i) const {
    MultiIndex r = *this;
    r.counts_.at(static_cast<size_t>(i)) += 1;
    return r;
  }

  /// Componentwise difference; fails if any entry would go negative.
  bool minus(const MultiIndex& o, MultiIndex& out) const {
    check_same_size(o);
    out = *this;
    for (int i = 0; i < size(); ++i) {
      out.counts_[static_cast<size_t>(i)] -= o[i];
      if (out.counts_[static_cast<size_t>(i)] < 0) return false;
    }
    return true;
  }

  /// true iff this >= o componentwise.
  bool covers(const MultiIndex& o) const {
    check_same_size(o);
    for (int i = 0; i < size(); ++i)
      if (counts_[static_cast<size_t>(i)] < o[i]) return false;
    return true;
  }

  bool operator==(const MultiIndex& o) const { return counts_ == o.counts_; }
  bool operator!=(const MultiIndex& o) const { return !(*this == o); }

  /// Graded-lexicographic order: first by |alpha|, then lexicographically.
  bool grlex_less(const MultiIndex& o) const {
    check_same_size(o);
    if (order() != o.order()) return order() < o.order();
    return counts_ < o.counts_;
  }

  const std::vector<int>& counts() const { return counts_; }

 private:
  void check_same_size(const MultiIndex& o) const {
    if (counts_.size() != o.counts_.size())
      throw math_error("MultiIndex: dimension mismatch");
  }
  std::vector<int> counts_;
};

/// Enumerates all multiindices of dimension n with 1 <= |alpha| <= max_order,
/// in graded-lex order.
std::vector<MultiIndex> multiindices_up_to(int n, int max_order);

}  // namespace qsym

#endif

#include "qsym/multiindex.hpp"

#include <algorithm>

namespace qsym {

std::vector<MultiIndex> multiindices_up_to(int n, int max_order) {
  std::vector<MultiIndex> out;
  if (n <= 0 || max_order < 1) return out;
  // generate recursively in graded-lex order
  std::vector<int> counts(static_cast<size_t>(n), 0);
  std::function<void(int, int)> fill = [&](int pos, int remaining) {
    if (pos == n - 1) {
      counts[static_cast<size_t>(pos)] = remaining;
      MultiIndex m(n);
      MultiIndex acc = m;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < counts[static_cast<size_t>(i)]; ++k) acc = acc.plus(i);
      out.push_back(acc);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[static_cast<size_t>(pos)] = c;
      fill(pos + 1, remaining - c);
    }
  };
  for (int order = 1; order <= max_order; ++order) fill(0, order);
  // enforce graded-lex within each grade
  std::sort(out.begin(), out.end(),
            [](const MultiIndex& a, const MultiIndex& b) { return a.grlex_less(b); });
  return out;
}

}  // namespace qsym

#include <doctest.h>
#include <qsym/multiindex.hpp>

using namespace qsym;

TEST_CASE("multiindex arithmetic") {
  MultiIndex a{1, 2};
  MultiIndex b{0, 1};
  CHECK(a.order() == 3);
  CHECK(a.plus(b) == MultiIndex{1, 3});
  CHECK(a.plus(b) == b.plus(a));  // commutative
  CHECK(a.plus(0).order() == a.order() + 1);

  MultiIndex d;
  CHECK(a.minus(b, d));
  CHECK(d == MultiIndex{1, 1});
  CHECK_FALSE(b.minus(a, d));
  CHECK(a.covers(b));
  CHECK_FALSE(b.covers(a));
}

TEST_CASE("graded-lex enumeration") {
  auto all = multiindices_up_to(2, 2);
  REQUIRE(all.size() == 5);
  CHECK(all[0] == MultiIndex{0, 1});
  CHECK(all[1] == MultiIndex{1, 0});
  CHECK(all[2] == MultiIndex{0, 2});
  CHECK(all[3] == MultiIndex{1, 1});
  CHECK(all[4] == MultiIndex{2, 0});
  for (size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].grlex_less(all[i]));
}

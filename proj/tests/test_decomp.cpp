#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "decomp.hpp"
#include "parse.hpp"

using namespace stc;

namespace {

bool has_member(const Decomp& d, const char* src) {
  TypeRef t = parse_type(src);
  return std::any_of(d.members.begin(), d.members.end(),
                     [&](TypeRef m) { return type_equal(m, t); });
}

TypeRef intro_T() {
  return parse_type(
      "p&{success(int).q+{cont(int).end, stop.end},"
      "   error(bool).q+{cont(int).end, stop.end}}");
}

TypeRef intro_Tp() {
  return parse_type(
      "q+{cont(int).p&{success(int).end, error(bool).end},"
      "   stop.p&{success(int).end, error(bool).end}}");
}

}  // namespace

TEST_CASE("shape predicates") {
  // both intro types mix a wide branching with a wide selection
  CHECK_FALSE(is_so(intro_T()));
  CHECK_FALSE(is_si(intro_Tp()));
  CHECK(is_so(parse_type("p&{a(nat).q!l(int).end, b(bool).end}")));
  CHECK_FALSE(is_si(parse_type("p&{a(nat).end, b(bool).end}")));
  CHECK(is_si(parse_type("p+{a(nat).q?l(int).end, b(bool).end}")));
  CHECK_FALSE(is_so(parse_type("p+{a(nat).end, b(bool).end}")));
  CHECK(is_siso(parse_type("rec t . p?l(nat).q!m(bool).t")));
}

TEST_CASE("single-output decomposition of end") {
  Decomp d = decompose_so(t_end());
  CHECK(d.complete);
  REQUIRE(d.members.size() == 1);
  CHECK(d.members[0] == t_end());
}

TEST_CASE("single-output members of the optimised client type") {
  Decomp d = decompose_so(intro_Tp());
  CHECK(d.complete);
  CHECK(d.members.size() == 2);
  CHECK(has_member(d, "q!cont(int).p&{success(int).end, error(bool).end}"));
  CHECK(has_member(d, "q!stop.p&{success(int).end, error(bool).end}"));
}

TEST_CASE("single-input members of the plain client type") {
  Decomp d = decompose_si(intro_T());
  CHECK(d.complete);
  CHECK(d.members.size() == 2);
  CHECK(has_member(d,
                   "p?success(int).q+{cont(int).end, stop.end}"));
  CHECK(has_member(d, "p?error(bool).q+{cont(int).end, stop.end}"));
}

TEST_CASE("an already single-output single-input term decomposes to itself") {
  TypeRef w = parse_type("rec t . p?l(nat).q!m(bool).t");
  for (Decomp d : {decompose_so(w), decompose_si(w), decompose_siso(w)}) {
    CHECK(d.complete);
    REQUIRE(d.members.size() == 1);
    CHECK(type_equal(d.members[0], w));
  }
}

TEST_CASE("paths through a kept branching") {
  TypeRef u = parse_type("q!cont(int).p&{success(int).end, error(bool).end}");
  Decomp d = decompose_siso(u);
  CHECK(d.complete);
  CHECK(d.members.size() == 2);
  CHECK(has_member(d, "q!cont(int).p?success(int).end"));
  CHECK(has_member(d, "q!cont(int).p?error(bool).end"));
}

TEST_CASE("the triple-output loop is its own single-output decomposition") {
  TypeRef t = parse_type(
      "rec t1 . p&{l1(nat).p!l3(bool).p!l3(bool).p!l3(bool).t1,"
      "            l2(int).rec t2 . p!l3(bool).t2}");
  Decomp d = decompose_so(t);
  CHECK(d.complete);
  REQUIRE(d.members.size() == 1);
  CHECK(type_equal(d.members[0], t));
}

TEST_CASE("single-input members of the single-output loop grow as a family") {
  TypeRef t2 = parse_type(
      "rec t1 . p&{l1(nat).p!l3(bool).t1, l2(int).rec t2 . p!l3(bool).t2}");
  Decomp d = decompose_si(t2);
  CHECK_FALSE(d.complete);  // one member per unrolling depth
  CHECK(has_member(d, "rec t1 . p?l1(nat).p!l3(bool).t1"));
  CHECK(has_member(d, "p?l2(int).rec t . p!l3(bool).t"));
  CHECK(has_member(d,
                   "p?l1(nat).p!l3(bool).p?l2(int).rec t . p!l3(bool).t"));
  CHECK(has_member(d, "p?l1(nat).p!l3(bool).p?l1(nat).p!l3(bool)."
                      "p?l2(int).rec t . p!l3(bool).t"));
}

TEST_CASE("bounded enumeration of a branching loop") {
  TypeRef t = parse_type("rec t . p&{a(nat).t, b(nat).end}");
  Decomp d = decompose_siso(t, 2, 64);
  CHECK(has_member(d, "rec t . p?a(nat).t"));
  CHECK(has_member(d, "p?b(nat).end"));
  CHECK(has_member(d, "p?a(nat).p?b(nat).end"));
}

TEST_CASE("prefix factorizations") {
  SUBCASE("input context before an input from p") {
    TypeRef w = parse_type("q?l'(bool).p?l(nat).end");
    auto fs = split_prefix(w, "p", 'A');
    REQUIRE(fs.size() == 1);
    REQUIRE(fs[0].prefix.size() == 1);
    CHECK(fs[0].prefix[0] == PrefixItem{false, "q", "l'", Sort::Bool});
    CHECK(resolve(fs[0].residual)->peer == "p");
  }
  SUBCASE("the context must be nonempty") {
    TypeRef w = parse_type("p?l(nat).q?l'(bool).end");
    CHECK(split_prefix(w, "p", 'A').empty());
  }
  SUBCASE("input context before an output to q") {
    TypeRef w = parse_type("p?success(int).q!cont(int).end");
    auto fs = split_prefix(w, "q", 'B');
    REQUIRE(fs.size() == 1);
    REQUIRE(fs[0].prefix.size() == 1);
    CHECK(fs[0].prefix[0] == PrefixItem{false, "p", "success", Sort::Int});
    CHECK(resolve(fs[0].residual)->peer == "q");
    CHECK(resolve(fs[0].residual)->kind == TK::Select);
  }
  SUBCASE("an input context may not pass an output") {
    TypeRef w = parse_type("q!m(bool).p?l(nat).end");
    CHECK(split_prefix(w, "p", 'A').empty());
    CHECK(split_prefix(w, "p", 'B').empty());
  }
}

TEST_CASE("regular representative of a selection path") {
  TypeRef t = parse_type(
      "rec t1 . p+{l1(nat).t1, l2(int).rec t2 . p!l3(bool).t2}");
  TypeRef r = regularize_so(t, {"l1", "l2", "l3"}, {"l3"}, 3);
  CHECK(show_type(r) ==
        "p!l1(nat).p!l2(int).p!l3(bool).rec t1 . p!l3(bool).t1");

  TypeRef t2 = parse_type("rec t . p+{l1(nat).p?l4(int).t, l2(bool).t}");
  TypeRef r2 = regularize_so(t2, {"l1"}, {"l2"}, 1);
  CHECK(show_type(r2) == "p!l1(nat).p?l4(int).rec t1 . p!l2(bool).t1");

  TypeRef w = parse_type("rec t . p!a(nat).t");
  CHECK(type_equal(regularize_so(w, {}, {"a"}, 5), w));

  CHECK_THROWS_AS(regularize_so(t, {"l9"}, {}, 1), std::invalid_argument);
}

TEST_CASE("prefix wrap and head inspection") {
  std::vector<PrefixItem> pre{{false, "q", "a", Sort::Nat},
                              {true, "r", "b", Sort::Bool}};
  TypeRef t = wrap_prefix(pre, t_end());
  CHECK(show_type(t) == "q?a(nat).r!b(bool).end");
  auto h = head_item(t);
  REQUIRE(h.has_value());
  CHECK(*h == pre[0]);
  CHECK_FALSE(head_item(t_end()).has_value());
}

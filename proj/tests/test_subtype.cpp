#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gen.hpp"
#include "parse.hpp"
#include "subtype.hpp"

using namespace stc;

namespace {

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

TEST_CASE("the optimised client type refines the plain one") {
  SubtypeResult r = subtype(intro_Tp(), intro_T());
  REQUIRE(r.verdict == V3::Yes);
  REQUIRE(r.cert.has_value());
  CHECK_FALSE(r.used_family);
  CHECK(r.cert->cells.size() == 4);  // 2 x 2 grid
  CHECK(check_subtype_certificate(intro_Tp(), intro_T(), *r.cert));
}

TEST_CASE("the reverse direction is refuted on every cell") {
  SubtypeResult r = subtype(intro_T(), intro_Tp());
  REQUIRE(r.verdict == V3::No);
  REQUIRE(r.refuted.has_value());
  CHECK(r.refuted->rule == "n-UV-in-out-1");
  REQUIRE(r.refuted->sample.has_value());
  CHECK(leaf_rule(*r.refuted->sample) == "n-i-o-1");
  CHECK(check_negation_derivation(*r.refuted->sample));

  // the textbook witness pair is refuted by the same rule
  TypeRef u = parse_type(
      "p&{success(int).q!cont(int).end, error(bool).q!stop.end}");
  TypeRef v = parse_type(
      "q+{cont(int).p?success(int).end, stop.p?error(bool).end}");
  auto rule = uv_unrelated(u, v);
  REQUIRE(rule.has_value());
  CHECK(*rule == "n-UV-in-out-1");
}

TEST_CASE("forgotten actions are refuted by action-set rules") {
  SubtypeResult r = subtype(parse_type("rec t . p?l(nat).t"),
                            parse_type("q?l'(bool).rec t . p?l(nat).t"));
  REQUIRE(r.verdict == V3::No);
  CHECK(r.refuted->rule == "n-UV-inp-act-R");

  r = subtype(parse_type("rec t . p!l(nat).t"),
              parse_type("q!l'(bool).rec t . p!l(nat).t"));
  REQUIRE(r.verdict == V3::No);
  CHECK(r.refuted->rule == "n-UV-out-act-R");

  r = subtype(parse_type("p!l(nat).end"), parse_type("q?l(nat).end"));
  REQUIRE(r.verdict == V3::No);
  CHECK(r.refuted->rule == "n-UV-out-act");
}

TEST_CASE("unbounded anticipation needs the member family") {
  TypeRef t = parse_type(
      "rec t1 . p&{l1(nat).p!l3(bool).p!l3(bool).p!l3(bool).t1,"
      "            l2(int).rec t2 . p!l3(bool).t2}");
  TypeRef t2 = parse_type(
      "rec t1 . p&{l1(nat).p!l3(bool).t1, l2(int).rec t2 . p!l3(bool).t2}");
  SubtypeResult r = subtype(t, t2);
  REQUIRE(r.verdict == V3::Yes);
  CHECK(r.used_family);
  REQUIRE(r.cert.has_value());
  CHECK(check_subtype_certificate(t, t2, *r.cert));

  // the reverse inserts outputs the supertype never anticipates
  CHECK(subtype(t2, t).verdict == V3::No);
}

TEST_CASE("the anticipating controller implements the strict one") {
  TypeRef opt = parse_type(
      "src!b1.src!b2.rec t . src?b1.sk?b1.sk!b1.src!b1."
      "src?b2.sk?b2.sk!b2.src!b2.t");
  TypeRef strict = parse_type(
      "rec t . src!b1.src?b1.sk?b1.sk!b1.src!b2.src?b2.sk?b2.sk!b2.t");
  SubtypeResult r = subtype(opt, strict);
  REQUIRE(r.verdict == V3::Yes);
  CHECK(check_subtype_certificate(opt, strict, *r.cert));
  CHECK(subtype(strict, opt).verdict == V3::No);
}

TEST_CASE("selection narrowing and branch widening") {
  TypeRef sub = parse_type("p!l1(nat).q&{l3(int).end, l4(bool).end}");
  TypeRef super = parse_type("p+{l1(nat).q?l3(int).end, l2(bool).end}");
  CHECK(subtype(sub, super).verdict == V3::Yes);
  CHECK(subtype(super, sub).verdict == V3::No);
}

TEST_CASE("reordering is essential for the intro pair") {
  SubtypeLimits sync;
  sync.ref.allow_reorder = false;
  CHECK(subtype(intro_Tp(), intro_T(), sync).verdict == V3::No);
  CHECK(subtype(intro_Tp(), intro_T()).verdict == V3::Yes);
}

TEST_CASE("reflexivity on random regular types") {
  std::mt19937_64 rng(17);
  GenOpts small;
  small.max_depth = 3;
  for (int i = 0; i < 30; i++) {
    TypeRef t = gen_regular_type(rng, small);
    CAPTURE(show_type(t));
    CHECK(subtype(t, t).verdict == V3::Yes);
  }
}

TEST_CASE("agreement with the brute-force decision on sampled pairs") {
  std::vector<TypeRef> corpus = corpus_types();
  REQUIRE(corpus.size() == 289);
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int i = 0; i < 1500; i++) {
    TypeRef a = corpus[rng() % corpus.size()];
    TypeRef b = corpus[rng() % corpus.size()];
    auto bf = brute_force_subtype(a, b);
    REQUIRE(bf.has_value());
    SubtypeResult r = subtype(a, b);
    CAPTURE(show_type(a));
    CAPTURE(show_type(b));
    REQUIRE(r.verdict != V3::Unknown);
    CHECK((r.verdict == V3::Yes) == *bf);
    checked++;
  }
  CHECK(checked == 1500);
}

TEST_CASE("certificates bind to their query") {
  SubtypeResult r = subtype(intro_Tp(), intro_T());
  REQUIRE(r.cert.has_value());
  std::string diag;
  CHECK_FALSE(check_subtype_certificate(intro_T(), intro_Tp(), *r.cert,
                                        SubtypeLimits{}, &diag));
  CHECK_FALSE(diag.empty());

  SubtypeCertificate chopped = *r.cert;
  chopped.cells.pop_back();
  CHECK_FALSE(check_subtype_certificate(intro_Tp(), intro_T(), chopped));
}

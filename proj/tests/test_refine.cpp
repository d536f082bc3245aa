#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "parse.hpp"
#include "refine.hpp"

using namespace stc;

namespace {
Judgment j(const char* a, const char* b) {
  return {parse_type(a), parse_type(b)};
}
}  // namespace

TEST_CASE("rule function on direct heads") {
  RuleStep s = rule_step(j("end", "end"));
  CHECK(s.kind == StepKind::True);
  CHECK(s.rule == "ref-end");

  // inputs are contravariant: the refined side must accept at least as much
  s = rule_step(j("p?l(nat).end", "p?l(int).end"));
  CHECK(s.kind == StepKind::False);

  s = rule_step(j("p?l(int).end", "p?l(nat).end"));
  REQUIRE(s.kind == StepKind::Premise);
  CHECK(s.rule == "ref-in");
  CHECK(s.premise.lhs == t_end());
  CHECK(s.premise.rhs == t_end());

  // outputs are covariant
  s = rule_step(j("p!l(nat).end", "p!l(int).end"));
  REQUIRE(s.kind == StepKind::Premise);
  CHECK(s.rule == "ref-out");
  CHECK(rule_step(j("p!l(int).end", "p!l(nat).end")).kind == StepKind::False);

  CHECK(rule_step(j("p?a(nat).end", "p?b(nat).end")).kind == StepKind::False);
}

TEST_CASE("rule function through permitted prefixes") {
  // the anticipated foreign input must still happen on the left afterwards
  RuleStep s = rule_step(j("p?l(nat).q?l'(bool).end", "q?l'(bool).p?l(nat).end"));
  REQUIRE(s.kind == StepKind::Premise);
  CHECK(s.rule == "ref-A");
  REQUIRE(s.ctx.size() == 1);
  CHECK(s.ctx[0] == PrefixItem{false, "q", "l'", Sort::Bool});
  CHECK(type_equal(s.premise.rhs, parse_type("q?l'(bool).end")));
  CHECK(type_equal(s.premise.lhs, parse_type("q?l'(bool).end")));

  s = rule_step(j("q!cont(int).p?success(int).end",
                  "p?success(int).q!cont(int).end"));
  REQUIRE(s.kind == StepKind::Premise);
  CHECK(s.rule == "ref-B");
  REQUIRE(s.ctx.size() == 1);
  CHECK(s.ctx[0] == PrefixItem{false, "p", "success", Sort::Int});

  RefineLimits sync;
  sync.allow_reorder = false;
  CHECK(rule_step(j("p?l(nat).q?l'(bool).end", "q?l'(bool).p?l(nat).end"),
                  sync).kind == StepKind::False);
}

TEST_CASE("reordered inputs close into a two-step cycle") {
  RefineResult r = refine(parse_type("rec t . p?l(nat).q?l'(bool).t"),
                          parse_type("rec t . q?l'(bool).p?l(nat).t"));
  REQUIRE(r.verdict == V3::Yes);
  REQUIRE(r.cert.has_value());
  CHECK_FALSE(r.cert->pumped);
  CHECK(r.cert->back_edge == 0);
  REQUIRE(r.cert->chain.size() == 2);
  CHECK(r.cert->chain[0].rule == "ref-A");
  CHECK(r.cert->chain[1].rule == "ref-in");
  CHECK(check_refinement_certificate(*r.cert));
}

TEST_CASE("forgetting an action is refuted by an action-set axiom") {
  RefineResult r = refine(parse_type("rec t . p?l(nat).t"),
                          parse_type("q?l'(bool).rec t . p?l(nat).t"));
  REQUIRE(r.verdict == V3::No);
  REQUIRE(r.neg.has_value());
  CHECK(leaf_rule(*r.neg) == "n-inp-R");
  CHECK(check_negation_derivation(*r.neg));

  r = refine(parse_type("rec t . p!l(nat).t"),
             parse_type("q!l'(bool).rec t . p!l(nat).t"));
  REQUIRE(r.verdict == V3::No);
  CHECK(leaf_rule(*r.neg) == "n-out-R");
  CHECK(check_negation_derivation(*r.neg));
}

TEST_CASE("growing output prefix yields a pumped certificate") {
  TypeRef w3 = parse_type(
      "rec t . p?l1(nat).p!l3(bool).p!l3(bool).p!l3(bool).t");
  TypeRef w1 = parse_type("rec t . p?l1(nat).p!l3(bool).t");
  RefineResult r = refine(w3, w1);
  REQUIRE(r.verdict == V3::Yes);
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->pumped);
  REQUIRE(r.cert->pump_word.size() == 2);
  CHECK(r.cert->pump_word[0] == PrefixItem{false, "p", "l1", Sort::Nat});
  CHECK(r.cert->pump_word[1] == PrefixItem{false, "p", "l1", Sort::Nat});
  CHECK(check_refinement_certificate(*r.cert));
}

TEST_CASE("the controller anticipation derivation") {
  RefineResult r = refine(
      parse_type("src!b1.src!b2.rec t . src?b1.sk?b1.sk!b1.src!b1."
                 "src?b2.sk?b2.sk!b2.src!b2.t"),
      parse_type("rec t . src!b1.src?b1.sk?b1.sk!b1."
                 "src!b2.src?b2.sk?b2.sk!b2.t"));
  REQUIRE(r.verdict == V3::Yes);
  REQUIRE(r.cert.has_value());
  CHECK_FALSE(r.cert->pumped);
  std::vector<std::string> rules;
  for (const CertNode& n : r.cert->chain) rules.push_back(n.rule);
  CHECK(rules == std::vector<std::string>{"ref-out", "ref-B", "ref-in",
                                          "ref-in", "ref-out", "ref-B",
                                          "ref-in", "ref-in", "ref-out"});
  CHECK(check_refinement_certificate(*r.cert));
}

TEST_CASE("end refines only end") {
  RefineResult r = refine(t_end(), t_end());
  CHECK(r.verdict == V3::Yes);
  CHECK_FALSE(negate(t_end(), t_end()).has_value());
  CHECK(refine(t_end(), parse_type("p?l(nat).end")).verdict == V3::No);
}

TEST_CASE("negation leaves") {
  auto leaf = [](const char* a, const char* b) {
    auto d = negate(parse_type(a), parse_type(b));
    REQUIRE(d.has_value());
    CHECK(check_negation_derivation(*d));
    return leaf_rule(*d);
  };
  CHECK(leaf("p!l(nat).end", "q?l(nat).end") == "n-out");
  CHECK(leaf("p?l(nat).end", "q!l(nat).end") == "n-inp");
  CHECK(leaf("p?success(int).q!cont(int).end",
             "q!cont(int).p?success(int).end") == "n-i-o-1");
  CHECK(leaf("p?a(nat).end", "p?b(nat).end") == "n-inp-l");
  CHECK(leaf("p?l(nat).end", "p?l(int).end") == "n-inp-S");
  CHECK(leaf("p!a(nat).end", "p!b(nat).end") == "n-out-l");
  CHECK(leaf("p!l(int).end", "p!l(nat).end") == "n-out-S");
}

TEST_CASE("certificates reject tampering") {
  RefineResult r = refine(parse_type("p?l(int).p!m(nat).end"),
                          parse_type("p?l(nat).p!m(int).end"));
  REQUIRE(r.verdict == V3::Yes);
  RefinementCertificate c = *r.cert;
  REQUIRE(check_refinement_certificate(c));
  // weaken the input payload so the contravariant premise fails
  c.chain[0].rhs = parse_type("p?l(bool).p!m(int).end");
  CHECK_FALSE(check_refinement_certificate(c));

  RefinementCertificate c2 = *r.cert;
  c2.chain.pop_back();
  CHECK_FALSE(check_refinement_certificate(c2));
}

TEST_CASE("insertion detection") {
  TypeRef base = parse_type("p?a(nat).p?b(nat).end");
  TypeRef grown = parse_type("p?a(nat).q?x(bool).q?y(bool).p?b(nat).end");
  auto ins = find_insertion(base, grown);
  REQUIRE(ins.has_value());
  CHECK(ins->first == 1);
  REQUIRE(ins->second.size() == 2);
  CHECK(ins->second[0] == PrefixItem{false, "q", "x", Sort::Bool});
  CHECK_FALSE(find_insertion(base, base).has_value());
}

TEST_CASE("budget exhaustion reports unknown") {
  RefineLimits tight;
  tight.max_nodes = 1;
  RefineResult full = refine(parse_type("rec t . p?l(nat).q?l'(bool).t"),
                             parse_type("rec t . q?l'(bool).p?l(nat).t"));
  CHECK(full.verdict == V3::Yes);
  RefineResult s = refine(parse_type("rec t . p?l(nat).q?l'(bool).t"),
                          parse_type("rec t . q?l'(bool).p?l(nat).t"), tight);
  CHECK(s.verdict == V3::Unknown);
}

TEST_CASE("a truncated prefix search never refutes") {
  // the matching input sits past the prefix bound; the honest answer is
  // Unknown, not No, since the full budget relates the pair
  RefineLimits pre;
  pre.max_prefix = 1;
  TypeRef w = parse_type("rec t . p?a(nat).q?b(nat).q?c(nat).t");
  TypeRef w2 = parse_type("rec t . q?b(nat).q?c(nat).p?a(nat).t");
  CHECK(refine(w, w2).verdict == V3::Yes);
  CHECK(refine(w, w2, pre).verdict == V3::Unknown);
}

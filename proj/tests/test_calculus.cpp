#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "calculus.hpp"
#include "parse.hpp"

using namespace stc;

TEST_CASE("expression evaluation") {
  CHECK(eval_expr(e_succ(e_const(Value{1L}))) == Value{2L});
  CHECK(eval_expr(e_not(e_const(Value{true}))) == Value{false});
  CHECK(eval_expr(e_isunit(e_const(Value{Unit{}}))) == Value{true});
  CHECK(eval_expr(e_inv(e_const(Value{3L}))) == Value{-3L});
  CHECK(eval_expr(e_gt0(e_const(Value{-1L}))) == Value{false});
  // stuck terms
  CHECK_FALSE(eval_expr(e_succ(e_const(Value{true}))).has_value());
  CHECK_FALSE(eval_expr(e_succ(e_const(Value{0L}))).has_value());
  CHECK_FALSE(eval_expr(e_isunit(e_const(Value{1L}))).has_value());
  CHECK_FALSE(eval_expr(e_var("x")).has_value());
  // substitution closes variables
  CHECK(eval_expr(expr_subst(e_gt0(e_var("x")), "x", Value{4L})) ==
        Value{true});
}

TEST_CASE("value sorts") {
  CHECK(value_sort(Value{1L}) == Sort::Nat);
  CHECK(value_sort(Value{0L}) == Sort::Int);
  CHECK(value_sort(Value{-7L}) == Sort::Int);
  CHECK(value_sort(Value{true}) == Sort::Bool);
  CHECK(value_sort(Value{Unit{}}) == Sort::Unit);
}

TEST_CASE("conditional then send queues the message") {
  Session s = parse_session(
      "r |> if true then q!cont<42>.p?{success(x).0, error(y).0}"
      "     else q!stop<()>.p?{success(x).0, error(y).0}\n"
      "p |> r!success<7>.0\n"
      "q |> r?{cont(z).0, stop(z).0}\n");
  auto steps1 = session_steps(s);
  auto it = std::find_if(steps1.begin(), steps1.end(), [](const SessionStep& t) {
    return t.subject == "r";
  });
  REQUIRE(it != steps1.end());
  CHECK(it->rule == "r-cond-T");
  Session s2 = it->next;
  auto steps2 = session_steps(s2);
  it = std::find_if(steps2.begin(), steps2.end(), [](const SessionStep& t) {
    return t.subject == "r";
  });
  REQUIRE(it != steps2.end());
  CHECK(it->rule == "r-send");
  const auto& q = it->next.at("r").queue;
  REQUIRE(q.size() == 1);
  CHECK(q[0].to == "q");
  CHECK(q[0].label == "cont");
  CHECK(q[0].value == Value{42L});
}

TEST_CASE("label mismatch raises an error") {
  Session s = parse_session("p |> q?{l(x).0}\n");
  s.at("p").queue.clear();
  Session peer = parse_session("q |> 0\n");
  s["q"] = peer.at("q");
  s.at("q").queue.push_back({"p", "l'", Value{1L}});
  auto steps = session_steps(s);
  REQUIRE_FALSE(steps.empty());
  bool mism = false;
  for (const auto& t : steps) mism = mism || t.rule == "err-mism";
  CHECK(mism);
}

TEST_CASE("terminated sessions take no step") {
  Session s = parse_session("p |> 0\n");
  CHECK(session_terminated(s));
  CHECK(session_steps(s).empty());
  CHECK(run_session(s).kind == RunKind::Terminated);
}

TEST_CASE("structural congruence of the canonical key") {
  Session a = parse_session("p |> q!l<1>.0\n");
  Session b = a;
  a.at("p").queue = {{"q1", "a", Value{1L}}, {"q2", "b", Value{2L}}};
  b.at("p").queue = {{"q2", "b", Value{2L}}, {"q1", "a", Value{1L}}};
  CHECK(session_key(a) == session_key(b));
  // same-recipient order is FIFO and must be preserved
  a.at("p").queue = {{"q1", "a", Value{1L}}, {"q1", "b", Value{2L}}};
  b.at("p").queue = {{"q1", "b", Value{2L}}, {"q1", "a", Value{1L}}};
  CHECK(session_key(a) != session_key(b));
  // inactive participants with empty queues vanish
  Session c = parse_session("p |> q!l<1>.0\nz |> 0\n");
  Session d = parse_session("p |> q!l<1>.0\n");
  CHECK(session_key(c) == session_key(d));
}

TEST_CASE("starvation error when the peer is gone") {
  Session s = parse_session("p |> q?{l(x).0}\nq |> 0\n");
  RunOutcome r = run_session(s);
  CHECK(r.kind == RunKind::ErrorReached);
  CHECK(r.error_rule == "err-strv");
}

TEST_CASE("orphan message error") {
  Session s = parse_session("p |> 0\n");
  s.at("p").queue.push_back({"q", "l", Value{1L}});
  RunOutcome r = run_session(s);
  CHECK(r.kind == RunKind::ErrorReached);
  CHECK(r.error_rule == "err-ophn");
}

TEST_CASE("stuck condition raises an evaluation error") {
  Session s = parse_session("p |> if succ(true) then 0 else 0\n");
  RunOutcome r = run_session(s);
  CHECK(r.kind == RunKind::ErrorReached);
  CHECK(r.error_rule.substr(0, 8) == "err-eval");
}

TEST_CASE("deterministic loop terminates in the canonical graph") {
  Session s = parse_session(
      "p |> rec X . q!l<1>.X\n"
      "q |> rec X . p?{l(x).X}\n");
  RunOutcome r = run_session(s, 1000);
  CHECK(r.kind != RunKind::ErrorReached);
}

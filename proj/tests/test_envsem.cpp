#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "envsem.hpp"
#include "parse.hpp"

using namespace stc;

TEST_CASE("environment transitions") {
  TypingEnv g = parse_env(
      "p : [] q!l(nat).end\n"
      "q : [] p?l(nat).end\n");
  auto steps = env_steps(g);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].rule == "e-send");
  CHECK(steps[0].act.subject == "p");
  CHECK(steps[0].act.peer == "q");
  CHECK(steps[0].act.label == "l");

  auto steps2 = env_steps(steps[0].next);
  REQUIRE(steps2.size() == 1);
  CHECK(steps2[0].rule == "e-rcv");
  CHECK(steps2[0].act.subject == "q");
  CHECK(env_done(steps2[0].next));
}

TEST_CASE("a receive needs the matching head label") {
  TypingEnv g = parse_env(
      "p : [q!l'(nat)] end\n"
      "q : [] p?l(nat).end\n");
  CHECK(env_steps(g).empty());
}

TEST_CASE("queue bound suppresses sends onto a full queue") {
  TypingEnv g = parse_env("p : [] rec t . q!l(nat).t\nq : [] rec t . p?l(nat).t\n");
  TypingEnv cur = g;
  bool frontier = false;
  for (int i = 0; i < 4; i++) {
    auto st = env_steps(cur, 4, &frontier);
    REQUIRE_FALSE(st.empty());
    cur = st.front().rule == "e-send" ? st.front().next : st.back().next;
  }
  frontier = false;
  auto st = env_steps(cur, 4, &frontier);
  bool send_left = false;
  for (const auto& s : st) send_left = send_left || s.rule == "e-send";
  CHECK_FALSE(send_left);
  CHECK(frontier);
}

TEST_CASE("producer and consumer loop is live") {
  TypingEnv g = parse_env(
      "p : [] rec t . q!l(nat).t\n"
      "q : [] rec t . p?l(nat).t\n");
  LiveResult r = check_live(g);
  CHECK(r.verdict == V3::Yes);
}

TEST_CASE("an optional recipient can starve") {
  TypingEnv g = parse_env(
      "p : [] rec t . q+{l(nat).t, l'(nat).r!l'(nat).t}\n"
      "q : [] rec t . p&{l(nat).t, l'(nat).t}\n"
      "r : [] rec t . p?l'(nat).t\n");
  LiveResult res = check_live(g);
  REQUIRE(res.verdict == V3::No);
  CHECK(res.witness.find("r") != std::string::npos);
  REQUIRE_FALSE(res.cycle.empty());
  for (const std::string& line : res.cycle) {
    CHECK(line.find("r p?") == std::string::npos);  // r never receives
    CHECK(line.find("l'") == std::string::npos);    // the fair loop is l-only
  }
}

TEST_CASE("finished environments are live") {
  CHECK(check_live(parse_env("p : [] end\n")).verdict == V3::Yes);
  CHECK(check_live(TypingEnv{}).verdict == V3::Yes);
}

TEST_CASE("an orphaned queued message is a liveness violation") {
  TypingEnv g = parse_env(
      "p : [q!l(nat)] end\n"
      "q : [] end\n");
  CHECK(check_live(g).verdict == V3::No);
}

TEST_CASE("a starving input with no sender is a liveness violation") {
  TypingEnv g = parse_env(
      "p : [] q?l(nat).end\n"
      "q : [] end\n");
  CHECK(check_live(g).verdict == V3::No);
}

TEST_CASE("the double buffering environment is live") {
  TypingEnv g = parse_env(
      "bp1 : [] rec t . src?data.sk!data.t\n"
      "bp2 : [] rec t . src?data.sk!data.t\n"
      "src : [] rec t . ctl&{b1.ctl!b1.bp1!data.t, b2.ctl!b2.bp2!data.t}\n"
      "sk  : [] rec t . ctl!b1.ctl?b1.bp1?data.ctl!b2.ctl?b2.bp2?data.t\n"
      "ctl : [] rec t . src!b1.src?b1.sk?b1.sk!b1.src!b2.src?b2.sk?b2.sk!b2.t\n");
  CHECK(check_live(g, 4).verdict == V3::Yes);

  // the anticipating controller keeps it live
  g.at("ctl").type = parse_type(
      "src!b1.src!b2.rec t . src?b1.sk?b1.sk!b1.src!b1."
      "src?b2.sk?b2.sk!b2.src!b2.t");
  CHECK(check_live(g, 4).verdict == V3::Yes);

  // dropping the controller strands everyone
  g.at("ctl").type = t_end();
  CHECK(check_live(g, 4).verdict == V3::No);
}

TEST_CASE("environment keys canonicalize") {
  TypingEnv a = parse_env("p : [] end\nq : [] p?l(nat).end\n");
  TypingEnv b = parse_env("q : [] p?l(nat).end\n");
  CHECK(env_key(a) == env_key(b));
}

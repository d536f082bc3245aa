#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "charproc.hpp"
#include "envsem.hpp"
#include "gen.hpp"
#include "parse.hpp"
#include "subtype.hpp"
#include "typesys.hpp"

using namespace stc;

namespace {

constexpr int kCases = 1000;

// First `limit` spine communications of a SISO tree, per (participant,
// direction) label sequences.
std::map<std::pair<std::string, bool>, std::vector<std::string>> projections(
    TypeRef w, int limit) {
  std::map<std::pair<std::string, bool>, std::vector<std::string>> out;
  TypeRef cur = w;
  for (int i = 0; i < limit; i++) {
    TypeRef r = resolve(cur);
    if (r->kind != TK::Branch && r->kind != TK::Select) break;
    const Choice& c = r->choices[0];
    out[{r->peer, r->kind == TK::Select}].push_back(c.label);
    cur = c.cont;
  }
  return out;
}

struct ChainItem {
  bool out;
  std::string label;
  Sort payload;
};

std::vector<ChainItem> random_chain(std::mt19937_64& rng, int max_len) {
  static const std::vector<std::string> labels{"a", "b", "c"};
  static const std::vector<Sort> sorts{Sort::Nat, Sort::Int, Sort::Bool,
                                       Sort::Unit};
  int n = 1 + (int)(rng() % (size_t)max_len);
  std::vector<ChainItem> items;
  for (int i = 0; i < n; i++)
    items.push_back({rng() % 2 == 0, labels[rng() % labels.size()],
                     sorts[rng() % sorts.size()]});
  return items;
}

// A finite two-party protocol and its mirror image.
TypeRef chain_type(const std::vector<ChainItem>& items, const std::string& peer,
                   bool mirror, bool loop) {
  TypeRef tail = loop ? t_var(0) : t_end();
  TypeRef t = tail;
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    t = t_choice(mirror ? !it->out : it->out, peer,
                 {{it->label, it->payload, t}});
  return loop ? t_rec(t) : t;
}

TypingEnv dual_env(const std::vector<ChainItem>& items, bool loop) {
  TypingEnv g;
  g["p"] = {{}, chain_type(items, "q", false, loop)};
  g["q"] = {{}, chain_type(items, "p", true, loop)};
  return g;
}

}  // namespace

TEST_CASE("refinement is reflexive") {
  std::mt19937_64 rng(101);
  GenOpts siso;
  siso.max_width = 1;
  int bad = 0;
  for (int i = 0; i < kCases; i++) {
    TypeRef t = gen_regular_type(rng, siso);
    RefineResult r = refine(t, t);
    if (r.verdict != V3::Yes) {
      CAPTURE(show_type(t));
      CHECK(r.verdict == V3::Yes);
      bad++;
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("refinement is transitive within budget") {
  std::vector<TypeRef> pool;
  for (TypeRef t : corpus_types())
    if (is_siso(t)) pool.push_back(t);
  // blind triples almost never chain; precompute the relation and walk it
  std::vector<std::vector<size_t>> succ(pool.size());
  std::vector<size_t> fertile;
  for (size_t i = 0; i < pool.size(); i++) {
    for (size_t j = 0; j < pool.size(); j++)
      if (i != j && refine(pool[i], pool[j]).verdict == V3::Yes)
        succ[i].push_back(j);
    if (!succ[i].empty()) fertile.push_back(i);
  }
  REQUIRE_FALSE(fertile.empty());
  std::mt19937_64 rng(202);
  int chained = 0;
  for (int i = 0; i < kCases; i++) {
    size_t a = fertile[rng() % fertile.size()];
    size_t b = succ[a][rng() % succ[a].size()];
    if (succ[b].empty()) continue;
    size_t c = succ[b][rng() % succ[b].size()];
    chained++;
    CAPTURE(show_type(pool[a]));
    CAPTURE(show_type(pool[b]));
    CAPTURE(show_type(pool[c]));
    CHECK(refine(pool[a], pool[c]).verdict != V3::No);
  }
  CHECK(chained > 50);  // the sample must exercise real chains
}

TEST_CASE("refinement preserves per-participant orderings") {
  std::vector<TypeRef> pool;
  for (TypeRef t : corpus_types())
    if (is_siso(t)) pool.push_back(t);
  std::mt19937_64 rng(303);
  GenOpts siso;
  siso.max_width = 1;
  int related = 0;
  for (int i = 0; i < kCases; i++) {
    TypeRef a, b;
    if (i % 2 == 0) {
      a = pool[rng() % pool.size()];
      b = pool[rng() % pool.size()];
    } else {
      a = gen_regular_type(rng, siso);
      b = rng() % 3 == 0 ? a : gen_regular_type(rng, siso);
    }
    if (refine(a, b).verdict != V3::Yes) continue;
    related++;
    auto pa = projections(a, 48);
    auto pb = projections(b, 48);
    for (const auto& [key, seq] : pa) {
      const auto& other = pb[key];
      size_t n = std::min(seq.size(), other.size());
      for (size_t k = 0; k < n; k++) {
        CAPTURE(show_type(a));
        CAPTURE(show_type(b));
        CHECK(seq[k] == other[k]);
      }
    }
  }
  CHECK(related > 50);
}

TEST_CASE("typing survives every reduction step") {
  std::mt19937_64 rng(404);
  int stepped = 0;
  for (int i = 0; i < kCases; i++) {
    std::vector<ChainItem> items = random_chain(rng, 4);
    TypingEnv g = dual_env(items, false);
    Session m;
    m["p"] = {char_process(g.at("p").type), {}};
    m["q"] = {char_process(g.at("q").type), {}};
    REQUIRE(check_session(m, g) == Tri::Typed);
    REQUIRE(check_live(g).verdict == V3::Yes);

    // reachable environments, bounded breadth-first closure
    std::vector<TypingEnv> envs{g};
    std::set<std::string> seen{env_key(g)};
    for (size_t h = 0; h < envs.size() && envs.size() < 512; h++)
      for (const EnvStep& es : env_steps(envs[h]))
        if (seen.insert(env_key(es.next)).second) envs.push_back(es.next);

    for (const SessionStep& st : session_steps(m)) {
      REQUIRE_FALSE(st.error);
      stepped++;
      bool retyped = false;
      for (const TypingEnv& g2 : envs)
        if (check_session(st.next, g2) == Tri::Typed) {
          retyped = true;
          break;
        }
      CAPTURE(show_session(m));
      CAPTURE(st.rule);
      CHECK(retyped);
    }
  }
  CHECK(stepped >= kCases);
}

TEST_CASE("liveness is preserved by steps and by subtype replacement") {
  std::mt19937_64 rng(505);
  int replaced = 0;
  for (int i = 0; i < kCases; i++) {
    std::vector<ChainItem> items = random_chain(rng, 3);
    bool loop = rng() % 2 == 0;
    TypingEnv g = dual_env(items, loop);
    LiveResult base = check_live(g);
    REQUIRE(base.verdict == V3::Yes);

    for (const EnvStep& es : env_steps(g)) {
      CAPTURE(show_env(g));
      CHECK(check_live(es.next).verdict != V3::No);
    }

    // widen one accepted input or narrow one offered output of p's type
    std::vector<ChainItem> items2 = items;
    bool mutated = false;
    for (ChainItem& it : items2) {
      if (!it.out && it.payload == Sort::Nat) {
        it.payload = Sort::Int;  // accept more
        mutated = true;
        break;
      }
      if (it.out && it.payload == Sort::Int) {
        it.payload = Sort::Nat;  // promise less
        mutated = true;
        break;
      }
    }
    if (!mutated) continue;
    TypeRef tp2 = chain_type(items2, "q", false, loop);
    if (subtype(tp2, g.at("p").type).verdict != V3::Yes) continue;
    replaced++;
    TypingEnv g2 = g;
    g2.at("p").type = tp2;
    CAPTURE(show_env(g2));
    CHECK(check_live(g2).verdict != V3::No);
  }
  CHECK(replaced > 100);
}

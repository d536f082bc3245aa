// Characteristic values, processes and sessions: a dynamic oracle that
// separates related from unrelated type pairs by concrete execution.
#pragma once
#include "calculus.hpp"
#include "envsem.hpp"

namespace stc {

Value char_value(Sort s);             // canonical inhabitant
ExprRef char_test(ExprRef x, Sort s); // boolean probe, stuck off-sort

// Characteristic process of an SO type; throws on multi-label selections.
ProcRef char_process(TypeRef u);

// Ring participants of v in first-occurrence order.
std::vector<std::string> ring_of(TypeRef v);

// Session type played by ring participant k against an external participant
// rname typed v; relays through the ring neighbours when the ring has two
// or more members.
TypeRef char_session_type(TypeRef v, const std::vector<std::string>& ring,
                          int k, const std::string& rname);

// Fresh name for the external participant, avoiding the ring.
std::string char_external(TypeRef v);

// Environment {r: (eps, v)} plus the ring's characteristic types.
TypingEnv char_env(TypeRef v);

// Oracle session: the external participant runs the characteristic process
// of u while the ring plays the characteristic processes of v's types.
Session char_session(TypeRef u, TypeRef v);

struct OracleOutcome {
  V3 verdict = V3::Unknown;  // Yes: no error reachable; No: error reachable
  std::string rule;
  std::vector<std::string> trace;
  int states = 0;
};

OracleOutcome completeness_oracle(TypeRef u, TypeRef v, int step_limit = 50000);

}  // namespace stc

#include "charproc.hpp"

#include <functional>
#include <stdexcept>

namespace stc {

Value char_value(Sort s) {
  switch (s) {
    case Sort::Nat: return Value{(long)1};
    case Sort::Int: return Value{(long)-1};
    case Sort::Bool: return Value{true};
    case Sort::Unit: return Value{Unit{}};
  }
  return Value{Unit{}};
}

ExprRef char_test(ExprRef x, Sort s) {
  switch (s) {
    case Sort::Nat: return e_gt0(e_succ(x));
    case Sort::Int: return e_gt0(e_inv(x));
    case Sort::Bool: return e_not(x);
    case Sort::Unit: return e_isunit(x);
  }
  return e_isunit(x);
}

ProcRef char_process(TypeRef u) {
  switch (u->kind) {
    case TK::End: return p_inact();
    case TK::Var: return p_var(u->var);
    case TK::Rec: return p_rec(char_process(u->body));
    case TK::Branch: {
      std::vector<PBranch> bs;
      for (const Choice& c : u->choices) {
        std::string x = "x" + c.label;
        ProcRef cont = char_process(c.cont);
        bs.push_back(
            {c.label, x, p_cond(char_test(e_var(x), c.payload), cont, cont)});
      }
      return p_ext(u->peer, std::move(bs));
    }
    case TK::Select: {
      if (u->choices.size() != 1)
        throw std::invalid_argument(
            "characteristic process needs single-output types");
      const Choice& c = u->choices[0];
      return p_out(u->peer, c.label, e_const(char_value(c.payload)),
                   char_process(c.cont));
    }
  }
  return p_inact();
}

namespace {

void first_occurrence(TypeRef t, std::vector<std::string>& out) {
  switch (t->kind) {
    case TK::End:
    case TK::Var: return;
    case TK::Rec: first_occurrence(t->body, out); return;
    case TK::Branch:
    case TK::Select: {
      bool known = false;
      for (const std::string& p : out) known = known || p == t->peer;
      if (!known) out.push_back(t->peer);
      for (const Choice& c : t->choices) first_occurrence(c.cont, out);
      return;
    }
  }
}

}  // namespace

std::vector<std::string> ring_of(TypeRef v) {
  std::vector<std::string> out;
  first_occurrence(v, out);
  return out;
}

std::string char_external(TypeRef v) {
  std::vector<std::string> ring = ring_of(v);
  auto taken = [&](const std::string& n) {
    for (const std::string& p : ring)
      if (p == n) return true;
    return false;
  };
  if (!taken("r")) return "r";
  for (int i = 0;; i++)
    if (!taken("r" + std::to_string(i))) return "r" + std::to_string(i);
}

TypeRef char_session_type(TypeRef v, const std::vector<std::string>& ring,
                          int k, const std::string& rname) {
  int m = (int)ring.size();
  const std::string& self = ring[k];
  const std::string& next = ring[(k + 1) % m];
  const std::string& prev = ring[(k + m - 1) % m];
  std::function<TypeRef(TypeRef)> go = [&](TypeRef t) -> TypeRef {
    switch (t->kind) {
      case TK::End: return t_end();
      case TK::Var: return t_var(t->var);
      case TK::Rec: return t_rec(go(t->body));
      case TK::Branch: {
        if (t->choices.size() != 1)
          throw std::invalid_argument(
              "characteristic session types need single-input types");
        const Choice& c = t->choices[0];
        TypeRef cont = go(c.cont);
        if (t->peer == self) {
          // the external participant expects this input from us
          if (m >= 2)
            cont = t_out(next, c.label, Sort::Bool,
                         t_in(prev, c.label, Sort::Bool, cont));
          return t_out(rname, c.label, c.payload, cont);
        }
        if (m >= 2)
          cont = t_in(prev, c.label, Sort::Bool,
                      t_out(next, c.label, Sort::Bool, cont));
        return cont;
      }
      case TK::Select: {
        std::vector<Choice> cs;
        for (const Choice& c : t->choices) {
          TypeRef cont = go(c.cont);
          if (t->peer == self) {
            if (m >= 2)
              cont = t_out(next, c.label, Sort::Bool,
                           t_in(prev, c.label, Sort::Bool, cont));
            cs.push_back({c.label, c.payload, cont});
          } else {
            if (m >= 2) cont = t_out(next, c.label, Sort::Bool, cont);
            cs.push_back({c.label, Sort::Bool, cont});
          }
        }
        // selections towards us arrive from the external participant,
        // other selections are relayed around the ring
        return t_branch(t->peer == self ? rname : prev, std::move(cs));
      }
    }
    return t_end();
  };
  return go(v);
}

TypingEnv char_env(TypeRef v) {
  std::vector<std::string> ring = ring_of(v);
  std::string rname = char_external(v);
  TypingEnv g;
  g[rname] = {{}, v};
  for (int k = 0; k < (int)ring.size(); k++)
    g[ring[k]] = {{}, char_session_type(v, ring, k, rname)};
  return g;
}

Session char_session(TypeRef u, TypeRef v) {
  std::vector<std::string> ring = ring_of(v);
  std::string rname = char_external(v);
  Session s;
  s[rname] = {char_process(u), {}};
  for (int k = 0; k < (int)ring.size(); k++)
    s[ring[k]] = {char_process(char_session_type(v, ring, k, rname)), {}};
  return s;
}

OracleOutcome completeness_oracle(TypeRef u, TypeRef v, int step_limit) {
  OracleOutcome out;
  Session s = char_session(u, v);
  RunOutcome r = run_session(s, step_limit);
  out.states = r.states;
  switch (r.kind) {
    case RunKind::Terminated: out.verdict = V3::Yes; break;
    case RunKind::ErrorReached:
      out.verdict = V3::No;
      out.rule = r.error_rule;
      out.trace = r.trace;
      break;
    case RunKind::LimitReached: out.verdict = V3::Unknown; break;
  }
  return out;
}

}  // namespace stc

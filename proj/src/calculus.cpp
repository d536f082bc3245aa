#include "calculus.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace stc {

std::string show_value(const Value& v) {
  if (auto n = std::get_if<long>(&v)) return std::to_string(*n);
  if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return "()";
}

Sort value_sort(const Value& v) {
  if (auto n = std::get_if<long>(&v)) return *n >= 1 ? Sort::Nat : Sort::Int;
  if (std::get_if<bool>(&v)) return Sort::Bool;
  return Sort::Unit;
}

namespace {
ExprRef mk_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
}  // namespace

ExprRef e_var(const std::string& x) { return mk_expr({EK::Var, {}, x, {}}); }
ExprRef e_const(const Value& v) { return mk_expr({EK::Const, v, "", {}}); }
ExprRef e_succ(ExprRef a) { return mk_expr({EK::Succ, {}, "", a}); }
ExprRef e_inv(ExprRef a) { return mk_expr({EK::Inv, {}, "", a}); }
ExprRef e_not(ExprRef a) { return mk_expr({EK::Not, {}, "", a}); }
ExprRef e_gt0(ExprRef a) { return mk_expr({EK::Gt0, {}, "", a}); }
ExprRef e_isunit(ExprRef a) { return mk_expr({EK::IsUnit, {}, "", a}); }

std::optional<Value> eval_expr(ExprRef e) {
  switch (e->kind) {
    case EK::Var: return std::nullopt;
    case EK::Const: return e->c;
    case EK::Succ: {
      auto v = eval_expr(e->a);
      if (!v) return std::nullopt;
      auto n = std::get_if<long>(&*v);
      if (!n || *n < 1) return std::nullopt;  // successor acts on naturals
      return Value{*n + 1};
    }
    case EK::Inv: {
      auto v = eval_expr(e->a);
      if (!v) return std::nullopt;
      auto n = std::get_if<long>(&*v);
      if (!n) return std::nullopt;
      return Value{-*n};
    }
    case EK::Not: {
      auto v = eval_expr(e->a);
      if (!v) return std::nullopt;
      auto b = std::get_if<bool>(&*v);
      if (!b) return std::nullopt;
      return Value{!*b};
    }
    case EK::Gt0: {
      auto v = eval_expr(e->a);
      if (!v) return std::nullopt;
      auto n = std::get_if<long>(&*v);
      if (!n) return std::nullopt;
      return Value{*n > 0};
    }
    case EK::IsUnit: {
      auto v = eval_expr(e->a);
      if (!v) return std::nullopt;
      if (!std::get_if<Unit>(&*v)) return std::nullopt;
      return Value{true};
    }
  }
  return std::nullopt;
}

ExprRef expr_subst(ExprRef e, const std::string& x, const Value& v) {
  switch (e->kind) {
    case EK::Var: return e->var == x ? e_const(v) : e;
    case EK::Const: return e;
    default: {
      Expr n = *e;
      n.a = expr_subst(e->a, x, v);
      return mk_expr(std::move(n));
    }
  }
}

std::string show_expr(ExprRef e) {
  switch (e->kind) {
    case EK::Var: return e->var;
    case EK::Const: return show_value(e->c);
    case EK::Succ: return "succ(" + show_expr(e->a) + ")";
    case EK::Inv: return "inv(" + show_expr(e->a) + ")";
    case EK::Not: return "not(" + show_expr(e->a) + ")";
    case EK::Gt0: return show_expr(e->a) + " > 0";
    case EK::IsUnit: return show_expr(e->a) + " == ()";
  }
  return "?";
}

namespace {
ProcRef mk_proc(Proc p) { return std::make_shared<const Proc>(std::move(p)); }
}  // namespace

ProcRef p_inact() {
  static ProcRef i = mk_proc({PK::Inact});
  return i;
}
ProcRef p_var(int idx) {
  Proc p{PK::Var};
  p.var = idx;
  return mk_proc(std::move(p));
}
ProcRef p_rec(ProcRef body) {
  Proc p{PK::Rec};
  p.body = body;
  return mk_proc(std::move(p));
}
ProcRef p_out(const std::string& peer, const std::string& label, ExprRef e,
              ProcRef cont) {
  Proc p{PK::Out};
  p.peer = peer;
  p.label = label;
  p.expr = e;
  p.cont = cont;
  return mk_proc(std::move(p));
}
ProcRef p_ext(const std::string& peer, std::vector<PBranch> branches) {
  if (branches.empty()) throw std::invalid_argument("empty branching");
  std::sort(branches.begin(), branches.end(),
            [](const PBranch& a, const PBranch& b) { return a.label < b.label; });
  for (size_t i = 1; i < branches.size(); i++)
    if (branches[i].label == branches[i - 1].label)
      throw std::invalid_argument("duplicate label " + branches[i].label);
  Proc p{PK::Ext};
  p.peer = peer;
  p.branches = std::move(branches);
  return mk_proc(std::move(p));
}
ProcRef p_cond(ExprRef e, ProcRef t, ProcRef f) {
  Proc p{PK::Cond};
  p.expr = e;
  p.then_p = t;
  p.else_p = f;
  return mk_proc(std::move(p));
}

namespace {

ProcRef psubst(ProcRef p, int depth, ProcRef repl) {
  switch (p->kind) {
    case PK::Inact: return p;
    case PK::Var:
      if (p->var == depth) return repl;
      if (p->var > depth) return p_var(p->var - 1);
      return p;
    case PK::Rec: return p_rec(psubst(p->body, depth + 1, repl));
    case PK::Out:
      return p_out(p->peer, p->label, p->expr, psubst(p->cont, depth, repl));
    case PK::Ext: {
      std::vector<PBranch> bs = p->branches;
      for (PBranch& b : bs) b.cont = psubst(b.cont, depth, repl);
      return p_ext(p->peer, std::move(bs));
    }
    case PK::Cond:
      return p_cond(p->expr, psubst(p->then_p, depth, repl),
                    psubst(p->else_p, depth, repl));
  }
  return p;
}

ProcRef proc_resolve(ProcRef p) {
  for (int i = 0; i < 64 && p->kind == PK::Rec; i++) p = proc_unfold(p);
  return p;  // a rec that never reaches a prefix stays stuck
}

}  // namespace

ProcRef proc_unfold(ProcRef p) {
  if (p->kind != PK::Rec) return p;
  return psubst(p->body, 0, p);
}

ProcRef proc_subst_val(ProcRef p, const std::string& x, const Value& v) {
  switch (p->kind) {
    case PK::Inact:
    case PK::Var: return p;
    case PK::Rec: return p_rec(proc_subst_val(p->body, x, v));
    case PK::Out:
      return p_out(p->peer, p->label, expr_subst(p->expr, x, v),
                   proc_subst_val(p->cont, x, v));
    case PK::Ext: {
      std::vector<PBranch> bs = p->branches;
      for (PBranch& b : bs)
        if (b.var != x) b.cont = proc_subst_val(b.cont, x, v);
      return p_ext(p->peer, std::move(bs));
    }
    case PK::Cond:
      return p_cond(expr_subst(p->expr, x, v), proc_subst_val(p->then_p, x, v),
                    proc_subst_val(p->else_p, x, v));
  }
  return p;
}

namespace {

void show_p(ProcRef p, int depth, std::string& out) {
  switch (p->kind) {
    case PK::Inact: out += "0"; return;
    case PK::Var: out += "X" + std::to_string(depth - p->var); return;
    case PK::Rec:
      out += "rec X" + std::to_string(depth + 1) + " . ";
      show_p(p->body, depth + 1, out);
      return;
    case PK::Out:
      out += p->peer + "!" + p->label + "<" + show_expr(p->expr) + ">.";
      show_p(p->cont, depth, out);
      return;
    case PK::Ext: {
      out += p->peer + "?{";
      bool first = true;
      for (const PBranch& b : p->branches) {
        if (!first) out += ", ";
        first = false;
        out += b.label + "(" + b.var + ").";
        show_p(b.cont, depth, out);
      }
      out += "}";
      return;
    }
    case PK::Cond:
      out += "if " + show_expr(p->expr) + " then ";
      show_p(p->then_p, depth, out);
      out += " else ";
      show_p(p->else_p, depth, out);
      return;
  }
}

}  // namespace

std::string show_proc(ProcRef p) {
  std::string out;
  show_p(p, 0, out);
  return out;
}

std::string show_session(const Session& s) {
  std::string out;
  for (const auto& [name, part] : s) {
    out += name + " |> " + show_proc(part.proc);
    out += "  [";
    bool first = true;
    for (const Msg& m : part.queue) {
      if (!first) out += ", ";
      first = false;
      out += m.to + "!" + m.label + "<" + show_value(m.value) + ">";
    }
    out += "]\n";
  }
  return out;
}

std::string session_key(const Session& s) {
  std::string out;
  for (const auto& [name, part] : s) {
    ProcRef p = proc_resolve(part.proc);
    if (p->kind == PK::Inact && part.queue.empty()) continue;
    std::deque<Msg> q = part.queue;  // messages to distinct peers commute
    std::stable_sort(q.begin(), q.end(),
                     [](const Msg& a, const Msg& b) { return a.to < b.to; });
    out += name + "|>" + show_proc(p) + "[";
    for (const Msg& m : q)
      out += m.to + "!" + m.label + "<" + show_value(m.value) + ">;";
    out += "] ";
  }
  return out;
}

bool session_terminated(const Session& s) {
  for (const auto& [name, part] : s) {
    if (proc_resolve(part.proc)->kind != PK::Inact) return false;
    if (!part.queue.empty()) return false;
  }
  return true;
}

std::vector<SessionStep> session_steps(const Session& s) {
  std::vector<SessionStep> out;
  auto peer_part = [&](const std::string& q) -> const Part* {
    auto it = s.find(q);
    return it == s.end() ? nullptr : &it->second;
  };
  auto peer_done = [&](const std::string& q) {
    const Part* pp = peer_part(q);
    return !pp || proc_resolve(pp->proc)->kind == PK::Inact;
  };
  for (const auto& [name, part] : s) {
    ProcRef p = proc_resolve(part.proc);
    switch (p->kind) {
      case PK::Out: {
        std::string act = p->peer + "!" + p->label + "<" +
                          show_expr(p->expr) + ">";
        auto v = eval_expr(p->expr);
        if (!v) {
          out.push_back({"err-eval", name, act, true, {}});
          break;
        }
        Session next = s;
        Part& me = next[name];
        me.proc = p->cont;
        me.queue.push_back({p->peer, p->label, *v});
        out.push_back({"r-send", name,
                       p->peer + "!" + p->label + "<" + show_value(*v) + ">",
                       false, std::move(next)});
        break;
      }
      case PK::Ext: {
        const Part* pp = peer_part(p->peer);
        const Msg* msg = nullptr;
        size_t pos = 0;
        if (pp)
          for (size_t i = 0; i < pp->queue.size(); i++)
            if (pp->queue[i].to == name) {
              msg = &pp->queue[i];
              pos = i;
              break;
            }
        if (!msg) {
          if (peer_done(p->peer))
            out.push_back({"err-strv", name, p->peer + "?", true, {}});
          break;  // waiting, not yet an error
        }
        const PBranch* hit = nullptr;
        for (const PBranch& b : p->branches)
          if (b.label == msg->label) hit = &b;
        if (!hit) {
          out.push_back({"err-mism", name,
                         p->peer + "?" + msg->label + "<" +
                             show_value(msg->value) + ">",
                         true, {}});
          break;
        }
        Session next = s;
        next[name].proc = proc_subst_val(hit->cont, hit->var, msg->value);
        next[p->peer].queue.erase(next[p->peer].queue.begin() + pos);
        out.push_back({"r-rcv", name,
                       p->peer + "?" + msg->label + "(" +
                           show_value(msg->value) + ")",
                       false, std::move(next)});
        break;
      }
      case PK::Cond: {
        auto v = eval_expr(p->expr);
        const bool* b = v ? std::get_if<bool>(&*v) : nullptr;
        if (!b) {
          out.push_back(
              {"err-eval2", name, "if " + show_expr(p->expr), true, {}});
          break;
        }
        Session next = s;
        next[name].proc = *b ? p->then_p : p->else_p;
        out.push_back({*b ? "r-cond-T" : "r-cond-F", name,
                       "if " + show_expr(p->expr), false, std::move(next)});
        break;
      }
      default: break;  // inactive or stuck recursion
    }
  }
  // orphan messages: addressed to a participant that already terminated
  for (const auto& [name, part] : s)
    for (const Msg& m : part.queue)
      if (peer_done(m.to))
        out.push_back({"err-ophn", m.to,
                       name + " holds " + m.to + "!" + m.label + "<" +
                           show_value(m.value) + ">",
                       true, {}});
  if (out.empty() && !session_terminated(s))
    out.push_back({"err-dlock", "-", "no reduction applies", true, {}});
  return out;
}

RunOutcome run_session(const Session& s, int max_states) {
  RunOutcome res;
  struct Edge {
    int parent;
    std::string line;
  };
  std::vector<Session> states{s};
  std::vector<Edge> edges{{-1, ""}};
  std::unordered_map<std::string, int> seen{{session_key(s), 0}};
  std::queue<int> work;
  work.push(0);
  auto trace_to = [&](int idx) {
    std::vector<std::string> lines;
    for (int i = idx; edges[i].parent >= 0; i = edges[i].parent)
      lines.push_back(edges[i].line);
    std::reverse(lines.begin(), lines.end());
    return lines;
  };
  while (!work.empty()) {
    int idx = work.front();
    work.pop();
    std::vector<SessionStep> steps = session_steps(states[idx]);
    for (const SessionStep& st : steps) {
      if (!st.error) continue;
      res.kind = RunKind::ErrorReached;
      res.error_rule = st.rule;
      res.trace = trace_to(idx);
      res.trace.push_back(st.rule + ": " + st.subject + " " + st.action);
      res.states = (int)states.size();
      return res;
    }
    for (const SessionStep& st : steps) {
      std::string key = session_key(st.next);
      if (seen.count(key)) continue;
      if ((int)states.size() >= max_states) {
        res.kind = RunKind::LimitReached;
        res.states = (int)states.size();
        return res;
      }
      int ni = (int)states.size();
      seen.emplace(std::move(key), ni);
      states.push_back(st.next);
      edges.push_back({idx, st.rule + ": " + st.subject + " " + st.action});
      work.push(ni);
    }
  }
  res.kind = RunKind::Terminated;
  res.states = (int)states.size();
  return res;
}

}  // namespace stc

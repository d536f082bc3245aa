#include "typesys.hpp"

#include <tuple>

namespace stc {

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::Typed: return "Typed";
    case Tri::Untyped: return "Untyped";
    case Tri::Indeterminate: return "Indeterminate";
  }
  return "?";
}

std::optional<Sort> type_expr(ExprRef e,
                              const std::map<std::string, Sort>& venv) {
  switch (e->kind) {
    case EK::Var: {
      auto it = venv.find(e->var);
      if (it == venv.end()) return std::nullopt;
      return it->second;
    }
    case EK::Const: return value_sort(e->c);
    case EK::Succ: {
      auto s = type_expr(e->a, venv);
      if (!s || !subsort(*s, Sort::Nat)) return std::nullopt;
      return Sort::Nat;
    }
    case EK::Inv: {
      auto s = type_expr(e->a, venv);
      if (!s || !subsort(*s, Sort::Int)) return std::nullopt;
      return Sort::Int;
    }
    case EK::Not: {
      auto s = type_expr(e->a, venv);
      if (!s || *s != Sort::Bool) return std::nullopt;
      return Sort::Bool;
    }
    case EK::Gt0: {
      auto s = type_expr(e->a, venv);
      if (!s || !subsort(*s, Sort::Int)) return std::nullopt;
      return Sort::Bool;
    }
    case EK::IsUnit: {
      auto s = type_expr(e->a, venv);
      if (!s || *s != Sort::Unit) return std::nullopt;
      return Sort::Bool;
    }
  }
  return std::nullopt;
}

namespace {

using HintKey = std::tuple<std::string, bool, std::string>;
using Hints = std::map<HintKey, std::set<Sort>>;

void collect_hints(TypeRef t, Hints& h) {
  switch (t->kind) {
    case TK::End:
    case TK::Var: return;
    case TK::Rec: collect_hints(t->body, h); return;
    case TK::Branch:
    case TK::Select:
      for (const Choice& c : t->choices) {
        h[{t->peer, t->kind == TK::Select, c.label}].insert(c.payload);
        collect_hints(c.cont, h);
      }
      return;
  }
}

std::optional<Sort> hint_sort(const Hints& h, const std::string& peer,
                              bool out, const std::string& label) {
  auto it = h.find({peer, out, label});
  if (it == h.end() || it->second.size() != 1) return std::nullopt;
  return *it->second.begin();
}

std::optional<Sort> sort_meet(Sort a, Sort b) {
  if (a == b) return a;
  if ((a == Sort::Nat && b == Sort::Int) || (a == Sort::Int && b == Sort::Nat))
    return Sort::Nat;
  return std::nullopt;
}

std::optional<Sort> sort_join(Sort a, Sort b) {
  if (a == b) return a;
  if ((a == Sort::Nat && b == Sort::Int) || (a == Sort::Int && b == Sort::Nat))
    return Sort::Int;
  return std::nullopt;
}

void expr_var_uppers(ExprRef e, const std::string& x, std::vector<Sort>& ub) {
  auto arg_is_x = [&] { return e->a && e->a->kind == EK::Var && e->a->var == x; };
  switch (e->kind) {
    case EK::Var:
    case EK::Const: return;
    case EK::Succ:
      if (arg_is_x()) ub.push_back(Sort::Nat);
      break;
    case EK::Inv:
    case EK::Gt0:
      if (arg_is_x()) ub.push_back(Sort::Int);
      break;
    case EK::Not:
      if (arg_is_x()) ub.push_back(Sort::Bool);
      break;
    case EK::IsUnit:
      if (arg_is_x()) ub.push_back(Sort::Unit);
      break;
  }
  expr_var_uppers(e->a, x, ub);
}

void proc_var_uppers(ProcRef p, const std::string& x, const Hints& h,
                     std::vector<Sort>& ub) {
  switch (p->kind) {
    case PK::Inact:
    case PK::Var: return;
    case PK::Rec: proc_var_uppers(p->body, x, h, ub); return;
    case PK::Out:
      if (p->expr->kind == EK::Var && p->expr->var == x)
        if (auto s = hint_sort(h, p->peer, true, p->label)) ub.push_back(*s);
      expr_var_uppers(p->expr, x, ub);
      proc_var_uppers(p->cont, x, h, ub);
      return;
    case PK::Ext:
      for (const PBranch& b : p->branches)
        if (b.var != x) proc_var_uppers(b.cont, x, h, ub);
      return;
    case PK::Cond:
      if (p->expr->kind == EK::Var && p->expr->var == x)
        ub.push_back(Sort::Bool);
      expr_var_uppers(p->expr, x, ub);
      proc_var_uppers(p->then_p, x, h, ub);
      proc_var_uppers(p->else_p, x, h, ub);
      return;
  }
}

// Least upper bound of two candidate minimal types; nullopt when the
// conditional branches cannot share a type.
std::optional<TypeRef> type_join(TypeRef a, TypeRef b, int fuel) {
  if (a == b) return a;
  if (fuel <= 0) return std::nullopt;
  if (a->kind != b->kind) return std::nullopt;
  switch (a->kind) {
    case TK::End: return a;
    case TK::Var: return a->var == b->var ? std::optional<TypeRef>(a)
                                          : std::nullopt;
    case TK::Rec: {
      auto j = type_join(a->body, b->body, fuel - 1);
      if (!j) return std::nullopt;
      try {
        return t_rec(*j);
      } catch (const std::invalid_argument&) {
        return std::nullopt;
      }
    }
    case TK::Branch: {
      if (a->peer != b->peer) return std::nullopt;
      std::vector<Choice> cs;  // label intersection, payload meet
      for (const Choice& ca : a->choices)
        for (const Choice& cb : b->choices) {
          if (ca.label != cb.label) continue;
          auto s = sort_meet(ca.payload, cb.payload);
          if (!s) continue;
          auto j = type_join(ca.cont, cb.cont, fuel - 1);
          if (!j) continue;
          cs.push_back({ca.label, *s, *j});
        }
      if (cs.empty()) return std::nullopt;
      return t_branch(a->peer, std::move(cs));
    }
    case TK::Select: {
      if (a->peer != b->peer) return std::nullopt;
      std::vector<Choice> cs;  // label union, payload join
      for (const Choice& ca : a->choices) {
        const Choice* match = nullptr;
        for (const Choice& cb : b->choices)
          if (cb.label == ca.label) match = &cb;
        if (!match) {
          cs.push_back(ca);
          continue;
        }
        auto s = sort_join(ca.payload, match->payload);
        if (!s) return std::nullopt;
        auto j = type_join(ca.cont, match->cont, fuel - 1);
        if (!j) return std::nullopt;
        cs.push_back({ca.label, *s, *j});
      }
      for (const Choice& cb : b->choices) {
        bool present = false;
        for (const Choice& ca : a->choices)
          if (ca.label == cb.label) present = true;
        if (!present) cs.push_back(cb);
      }
      return t_select(a->peer, std::move(cs));
    }
  }
  return std::nullopt;
}

SynthResult synth(ProcRef p, const Hints& h, std::map<std::string, Sort>& venv) {
  SynthResult r;
  switch (p->kind) {
    case PK::Inact: r.type = t_end(); return r;
    case PK::Var: r.type = t_var(p->var); return r;
    case PK::Rec: {
      SynthResult b = synth(p->body, h, venv);
      if (b.status != Tri::Typed || b.any) return b;
      try {
        r.type = t_rec(b.type);
      } catch (const std::invalid_argument&) {
        r.any = true;  // recursion without an action is typable at any type
      }
      return r;
    }
    case PK::Out: {
      auto s = type_expr(p->expr, venv);
      if (!s) {
        r.status = Tri::Untyped;
        r.note = "ill-sorted expression " + show_expr(p->expr);
        return r;
      }
      SynthResult c = synth(p->cont, h, venv);
      if (c.status != Tri::Typed) return c;
      if (c.any) {
        r.status = Tri::Indeterminate;
        r.note = "action before an actionless recursion";
        return r;
      }
      r.type = t_out(p->peer, p->label, *s, c.type);
      return r;
    }
    case PK::Ext: {
      std::vector<Choice> cs;
      for (const PBranch& b : p->branches) {
        std::vector<Sort> ub;
        proc_var_uppers(b.cont, b.var, h, ub);
        std::optional<Sort> s;
        if (ub.empty()) {
          s = hint_sort(h, p->peer, false, b.label);
          if (!s) s = Sort::Int;
        } else {
          s = ub[0];
          for (size_t i = 1; s && i < ub.size(); i++) s = sort_meet(*s, ub[i]);
          if (!s) {
            r.status = Tri::Untyped;
            r.note = "variable " + b.var + " used at incompatible sorts";
            return r;
          }
        }
        auto saved = venv.find(b.var) != venv.end()
                         ? std::optional<Sort>(venv[b.var])
                         : std::nullopt;
        venv[b.var] = *s;
        SynthResult c = synth(b.cont, h, venv);
        if (saved) venv[b.var] = *saved;
        else venv.erase(b.var);
        if (c.status != Tri::Typed) return c;
        if (c.any) {
          r.status = Tri::Indeterminate;
          r.note = "action before an actionless recursion";
          return r;
        }
        cs.push_back({b.label, *s, c.type});
      }
      r.type = t_branch(p->peer, std::move(cs));
      return r;
    }
    case PK::Cond: {
      auto s = type_expr(p->expr, venv);
      if (!s || *s != Sort::Bool) {
        r.status = Tri::Untyped;
        r.note = "condition " + show_expr(p->expr) + " is not boolean";
        return r;
      }
      SynthResult a = synth(p->then_p, h, venv);
      if (a.status != Tri::Typed) return a;
      SynthResult b = synth(p->else_p, h, venv);
      if (b.status != Tri::Typed) return b;
      if (a.any) return b;
      if (b.any) return a;
      auto j = type_join(a.type, b.type, 256);
      if (!j) {
        r.status = Tri::Indeterminate;
        r.note = "conditional branch types do not join";
        return r;
      }
      r.type = *j;
      return r;
    }
  }
  r.status = Tri::Indeterminate;
  return r;
}

}  // namespace

SynthResult minimal_type(ProcRef p, TypeRef hint) {
  Hints h;
  if (hint) collect_hints(hint, h);
  std::map<std::string, Sort> venv;
  return synth(p, h, venv);
}

Tri check_process(ProcRef p, TypeRef t, const SubtypeLimits& lim) {
  SynthResult r = minimal_type(p, t);
  if (r.status != Tri::Typed) return r.status;
  if (r.any) return Tri::Typed;
  if (type_equal(r.type, t)) return Tri::Typed;
  SubtypeResult s = subtype(r.type, t, lim);
  switch (s.verdict) {
    case V3::Yes: return Tri::Typed;
    case V3::No: return Tri::Untyped;
    case V3::Unknown: return Tri::Indeterminate;
  }
  return Tri::Indeterminate;
}

Tri check_session(const Session& s, const TypingEnv& g,
                  const SubtypeLimits& lim) {
  std::set<std::string> names;
  for (const auto& [p, part] : s) names.insert(p);
  for (const auto& [p, e] : g) names.insert(p);
  Tri worst = Tri::Typed;
  auto merge = [&](Tri t) {
    if (t == Tri::Untyped) worst = Tri::Untyped;
    else if (t == Tri::Indeterminate && worst == Tri::Typed)
      worst = Tri::Indeterminate;
  };
  static const Part empty_part{p_inact(), {}};
  static const EnvEntry empty_entry{{}, t_end()};
  for (const std::string& p : names) {
    auto si = s.find(p);
    const Part& part = si == s.end() ? empty_part : si->second;
    auto gi = g.find(p);
    const EnvEntry& ent = gi == g.end() ? empty_entry : gi->second;
    if (part.queue.size() != ent.queue.size()) return Tri::Untyped;
    for (size_t i = 0; i < part.queue.size(); i++) {
      const Msg& m = part.queue[i];
      const QItem& q = ent.queue[i];
      if (m.to != q.to || m.label != q.label ||
          !subsort(value_sort(m.value), q.payload))
        return Tri::Untyped;
    }
    merge(check_process(part.proc, ent.type, lim));
    if (worst == Tri::Untyped) return worst;
  }
  return worst;
}

}  // namespace stc

#include "core.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace stc {

bool subsort(Sort a, Sort b) {
  return a == b || (a == Sort::Nat && b == Sort::Int);
}

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Nat: return "nat";
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
    case Sort::Unit: return "unit";
  }
  return "?";
}

std::optional<Sort> sort_from(const std::string& s) {
  if (s == "nat") return Sort::Nat;
  if (s == "int") return Sort::Int;
  if (s == "bool") return Sort::Bool;
  if (s == "unit") return Sort::Unit;
  return std::nullopt;
}

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

uint64_t str_hash(const std::string& s) {
  return std::hash<std::string>{}(s);
}

struct NodeHash {
  size_t operator()(const Type* t) const { return (size_t)t->hash; }
};
struct NodeEq {
  bool operator()(const Type* a, const Type* b) const {
    if (a->kind != b->kind || a->hash != b->hash) return false;
    switch (a->kind) {
      case TK::End: return true;
      case TK::Var: return a->var == b->var;
      case TK::Rec: return a->body == b->body;
      case TK::Branch:
      case TK::Select: {
        if (a->peer != b->peer || a->choices.size() != b->choices.size())
          return false;
        for (size_t i = 0; i < a->choices.size(); i++) {
          const Choice& x = a->choices[i];
          const Choice& y = b->choices[i];
          if (x.label != y.label || x.payload != y.payload || x.cont != y.cont)
            return false;
        }
        return true;
      }
    }
    return false;
  }
};

std::mutex g_mu;
std::unordered_set<Type*, NodeHash, NodeEq>& table() {
  static std::unordered_set<Type*, NodeHash, NodeEq> t;
  return t;
}
uint32_t g_next_id = 1;

TypeRef intern(Type&& n) {
  std::lock_guard<std::mutex> lk(g_mu);
  auto it = table().find(&n);
  if (it != table().end()) return *it;
  Type* p = new Type(std::move(n));
  p->id = g_next_id++;
  table().insert(p);
  return p;
}

// Body is unguarded if stripping leading Recs exposes a bare Var.
bool unguarded(TypeRef body) {
  while (body->kind == TK::Rec) body = body->body;
  return body->kind == TK::Var;
}

}  // namespace

TypeRef t_end() {
  static TypeRef e = [] {
    Type n;
    n.kind = TK::End;
    n.hash = 0x11ULL;
    n.nodes = 1;
    n.maxfree = 0;
    return intern(std::move(n));
  }();
  return e;
}

TypeRef t_var(int idx) {
  if (idx < 0) throw std::invalid_argument("negative var index");
  Type n;
  n.kind = TK::Var;
  n.var = idx;
  n.hash = mix(0x22ULL, (uint64_t)idx);
  n.nodes = 1;
  n.maxfree = idx + 1;
  return intern(std::move(n));
}

TypeRef t_rec(TypeRef body) {
  if (unguarded(body)) throw std::invalid_argument("unguarded recursion");
  Type n;
  n.kind = TK::Rec;
  n.body = body;
  n.hash = mix(0x33ULL, body->hash);
  n.nodes = body->nodes + 1;
  n.maxfree = std::max(0, body->maxfree - 1);
  return intern(std::move(n));
}

TypeRef t_choice(bool output, const std::string& peer, std::vector<Choice> cs) {
  if (cs.empty()) throw std::invalid_argument("empty choice");
  std::sort(cs.begin(), cs.end(),
            [](const Choice& a, const Choice& b) { return a.label < b.label; });
  for (size_t i = 1; i < cs.size(); i++)
    if (cs[i].label == cs[i - 1].label)
      throw std::invalid_argument("duplicate label " + cs[i].label);
  Type n;
  n.kind = output ? TK::Select : TK::Branch;
  n.peer = peer;
  uint64_t h = mix(output ? 0x55ULL : 0x44ULL, str_hash(peer));
  int nodes = 1;
  int mf = 0;
  for (const Choice& c : cs) {
    h = mix(h, str_hash(c.label));
    h = mix(h, (uint64_t)c.payload);
    h = mix(h, c.cont->hash);
    nodes += c.cont->nodes;
    mf = std::max(mf, c.cont->maxfree);
  }
  n.choices = std::move(cs);
  n.hash = h;
  n.nodes = nodes;
  n.maxfree = mf;
  return intern(std::move(n));
}

TypeRef t_branch(const std::string& peer, std::vector<Choice> cs) {
  return t_choice(false, peer, std::move(cs));
}
TypeRef t_select(const std::string& peer, std::vector<Choice> cs) {
  return t_choice(true, peer, std::move(cs));
}
TypeRef t_in(const std::string& p, const std::string& l, Sort s, TypeRef k) {
  return t_branch(p, {{l, s, k}});
}
TypeRef t_out(const std::string& p, const std::string& l, Sort s, TypeRef k) {
  return t_select(p, {{l, s, k}});
}

TypeRef subst(TypeRef t, int depth, TypeRef repl) {
  if (t->maxfree <= depth) return t;  // depth not free in t
  switch (t->kind) {
    case TK::End: return t;
    case TK::Var:
      if (t->var == depth) return repl;
      if (t->var > depth) return t_var(t->var - 1);
      return t;
    case TK::Rec: return t_rec(subst(t->body, depth + 1, repl));
    case TK::Branch:
    case TK::Select: {
      std::vector<Choice> cs = t->choices;
      for (Choice& c : cs) c.cont = subst(c.cont, depth, repl);
      return t_choice(t->kind == TK::Select, t->peer, std::move(cs));
    }
  }
  return t;
}

TypeRef unfold(TypeRef t) {
  if (t->kind != TK::Rec) return t;
  if (!closed(t)) throw std::invalid_argument("unfold on open type");
  return subst(t->body, 0, t);
}

TypeRef resolve(TypeRef t) {
  while (t->kind == TK::Rec) t = unfold(t);
  return t;
}

bool uses_var(TypeRef t, int idx) {
  if (t->maxfree <= idx) return false;
  switch (t->kind) {
    case TK::End: return false;
    case TK::Var: return t->var == idx;
    case TK::Rec: return uses_var(t->body, idx + 1);
    case TK::Branch:
    case TK::Select:
      for (const Choice& c : t->choices)
        if (uses_var(c.cont, idx)) return true;
      return false;
  }
  return false;
}

TypeRef shift_down(TypeRef t, int above) {
  if (t->maxfree <= above) return t;
  switch (t->kind) {
    case TK::End: return t;
    case TK::Var: return t->var > above ? t_var(t->var - 1) : t;
    case TK::Rec: return t_rec(shift_down(t->body, above + 1));
    case TK::Branch:
    case TK::Select: {
      std::vector<Choice> cs = t->choices;
      for (Choice& c : cs) c.cont = shift_down(c.cont, above);
      return t_choice(t->kind == TK::Select, t->peer, std::move(cs));
    }
  }
  return t;
}

namespace {

// Actions are syntactic: unfolding never adds or removes reachable prefixes.
void collect_actions(TypeRef t, ActionSet& out) {
  switch (t->kind) {
    case TK::End:
    case TK::Var: return;
    case TK::Rec: collect_actions(t->body, out); return;
    case TK::Branch:
    case TK::Select:
      out.insert({t->peer, t->kind == TK::Select});
      for (const Choice& c : t->choices) collect_actions(c.cont, out);
      return;
  }
}

std::mutex g_act_mu;
std::unordered_map<uint32_t, ActionSet> g_act;

}  // namespace

const ActionSet& actions(TypeRef t) {
  {
    std::lock_guard<std::mutex> lk(g_act_mu);
    auto it = g_act.find(t->id);
    if (it != g_act.end()) return it->second;
  }
  ActionSet s;
  collect_actions(t, s);
  std::lock_guard<std::mutex> lk(g_act_mu);
  return g_act.emplace(t->id, std::move(s)).first->second;
}

std::set<std::string> participants(TypeRef t) {
  std::set<std::string> out;
  for (const auto& [p, d] : actions(t)) out.insert(p);
  return out;
}

bool has_action(TypeRef t, const std::string& p, bool output) {
  return actions(t).count({p, output}) > 0;
}

namespace {

std::mutex g_eq_mu;
std::unordered_map<uint64_t, bool> g_eq_cache;

uint64_t pair_key(TypeRef a, TypeRef b) {
  return ((uint64_t)a->id << 32) | b->id;
}

bool bisim(TypeRef a, TypeRef b,
           std::set<std::pair<TypeRef, TypeRef>>& assumed) {
  if (a == b) return true;
  {
    std::lock_guard<std::mutex> lk(g_eq_mu);
    auto it = g_eq_cache.find(pair_key(a, b));
    if (it != g_eq_cache.end()) return it->second;
  }
  TypeRef ra = resolve(a);
  TypeRef rb = resolve(b);
  bool ok = true;
  if (ra == rb) return true;
  if (!assumed.insert({ra, rb}).second) return true;
  if (ra->kind != rb->kind || ra->peer != rb->peer ||
      ra->choices.size() != rb->choices.size()) {
    ok = false;
  } else if (ra->kind == TK::End) {
    ok = true;
  } else {
    for (size_t i = 0; ok && i < ra->choices.size(); i++) {
      const Choice& x = ra->choices[i];
      const Choice& y = rb->choices[i];
      if (x.label != y.label || x.payload != y.payload) ok = false;
      else ok = bisim(x.cont, y.cont, assumed);
    }
  }
  assumed.erase({ra, rb});
  if (!ok) {  // failure is unconditional; safe to cache
    std::lock_guard<std::mutex> lk(g_eq_mu);
    g_eq_cache[pair_key(a, b)] = false;
    g_eq_cache[pair_key(b, a)] = false;
  }
  return ok;
}

}  // namespace

bool type_equal(TypeRef a, TypeRef b) {
  if (a == b) return true;
  if (!closed(a) || !closed(b)) throw std::invalid_argument("open type");
  std::set<std::pair<TypeRef, TypeRef>> assumed;
  bool r = bisim(a, b, assumed);
  std::lock_guard<std::mutex> lk(g_eq_mu);
  g_eq_cache[pair_key(a, b)] = r;
  g_eq_cache[pair_key(b, a)] = r;
  return r;
}

namespace {

void show(TypeRef t, int depth, std::string& out) {
  switch (t->kind) {
    case TK::End: out += "end"; return;
    case TK::Var: out += "t" + std::to_string(depth - t->var); return;
    case TK::Rec:
      out += "rec t" + std::to_string(depth + 1) + " . ";
      show(t->body, depth + 1, out);
      return;
    case TK::Branch:
    case TK::Select: {
      bool outp = t->kind == TK::Select;
      if (t->choices.size() == 1) {
        const Choice& c = t->choices[0];
        out += t->peer + (outp ? "!" : "?") + c.label;
        if (c.payload != Sort::Unit)
          out += std::string("(") + sort_name(c.payload) + ")";
        out += ".";
        show(c.cont, depth, out);
        return;
      }
      out += t->peer + (outp ? "+{" : "&{");
      bool first = true;
      for (const Choice& c : t->choices) {
        if (!first) out += ", ";
        first = false;
        out += c.label;
        if (c.payload != Sort::Unit)
          out += std::string("(") + sort_name(c.payload) + ")";
        out += ".";
        show(c.cont, depth, out);
      }
      out += "}";
      return;
    }
  }
}

}  // namespace

std::string show_type(TypeRef t) {
  std::string out;
  show(t, 0, out);
  return out;
}

std::string show_sorted_action(const std::string& peer, bool output,
                               const std::string& label, Sort s) {
  std::string out = peer + (output ? "!" : "?") + label;
  if (s != Sort::Unit) out += std::string("(") + sort_name(s) + ")";
  return out;
}

}  // namespace stc

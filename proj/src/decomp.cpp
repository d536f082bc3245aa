#include "decomp.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace stc {

namespace {

bool singleton_kind(TypeRef t, TK kind) {
  switch (t->kind) {
    case TK::End:
    case TK::Var: return true;
    case TK::Rec: return singleton_kind(t->body, kind);
    case TK::Branch:
    case TK::Select:
      if (t->kind == kind && t->choices.size() != 1) return false;
      for (const Choice& c : t->choices)
        if (!singleton_kind(c.cont, kind)) return false;
      return true;
  }
  return true;
}

}  // namespace

bool is_so(TypeRef t) { return singleton_kind(t, TK::Select); }
bool is_si(TypeRef t) { return singleton_kind(t, TK::Branch); }
bool is_siso(TypeRef t) { return is_so(t) && is_si(t); }

namespace {

// Enumerates singleton-`pick` decompositions by unrolling each recursive
// state at most `bound` times, closing loops with back-edges to the
// innermost open occurrence.
struct Enumerator {
  TK pick;  // Select for SO, Branch for SI
  int bound;
  size_t cap;
  bool bound_hit = false;
  bool truncated = false;
  std::vector<TypeRef> stack;  // resolved open states, innermost last

  std::vector<TypeRef> go(TypeRef s) {
    TypeRef r = resolve(s);
    if (r->kind == TK::End) return {t_end()};
    std::vector<TypeRef> out;
    int cnt = 0;
    int last = -1;
    for (int i = 0; i < (int)stack.size(); i++)
      if (stack[i] == r) {
        cnt++;
        last = i;
      }
    if (cnt > 0) out.push_back(t_var((int)stack.size() - 1 - last));
    if (cnt < bound) {
      stack.push_back(r);
      std::vector<TypeRef> exps = expand(r);
      stack.pop_back();
      for (TypeRef e : exps)
        out.push_back(uses_var(e, 0) ? t_rec(e) : shift_down(e, 0));
    } else {
      bound_hit = true;
    }
    // Dedupe: hash consing makes identical terms pointer equal; closed
    // members may also repeat as distinct unrollings of one regular tree.
    std::vector<TypeRef> uniq;
    for (TypeRef m : out) {
      bool dup = false;
      for (TypeRef x : uniq)
        if (x == m ||
            (m->maxfree == 0 && x->maxfree == 0 && type_equal(x, m))) {
          dup = true;
          break;
        }
      if (!dup) uniq.push_back(m);
    }
    std::sort(uniq.begin(), uniq.end(), [](TypeRef a, TypeRef b) {
      if (a->nodes != b->nodes) return a->nodes < b->nodes;
      return a->id < b->id;
    });
    if (uniq.size() > cap) {
      uniq.resize(cap);
      truncated = true;
    }
    return uniq;
  }

  std::vector<TypeRef> expand(TypeRef r) {
    std::vector<TypeRef> out;
    bool output = r->kind == TK::Select;
    if (r->kind == pick) {
      for (const Choice& c : r->choices)
        for (TypeRef m : go(c.cont))
          out.push_back(t_choice(output, r->peer, {{c.label, c.payload, m}}));
      return out;
    }
    // kept kind: cartesian product over per-choice member lists
    std::vector<std::vector<TypeRef>> lists;
    size_t total = 1;
    for (const Choice& c : r->choices) {
      lists.push_back(go(c.cont));
      if (lists.back().empty()) return {};
      total *= lists.back().size();
      if (total > cap * 4) {
        truncated = true;
        total = cap * 4;
      }
    }
    std::vector<size_t> idx(lists.size(), 0);
    for (size_t n = 0; n < total; n++) {
      std::vector<Choice> cs;
      for (size_t i = 0; i < lists.size(); i++) {
        const Choice& c = r->choices[i];
        cs.push_back({c.label, c.payload, lists[i][idx[i]]});
      }
      out.push_back(t_choice(output, r->peer, std::move(cs)));
      for (size_t i = 0; i < idx.size(); i++) {
        if (++idx[i] < lists[i].size()) break;
        idx[i] = 0;
      }
    }
    return out;
  }
};

struct RunOut {
  std::vector<TypeRef> members;
  bool bound_hit;
  bool truncated;
};

RunOut run_enum(TypeRef t, TK pick, int bound, size_t cap) {
  Enumerator e{pick, bound, cap};
  std::vector<TypeRef> ms = e.go(t);
  // closed-level dedupe up to tree equality, deterministic order
  std::vector<TypeRef> uniq;
  for (TypeRef m : ms) {
    bool dup = false;
    for (TypeRef u : uniq)
      if (type_equal(u, m)) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(m);
  }
  std::sort(uniq.begin(), uniq.end(), [](TypeRef a, TypeRef b) {
    if (a->nodes != b->nodes) return a->nodes < b->nodes;
    return show_type(a) < show_type(b);
  });
  if (uniq.size() > cap) {
    uniq.resize(cap);
    e.truncated = true;
  }
  return {std::move(uniq), e.bound_hit, e.truncated};
}

bool same_member_set(const std::vector<TypeRef>& a,
                     const std::vector<TypeRef>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++)
    if (!type_equal(a[i], b[i])) return false;
  return true;
}

std::mutex g_dec_mu;
std::map<std::tuple<uint32_t, int, int, int>, Decomp> g_dec_cache;

Decomp decompose(TypeRef t, TK pick, int bound, int cap) {
  if (!closed(t)) throw std::invalid_argument("open type");
  auto key = std::make_tuple(t->id, (int)pick, bound, cap);
  {
    std::lock_guard<std::mutex> lk(g_dec_mu);
    auto it = g_dec_cache.find(key);
    if (it != g_dec_cache.end()) return it->second;
  }
  RunOut r = run_enum(t, pick, bound, (size_t)cap);
  Decomp d;
  d.members = r.members;
  if (!r.bound_hit && !r.truncated) {
    d.complete = true;
  } else if (!r.truncated && bound > 1) {
    // saturation: the set no longer grows with deeper unrolling
    RunOut prev = run_enum(t, pick, bound - 1, (size_t)cap);
    d.complete = !prev.truncated && same_member_set(prev.members, r.members);
  }
  std::lock_guard<std::mutex> lk(g_dec_mu);
  return g_dec_cache.emplace(key, std::move(d)).first->second;
}

}  // namespace

Decomp decompose_so(TypeRef t, int unroll_bound, int max_members) {
  return decompose(t, TK::Select, unroll_bound, max_members);
}
Decomp decompose_si(TypeRef t, int unroll_bound, int max_members) {
  return decompose(t, TK::Branch, unroll_bound, max_members);
}
Decomp decompose_siso(TypeRef t, int unroll_bound, int max_members) {
  if (is_so(t)) return decompose(t, TK::Branch, unroll_bound, max_members);
  if (is_si(t)) return decompose(t, TK::Select, unroll_bound, max_members);
  throw std::invalid_argument("siso decomposition needs an SO or SI input");
}

std::string show_prefix_item(const PrefixItem& it) {
  return show_sorted_action(it.peer, it.out, it.label, it.payload);
}

std::optional<PrefixItem> head_item(TypeRef w) {
  TypeRef r = resolve(w);
  if (r->kind != TK::Branch && r->kind != TK::Select) return std::nullopt;
  if (r->choices.size() != 1) return std::nullopt;
  const Choice& c = r->choices[0];
  return PrefixItem{r->kind == TK::Select, r->peer, c.label, c.payload};
}

TypeRef wrap_prefix(const std::vector<PrefixItem>& pre, TypeRef t) {
  TypeRef out = t;
  for (auto it = pre.rbegin(); it != pre.rend(); ++it)
    out = t_choice(it->out, it->peer, {{it->label, it->payload, out}});
  return out;
}

std::vector<Factorization> split_prefix(TypeRef w, const std::string& p,
                                        char kind, int max_len) {
  if (max_len <= 0) max_len = 3 * node_count(w);
  std::vector<Factorization> out;
  std::vector<PrefixItem> items;
  TypeRef cur = w;
  while ((int)items.size() <= max_len) {
    TypeRef r = resolve(cur);
    if (r->kind != TK::Branch && r->kind != TK::Select) break;
    if (r->choices.size() != 1) break;  // factorizations live on SISO spines
    bool outp = r->kind == TK::Select;
    bool residual_head = !items.empty() &&
                         (kind == 'A' ? (!outp && r->peer == p)
                                      : (outp && r->peer == p));
    if (residual_head) out.push_back({items, r});
    // may the head be a context item?
    bool item_ok = kind == 'A' ? (!outp && r->peer != p)
                               : (!outp || r->peer != p);
    if (!item_ok) break;
    const Choice& c = r->choices[0];
    items.push_back({outp, r->peer, c.label, c.payload});
    cur = c.cont;
  }
  return out;
}

TypeRef mufree(TypeRef t) {
  switch (t->kind) {
    case TK::End:
    case TK::Var: return t;
    case TK::Rec: {
      TypeRef b = mufree(t->body);
      return uses_var(b, 0) ? t_rec(b) : shift_down(b, 0);
    }
    case TK::Branch:
    case TK::Select: {
      std::vector<Choice> cs = t->choices;
      for (Choice& c : cs) c.cont = mufree(c.cont);
      return t_choice(t->kind == TK::Select, t->peer, std::move(cs));
    }
  }
  return t;
}

namespace {

struct RegWalker {
  const std::vector<std::string>* prefix;
  const std::vector<std::string>* cycle;
  int n;
  int guard = 0;
  // open states: (resolved state, phase key); phase key is the path
  // position while still inside prefix/n, else the cycle offset + 1e9.
  std::vector<std::pair<TypeRef, long>> stack;

  long phase_key(int pos) const {
    if (pos < n || pos < (int)prefix->size()) return pos;
    if (cycle->empty()) return 1000000000L;
    return 1000000000L + (pos - (long)prefix->size()) % (long)cycle->size();
  }

  const std::string& label_at(int pos) const {
    if (pos < (int)prefix->size()) return (*prefix)[pos];
    if (cycle->empty())
      throw std::invalid_argument("path descriptor exhausted");
    return (*cycle)[(pos - prefix->size()) % cycle->size()];
  }

  TypeRef go(TypeRef s, int pos) {
    if (++guard > 100000)
      throw std::invalid_argument("path descriptor does not stabilize");
    TypeRef r = resolve(s);
    if (r->kind == TK::End) return t_end();
    long key = phase_key(pos);
    for (int i = (int)stack.size() - 1; i >= 0; i--)
      if (stack[i].first == r && stack[i].second == key)
        return t_var((int)stack.size() - 1 - i);
    stack.push_back({r, key});
    TypeRef body;
    if (r->kind == TK::Select) {
      const std::string& l = label_at(pos);
      const Choice* hit = nullptr;
      for (const Choice& c : r->choices)
        if (c.label == l) hit = &c;
      if (!hit)
        throw std::invalid_argument("descriptor label " + l +
                                    " not offered by the type");
      body = t_select(r->peer, {{hit->label, hit->payload, go(hit->cont, pos + 1)}});
    } else {
      std::vector<Choice> cs = r->choices;
      for (Choice& c : cs) c.cont = go(c.cont, pos);
      body = t_branch(r->peer, std::move(cs));
    }
    stack.pop_back();
    return uses_var(body, 0) ? t_rec(body) : shift_down(body, 0);
  }
};

}  // namespace

TypeRef regularize_so(TypeRef t, const std::vector<std::string>& prefix,
                      const std::vector<std::string>& cycle, int n) {
  if (!closed(t)) throw std::invalid_argument("open type");
  RegWalker w{&prefix, &cycle, n};
  return mufree(w.go(t, 0));
}

}  // namespace stc

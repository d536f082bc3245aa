#include "gen.hpp"

#include <functional>

namespace stc {

bool has_rec(TypeRef t) {
  switch (t->kind) {
    case TK::End:
    case TK::Var: return t->kind == TK::Var;
    case TK::Rec: return true;
    case TK::Branch:
    case TK::Select:
      for (const Choice& c : t->choices)
        if (has_rec(c.cont)) return true;
      return false;
  }
  return false;
}

std::vector<TypeRef> corpus_types() {
  const std::vector<std::string> peers{"p", "q"};
  const std::vector<std::string> labels{"l1", "l2"};
  const std::vector<Sort> sorts{Sort::Nat, Sort::Bool};
  std::vector<TypeRef> out{t_end()};
  std::vector<TypeRef> singles;  // two nodes: one prefix then end
  for (bool dir : {false, true})
    for (const auto& p : peers)
      for (const auto& l : labels)
        for (Sort s : sorts)
          singles.push_back(t_choice(dir, p, {{l, s, t_end()}}));
  for (TypeRef s : singles) out.push_back(s);
  for (bool dir : {false, true})  // three nodes: both labels, one level
    for (const auto& p : peers)
      for (Sort s1 : sorts)
        for (Sort s2 : sorts)
          out.push_back(t_choice(
              dir, p, {{"l1", s1, t_end()}, {"l2", s2, t_end()}}));
  for (bool dir : {false, true})  // three nodes: chains of two prefixes
    for (const auto& p : peers)
      for (const auto& l : labels)
        for (Sort s : sorts)
          for (TypeRef k : singles)
            out.push_back(t_choice(dir, p, {{l, s, k}}));
  return out;
}

TypeRef gen_regular_type(std::mt19937_64& rng, const GenOpts& o) {
  std::function<TypeRef(int, int, bool)> go = [&](int fuel, int binders,
                                                  bool guarded) -> TypeRef {
    auto pick = [&](size_t n) { return (size_t)(rng() % n); };
    if (fuel <= 0) {
      if (binders > 0 && guarded && pick(2) == 0)
        return t_var((int)pick((size_t)binders));
      return t_end();
    }
    size_t roll = pick(100);
    if (roll < 10 && binders > 0 && guarded)
      return t_var((int)pick((size_t)binders));
    if (roll < 22) return t_end();
    if (roll < 40 && o.allow_rec) {
      try {
        return t_rec(go(fuel - 1, binders + 1, false));
      } catch (const std::invalid_argument&) {
        return t_end();
      }
    }
    bool out = pick(2) == 1;
    const std::string& peer = o.participants[pick(o.participants.size())];
    size_t width = 1;
    if (o.max_width > 1 && o.labels.size() > 1 && pick(3) == 0)
      width = 2 + pick(std::min((size_t)o.max_width, o.labels.size()) - 1);
    std::vector<std::string> ls = o.labels;
    for (size_t i = ls.size() - 1; i > 0; i--) std::swap(ls[i], ls[pick(i + 1)]);
    std::vector<Choice> cs;
    for (size_t i = 0; i < width; i++)
      cs.push_back({ls[i], o.sorts[pick(o.sorts.size())],
                    go(fuel - 1, binders, true)});
    return t_choice(out, peer, std::move(cs));
  };
  return go(o.max_depth, 0, false);
}

namespace {

// Exhaustive single-Select (pick = Select) or single-Branch decompositions
// of a recursion-free type.
std::vector<TypeRef> bf_members(TypeRef t, TK pick) {
  if (t->kind == TK::End) return {t_end()};
  std::vector<TypeRef> out;
  bool outp = t->kind == TK::Select;
  if (t->kind == pick) {
    for (const Choice& c : t->choices)
      for (TypeRef m : bf_members(c.cont, pick))
        out.push_back(t_choice(outp, t->peer, {{c.label, c.payload, m}}));
    return out;
  }
  std::vector<std::vector<TypeRef>> lists;
  for (const Choice& c : t->choices) lists.push_back(bf_members(c.cont, pick));
  std::vector<size_t> idx(lists.size(), 0);
  while (true) {
    std::vector<Choice> cs;
    for (size_t i = 0; i < lists.size(); i++) {
      const Choice& c = t->choices[i];
      cs.push_back({c.label, c.payload, lists[i][idx[i]]});
    }
    out.push_back(t_choice(outp, t->peer, std::move(cs)));
    size_t i = 0;
    for (; i < idx.size(); i++) {
      if (++idx[i] < lists[i].size()) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  return out;
}

struct BfItem {
  bool out;
  std::string peer;
  std::string label;
  Sort payload;
};

TypeRef bf_wrap(const std::vector<BfItem>& pre, TypeRef t) {
  TypeRef r = t;
  for (auto it = pre.rbegin(); it != pre.rend(); ++it)
    r = t_choice(it->out, it->peer, {{it->label, it->payload, r}});
  return r;
}

// Direct backtracking decision of SISO refinement on finite trees.
bool bf_refine(TypeRef w, TypeRef w2) {
  if (w->kind == TK::End && w2->kind == TK::End) return true;
  if (w->kind != TK::Branch && w->kind != TK::Select) return false;
  if (w->choices.size() != 1) return false;
  bool out = w->kind == TK::Select;
  const Choice& c = w->choices[0];
  const std::string& p = w->peer;
  // direct heads
  if (w2->kind == w->kind && w2->peer == p && w2->choices.size() == 1) {
    const Choice& c2 = w2->choices[0];
    bool sorts_ok = out ? subsort(c.payload, c2.payload)
                        : subsort(c2.payload, c.payload);
    if (c2.label == c.label && sorts_ok && bf_refine(c.cont, c2.cont))
      return true;
  }
  // every factorization with a nonempty permitted prefix
  std::vector<BfItem> ctx;
  TypeRef cur = w2;
  while (true) {
    if (cur->kind != TK::Branch && cur->kind != TK::Select) break;
    if (cur->choices.size() != 1) break;
    bool curo = cur->kind == TK::Select;
    const Choice& cc = cur->choices[0];
    bool residual = !ctx.empty() && cur->peer == p && curo == out;
    if (residual && cc.label == c.label) {
      bool sorts_ok = out ? subsort(c.payload, cc.payload)
                          : subsort(cc.payload, c.payload);
      TypeRef prem = bf_wrap(ctx, cc.cont);
      if (sorts_ok && actions(c.cont) == actions(prem) &&
          bf_refine(c.cont, prem))
        return true;
    }
    bool item_ok = out ? (!curo || cur->peer != p) : (!curo && cur->peer != p);
    if (!item_ok) break;
    ctx.push_back({curo, cur->peer, cc.label, cc.payload});
    cur = cc.cont;
  }
  return false;
}

}  // namespace

std::optional<bool> brute_force_subtype(TypeRef t, TypeRef t2) {
  if (has_rec(t) || has_rec(t2)) return std::nullopt;
  std::vector<TypeRef> us = bf_members(t, TK::Select);
  std::vector<TypeRef> vs = bf_members(t2, TK::Branch);
  for (TypeRef u : us) {
    std::vector<TypeRef> ws = bf_members(u, TK::Branch);
    for (TypeRef v : vs) {
      std::vector<TypeRef> w2s = bf_members(v, TK::Select);
      bool cell = false;
      for (TypeRef w : ws) {
        for (TypeRef w2 : w2s)
          if (bf_refine(w, w2)) {
            cell = true;
            break;
          }
        if (cell) break;
      }
      if (!cell) return false;
    }
  }
  return true;
}

}  // namespace stc

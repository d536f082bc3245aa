#include "refine.hpp"

#include <algorithm>

namespace stc {

const char* v3_name(V3 v) {
  switch (v) {
    case V3::Yes: return "Yes";
    case V3::No: return "No";
    case V3::Unknown: return "Unknown";
  }
  return "?";
}

namespace {

TypeRef spine_cont(TypeRef t) {
  TypeRef r = resolve(t);
  return r->choices[0].cont;
}

std::optional<TypeRef> spine_drop(TypeRef t, int d) {
  for (int i = 0; i < d; i++) {
    TypeRef r = resolve(t);
    if (r->kind == TK::End || r->choices.size() != 1) return std::nullopt;
    t = r->choices[0].cont;
  }
  return t;
}

std::optional<std::vector<PrefixItem>> spine_take(TypeRef t, int d) {
  std::vector<PrefixItem> out;
  for (int i = 0; i < d; i++) {
    auto h = head_item(t);
    if (!h) return std::nullopt;
    out.push_back(*h);
    t = spine_cont(t);
  }
  return out;
}

TypeRef insert_word(TypeRef base, int pos,
                    const std::vector<PrefixItem>& word, int copies) {
  auto pre = spine_take(base, pos);
  auto rest = spine_drop(base, pos);
  if (!pre || !rest) throw std::invalid_argument("bad insertion position");
  std::vector<PrefixItem> full = *pre;
  for (int i = 0; i < copies; i++)
    full.insert(full.end(), word.begin(), word.end());
  return wrap_prefix(full, *rest);
}

bool act_eq(TypeRef a, TypeRef b) { return actions(a) == actions(b); }

}  // namespace

std::optional<std::pair<int, std::vector<PrefixItem>>> find_insertion(
    TypeRef rhs1, TypeRef rhs2, int max_pos, int max_word) {
  TypeRef a = rhs1;
  TypeRef b = rhs2;
  for (int pos = 0; pos <= max_pos; pos++) {
    for (int d = 1; d <= max_word; d++) {
      auto bd = spine_drop(b, d);
      if (!bd) break;
      if (type_equal(a, *bd)) {
        auto w = spine_take(b, d);
        if (w) return std::make_pair(pos, *w);
      }
    }
    auto ha = head_item(a);
    auto hb = head_item(b);
    if (!ha || !hb || !(*ha == *hb)) return std::nullopt;
    a = spine_cont(a);
    b = spine_cont(b);
  }
  return std::nullopt;
}

RuleStep rule_step(const Judgment& j, const RefineLimits& lim) {
  TypeRef a = resolve(j.lhs);
  TypeRef b = resolve(j.rhs);
  if (a->kind == TK::End && b->kind == TK::End)
    return {StepKind::True, "ref-end", {}, {}};
  if ((a->kind == TK::Branch || a->kind == TK::Select) &&
      a->choices.size() == 1) {
    bool out = a->kind == TK::Select;
    const Choice& c = a->choices[0];
    if (b->kind == a->kind && b->peer == a->peer && b->choices.size() == 1) {
      const Choice& cb = b->choices[0];
      bool sorts_ok = out ? subsort(c.payload, cb.payload)
                          : subsort(cb.payload, c.payload);
      if (cb.label == c.label && sorts_ok)
        return {StepKind::Premise, out ? "ref-out" : "ref-in",
                {c.cont, cb.cont}, {}};
      return {};
    }
    if (!lim.allow_reorder) return {};
    auto facts = split_prefix(j.rhs, a->peer, out ? 'B' : 'A', lim.max_prefix);
    for (const Factorization& f : facts) {
      const Choice& cr = f.residual->choices[0];
      if (cr.label != c.label) return {};  // shortest match is the only one
      bool sorts_ok = out ? subsort(c.payload, cr.payload)
                          : subsort(cr.payload, c.payload);
      if (!sorts_ok) return {};
      TypeRef prem_rhs = wrap_prefix(f.prefix, cr.cont);
      if (!act_eq(c.cont, prem_rhs)) return {};
      return {StepKind::Premise, out ? "ref-B" : "ref-A",
              {c.cont, prem_rhs}, f.prefix};
    }
    return {};
  }
  return {};
}

namespace {

struct PathEntry {
  TypeRef lhs;
  TypeRef rhs;
  std::string rule;
};

std::optional<NegNode> classify(TypeRef l, TypeRef r, const RefineLimits& lim,
                                int& fuel);
std::optional<NegNode> neg_walk(TypeRef l, TypeRef r, const RefineLimits& lim,
                                int& fuel);

const char* wrap_rule(const std::string& ref_rule) {
  if (ref_rule == "ref-in") return "n-inp-W";
  if (ref_rule == "ref-A") return "n-A-W";
  if (ref_rule == "ref-out") return "n-out-W";
  return "n-B-W";
}

// Returns nullopt when no negation rule applies within limits; the caller
// must then report Unknown rather than No.
std::optional<NegNode> classify(TypeRef l, TypeRef r, const RefineLimits& lim,
                                int& fuel) {
  TypeRef a = resolve(l);
  TypeRef b = resolve(r);
  auto leaf = [&](const char* rule) { return NegNode{rule, l, r, {}}; };
  bool a_sel = a->kind == TK::Select;
  bool a_br = a->kind == TK::Branch;
  // action-set axioms, in the table's listed order
  if (a_sel && !has_action(b, a->peer, true)) return leaf("n-out");
  if (a_br && !has_action(b, a->peer, false)) return leaf("n-inp");
  if (b->kind == TK::Select && !has_action(a, b->peer, true))
    return leaf("n-out-R");
  if (b->kind == TK::Branch && !has_action(a, b->peer, false))
    return leaf("n-inp-R");
  if (a_br && a->choices.size() == 1) {
    const Choice& c = a->choices[0];
    if (b->kind == TK::Branch && b->peer == a->peer &&
        b->choices.size() == 1) {
      const Choice& cb = b->choices[0];
      if (cb.label != c.label) return leaf("n-inp-l");
      if (!subsort(cb.payload, c.payload)) return leaf("n-inp-S");
    }
    auto facts = split_prefix(r, a->peer, 'A', lim.max_prefix);
    if (!facts.empty()) {
      const Factorization& f = facts.front();
      const Choice& cr = f.residual->choices[0];
      if (cr.label != c.label) return leaf("n-A-l");
      if (!subsort(cr.payload, c.payload)) return leaf("n-A-S");
      // label and sort match: refute the premise if possible, else the
      // action-set axiom applies exactly when the action condition fails
      TypeRef prem_rhs = wrap_prefix(f.prefix, cr.cont);
      if (auto sub = neg_walk(c.cont, prem_rhs, lim, fuel))
        return NegNode{"n-A-W", l, r, {*sub}};
      if (!act_eq(c.cont, prem_rhs)) return leaf("n-A-act");
      return std::nullopt;
    }
    // no A-factorization within bounds: only a selection met before any
    // input from a's peer justifies a leaf; a truncated search does not
    TypeRef cur = b;
    for (int i = 0; i <= lim.max_prefix; i++) {
      TypeRef rc = resolve(cur);
      if (rc->kind == TK::Select)
        return leaf(i == 0 ? "n-i-o-1" : "n-i-o-2");
      if (rc->kind != TK::Branch || rc->choices.size() != 1 ||
          rc->peer == a->peer)
        break;
      cur = rc->choices[0].cont;
    }
    return std::nullopt;
  }
  if (a_sel && a->choices.size() == 1) {
    const Choice& c = a->choices[0];
    if (b->kind == TK::Select && b->peer == a->peer &&
        b->choices.size() == 1) {
      const Choice& cb = b->choices[0];
      if (cb.label != c.label) return leaf("n-out-l");
      if (!subsort(c.payload, cb.payload)) return leaf("n-out-S");
    }
    auto facts = split_prefix(r, a->peer, 'B', lim.max_prefix);
    if (!facts.empty()) {
      const Factorization& f = facts.front();
      const Choice& cr = f.residual->choices[0];
      if (cr.label != c.label) return leaf("n-B-l");
      if (!subsort(c.payload, cr.payload)) return leaf("n-B-S");
      TypeRef prem_rhs = wrap_prefix(f.prefix, cr.cont);
      if (auto sub = neg_walk(c.cont, prem_rhs, lim, fuel))
        return NegNode{"n-B-W", l, r, {*sub}};
      if (!act_eq(c.cont, prem_rhs)) return leaf("n-B-act");
      return std::nullopt;
    }
    // a factorization may exist past the bound; never refute on truncation
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<NegNode> neg_walk(TypeRef l, TypeRef r, const RefineLimits& lim,
                                int& fuel) {
  std::vector<PathEntry> path;
  while (true) {
    if (--fuel < 0) return std::nullopt;
    for (const PathEntry& e : path)
      if (type_equal(e.lhs, l) && type_equal(e.rhs, r))
        return std::nullopt;  // cyclic, hence refinable
    RuleStep s = rule_step({l, r}, lim);
    if (s.kind == StepKind::True) return std::nullopt;
    if (s.kind == StepKind::False) {
      auto node = classify(l, r, lim, fuel);
      if (!node) return std::nullopt;
      for (auto it = path.rbegin(); it != path.rend(); ++it)
        node = NegNode{wrap_rule(it->rule), it->lhs, it->rhs, {*node}};
      return node;
    }
    path.push_back({l, r, s.rule});
    l = s.premise.lhs;
    r = s.premise.rhs;
  }
}

// Walks the rule function from (lhs, insert(base, m copies)) and checks it
// reaches (lhs, insert(base, m+1 copies)) without failing.
bool replay_pump(TypeRef lhs, TypeRef base_rhs, int pos,
                 const std::vector<PrefixItem>& word, int seg_len,
                 const RefineLimits& lim) {
  for (int m = 0; m <= lim.pump_replays; m++) {
    TypeRef l = lhs;
    TypeRef r;
    TypeRef target;
    try {
      r = insert_word(base_rhs, pos, word, m);
      target = insert_word(base_rhs, pos, word, m + 1);
    } catch (const std::invalid_argument&) {
      return false;
    }
    int max_steps = (seg_len + 4) * (m + 2) + 64;
    bool reached = false;
    for (int i = 0; i < max_steps; i++) {
      if (i > 0 && type_equal(l, lhs) && type_equal(r, target)) {
        reached = true;
        break;
      }
      RuleStep s = rule_step({l, r}, lim);
      if (s.kind != StepKind::Premise) return false;
      l = s.premise.lhs;
      r = s.premise.rhs;
    }
    if (!reached) return false;
  }
  return true;
}

}  // namespace

std::optional<NegationDerivation> negate(TypeRef w, TypeRef w2,
                                         const RefineLimits& lim) {
  int fuel = lim.max_nodes;
  auto n = neg_walk(w, w2, lim, fuel);
  if (!n) return std::nullopt;
  return NegationDerivation{*n};
}

std::string leaf_rule(const NegationDerivation& d) {
  const NegNode* n = &d.root;
  while (!n->children.empty()) n = &n->children.back();
  return n->rule;
}

RefineResult refine(TypeRef w, TypeRef w2, const RefineLimits& lim) {
  std::vector<PathEntry> path;
  TypeRef l = w;
  TypeRef r = w2;
  int rhs_cap = (lim.max_prefix + 2) * (node_count(w2) + 2);
  RefineResult res;
  while (true) {
    if ((int)path.size() > lim.max_nodes || node_count(r) > rhs_cap) {
      res.verdict = V3::Unknown;
      res.note = "budget exhausted";
      return res;
    }
    for (int i = 0; i < (int)path.size(); i++) {
      if (!type_equal(path[i].lhs, l)) continue;
      if (type_equal(path[i].rhs, r)) {
        RefinementCertificate c;
        for (const PathEntry& e : path) c.chain.push_back({e.rule, e.lhs, e.rhs});
        c.back_edge = i;
        res.verdict = V3::Yes;
        res.cert = std::move(c);
        return res;
      }
      auto ins = find_insertion(path[i].rhs, r, lim.max_prefix, lim.max_prefix);
      if (ins && replay_pump(l, path[i].rhs, ins->first, ins->second,
                             (int)path.size() - i, lim)) {
        RefinementCertificate c;
        c.pumped = true;
        for (int k = i; k < (int)path.size(); k++)
          c.chain.push_back({path[k].rule, path[k].lhs, path[k].rhs});
        c.pump_lhs = path[i].lhs;
        c.pump_rhs = path[i].rhs;
        c.pump_pos = ins->first;
        c.pump_word = ins->second;
        res.verdict = V3::Yes;
        res.cert = std::move(c);
        return res;
      }
    }
    RuleStep s = rule_step({l, r}, lim);
    if (s.kind == StepKind::True) {
      RefinementCertificate c;
      for (const PathEntry& e : path) c.chain.push_back({e.rule, e.lhs, e.rhs});
      c.chain.push_back({"ref-end", l, r});
      res.verdict = V3::Yes;
      res.cert = std::move(c);
      return res;
    }
    if (s.kind == StepKind::False) {
      res.neg = negate(w, w2, lim);
      // without reordering the rule function is deterministic, so a failed
      // step already refutes; otherwise a No needs a derivation
      if (res.neg || !lim.allow_reorder) {
        res.verdict = V3::No;
      } else {
        res.verdict = V3::Unknown;
        res.note = "no refutation derivable within limits";
      }
      return res;
    }
    path.push_back({l, r, s.rule});
    l = s.premise.lhs;
    r = s.premise.rhs;
  }
}

bool check_refinement_certificate(const RefinementCertificate& c,
                                  const RefineLimits& lim, std::string* diag) {
  auto fail = [&](const std::string& m) {
    if (diag) *diag = m;
    return false;
  };
  if (c.chain.empty()) return fail("empty chain");
  for (size_t i = 0; i < c.chain.size(); i++) {
    const CertNode& n = c.chain[i];
    RuleStep s = rule_step({n.lhs, n.rhs}, lim);
    if (n.rule == "ref-end") {
      if (s.kind != StepKind::True || c.pumped || i + 1 != c.chain.size())
        return fail("bad ref-end node at " + std::to_string(i));
      continue;
    }
    if (s.kind != StepKind::Premise || s.rule != n.rule)
      return fail("rule mismatch at node " + std::to_string(i));
    if (i + 1 < c.chain.size()) {
      if (!type_equal(s.premise.lhs, c.chain[i + 1].lhs) ||
          !type_equal(s.premise.rhs, c.chain[i + 1].rhs))
        return fail("premise mismatch at node " + std::to_string(i));
    } else if (!c.pumped) {
      if (c.back_edge < 0 || c.back_edge >= (int)c.chain.size())
        return fail("missing back edge");
      if (!type_equal(s.premise.lhs, c.chain[c.back_edge].lhs) ||
          !type_equal(s.premise.rhs, c.chain[c.back_edge].rhs))
        return fail("back edge premise mismatch");
    }
  }
  if (c.pumped) {
    if (!c.pump_lhs || !c.pump_rhs || c.pump_word.empty())
      return fail("incomplete pump data");
    if (!type_equal(c.chain[0].lhs, c.pump_lhs) ||
        !type_equal(c.chain[0].rhs, c.pump_rhs))
      return fail("pump base mismatch");
    if (!replay_pump(c.pump_lhs, c.pump_rhs, c.pump_pos, c.pump_word,
                     (int)c.chain.size(), lim))
      return fail("pump replay failed");
  } else if (c.chain.back().rule != "ref-end" &&
             (c.back_edge < 0 || c.back_edge >= (int)c.chain.size())) {
    return fail("open chain without back edge");
  }
  return true;
}

namespace {

bool check_neg_node(const NegNode& n, const RefineLimits& lim,
                    std::string* diag) {
  auto fail = [&](const std::string& m) {
    if (diag) *diag = n.rule + ": " + m;
    return false;
  };
  TypeRef a = resolve(n.lhs);
  TypeRef b = resolve(n.rhs);
  const std::string& rule = n.rule;
  auto need_leaf = [&] { return n.children.empty(); };
  auto a_in = [&] { return a->kind == TK::Branch && a->choices.size() == 1; };
  auto a_out = [&] { return a->kind == TK::Select && a->choices.size() == 1; };
  auto first_fact = [&](char kind) -> std::optional<Factorization> {
    auto fs = split_prefix(n.rhs, a->peer, kind, lim.max_prefix);
    if (fs.empty()) return std::nullopt;
    return fs.front();
  };
  if (rule == "n-out")
    return need_leaf() && a_out() && !has_action(n.rhs, a->peer, true)
               ? true
               : fail("side condition");
  if (rule == "n-inp")
    return need_leaf() && a_in() && !has_action(n.rhs, a->peer, false)
               ? true
               : fail("side condition");
  if (rule == "n-out-R")
    return need_leaf() && b->kind == TK::Select &&
                   !has_action(n.lhs, b->peer, true)
               ? true
               : fail("side condition");
  if (rule == "n-inp-R")
    return need_leaf() && b->kind == TK::Branch &&
                   !has_action(n.lhs, b->peer, false)
               ? true
               : fail("side condition");
  if (rule == "n-inp-l" || rule == "n-inp-S") {
    if (!need_leaf() || !a_in() || b->kind != TK::Branch ||
        b->peer != a->peer || b->choices.size() != 1)
      return fail("shape");
    bool lbl = a->choices[0].label == b->choices[0].label;
    if (rule == "n-inp-l") return !lbl ? true : fail("labels equal");
    return lbl && !subsort(b->choices[0].payload, a->choices[0].payload)
               ? true
               : fail("sort condition");
  }
  if (rule == "n-out-l" || rule == "n-out-S") {
    if (!need_leaf() || !a_out() || b->kind != TK::Select ||
        b->peer != a->peer || b->choices.size() != 1)
      return fail("shape");
    bool lbl = a->choices[0].label == b->choices[0].label;
    if (rule == "n-out-l") return !lbl ? true : fail("labels equal");
    return lbl && !subsort(a->choices[0].payload, b->choices[0].payload)
               ? true
               : fail("sort condition");
  }
  if (rule == "n-A-l" || rule == "n-A-S" || rule == "n-A-act") {
    if (!need_leaf() || !a_in()) return fail("shape");
    auto f = first_fact('A');
    if (!f) return fail("no A factorization");
    const Choice& cr = f->residual->choices[0];
    bool lbl = cr.label == a->choices[0].label;
    if (rule == "n-A-l") return !lbl ? true : fail("labels equal");
    bool srt = subsort(cr.payload, a->choices[0].payload);
    if (rule == "n-A-S") return lbl && !srt ? true : fail("sort condition");
    return lbl && srt &&
                   !act_eq(a->choices[0].cont,
                           wrap_prefix(f->prefix, cr.cont))
               ? true
               : fail("action sets equal");
  }
  if (rule == "n-B-l" || rule == "n-B-S" || rule == "n-B-act") {
    if (!need_leaf() || !a_out()) return fail("shape");
    auto f = first_fact('B');
    if (!f) return fail("no B factorization");
    const Choice& cr = f->residual->choices[0];
    bool lbl = cr.label == a->choices[0].label;
    if (rule == "n-B-l") return !lbl ? true : fail("labels equal");
    bool srt = subsort(a->choices[0].payload, cr.payload);
    if (rule == "n-B-S") return lbl && !srt ? true : fail("sort condition");
    return lbl && srt &&
                   !act_eq(a->choices[0].cont,
                           wrap_prefix(f->prefix, cr.cont))
               ? true
               : fail("action sets equal");
  }
  if (rule == "n-i-o-1")
    return need_leaf() && a_in() && b->kind == TK::Select
               ? true
               : fail("shape");
  if (rule == "n-i-o-2") {
    if (!need_leaf() || !a_in()) return fail("shape");
    TypeRef cur = b;
    for (int i = 0; i <= lim.max_prefix; i++) {
      TypeRef rc = resolve(cur);
      if (rc->kind == TK::Select) return i > 0 ? true : fail("empty context");
      if (rc->kind != TK::Branch || rc->choices.size() != 1 ||
          rc->peer == a->peer)
        return fail("context invalid");
      cur = rc->choices[0].cont;
    }
    return fail("no selection found");
  }
  if (rule == "n-inp-W" || rule == "n-A-W" || rule == "n-out-W" ||
      rule == "n-B-W") {
    RuleStep s = rule_step({n.lhs, n.rhs}, lim);
    if (s.kind != StepKind::Premise) return fail("no premise step");
    const char* expect = rule == "n-inp-W"  ? "ref-in"
                         : rule == "n-A-W"  ? "ref-A"
                         : rule == "n-out-W" ? "ref-out"
                                             : "ref-B";
    if (s.rule != expect) return fail("rule mismatch");
    if (n.children.size() != 1) return fail("child count");
    if (!type_equal(n.children[0].lhs, s.premise.lhs) ||
        !type_equal(n.children[0].rhs, s.premise.rhs))
      return fail("child judgment mismatch");
    return check_neg_node(n.children[0], lim, diag);
  }
  return fail("unknown rule");
}

}  // namespace

bool check_negation_derivation(const NegationDerivation& d,
                               const RefineLimits& lim, std::string* diag) {
  return check_neg_node(d.root, lim, diag);
}

}  // namespace stc

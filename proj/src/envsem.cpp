#include "envsem.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <unordered_map>

namespace stc {

std::string show_env_act(const EnvAct& a) {
  return show_sorted_action(a.peer, a.out, a.label, a.payload);
}

namespace {

std::string show_queue(const std::vector<QItem>& q) {
  std::string out = "[";
  bool first = true;
  for (const QItem& m : q) {
    if (!first) out += ", ";
    first = false;
    out += show_sorted_action(m.to, true, m.label, m.payload);
  }
  return out + "]";
}

std::vector<QItem> canon_queue(std::vector<QItem> q) {
  std::stable_sort(q.begin(), q.end(),
                   [](const QItem& a, const QItem& b) { return a.to < b.to; });
  return q;
}

}  // namespace

std::string show_env(const TypingEnv& g) {
  std::string out;
  for (const auto& [p, e] : g)
    out += p + " : " + show_queue(e.queue) + " " + show_type(e.type) + "\n";
  return out;
}

std::string env_key(const TypingEnv& g) {
  std::string out;
  for (const auto& [p, e] : g) {
    if (e.queue.empty() && resolve(e.type)->kind == TK::End) continue;
    out += p + ":" + show_queue(canon_queue(e.queue)) + "#" +
           std::to_string(e.type->id) + " ";
  }
  return out;
}

bool env_done(const TypingEnv& g) {
  for (const auto& [p, e] : g)
    if (!e.queue.empty() || resolve(e.type)->kind != TK::End) return false;
  return true;
}

std::vector<EnvStep> env_steps(const TypingEnv& g, int queue_bound,
                               bool* frontier) {
  std::vector<EnvStep> out;
  for (const auto& [p, e] : g) {
    TypeRef t = resolve(e.type);
    if (t->kind == TK::Select) {
      if ((int)e.queue.size() >= queue_bound) {
        if (frontier) *frontier = true;
        continue;
      }
      for (const Choice& c : t->choices) {
        TypingEnv next = g;
        EnvEntry& me = next[p];
        me.queue.push_back({t->peer, c.label, c.payload});
        me.type = c.cont;
        out.push_back({"e-send",
                       {p, t->peer, true, c.label, c.payload},
                       std::move(next)});
      }
    } else if (t->kind == TK::Branch) {
      auto it = g.find(t->peer);
      if (it == g.end()) continue;
      const std::vector<QItem>& pq = it->second.queue;
      size_t pos = pq.size();
      for (size_t i = 0; i < pq.size(); i++)
        if (pq[i].to == p) {
          pos = i;
          break;
        }
      if (pos == pq.size()) continue;
      const QItem& m = pq[pos];
      for (const Choice& c : t->choices) {
        if (c.label != m.label || !subsort(m.payload, c.payload)) continue;
        TypingEnv next = g;
        next[t->peer].queue.erase(next[t->peer].queue.begin() + pos);
        next[p].type = c.cont;
        out.push_back({"e-rcv",
                       {p, t->peer, false, m.label, m.payload},
                       std::move(next)});
        break;
      }
    }
  }
  return out;
}

namespace {

struct Obligation {
  std::string kind;  // L1 (specific queued message) or L2 (branch head)
  std::string p;     // obliged receiver
  std::string q;     // sending peer
  std::string label; // L1 only
  bool operator<(const Obligation& o) const {
    return std::tie(kind, p, q, label) < std::tie(o.kind, o.p, o.q, o.label);
  }
  std::string show() const {
    if (kind == "L1") return "message " + q + " -> " + p + " " + label;
    return "branch of " + p + " on " + q;
  }
};

bool pending(const TypingEnv& g, const Obligation& o) {
  if (o.kind == "L2") {
    auto it = g.find(o.p);
    if (it == g.end()) return false;
    TypeRef t = resolve(it->second.type);
    return t->kind == TK::Branch && t->peer == o.q;
  }
  auto it = g.find(o.q);
  if (it == g.end()) return false;
  for (const QItem& m : it->second.queue)
    if (m.to == o.p) return m.label == o.label;
  return false;
}

struct Instance {
  bool snd;
  std::string p;
  std::string q;
  std::string label;  // receives only
  bool operator<(const Instance& o) const {
    return std::tie(snd, p, q, label) < std::tie(o.snd, o.p, o.q, o.label);
  }
};

// Fairness-relevant enabled action instances: sends per (p, q) including
// bound-suppressed ones, receives per exact first pending label.
std::set<Instance> enabled_instances(const TypingEnv& g) {
  std::set<Instance> out;
  for (const auto& [p, e] : g) {
    TypeRef t = resolve(e.type);
    if (t->kind == TK::Select) {
      out.insert({true, p, t->peer, ""});
    } else if (t->kind == TK::Branch) {
      auto it = g.find(t->peer);
      if (it == g.end()) continue;
      for (const QItem& m : it->second.queue) {
        if (m.to != p) continue;
        for (const Choice& c : t->choices)
          if (c.label == m.label && subsort(m.payload, c.payload))
            out.insert({false, p, t->peer, m.label});
        break;
      }
    }
  }
  return out;
}

bool edge_matches(const EnvStep& e, const Instance& i) {
  if (i.snd)
    return e.rule == "e-send" && e.act.subject == i.p && e.act.peer == i.q;
  return e.rule == "e-rcv" && e.act.subject == i.p && e.act.peer == i.q &&
         e.act.label == i.label;
}

bool edge_fires(const EnvAct& a, const Obligation& o) {
  return !a.out && a.subject == o.p && a.peer == o.q;
}

struct Graph {
  std::vector<TypingEnv> states;
  std::vector<std::vector<std::pair<int, EnvStep>>> edges;  // (to, step)
  std::vector<int> parent;
  std::vector<std::string> parent_line;
};

std::string step_line(const EnvStep& s) {
  return s.rule + ": " + s.act.subject + " " + show_env_act(s.act);
}

// Tarjan SCCs over the subgraph induced by `in` with edge filter `keep`.
std::vector<std::vector<int>> sccs(
    const Graph& g, const std::vector<char>& in,
    const std::function<bool(int, const EnvStep&)>& keep) {
  int n = (int)g.states.size();
  std::vector<int> idx(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<int> stk;
  std::vector<std::vector<int>> out;
  int counter = 0;
  std::function<void(int)> dfs = [&](int v) {
    idx[v] = low[v] = counter++;
    stk.push_back(v);
    on[v] = 1;
    for (const auto& [w, st] : g.edges[v]) {
      if (!in[w] || !keep(v, st)) continue;
      if (idx[w] < 0) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], idx[w]);
      }
    }
    if (low[v] == idx[v]) {
      std::vector<int> comp;
      while (true) {
        int w = stk.back();
        stk.pop_back();
        on[w] = 0;
        comp.push_back(w);
        if (w == v) break;
      }
      out.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; v++)
    if (in[v] && idx[v] < 0) dfs(v);
  return out;
}

}  // namespace

LiveResult check_live(const TypingEnv& g0, int queue_bound, int max_states) {
  LiveResult res;
  Graph gr;
  std::unordered_map<std::string, int> seen;
  gr.states.push_back(g0);
  gr.edges.emplace_back();
  gr.parent.push_back(-1);
  gr.parent_line.push_back("");
  seen[env_key(g0)] = 0;
  std::vector<char> state_frontier{0};
  bool any_frontier = false;
  std::queue<int> work;
  work.push(0);
  auto stem_to = [&](int v) {
    std::vector<std::string> lines;
    for (int i = v; gr.parent[i] >= 0; i = gr.parent[i])
      lines.push_back(gr.parent_line[i]);
    std::reverse(lines.begin(), lines.end());
    return lines;
  };
  while (!work.empty()) {
    int v = work.front();
    work.pop();
    bool fr = false;
    std::vector<EnvStep> steps = env_steps(gr.states[v], queue_bound, &fr);
    state_frontier[v] = fr;
    any_frontier = any_frontier || fr;
    if (steps.empty() && !fr && !env_done(gr.states[v])) {
      res.verdict = V3::No;
      res.witness = "stuck state with outstanding obligations";
      res.stem = stem_to(v);
      res.states = (int)gr.states.size();
      return res;
    }
    for (EnvStep& st : steps) {
      std::string key = env_key(st.next);
      auto it = seen.find(key);
      int w;
      if (it != seen.end()) {
        w = it->second;
      } else {
        if ((int)gr.states.size() >= max_states) {
          res.verdict = V3::Unknown;
          res.note = "state limit reached";
          res.states = (int)gr.states.size();
          return res;
        }
        w = (int)gr.states.size();
        seen.emplace(std::move(key), w);
        gr.states.push_back(st.next);
        gr.edges.emplace_back();
        gr.parent.push_back(v);
        gr.parent_line.push_back(step_line(st));
        state_frontier.push_back(0);
        work.push(w);
      }
      gr.edges[v].push_back({w, std::move(st)});
    }
  }
  int n = (int)gr.states.size();
  std::vector<std::set<Instance>> inst(n);
  for (int v = 0; v < n; v++) inst[v] = enabled_instances(gr.states[v]);
  std::set<Obligation> obls;
  for (int v = 0; v < n; v++) {
    const TypingEnv& s = gr.states[v];
    for (const auto& [q, e] : s) {
      std::set<std::string> firsts;
      for (const QItem& m : e.queue)
        if (firsts.insert(m.to).second)
          obls.insert({"L1", m.to, q, m.label});
      TypeRef t = resolve(e.type);
      if (t->kind == TK::Branch) obls.insert({"L2", q, t->peer, ""});
    }
  }
  for (const Obligation& o : obls) {
    std::vector<char> in(n, 0);
    for (int v = 0; v < n; v++) in[v] = pending(gr.states[v], o);
    auto keep = [&](int, const EnvStep& st) { return !edge_fires(st.act, o); };
    while (true) {
      auto comps = sccs(gr, in, keep);
      std::vector<char> next_in(n, 0);
      bool changed = false;
      for (const auto& comp : comps) {
        std::vector<char> member(n, 0);
        for (int v : comp) member[v] = 1;
        bool has_edge = false;
        for (int v : comp)
          for (const auto& [w, st] : gr.edges[v])
            if (member[w] && keep(v, st)) has_edge = true;
        if (!has_edge) continue;  // trivial component, no cycle
        // fairness closure: every enabled instance of every member state
        // must be matched by some edge inside the component
        bool drop_some = false;
        for (int v : comp) {
          bool ok = true;
          for (const Instance& i : inst[v]) {
            bool matched = false;
            for (int x : comp) {
              for (const auto& [w, st] : gr.edges[x])
                if (member[w] && keep(x, st) && edge_matches(st, i)) {
                  matched = true;
                  break;
                }
              if (matched) break;
            }
            if (!matched) {
              ok = false;
              break;
            }
          }
          if (ok) next_in[v] = 1;
          else drop_some = true;
        }
        changed = changed || drop_some;
      }
      bool same = !changed;
      if (same)
        for (int v = 0; v < n; v++)
          if (in[v] != next_in[v]) same = false;
      in = next_in;
      if (same) break;
    }
    int hit = -1;
    for (int v = 0; v < n && hit < 0; v++)
      if (in[v]) hit = v;
    if (hit < 0) continue;
    // fair lasso: stem to the component, closed walk covering its edges
    res.verdict = V3::No;
    res.witness = o.show() + " never fires";
    res.stem = stem_to(hit);
    std::vector<std::pair<int, int>> todo;  // (from, edge index) inside comp
    for (int v = 0; v < n; v++) {
      if (!in[v]) continue;
      for (int ei = 0; ei < (int)gr.edges[v].size(); ei++) {
        const auto& [w, st] = gr.edges[v][ei];
        if (in[w] && keep(v, st)) todo.push_back({v, ei});
      }
    }
    int cur = hit;
    auto path_inside = [&](int from, int to) {
      std::vector<int> par(n, -1), pare(n, -1);
      std::queue<int> bq;
      bq.push(from);
      par[from] = from;
      while (!bq.empty()) {
        int v = bq.front();
        bq.pop();
        if (v == to) break;
        for (int ei = 0; ei < (int)gr.edges[v].size(); ei++) {
          const auto& [w, st] = gr.edges[v][ei];
          if (!in[w] || !keep(v, st) || par[w] >= 0) continue;
          par[w] = v;
          pare[w] = ei;
          bq.push(w);
        }
      }
      std::vector<std::pair<int, int>> edges;
      for (int v = to; v != from; v = par[v]) edges.push_back({par[v], pare[v]});
      std::reverse(edges.begin(), edges.end());
      return edges;
    };
    auto emit = [&](int v, int ei) {
      res.cycle.push_back(step_line(gr.edges[v][ei].second));
      return gr.edges[v][ei].first;
    };
    std::set<std::pair<int, int>> covered;
    for (const auto& [v, ei] : todo) {
      if (covered.count({v, ei})) continue;
      for (const auto& [x, xe] : path_inside(cur, v)) {
        covered.insert({x, xe});
        cur = emit(x, xe);
      }
      covered.insert({v, ei});
      cur = emit(v, ei);
    }
    for (const auto& [x, xe] : path_inside(cur, hit)) cur = emit(x, xe);
    res.states = n;
    return res;
  }
  res.verdict = V3::Yes;
  res.states = n;
  if (any_frontier) res.note = "queue bound reached during exploration";
  return res;
}

}  // namespace stc

// Typing environments with output queues: transition semantics and the
// fair-lasso liveness check.
#pragma once
#include <map>
#include <string>
#include <vector>

#include "refine.hpp"

namespace stc {

struct QItem {
  std::string to;
  std::string label;
  Sort payload;
  bool operator==(const QItem&) const = default;
};

struct EnvEntry {
  std::vector<QItem> queue;  // this participant's output queue
  TypeRef type = nullptr;
};
using TypingEnv = std::map<std::string, EnvEntry>;

std::string show_env(const TypingEnv& g);
std::string env_key(const TypingEnv& g);
bool env_done(const TypingEnv& g);  // all queues empty, all types end

struct EnvAct {
  std::string subject;
  std::string peer;
  bool out;
  std::string label;
  Sort payload;
};
std::string show_env_act(const EnvAct& a);

struct EnvStep {
  std::string rule;  // e-send / e-rcv
  EnvAct act;
  TypingEnv next;
};

// Successor states; sends whose queue already holds `queue_bound` entries
// are suppressed and reported through *frontier.
std::vector<EnvStep> env_steps(const TypingEnv& g, int queue_bound = 4,
                               bool* frontier = nullptr);

struct LiveResult {
  V3 verdict = V3::Unknown;
  std::string witness;             // violated obligation, when NotLive
  std::vector<std::string> stem;   // transition lines to the lasso loop
  std::vector<std::string> cycle;  // fair loop on which the obligation starves
  int states = 0;
  std::string note;
};

// Checks that every queued message is eventually consumed and every
// branching type eventually fires, on all fair executions.
LiveResult check_live(const TypingEnv& g, int queue_bound = 4,
                      int max_states = 10000);

}  // namespace stc

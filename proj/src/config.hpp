// Tunable limits shared by the engines and the command line front end.
#pragma once
#include <string>

#include "subtype.hpp"

namespace stc {

struct RunConfig {
  int unroll_bound = 8;
  int max_members = 64;
  int max_pairs = 200;
  int refine_max_nodes = 10000;
  int refine_max_prefix = 64;
  int pump_replays = 2;
  int family_threshold = 3;
  int queue_bound = 4;
  int oracle_steps = 50000;
  int run_states = 10000;
  int live_states = 10000;
  unsigned long seed = 1;
  bool sync_only = false;  // restrict to the reorder-free fragment
  std::string format = "text";

  RefineLimits refine_limits() const {
    RefineLimits r;
    r.max_nodes = refine_max_nodes;
    r.max_prefix = refine_max_prefix;
    r.allow_reorder = !sync_only;
    r.pump_replays = pump_replays;
    return r;
  }
  SubtypeLimits subtype_limits() const {
    SubtypeLimits s;
    s.unroll = unroll_bound;
    s.max_members = max_members;
    s.max_pairs = max_pairs;
    s.family_threshold = family_threshold;
    s.ref = refine_limits();
    return s;
  }
};

}  // namespace stc

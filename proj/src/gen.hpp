// Exhaustive small-type corpus, random regular types, and an independent
// brute-force subtyping decision for recursion-free types.
#pragma once
#include <optional>
#include <random>

#include "core.hpp"

namespace stc {

// Every type with at most three syntactic nodes over participants p,q,
// labels l1,l2 and sorts nat,bool.
std::vector<TypeRef> corpus_types();

struct GenOpts {
  int max_depth = 4;
  std::vector<std::string> participants{"p", "q"};
  std::vector<std::string> labels{"l1", "l2"};
  std::vector<Sort> sorts{Sort::Nat, Sort::Int, Sort::Bool, Sort::Unit};
  bool allow_rec = true;
  int max_width = 2;  // 1 generates SISO terms
};

TypeRef gen_regular_type(std::mt19937_64& rng, const GenOpts& o = {});

// Ground-truth subtyping for recursion-free types by exhaustive
// decomposition and backtracking over all prefix factorizations;
// nullopt when a type is recursive.
std::optional<bool> brute_force_subtype(TypeRef t, TypeRef t2);

bool has_rec(TypeRef t);

}  // namespace stc

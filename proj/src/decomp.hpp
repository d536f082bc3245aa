// SO / SI / SISO decompositions, prefix factorizations, regular representatives.
#pragma once
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace stc {

struct Decomp {
  std::vector<TypeRef> members;  // closed, deduped, sorted by size then print
  bool complete = false;         // true when the member set is known exhaustive
};

bool is_so(TypeRef t);
bool is_si(TypeRef t);
bool is_siso(TypeRef t);

Decomp decompose_so(TypeRef t, int unroll_bound = 8, int max_members = 64);
Decomp decompose_si(TypeRef t, int unroll_bound = 8, int max_members = 64);
// Complementary decomposition of an SO or SI term, yielding SISO terms.
Decomp decompose_siso(TypeRef t, int unroll_bound = 8, int max_members = 64);

// One communication prefix item of a SISO spine.
struct PrefixItem {
  bool out;
  std::string peer;
  std::string label;
  Sort payload;
  bool operator==(const PrefixItem&) const = default;
};

std::string show_prefix_item(const PrefixItem& it);
std::optional<PrefixItem> head_item(TypeRef siso);  // resolved singleton head
TypeRef wrap_prefix(const std::vector<PrefixItem>& pre, TypeRef t);

// All factorizations w = ctx[residual] where ctx is a nonempty A-prefix
// (inputs from participants != p, residual head = p-input) or B-prefix
// (inputs from anyone / outputs to participants != p, residual head =
// p-output). max_len <= 0 means 3 * node_count(w).
struct Factorization {
  std::vector<PrefixItem> prefix;
  TypeRef residual;
};
std::vector<Factorization> split_prefix(TypeRef w, const std::string& p,
                                        char kind, int max_len = 0);

// Regular SO representative following `prefix` then repeating `cycle` at
// selections; the first n levels follow the descriptor verbatim.
// Throws std::invalid_argument when the descriptor does not match t.
TypeRef regularize_so(TypeRef t, const std::vector<std::string>& prefix,
                      const std::vector<std::string>& cycle, int n);

// Drop rec binders whose variable is never used.
TypeRef mufree(TypeRef t);

}  // namespace stc

// Sorts, session types, equi-recursive identity, action sets.
#pragma once
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stc {

enum class Sort : uint8_t { Nat, Int, Bool, Unit };

// a <=: b, the least reflexive relation with nat <=: int.
bool subsort(Sort a, Sort b);
const char* sort_name(Sort s);
std::optional<Sort> sort_from(const std::string& s);

enum class TK : uint8_t { End, Var, Rec, Branch, Select };

struct Type;
using TypeRef = const Type*;

struct Choice {
  std::string label;
  Sort payload;
  TypeRef cont;
};

// Immutable hash-consed node. Var uses de Bruijn indices (0 = innermost rec).
struct Type {
  TK kind;
  int var = 0;                 // Var
  TypeRef body = nullptr;      // Rec
  std::string peer;            // Branch / Select
  std::vector<Choice> choices; // sorted by label, labels distinct
  uint64_t hash = 0;
  uint32_t id = 0;
  int nodes = 0;               // syntactic node count
  int maxfree = 0;             // 1 + max free var index (0 = closed)
};

TypeRef t_end();
TypeRef t_var(int idx);
TypeRef t_rec(TypeRef body);  // throws std::invalid_argument if body unguarded
TypeRef t_branch(const std::string& peer, std::vector<Choice> cs);
TypeRef t_select(const std::string& peer, std::vector<Choice> cs);
TypeRef t_in(const std::string& p, const std::string& l, Sort s, TypeRef cont);
TypeRef t_out(const std::string& p, const std::string& l, Sort s, TypeRef cont);
TypeRef t_choice(bool output, const std::string& peer, std::vector<Choice> cs);

inline bool closed(TypeRef t) { return t->maxfree == 0; }
inline int node_count(TypeRef t) { return t->nodes; }

// Substitute repl (closed) for var `depth` in t, shifting higher vars down.
TypeRef subst(TypeRef t, int depth, TypeRef repl);
// One top-level unfold of a closed Rec; identity on non-Rec.
TypeRef unfold(TypeRef t);
// Unfold until the head is not a Rec. Terminates by guardedness.
TypeRef resolve(TypeRef t);

bool uses_var(TypeRef t, int idx);
// Decrement free vars above `above` by one (used after dropping a binder).
TypeRef shift_down(TypeRef t, int above);

// (participant, is_output) pairs reachable in t.
using ActionSet = std::set<std::pair<std::string, bool>>;
const ActionSet& actions(TypeRef t);
std::set<std::string> participants(TypeRef t);
bool has_action(TypeRef t, const std::string& p, bool output);

// Equi-recursive tree equality (bisimulation over unfoldings).
bool type_equal(TypeRef a, TypeRef b);

std::string show_type(TypeRef t);
std::string show_sorted_action(const std::string& peer, bool output,
                               const std::string& label, Sort s);

}  // namespace stc

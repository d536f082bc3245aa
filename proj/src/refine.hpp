// SISO refinement: rule function walk, cyclic/pumped certificates,
// negation derivations, certificate re-validation.
#pragma once
#include <optional>
#include <string>
#include <vector>

#include "decomp.hpp"

namespace stc {

enum class V3 { Yes, No, Unknown };
const char* v3_name(V3 v);

struct Judgment {
  TypeRef lhs;
  TypeRef rhs;
};

enum class StepKind { True, False, Premise };
struct RuleStep {
  StepKind kind = StepKind::False;
  std::string rule;             // ref-in / ref-out / ref-A / ref-B / ref-end
  Judgment premise{};           // valid when kind == Premise
  std::vector<PrefixItem> ctx;  // factorization used by ref-A / ref-B
};

struct RefineLimits {
  int max_nodes = 10000;
  int max_prefix = 64;
  bool allow_reorder = true;  // false disables ref-A / ref-B (sync fragment)
  int pump_replays = 2;
};

// Implements the rule function: end/end -> True, matched heads -> the unique
// premise, everything else -> False. A/B factorization takes the shortest
// valid prefix whose residual head matches participant+direction+label.
RuleStep rule_step(const Judgment& j, const RefineLimits& lim = {});

struct CertNode {
  std::string rule;
  TypeRef lhs;
  TypeRef rhs;
};

struct RefinementCertificate {
  bool pumped = false;
  std::vector<CertNode> chain;  // applied rules, root first
  int back_edge = -1;           // chain index the final premise revisits
  // pumped variant: the final premise equals (pump_lhs, rhs with one more
  // copy of pump_word inserted at pump_pos)
  TypeRef pump_lhs = nullptr;
  TypeRef pump_rhs = nullptr;
  int pump_pos = 0;
  std::vector<PrefixItem> pump_word;
};

struct NegNode {
  std::string rule;
  TypeRef lhs;
  TypeRef rhs;
  std::vector<NegNode> children;
};
struct NegationDerivation {
  NegNode root;
};
std::string leaf_rule(const NegationDerivation& d);

struct RefineResult {
  V3 verdict = V3::Unknown;
  std::optional<RefinementCertificate> cert;
  std::optional<NegationDerivation> neg;
  std::string note;
};

RefineResult refine(TypeRef w, TypeRef w2, const RefineLimits& lim = {});
std::optional<NegationDerivation> negate(TypeRef w, TypeRef w2,
                                         const RefineLimits& lim = {});

bool check_refinement_certificate(const RefinementCertificate& c,
                                  const RefineLimits& lim = {},
                                  std::string* diag = nullptr);
bool check_negation_derivation(const NegationDerivation& d,
                               const RefineLimits& lim = {},
                               std::string* diag = nullptr);

// Insertion detection: rhs2 equals rhs1 with `word` inserted at spine
// position pos. Returns (pos, word).
std::optional<std::pair<int, std::vector<PrefixItem>>> find_insertion(
    TypeRef rhs1, TypeRef rhs2, int max_pos = 64, int max_word = 32);

}  // namespace stc

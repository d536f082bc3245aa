// Asynchronous subtyping via SO/SI decomposition grids over SISO refinement.
#pragma once
#include "refine.hpp"

namespace stc {

struct SubtypeLimits {
  int unroll = 8;
  int max_members = 64;
  int max_pairs = 200;       // SISO pairs tried per grid cell
  int family_threshold = 3;  // chain length accepted as a member family
  RefineLimits ref;
};

// One witnessed grid cell: W in [[u]]_SI refines W2 in [[v]]_SO.
struct CellWitness {
  TypeRef u;
  TypeRef v;
  TypeRef w;
  TypeRef w2;
  RefinementCertificate cert;
};

struct SubtypeCertificate {
  std::vector<CellWitness> cells;
  bool used_family = false;
};

// Refuted cell with its top rule from the unrelatedness table.
struct CounterexamplePair {
  TypeRef u;
  TypeRef v;
  std::string rule;
  std::optional<NegationDerivation> sample;  // negation for one SISO pair
};

struct SubtypeResult {
  V3 verdict = V3::Unknown;
  bool used_family = false;
  std::optional<SubtypeCertificate> cert;
  std::optional<CounterexamplePair> refuted;
  std::string note;
};

SubtypeResult subtype(TypeRef t, TypeRef t2, const SubtypeLimits& lim = {});

// Top rule of the unrelatedness table holding for SO u against SI v2,
// if any condition can be established within limits.
std::optional<std::string> uv_unrelated(TypeRef u, TypeRef v2,
                                        const SubtypeLimits& lim = {});

// First refuted grid cell of a failed subtype query.
std::optional<CounterexamplePair> find_counterexample_pair(
    TypeRef t, TypeRef t2, const SubtypeLimits& lim = {});

bool check_subtype_certificate(TypeRef t, TypeRef t2,
                               const SubtypeCertificate& c,
                               const SubtypeLimits& lim = {},
                               std::string* diag = nullptr);

}  // namespace stc

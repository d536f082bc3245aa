// Expression sorting, minimal session-type synthesis, process and session
// typing with subsumption through the subtyping engine.
#pragma once
#include "calculus.hpp"
#include "envsem.hpp"
#include "subtype.hpp"

namespace stc {

enum class Tri { Typed, Untyped, Indeterminate };
const char* tri_name(Tri t);

// Principal sort under the given variable sorts; nullopt when ill-sorted.
std::optional<Sort> type_expr(ExprRef e, const std::map<std::string, Sort>& venv);

struct SynthResult {
  TypeRef type = nullptr;  // minimal session type, when synthesis succeeds
  bool any = false;        // process is typable at every type
  Tri status = Tri::Typed;
  std::string note;
};

// hint supplies payload sorts for unconstrained receive binders and for
// variables forwarded verbatim; it may be null.
SynthResult minimal_type(ProcRef p, TypeRef hint);

Tri check_process(ProcRef p, TypeRef t, const SubtypeLimits& lim = {});

// Session against a typing environment: queues pointwise at principal
// sorts, processes at the environment types; absent participants count as
// inactive with type end.
Tri check_session(const Session& s, const TypingEnv& g,
                  const SubtypeLimits& lim = {});

}  // namespace stc

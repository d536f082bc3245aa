// Expressions, processes, sessions and their reduction semantics,
// including the error rules and exhaustive bounded exploration.
#pragma once
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"

namespace stc {

struct Unit {
  bool operator==(const Unit&) const = default;
};
using Value = std::variant<long, bool, Unit>;

std::string show_value(const Value& v);
Sort value_sort(const Value& v);  // principal sort: n>=1 nat, other ints int

enum class EK { Var, Const, Succ, Inv, Not, Gt0, IsUnit };
struct Expr;
using ExprRef = std::shared_ptr<const Expr>;
struct Expr {
  EK kind;
  Value c{Unit{}};   // Const
  std::string var;   // Var
  ExprRef a;         // unary argument
};

ExprRef e_var(const std::string& x);
ExprRef e_const(const Value& v);
ExprRef e_succ(ExprRef a);
ExprRef e_inv(ExprRef a);
ExprRef e_not(ExprRef a);
ExprRef e_gt0(ExprRef a);
ExprRef e_isunit(ExprRef a);

std::optional<Value> eval_expr(ExprRef e);  // nullopt when stuck
ExprRef expr_subst(ExprRef e, const std::string& x, const Value& v);
std::string show_expr(ExprRef e);

enum class PK { Inact, Var, Rec, Out, Ext, Cond };
struct Proc;
using ProcRef = std::shared_ptr<const Proc>;
struct PBranch {
  std::string label;
  std::string var;
  ProcRef cont;
};
struct Proc {
  PK kind;
  int var = 0;                   // Var (de Bruijn)
  ProcRef body;                  // Rec
  std::string peer;              // Out / Ext
  std::string label;             // Out
  ExprRef expr;                  // Out / Cond
  ProcRef cont;                  // Out
  std::vector<PBranch> branches; // Ext, sorted by label
  ProcRef then_p, else_p;        // Cond
};

ProcRef p_inact();
ProcRef p_var(int idx);
ProcRef p_rec(ProcRef body);
ProcRef p_out(const std::string& peer, const std::string& label, ExprRef e,
              ProcRef cont);
ProcRef p_ext(const std::string& peer, std::vector<PBranch> branches);
ProcRef p_cond(ExprRef e, ProcRef t, ProcRef f);

ProcRef proc_unfold(ProcRef p);  // one top-level rec unfolding
ProcRef proc_subst_val(ProcRef p, const std::string& x, const Value& v);
std::string show_proc(ProcRef p);

struct Msg {
  std::string to;
  std::string label;
  Value value;
};

struct Part {
  ProcRef proc;
  std::deque<Msg> queue;  // this participant's output queue
};
using Session = std::map<std::string, Part>;

std::string show_session(const Session& s);
std::string session_key(const Session& s);  // canonical up to congruence
bool session_terminated(const Session& s);

struct SessionStep {
  std::string rule;     // r-send / r-rcv / r-cond-T / r-cond-F / err-*
  std::string subject;
  std::string action;
  bool error = false;
  Session next;  // empty for error steps
};

std::vector<SessionStep> session_steps(const Session& s);

enum class RunKind { Terminated, ErrorReached, LimitReached };
struct RunOutcome {
  RunKind kind = RunKind::Terminated;
  std::string error_rule;
  std::vector<std::string> trace;  // "rule: participant action" to the error
  int states = 0;
};

RunOutcome run_session(const Session& s, int max_states = 10000);

}  // namespace stc

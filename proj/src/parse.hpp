// Surface syntax for sorts, types, expressions, processes, sessions and
// typing environments, with positioned diagnostics.
#pragma once
#include <stdexcept>

#include "calculus.hpp"
#include "envsem.hpp"

namespace stc {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " +
                           msg),
        line(l),
        col(c) {}
};

TypeRef parse_type(const std::string& src);
ExprRef parse_expr(const std::string& src);
ProcRef parse_process(const std::string& src);
Session parse_session(const std::string& src);   // participant |> process
TypingEnv parse_env(const std::string& src);     // participant : [queue] type

}  // namespace stc

#include "parse.hpp"

#include <cctype>

namespace stc {

namespace {

struct Tok {
  enum Kind { Ident, Number, Punct, Eof } kind = Eof;
  std::string text;
  long num = 0;
  int line = 1;
  int col = 1;
};

std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok::Kind k, std::string t, long n, int l, int c) {
    out.push_back({k, std::move(t), n, l, c});
  };
  while (i < src.size()) {
    char ch = src[i];
    if (ch == '\n') {
      line++;
      col = 1;
      i++;
      continue;
    }
    if (std::isspace((unsigned char)ch)) {
      i++;
      col++;
      continue;
    }
    if (ch == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') i++;
      continue;
    }
    int l = line, c = col;
    if (std::isalpha((unsigned char)ch) || ch == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum((unsigned char)src[j]) || src[j] == '_' ||
              src[j] == '\''))
        j++;
      push(Tok::Ident, src.substr(i, j - i), 0, l, c);
      col += (int)(j - i);
      i = j;
      continue;
    }
    if (std::isdigit((unsigned char)ch)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) j++;
      push(Tok::Number, src.substr(i, j - i), std::stol(src.substr(i, j - i)),
           l, c);
      col += (int)(j - i);
      i = j;
      continue;
    }
    if (ch == '|' && i + 1 < src.size() && src[i + 1] == '>') {
      push(Tok::Punct, "|>", 0, l, c);
      i += 2;
      col += 2;
      continue;
    }
    if (ch == '=' && i + 1 < src.size() && src[i + 1] == '=') {
      push(Tok::Punct, "==", 0, l, c);
      i += 2;
      col += 2;
      continue;
    }
    static const std::string singles = ".,{}()[]<>!?&+:-";
    if (singles.find(ch) != std::string::npos) {
      push(Tok::Punct, std::string(1, ch), 0, l, c);
      i++;
      col++;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
  }
  out.push_back({Tok::Eof, "", 0, line, col});
  return out;
}

struct Parser {
  std::vector<Tok> toks;
  size_t pos = 0;

  explicit Parser(const std::string& src) : toks(lex(src)) {}

  const Tok& peek(size_t ahead = 0) const {
    size_t i = pos + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  [[noreturn]] void err(const std::string& m) const {
    const Tok& t = peek();
    throw ParseError(m + (t.kind == Tok::Eof
                              ? " at end of input"
                              : " near '" + t.text + "'"),
                     t.line, t.col);
  }
  bool at(const std::string& s) const {
    const Tok& t = peek();
    return t.kind != Tok::Eof && t.kind != Tok::Number && t.text == s;
  }
  bool eat(const std::string& s) {
    if (!at(s)) return false;
    pos++;
    return true;
  }
  void expect(const std::string& s) {
    if (!eat(s)) err("expected '" + s + "'");
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) err("expected identifier");
    return toks[pos++].text;
  }
  bool eof() const { return peek().kind == Tok::Eof; }

  Sort sort() {
    const Tok& t = peek();
    if (t.kind == Tok::Ident)
      if (auto s = sort_from(t.text)) {
        pos++;
        return *s;
      }
    err("expected sort");
  }

  Sort opt_payload() {
    if (!eat("(")) return Sort::Unit;
    Sort s = sort();
    expect(")");
    return s;
  }

  int lookup(const std::vector<std::string>& binders, const std::string& name,
             const char* what) {
    for (int i = (int)binders.size() - 1; i >= 0; i--)
      if (binders[i] == name) return (int)binders.size() - 1 - i;
    err(std::string("unknown ") + what + " '" + name + "'");
  }

  TypeRef type(std::vector<std::string>& binders) {
    const Tok& t = peek();
    if (t.kind != Tok::Ident) err("expected type");
    if (eat("end")) return t_end();
    if (eat("rec")) {
      std::string name = ident();
      expect(".");
      binders.push_back(name);
      TypeRef body = type(binders);
      binders.pop_back();
      try {
        return t_rec(body);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), t.line, t.col);
      }
    }
    std::string name = ident();
    bool in = at("?"), out = at("!");
    if (in || out) {
      pos++;
      std::string label = ident();
      Sort s = opt_payload();
      expect(".");
      TypeRef cont = type(binders);
      return out ? t_out(name, label, s, cont) : t_in(name, label, s, cont);
    }
    bool br = at("&"), sel = at("+");
    if (br || sel) {
      pos++;
      expect("{");
      std::vector<Choice> cs;
      do {
        std::string label = ident();
        Sort s = opt_payload();
        expect(".");
        cs.push_back({label, s, type(binders)});
      } while (eat(","));
      expect("}");
      try {
        return t_choice(sel, name, std::move(cs));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), t.line, t.col);
      }
    }
    return t_var(lookup(binders, name, "type variable"));
  }

  ExprRef primary() {
    const Tok& t = peek();
    if (t.kind == Tok::Number) {
      pos++;
      return e_const(Value{t.num});
    }
    if (eat("-")) {
      if (peek().kind != Tok::Number) err("expected number after '-'");
      long n = toks[pos++].num;
      return e_const(Value{-n});
    }
    if (eat("(")) {
      if (eat(")")) return e_const(Value{Unit{}});
      ExprRef e = expr();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) err("expected expression");
    if (eat("true")) return e_const(Value{true});
    if (eat("false")) return e_const(Value{false});
    if (t.text == "succ" || t.text == "inv" || t.text == "not") {
      pos++;
      expect("(");
      ExprRef a = expr();
      expect(")");
      if (t.text == "succ") return e_succ(a);
      if (t.text == "inv") return e_inv(a);
      return e_not(a);
    }
    return e_var(ident());
  }

  ExprRef expr() {
    ExprRef e = primary();
    // only a '>' followed by 0 is a comparison; it may also close `p!l<e>`
    if (at(">") && peek(1).kind == Tok::Number && peek(1).num == 0) {
      pos += 2;
      return e_gt0(e);
    }
    if (eat("==")) {
      expect("(");
      expect(")");
      return e_isunit(e);
    }
    return e;
  }

  ProcRef proc(std::vector<std::string>& binders) {
    const Tok& t = peek();
    if (t.kind == Tok::Number && t.num == 0) {
      pos++;
      return p_inact();
    }
    if (t.kind != Tok::Ident) err("expected process");
    if (eat("rec")) {
      std::string name = ident();
      expect(".");
      binders.push_back(name);
      ProcRef body = proc(binders);
      binders.pop_back();
      return p_rec(body);
    }
    if (eat("if")) {
      ExprRef e = expr();
      expect("then");
      ProcRef a = proc(binders);
      expect("else");
      ProcRef b = proc(binders);
      return p_cond(e, a, b);
    }
    std::string name = ident();
    if (eat("!")) {
      std::string label = ident();
      expect("<");
      ExprRef e = expr();
      expect(">");
      expect(".");
      return p_out(name, label, e, proc(binders));
    }
    if (eat("?")) {
      expect("{");
      std::vector<PBranch> bs;
      do {
        std::string label = ident();
        expect("(");
        std::string var = ident();
        expect(")");
        expect(".");
        bs.push_back({label, var, proc(binders)});
      } while (eat(","));
      expect("}");
      try {
        return p_ext(name, std::move(bs));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), t.line, t.col);
      }
    }
    return p_var(lookup(binders, name, "process variable"));
  }
};

}  // namespace

TypeRef parse_type(const std::string& src) {
  Parser p(src);
  std::vector<std::string> binders;
  TypeRef t = p.type(binders);
  if (!p.eof()) p.err("trailing input");
  return t;
}

ExprRef parse_expr(const std::string& src) {
  Parser p(src);
  ExprRef e = p.expr();
  if (!p.eof()) p.err("trailing input");
  return e;
}

ProcRef parse_process(const std::string& src) {
  Parser p(src);
  std::vector<std::string> binders;
  ProcRef q = p.proc(binders);
  if (!p.eof()) p.err("trailing input");
  return q;
}

Session parse_session(const std::string& src) {
  Parser p(src);
  Session s;
  while (!p.eof()) {
    const Tok& t = p.peek();
    std::string name = p.ident();
    if (s.count(name))
      throw ParseError("duplicate participant '" + name + "'", t.line, t.col);
    p.expect("|>");
    std::vector<std::string> binders;
    s[name] = {p.proc(binders), {}};
  }
  return s;
}

TypingEnv parse_env(const std::string& src) {
  Parser p(src);
  TypingEnv g;
  while (!p.eof()) {
    const Tok& t = p.peek();
    std::string name = p.ident();
    if (g.count(name))
      throw ParseError("duplicate participant '" + name + "'", t.line, t.col);
    p.expect(":");
    p.expect("[");
    std::vector<QItem> q;
    if (!p.at("]")) do {
        std::string to = p.ident();
        p.expect("!");
        std::string label = p.ident();
        q.push_back({to, label, p.opt_payload()});
      } while (p.eat(","));
    p.expect("]");
    std::vector<std::string> binders;
    g[name] = {std::move(q), p.type(binders)};
  }
  return g;
}

}  // namespace stc

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "semflow/languages.hpp"

namespace semflow {

namespace {

struct ProgParser {
  const std::string& src;
  std::size_t pos = 0;

  explicit ProgParser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < src.size(); ++i) {
      if (src[i] == '\n') { ++line; col = 1; } else ++col;
    }
    std::ostringstream os;
    os << "program parse error at " << line << ":" << col << ": " << msg;
    throw std::runtime_error(os.str());
  }

  void skip() {
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip();
    return pos >= src.size();
  }

  bool peek_sym(const std::string& s) {
    skip();
    return src.compare(pos, s.size(), s) == 0;
  }

  bool eat_sym(const std::string& s) {
    if (!peek_sym(s)) return false;
    pos += s.size();
    return true;
  }

  std::string peek_word() {
    skip();
    std::size_t p = pos;
    std::string w;
    while (p < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[p])) || src[p] == '_'))
      w += src[p++];
    return w;
  }

  bool eat_word(const std::string& w) {
    if (peek_word() != w) return false;
    skip();
    pos += w.size();
    return true;
  }

  std::string ident() {
    skip();
    std::string w = peek_word();
    if (w.empty() || std::isdigit(static_cast<unsigned char>(w[0]))) fail("expected identifier");
    pos += w.size();
    return w;
  }

  TermPtr prim() {
    skip();
    if (pos >= src.size()) fail("expected expression");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      TermPtr e = expr();
      skip();
      if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
      ++pos;
      return e;
    }
    if (c == '"') {
      ++pos;
      std::string s;
      while (pos < src.size() && src[pos] != '"') {
        if (src[pos] == '\\' && pos + 1 < src.size()) ++pos;
        s += src[pos++];
      }
      if (pos >= src.size()) fail("unterminated string");
      ++pos;
      return imp_str(s);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
      std::size_t start = pos;
      if (c == '-') ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      return imp_int(std::stoll(src.substr(start, pos - start)));
    }
    std::string w = ident();
    if (w == "true") return imp_bool(true);
    if (w == "false") return imp_bool(false);
    if (w == "skip") return imp_skip();
    return imp_var(w);
  }

  TermPtr addition() {
    TermPtr e = prim();
    while (true) {
      skip();
      if (eat_sym("+"))
        e = imp_add(e, prim());
      else
        break;
    }
    return e;
  }

  TermPtr expr() {
    TermPtr e = addition();
    skip();
    if (eat_sym("<=")) return imp_le(e, addition());
    if (eat_sym("<")) return imp_lt(e, addition());
    return e;
  }

  TermPtr stmt() {
    skip();
    std::string w = peek_word();
    if (w == "skip") {
      eat_word("skip");
      return imp_skip();
    }
    if (w == "if") {
      eat_word("if");
      TermPtr c = expr();
      if (!eat_word("then")) fail("expected 'then'");
      TermPtr t = stmt_seq();
      if (!eat_word("else")) fail("expected 'else'");
      TermPtr e = stmt_seq();
      if (!eat_word("fi")) fail("expected 'fi'");
      return imp_if(c, t, e);
    }
    if (w == "while") {
      eat_word("while");
      TermPtr c = expr();
      if (!eat_word("do")) fail("expected 'do'");
      TermPtr b = stmt_seq();
      if (!eat_word("od")) fail("expected 'od'");
      return imp_while(c, b);
    }
    if (w == "print") {
      eat_word("print");
      return imp_print(expr());
    }
    if (w == "for") {
      eat_word("for");
      std::string x = ident();
      if (!eat_sym("=")) fail("expected '=' in for");
      TermPtr lo = expr();
      if (!eat_word("to")) fail("expected 'to'");
      TermPtr hi = expr();
      if (!eat_word("do")) fail("expected 'do'");
      TermPtr b = stmt_seq();
      if (!eat_word("od")) fail("expected 'od'");
      return nonval("for", {cstr(x), lo, hi, b});
    }
    if (w == "let") {
      eat_word("let");
      std::string x = ident();
      if (!eat_sym("=")) fail("expected '=' in let");
      TermPtr e = expr();
      if (!eat_word("in")) fail("expected 'in'");
      TermPtr b = stmt_seq();
      if (!eat_word("end")) fail("expected 'end'");
      return nonval("let", {cstr(x), e, b});
    }
    if (!w.empty()) {
      std::string x = ident();
      skip();
      if (!eat_sym(":=")) fail("expected ':=' after identifier");
      return imp_assign(x, expr());
    }
    fail("expected statement");
  }

  // statements chain right-nested: a ; b ; c = (a ; (b ; c))
  TermPtr stmt_seq() {
    TermPtr s = stmt();
    skip();
    if (eat_sym(";")) {
      skip();
      // permit a trailing semicolon before a closing keyword
      std::string w = peek_word();
      if (at_end() || w == "else" || w == "fi" || w == "od" || w == "end") return s;
      return imp_seq(s, stmt_seq());
    }
    return s;
  }
};

}  // namespace

TermPtr parse_program(const ProgramSource& src) {
  // The s-expression reader is tried first so raw term files work too.
  {
    std::size_t i = 0;
    while (i < src.text.size() && std::isspace(static_cast<unsigned char>(src.text[i]))) ++i;
    if (i < src.text.size() && src.text[i] == '(') {
      try {
        return parse_term(src.text);
      } catch (const std::exception&) {
        // fall through to the statement syntax
      }
    }
  }
  ProgParser p(src.text);
  TermPtr t = p.stmt_seq();
  p.skip();
  if (p.pos != src.text.size()) p.fail("trailing input");
  return t;
}

}  // namespace semflow

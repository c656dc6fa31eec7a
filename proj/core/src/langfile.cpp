#include "semflow/langfile.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "semflow/languages.hpp"

namespace semflow {

namespace {

struct LfParser {
  const std::string& src;
  std::size_t pos = 0;
  explicit LfParser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos && i < src.size(); ++i)
      if (src[i] == '\n') ++line;
    throw std::runtime_error("language file line " + std::to_string(line) + ": " + msg);
  }

  void skip_ws() {
    while (pos < src.size()) {
      if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        ++pos;
      } else if (src[pos] == '#') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
           src[pos] != ':' && src[pos] != '(' && src[pos] != ')' && src[pos] != ',')
      ++pos;
    if (pos == start) fail("expected word");
    return src.substr(start, pos - start);
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool try_keyword(const std::string& kw) {
    skip_ws();
    std::size_t save = pos;
    if (src.compare(pos, kw.size(), kw) != 0) return false;
    std::size_t after = pos + kw.size();
    if (after < src.size() && (std::isalnum(static_cast<unsigned char>(src[after])) ||
                               src[after] == '_' || src[after] == '-')) {
      pos = save;
      return false;
    }
    pos = after;
    return true;
  }

  Configuration config() {
    if (!eat('(')) fail("expected '(' to open a configuration");
    TermPtr t = parse_term_prefix(src, pos);
    if (!eat(',')) fail("expected ',' in configuration");
    skip_ws();
    ReductionState s = parse_state_prefix(src, pos);
    if (!eat(')')) fail("expected ')' to close a configuration");
    return Configuration{t, s};
  }

  SosRhsPtr rhs() {
    if (try_keyword("build")) return rhs_build(config());
    if (!try_keyword("let")) fail("expected 'let' or 'build'");
    Configuration result = config();
    if (!eat('=')) fail("expected '=' in let");
    if (try_keyword("step")) {
      Configuration arg = config();
      if (!try_keyword("in")) fail("expected 'in'");
      return rhs_step(result, arg, rhs());
    }
    if (!try_keyword("call")) fail("expected 'step' or 'call'");
    std::string fn = word();
    if (!eat('(')) fail("expected '(' after semantic function name");
    std::vector<Configuration> args;
    skip_ws();
    if (!eat(')')) {
      args.push_back(config());
      while (eat(',')) args.push_back(config());
      if (!eat(')')) fail("expected ')' after call arguments");
    }
    if (!try_keyword("in")) fail("expected 'in'");
    return rhs_call(result, fn, std::move(args), rhs());
  }
};

Sort sort_of_word(const std::string& w) {
  if (w == "expr") return Sort::Expr;
  if (w == "stmt") return Sort::Stmt;
  return Sort::Other;
}

const char* sort_word(Sort s) {
  switch (s) {
    case Sort::Expr: return "expr";
    case Sort::Stmt: return "stmt";
    default: return "other";
  }
}

}  // namespace

Language parse_language(const std::string& text) {
  LfParser p(text);
  Language lang;
  lang.initial_state = empty_state();
  bool saw_sort = false;
  if (!p.try_keyword("language")) p.fail("expected 'language <name>'");
  lang.name = p.word();
  while (!p.at_end()) {
    if (p.try_keyword("node")) {
      Signature s;
      s.sym = p.word();
      if (!s.sym.empty() && s.sym.front() == '"' && s.sym.back() == '"' && s.sym.size() >= 2)
        s.sym = s.sym.substr(1, s.sym.size() - 2);
      s.arity = std::stoi(p.word());
      std::string v = p.word();
      if (v != "val" && v != "nonval") p.fail("expected val|nonval");
      s.is_val = v == "val";
      // optional sort info up to end of line
      std::size_t save = p.pos;
      while (p.pos < text.size() && text[p.pos] != '\n') {
        if (!std::isspace(static_cast<unsigned char>(text[p.pos]))) break;
        ++p.pos;
      }
      if (p.pos < text.size() && text[p.pos] != '\n' && text[p.pos] != '#') {
        s.sort = sort_of_word(p.word());
        saw_sort = true;
        for (int i = 0; i < s.arity; ++i) {
          p.skip_ws();
          s.child_sorts.push_back(sort_of_word(p.word()));
        }
      } else {
        p.pos = save;
      }
      lang.sigs[s.sym] = std::move(s);
      continue;
    }
    if (p.try_keyword("init")) {
      p.skip_ws();
      lang.initial_state = parse_state_prefix(text, p.pos);
      continue;
    }
    if (p.try_keyword("rule")) {
      SosRule r;
      r.name = p.word();
      if (!p.eat(':')) p.fail("expected ':' after rule name");
      r.lhs = p.config();
      p.skip_ws();
      if (!(p.eat('~') && p.eat('>'))) p.fail("expected '~>'");
      r.rhs = p.rhs();
      lang.rules.push_back(std::move(r));
      continue;
    }
    p.fail("expected node/init/rule");
  }
  lang.has_sorts = saw_sort;
  lang.semfuns = builtin_semfuns();
  return lang;
}

Language load_language_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open language file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_language(ss.str());
}

namespace {

void print_rhs(std::ostringstream& os, const SosRhsPtr& r) {
  switch (r->kind) {
    case SosRhs::Kind::Build:
      os << "build (" << print_term(r->build.term) << ", " << print_state(r->build.state) << ")";
      return;
    case SosRhs::Kind::LetStepTo:
      os << "let (" << print_term(r->result.term) << ", " << print_state(r->result.state)
         << ") = step (" << print_term(r->arg.term) << ", " << print_state(r->arg.state)
         << ") in ";
      print_rhs(os, r->rest);
      return;
    case SosRhs::Kind::LetComputation:
      os << "let (" << print_term(r->result.term) << ", " << print_state(r->result.state)
         << ") = call " << r->fun << "(";
      for (std::size_t i = 0; i < r->args.size(); ++i) {
        if (i) os << ", ";
        os << "(" << print_term(r->args[i].term) << ", " << print_state(r->args[i].state) << ")";
      }
      os << ") in ";
      print_rhs(os, r->rest);
      return;
  }
}

}  // namespace

std::string print_language(const Language& lang) {
  std::ostringstream os;
  os << "language " << lang.name << "\n";
  for (const auto& [sym, s] : lang.sigs) {
    os << "node " << sym << " " << s.arity << " " << (s.is_val ? "val" : "nonval");
    if (s.sort) {
      os << " " << sort_word(*s.sort);
      for (Sort cs : s.child_sorts) os << " " << sort_word(cs);
    }
    os << "\n";
  }
  if (!lang.initial_state.bindings.empty() || lang.initial_state.tail)
    os << "init " << print_state(lang.initial_state) << "\n";
  for (const auto& r : lang.rules) {
    os << "rule " << r.name << ": (" << print_term(r.lhs.term) << ", "
       << print_state(r.lhs.state) << ") ~> ";
    std::ostringstream tmp;
    print_rhs(tmp, r.rhs);
    os << tmp.str() << "\n";
  }
  return os.str();
}

}  // namespace semflow

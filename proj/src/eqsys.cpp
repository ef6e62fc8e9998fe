#include "psi/eqsys.hpp"

#include "psi/linear.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <sstream>

namespace psi {

ExprPtr ParamExpr::constant(ExtInt v) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = Kind::Const;
  e->cval = std::move(v);
  return e;
}

ExprPtr ParamExpr::param(int i) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = Kind::Param;
  e->index = i;
  return e;
}

ExprPtr ParamExpr::neg_param(int i) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = Kind::NegParam;
  e->index = i;
  return e;
}

ExprPtr ParamExpr::variable(std::string name) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = Kind::Var;
  e->var = std::move(name);
  return e;
}

static ExprPtr binary(ParamExpr::Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = k;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr ParamExpr::min(ExprPtr a, ExprPtr b) { return binary(Kind::Min, std::move(a), std::move(b)); }
ExprPtr ParamExpr::add(ExprPtr a, ExprPtr b) { return binary(Kind::Add, std::move(a), std::move(b)); }
ExprPtr ParamExpr::guard(ExprPtr a, ExprPtr b) { return binary(Kind::Guard, std::move(a), std::move(b)); }

ExprPtr ParamExpr::scaled(Int c, ExprPtr e) {
  if (c < 0) throw std::invalid_argument("scale coefficient must be non-negative");
  auto r = std::make_shared<ParamExpr>();
  r->kind = Kind::Scale;
  r->scale = std::move(c);
  r->rhs = std::move(e);
  return r;
}

int EquationSystem::param_index(const std::string& name) const {
  for (size_t i = 0; i < params.size(); ++i)
    if (params[i] == name) return static_cast<int>(i);
  return -1;
}

const Equation* EquationSystem::find(const std::string& var) const {
  for (const Equation& eq : equations)
    if (eq.lhs == var) return &eq;
  return nullptr;
}

namespace {

struct Token {
  enum class Kind { Ident, Integer, Inf, Or, And, Semi, Plus, Star, Minus, LParen, RParen, Eq, Comma, End };
  Kind kind;
  std::string text;
  Int value;
  int line, col;
};

class Lexer {
 public:
  Lexer(const std::string& src, int line) : src_(src), line_(line) {}

  Token next() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    int col = static_cast<int>(pos_) + 1;
    if (pos_ >= src_.size() || src_[pos_] == '#')
      return {Token::Kind::End, "", 0, line_, col};
    char ch = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') return ident(col);
    if (std::isdigit(static_cast<unsigned char>(ch))) return integer(col, false);
    if (ch == '-' && pos_ + 1 < src_.size() &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      ++pos_;
      return integer(col, true);
    }
    ++pos_;
    switch (ch) {
      case '\\':
        if (pos_ < src_.size() && src_[pos_] == '/') {
          ++pos_;
          return {Token::Kind::Or, "\\/", 0, line_, col};
        }
        break;
      case '/':
        if (pos_ < src_.size() && src_[pos_] == '\\') {
          ++pos_;
          return {Token::Kind::And, "/\\", 0, line_, col};
        }
        break;
      case ';': return {Token::Kind::Semi, ";", 0, line_, col};
      case '+': return {Token::Kind::Plus, "+", 0, line_, col};
      case '*': return {Token::Kind::Star, "*", 0, line_, col};
      case '-': return {Token::Kind::Minus, "-", 0, line_, col};
      case '(': return {Token::Kind::LParen, "(", 0, line_, col};
      case ')': return {Token::Kind::RParen, ")", 0, line_, col};
      case '=': return {Token::Kind::Eq, "=", 0, line_, col};
      case ',': return {Token::Kind::Comma, ",", 0, line_, col};
      default: break;
    }
    throw ParseError(line_, col, std::string("unexpected character '") + ch + "'");
  }

 private:
  Token ident(int col) {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
            src_[pos_] == '\''))
      ++pos_;
    std::string text = src_.substr(start, pos_ - start);
    if (text == "inf") return {Token::Kind::Inf, text, 0, line_, col};
    return {Token::Kind::Ident, text, 0, line_, col};
  }

  Token integer(int col, bool negative) {
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Int v(src_.substr(start, pos_ - start));
    if (negative) v = -v;
    return {Token::Kind::Integer, "", v, line_, col};
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_;
};

std::vector<Token> lex_line(const std::string& src, int line) {
  Lexer lx(src, line);
  std::vector<Token> out;
  for (;;) {
    Token t = lx.next();
    bool end = t.kind == Token::Kind::End;
    out.push_back(std::move(t));
    if (end) return out;
  }
}

// Recursive-descent parser for one right-hand side. Precedence, loosest to
// tightest: \/ (top level only), /\, ;, +, scalar *.
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, const EquationSystem& sys)
      : toks_(toks), sys_(sys) {}

  size_t pos = 0;

  std::vector<ExprPtr> parse_alternatives() {
    std::vector<ExprPtr> alts;
    alts.push_back(parse_min());
    while (peek().kind == Token::Kind::Or) {
      ++pos;
      alts.push_back(parse_min());
    }
    return alts;
  }

  ExprPtr parse_min() {
    ExprPtr e = parse_guard();
    while (peek().kind == Token::Kind::And) {
      ++pos;
      e = ParamExpr::min(e, parse_guard());
    }
    return e;
  }

  ExprPtr parse_guard() {
    ExprPtr e = parse_add();
    if (peek().kind == Token::Kind::Semi) {
      ++pos;
      return ParamExpr::guard(e, parse_guard());  // right-associative
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_scale();
    while (peek().kind == Token::Kind::Plus) {
      ++pos;
      e = ParamExpr::add(e, parse_scale());
    }
    return e;
  }

  ExprPtr parse_scale() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Integer && peek(1).kind == Token::Kind::Star) {
      if (t.value < 0) throw ParseError(t.line, t.col, "negative scale coefficient");
      Int c = t.value;
      pos += 2;
      return ParamExpr::scaled(std::move(c), parse_scale());
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Integer:
        ++pos;
        return ParamExpr::constant(ExtInt::fin(t.value));
      case Token::Kind::Inf:
        ++pos;
        return ParamExpr::constant(ExtInt::pos_inf());
      case Token::Kind::Minus: {
        const Token& n = peek(1);
        if (n.kind == Token::Kind::Inf) {
          pos += 2;
          return ParamExpr::constant(ExtInt::neg_inf());
        }
        if (n.kind == Token::Kind::Ident) {
          int idx = sys_.param_index(n.text);
          if (idx < 0)
            throw ParseError(n.line, n.col, "cannot negate '" + n.text + "': not a parameter");
          pos += 2;
          return ParamExpr::neg_param(idx);
        }
        if (n.kind == Token::Kind::Integer) {
          pos += 2;
          return ParamExpr::constant(ExtInt::fin(-n.value));
        }
        throw ParseError(t.line, t.col, "expected parameter or number after '-'");
      }
      case Token::Kind::Ident: {
        ++pos;
        int idx = sys_.param_index(t.text);
        if (idx >= 0) return ParamExpr::param(idx);
        return ParamExpr::variable(t.text);
      }
      case Token::Kind::LParen: {
        ++pos;
        ExprPtr e = parse_min();
        if (peek().kind == Token::Kind::Or)
          throw ParseError(peek().line, peek().col,
                           "'\\/' is only allowed at the top level of a right-hand side");
        expect(Token::Kind::RParen, "')'");
        return e;
      }
      case Token::Kind::Or:
        throw ParseError(t.line, t.col,
                         "'\\/' is only allowed at the top level of a right-hand side");
      default:
        throw ParseError(t.line, t.col, "unexpected token '" + describe(t) + "'");
    }
  }

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  void expect(Token::Kind k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError(peek().line, peek().col, "expected " + what);
    ++pos;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of line";
    if (t.kind == Token::Kind::Integer) return t.value.str();
    return t.text;
  }

 private:
  const std::vector<Token>& toks_;
  const EquationSystem& sys_;
};

void check_references(const EquationSystem& sys, const ParamExpr& e, int line) {
  switch (e.kind) {
    case ParamExpr::Kind::Var:
      if (!sys.find(e.var))
        throw ParseError(line, 1, "undefined variable " + e.var);
      break;
    case ParamExpr::Kind::Min:
    case ParamExpr::Kind::Add:
    case ParamExpr::Kind::Guard:
      check_references(sys, *e.lhs, line);
      check_references(sys, *e.rhs, line);
      break;
    case ParamExpr::Kind::Scale:
      check_references(sys, *e.rhs, line);
      break;
    default:
      break;
  }
}

}  // namespace

EquationSystem parse_system(const std::string& text) {
  EquationSystem sys;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_params = false;
  std::vector<std::pair<int, std::vector<Token>>> equation_lines;

  while (std::getline(in, line)) {
    ++lineno;
    std::vector<Token> toks = lex_line(line, lineno);
    if (toks.size() == 1) continue;  // blank or comment-only
    if (!saw_params) {
      if (toks[0].kind != Token::Kind::Ident || toks[0].text != "params")
        throw ParseError(lineno, toks[0].col, "expected 'params' header line");
      size_t i = 1;
      while (toks[i].kind != Token::Kind::End) {
        if (toks[i].kind != Token::Kind::Ident)
          throw ParseError(toks[i].line, toks[i].col, "expected parameter name");
        if (sys.param_index(toks[i].text) >= 0)
          throw ParseError(toks[i].line, toks[i].col, "duplicate parameter " + toks[i].text);
        sys.params.push_back(toks[i].text);
        ++i;
        if (toks[i].kind == Token::Kind::Comma) ++i;
      }
      saw_params = true;
      continue;
    }
    equation_lines.emplace_back(lineno, std::move(toks));
  }
  if (!saw_params) throw ParseError(lineno == 0 ? 1 : lineno, 1, "expected 'params' header line");

  // Collect left-hand sides first so forward references resolve.
  for (auto& [ln, toks] : equation_lines) {
    if (toks[0].kind != Token::Kind::Ident)
      throw ParseError(ln, toks[0].col, "expected variable name");
    const std::string& name = toks[0].text;
    if (sys.param_index(name) >= 0)
      throw ParseError(ln, toks[0].col, "name clash: " + name + " is a parameter");
    if (sys.find(name))
      throw ParseError(ln, toks[0].col, "duplicate definition of " + name);
    if (toks.size() < 2 || toks[1].kind != Token::Kind::Eq)
      throw ParseError(ln, toks.size() < 2 ? 1 : toks[1].col, "expected '='");
    sys.equations.push_back(Equation{name, {}});
  }

  for (size_t e = 0; e < equation_lines.size(); ++e) {
    auto& [ln, toks] = equation_lines[e];
    ExprParser p(toks, sys);
    p.pos = 2;
    std::vector<ExprPtr> alts = p.parse_alternatives();
    if (p.peek().kind != Token::Kind::End)
      throw ParseError(p.peek().line, p.peek().col,
                       "unexpected token '" + ExprParser::describe(p.peek()) + "'");
    if (alts[0]->kind != ParamExpr::Kind::Const)
      alts.insert(alts.begin(), ParamExpr::constant(ExtInt::neg_inf()));
    for (const ExprPtr& a : alts) check_references(sys, *a, ln);
    sys.equations[e].alternatives = std::move(alts);
  }
  return sys;
}

namespace {

// Precedence levels used by the printer; parentheses are emitted whenever a
// child binds looser than its context requires.
enum Level { kLevelMin = 1, kLevelGuard = 2, kLevelAdd = 3, kLevelScale = 4, kLevelAtom = 5 };

void print_expr_rec(std::ostream& os, const ParamExpr& e,
                    const std::vector<std::string>& params, int min_level) {
  int level;
  switch (e.kind) {
    case ParamExpr::Kind::Const:
    case ParamExpr::Kind::Param:
    case ParamExpr::Kind::NegParam:
    case ParamExpr::Kind::Var: level = kLevelAtom; break;
    case ParamExpr::Kind::Min: level = kLevelMin; break;
    case ParamExpr::Kind::Guard: level = kLevelGuard; break;
    case ParamExpr::Kind::Add: level = kLevelAdd; break;
    case ParamExpr::Kind::Scale: level = kLevelScale; break;
    default: level = kLevelAtom; break;
  }
  bool parens = level < min_level;
  if (parens) os << "(";
  switch (e.kind) {
    case ParamExpr::Kind::Const: os << e.cval.str(); break;
    case ParamExpr::Kind::Param: os << params.at(e.index); break;
    case ParamExpr::Kind::NegParam: os << "-" << params.at(e.index); break;
    case ParamExpr::Kind::Var: os << e.var; break;
    case ParamExpr::Kind::Min:
      print_expr_rec(os, *e.lhs, params, kLevelMin);
      os << " /\\ ";
      print_expr_rec(os, *e.rhs, params, kLevelGuard);
      break;
    case ParamExpr::Kind::Guard:
      print_expr_rec(os, *e.lhs, params, kLevelAdd);
      os << " ; ";
      print_expr_rec(os, *e.rhs, params, kLevelGuard);
      break;
    case ParamExpr::Kind::Add:
      print_expr_rec(os, *e.lhs, params, kLevelAdd);
      os << " + ";
      print_expr_rec(os, *e.rhs, params, kLevelScale);
      break;
    case ParamExpr::Kind::Scale:
      os << e.scale.str() << "*";
      print_expr_rec(os, *e.rhs, params, kLevelScale);
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string print_expr(const ParamExpr& e, const std::vector<std::string>& params) {
  std::ostringstream os;
  print_expr_rec(os, e, params, kLevelMin);
  return os.str();
}

std::string print_system(const EquationSystem& sys) {
  std::ostringstream os;
  os << "params";
  for (size_t i = 0; i < sys.params.size(); ++i)
    os << (i == 0 ? " " : ", ") << sys.params[i];
  os << "\n";
  for (const Equation& eq : sys.equations) {
    os << eq.lhs << " =";
    for (size_t i = 0; i < eq.alternatives.size(); ++i) {
      os << (i == 0 ? " " : " \\/ ");
      print_expr_rec(os, *eq.alternatives[i], sys.params, kLevelMin);
    }
    os << "\n";
  }
  return os.str();
}

ExtInt eval_pointwise(const ParamExpr& e, const ParamSetting& pi, const VarAssign& xi) {
  switch (e.kind) {
    case ParamExpr::Kind::Const: return e.cval;
    case ParamExpr::Kind::Param: return ExtInt::fin(pi.at(e.index));
    case ParamExpr::Kind::NegParam: return ExtInt::fin(-pi.at(e.index));
    case ParamExpr::Kind::Var: return xi.at(e.var);
    case ParamExpr::Kind::Min:
      return ext_min(eval_pointwise(*e.lhs, pi, xi), eval_pointwise(*e.rhs, pi, xi));
    case ParamExpr::Kind::Add:
      return ext_add(eval_pointwise(*e.lhs, pi, xi), eval_pointwise(*e.rhs, pi, xi));
    case ParamExpr::Kind::Guard:
      return ext_guard(eval_pointwise(*e.lhs, pi, xi), eval_pointwise(*e.rhs, pi, xi));
    case ParamExpr::Kind::Scale:
      return ext_scale(e.scale, eval_pointwise(*e.rhs, pi, xi));
  }
  throw std::logic_error("eval_pointwise: bad expression kind");
}

ExtInt eval_rhs(const Equation& eq, const ParamSetting& pi, const VarAssign& xi) {
  ExtInt v = ExtInt::neg_inf();
  for (const ExprPtr& a : eq.alternatives) v = ext_max(v, eval_pointwise(*a, pi, xi));
  return v;
}

namespace {

ExprPtr instantiate_expr(const ExprPtr& e, const ParamSetting& pi) {
  switch (e->kind) {
    case ParamExpr::Kind::Param: return ParamExpr::constant(ExtInt::fin(pi.at(e->index)));
    case ParamExpr::Kind::NegParam: return ParamExpr::constant(ExtInt::fin(-pi.at(e->index)));
    case ParamExpr::Kind::Const:
    case ParamExpr::Kind::Var: return e;
    case ParamExpr::Kind::Min:
      return ParamExpr::min(instantiate_expr(e->lhs, pi), instantiate_expr(e->rhs, pi));
    case ParamExpr::Kind::Add:
      return ParamExpr::add(instantiate_expr(e->lhs, pi), instantiate_expr(e->rhs, pi));
    case ParamExpr::Kind::Guard:
      return ParamExpr::guard(instantiate_expr(e->lhs, pi), instantiate_expr(e->rhs, pi));
    case ParamExpr::Kind::Scale:
      return ParamExpr::scaled(e->scale, instantiate_expr(e->rhs, pi));
  }
  throw std::logic_error("instantiate: bad expression kind");
}

}  // namespace

EquationSystem instantiate(const EquationSystem& sys, const ParamSetting& pi) {
  EquationSystem out;
  out.equations.reserve(sys.equations.size());
  for (const Equation& eq : sys.equations) {
    Equation e2{eq.lhs, {}};
    e2.alternatives.reserve(eq.alternatives.size());
    for (const ExprPtr& a : eq.alternatives) e2.alternatives.push_back(instantiate_expr(a, pi));
    out.equations.push_back(std::move(e2));
  }
  return out;
}

}  // namespace psi

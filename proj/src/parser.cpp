#include <cctype>
#include <cstring>
#include <sstream>

#include "dimca/surface.hpp"

namespace dimca::lang {

namespace {

enum class Tok {
  End, Newline, Ident, Number,
  // keywords
  KwTypes, KwBool, KwXvar, KwYvar, KwArray, KwEnum, KwInit, KwTrans, KwGoto,
  KwIf, KwThen, KwElse, KwSkip, KwTrue, KwFalse,
  // punctuation
  Assign, Colon, Comma, Arrow, FatArrow, Eq, Neq, Tilde, Amp, Bar, Choice,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace, DotDot, Question,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Pos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      Pos p{line_, col_};
      if (i_ >= s_.size()) {
        out.push_back({Tok::End, "", p});
        break;
      }
      char c = s_[i_];
      if (c == '\n') {
        advance();
        out.push_back({Tok::Newline, "\n", p});
        continue;
      }
      if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (i_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
          id += s_[i_];
          advance();
        }
        out.push_back({keyword(id), id, p});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
          num += s_[i_];
          advance();
        }
        out.push_back({Tok::Number, num, p});
        continue;
      }
      if (take("|~|")) { out.push_back({Tok::Choice, "|~|", p}); continue; }
      if (take(":=")) { out.push_back({Tok::Assign, ":=", p}); continue; }
      if (take("->")) { out.push_back({Tok::Arrow, "->", p}); continue; }
      if (take("=>")) { out.push_back({Tok::FatArrow, "=>", p}); continue; }
      if (take("!=")) { out.push_back({Tok::Neq, "!=", p}); continue; }
      if (take("..")) { out.push_back({Tok::DotDot, "..", p}); continue; }
      switch (c) {
        case ':': advance(); out.push_back({Tok::Colon, ":", p}); continue;
        case ',': advance(); out.push_back({Tok::Comma, ",", p}); continue;
        case '=': advance(); out.push_back({Tok::Eq, "=", p}); continue;
        case '~': advance(); out.push_back({Tok::Tilde, "~", p}); continue;
        case '!': advance(); out.push_back({Tok::Tilde, "!", p}); continue;
        case '&': advance(); out.push_back({Tok::Amp, "&", p}); continue;
        case '|': advance(); out.push_back({Tok::Bar, "|", p}); continue;
        case '(': advance(); out.push_back({Tok::LParen, "(", p}); continue;
        case ')': advance(); out.push_back({Tok::RParen, ")", p}); continue;
        case '[': advance(); out.push_back({Tok::LBracket, "[", p}); continue;
        case ']': advance(); out.push_back({Tok::RBracket, "]", p}); continue;
        case '{': advance(); out.push_back({Tok::LBrace, "{", p}); continue;
        case '}': advance(); out.push_back({Tok::RBrace, "}", p}); continue;
        case '?': advance(); out.push_back({Tok::Question, "?", p}); continue;
        default: throw ParseError(p, std::string("unexpected character '") + c + "'");
      }
    }
    return out;
  }

 private:
  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_blank() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) advance();
  }

  bool take(const char* lit) {
    size_t n = std::strlen(lit);
    if (s_.compare(i_, n, lit) == 0) {
      for (size_t k = 0; k < n; ++k) advance();
      return true;
    }
    return false;
  }

  static Tok keyword(const std::string& id) {
    if (id == "types") return Tok::KwTypes;
    if (id == "bool") return Tok::KwBool;
    if (id == "xvar") return Tok::KwXvar;
    if (id == "yvar") return Tok::KwYvar;
    if (id == "array") return Tok::KwArray;
    if (id == "enum") return Tok::KwEnum;
    if (id == "init") return Tok::KwInit;
    if (id == "trans") return Tok::KwTrans;
    if (id == "goto") return Tok::KwGoto;
    if (id == "if") return Tok::KwIf;
    if (id == "then") return Tok::KwThen;
    if (id == "else") return Tok::KwElse;
    if (id == "skip") return Tok::KwSkip;
    if (id == "true") return Tok::KwTrue;
    if (id == "false") return Tok::KwFalse;
    return Tok::Ident;
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(Lexer(text).run()) {}

  SurfaceProgram run() {
    SurfaceProgram sp;
    skip_newlines();
    expect(Tok::KwTypes, "program must begin with a 'types' line");
    sp.xtype = expect(Tok::Ident, "X type name").text;
    sp.ytype = expect(Tok::Ident, "Y type name").text;
    end_of_line();
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind == Tok::End) break;
      switch (t.kind) {
        case Tok::KwBool: sp.decls.push_back(decl(SurfaceDecl::Bool)); break;
        case Tok::KwXvar: sp.decls.push_back(decl(SurfaceDecl::XVar)); break;
        case Tok::KwYvar: sp.decls.push_back(decl(SurfaceDecl::YVar)); break;
        case Tok::KwArray: sp.decls.push_back(decl(SurfaceDecl::Array)); break;
        case Tok::KwEnum: sp.decls.push_back(enum_decl()); break;
        case Tok::KwInit: {
          next();
          sp.init = expr();
          end_of_line();
          break;
        }
        case Tok::KwTrans: sp.trans.push_back(trans_line()); break;
        case Tok::Ident:
          if (peek(1).kind == Tok::Colon) {
            sp.labels.push_back(label_block());
            break;
          }
          throw ParseError(t.pos, "statement outside any label");
        default:
          throw ParseError(t.pos, "unexpected token '" + t.text + "'");
      }
    }
    return sp;
  }

 private:
  const Token& peek(int k = 0) const {
    size_t j = i_ + k;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }
  Token expect(Tok k, const std::string& what) {
    const Token& t = next();
    if (t.kind != k) throw ParseError(t.pos, "expected " + what + ", got '" + t.text + "'");
    return t;
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline) next();
  }
  void end_of_line() {
    const Token& t = peek();
    if (t.kind == Tok::Newline) {
      next();
      return;
    }
    if (t.kind != Tok::End)
      throw ParseError(t.pos, "unexpected '" + t.text + "' before end of line");
  }

  // Consumes newlines when the following line begins with `:` or `|~|`
  // (statement continuation, figure style).
  bool continuation(Tok k) {
    size_t j = i_;
    while (j < toks_.size() && toks_[j].kind == Tok::Newline) ++j;
    if (j < toks_.size() && toks_[j].kind == k) {
      i_ = j;
      return true;
    }
    return peek().kind == k;
  }

  SurfaceDecl decl(SurfaceDecl::Kind kind) {
    SurfaceDecl d;
    d.kind = kind;
    d.pos = peek().pos;
    next();
    while (peek().kind == Tok::Ident) d.names.push_back(next().text);
    if (d.names.empty()) throw ParseError(peek().pos, "declaration needs at least one name");
    if (peek().kind == Tok::Colon) {
      next();
      expect(Tok::Ident, "type name");
      if (peek().kind == Tok::LBracket) {
        next();
        expect(Tok::Ident, "index type name");
        expect(Tok::RBracket, "']'");
      }
    }
    end_of_line();
    return d;
  }

  SurfaceDecl enum_decl() {
    SurfaceDecl d;
    d.kind = SurfaceDecl::Enum;
    d.pos = peek().pos;
    next();
    d.names.push_back(expect(Tok::Ident, "enum variable name").text);
    expect(Tok::Colon, "':'");
    expect(Tok::LBrace, "'{'");
    if (peek().kind == Tok::Number && peek(1).kind == Tok::DotDot) {
      long lo = std::stol(next().text);
      next();
      long hi = std::stol(expect(Tok::Number, "range end").text);
      if (hi < lo) throw ParseError(d.pos, "empty enum range");
      for (long v = lo; v <= hi; ++v) d.enum_lits.push_back(std::to_string(v));
    } else {
      while (peek().kind == Tok::Ident || peek().kind == Tok::Number) {
        d.enum_lits.push_back(next().text);
        if (peek().kind == Tok::Comma) next();
      }
    }
    expect(Tok::RBrace, "'}'");
    if (d.enum_lits.empty()) throw ParseError(d.pos, "enum with zero literals");
    end_of_line();
    return d;
  }

  SurfaceTrans trans_line() {
    SurfaceTrans tr;
    tr.pos = peek().pos;
    next();
    tr.guard = expr();
    expect(Tok::Arrow, "'->'");
    tr.assigns = assign_list();
    while (continuation(Tok::Colon)) {
      next();
      skip_newlines();
      tr.chain.push_back(chain_seg());
    }
    end_of_line();
    return tr;
  }

  SurfaceLabel label_block() {
    SurfaceLabel lb;
    lb.pos = peek().pos;
    lb.name = next().text;
    next();  // ':'
    end_of_line();
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind == Tok::End || t.kind == Tok::KwTrans || t.kind == Tok::KwInit ||
          t.kind == Tok::KwBool || t.kind == Tok::KwXvar || t.kind == Tok::KwYvar ||
          t.kind == Tok::KwArray || t.kind == Tok::KwEnum)
        break;
      if (t.kind == Tok::Ident && peek(1).kind == Tok::Colon) break;  // next label
      lb.lines.push_back(stmt_line());
    }
    return lb;
  }

  SurfaceLine stmt_line() {
    SurfaceLine ln;
    ln.pos = peek().pos;
    ln.alts.push_back(stmt());
    while (continuation(Tok::Choice)) {
      next();
      skip_newlines();
      ln.alts.push_back(stmt());
    }
    end_of_line();
    return ln;
  }

  StmtPtr stmt() {
    const Token& t = peek();
    if (t.kind == Tok::KwGoto || t.kind == Tok::KwIf) return branch_stmt();
    auto s = std::make_unique<SurfaceStmt>();
    s->kind = SurfaceStmt::Assigns;
    s->pos = t.pos;
    s->assigns = assign_list();
    while (continuation(Tok::Colon)) {
      next();
      skip_newlines();
      s->chain.push_back(chain_seg());
    }
    return s;
  }

  // goto | if | assigns — no chains; used for if branches too.
  StmtPtr branch_stmt() {
    const Token& t = peek();
    auto s = std::make_unique<SurfaceStmt>();
    s->pos = t.pos;
    if (t.kind == Tok::KwGoto) {
      next();
      s->kind = SurfaceStmt::Goto;
      s->target = expect(Tok::Ident, "label name").text;
      return s;
    }
    if (t.kind == Tok::KwIf) {
      next();
      s->kind = SurfaceStmt::If;
      s->cond = expr();
      expect(Tok::KwThen, "'then'");
      s->then_branch = branch_stmt();
      if (peek().kind == Tok::KwElse) {
        next();
        s->else_branch = branch_stmt();
      }
      return s;
    }
    s->kind = SurfaceStmt::Assigns;
    s->assigns = assign_list();
    return s;
  }

  ChainSeg chain_seg() {
    ChainSeg seg;
    const Token& t = peek();
    if (t.kind == Tok::KwIf) {
      next();
      seg.guard = expr();
      expect(Tok::KwThen, "'then'");
      seg.assigns = assign_list();
      return seg;
    }
    if (starts_expr()) {
      seg.guard = expr();
      expect(Tok::Arrow, "'->'");
      seg.assigns = assign_list();
      return seg;
    }
    seg.assigns = assign_list();
    return seg;
  }

  // Heads that can only start a guard expression, or an identifier that
  // is followed by an operator rather than ':=', ',' or '['.
  bool starts_expr() {
    switch (peek().kind) {
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::Tilde:
      case Tok::LParen: return true;
      case Tok::Ident: {
        Tok k = peek(1).kind;
        return k == Tok::Eq || k == Tok::Neq || k == Tok::Amp || k == Tok::Bar ||
               k == Tok::FatArrow || k == Tok::Arrow;
      }
      default: return false;
    }
  }

  std::vector<SurfaceAssign> assign_list() {
    std::vector<SurfaceAssign> out;
    if (peek().kind == Tok::KwSkip) {
      next();
      return out;
    }
    while (true) {
      // LHS entries up to ':='; more than one entry is the list form.
      struct Lhs {
        std::string name;
        std::optional<std::string> idx;
        Pos pos;
      };
      std::vector<Lhs> lhs;
      while (true) {
        Token id = expect(Tok::Ident, "assignment target");
        Lhs l{id.text, std::nullopt, id.pos};
        if (peek().kind == Tok::LBracket) {
          next();
          l.idx = expect(Tok::Ident, "index variable").text;
          expect(Tok::RBracket, "']'");
        }
        lhs.push_back(std::move(l));
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
      expect(Tok::Assign, "':='");
      for (size_t k = 0; k < lhs.size(); ++k) {
        if (k) expect(Tok::Comma, "',' between assigned values");
        SurfaceAssign a;
        a.target = lhs[k].name;
        a.write_index = lhs[k].idx;
        a.pos = lhs[k].pos;
        rhs(a);
        out.push_back(std::move(a));
      }
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
    return out;
  }

  void rhs(SurfaceAssign& a) {
    const Token& t = peek();
    if (t.kind == Tok::Question) {
      next();
      a.rhs_kind = SurfaceAssign::Input;
      return;
    }
    if (a.write_index) {
      a.rhs_kind = SurfaceAssign::IdentRhs;
      a.rhs_ident = expect(Tok::Ident, "array write value").text;
      return;
    }
    if (t.kind == Tok::Ident) {
      Tok k = peek(1).kind;
      if (k == Tok::LBracket) {
        a.rhs_kind = SurfaceAssign::ReadRhs;
        a.rhs_array = next().text;
        next();
        a.rhs_index = expect(Tok::Ident, "index variable").text;
        expect(Tok::RBracket, "']'");
        return;
      }
      if (k != Tok::Eq && k != Tok::Neq && k != Tok::Amp && k != Tok::Bar &&
          k != Tok::FatArrow) {
        a.rhs_kind = SurfaceAssign::IdentRhs;
        a.rhs_ident = next().text;
        return;
      }
    }
    if (t.kind == Tok::Number) {
      a.rhs_kind = SurfaceAssign::IdentRhs;
      a.rhs_ident = next().text;
      return;
    }
    a.rhs_kind = SurfaceAssign::ExprRhs;
    a.expr = expr();
  }

  SExprPtr mk(SExpr::Kind k, Pos p) {
    auto e = std::make_shared<SExpr>();
    e->kind = k;
    e->pos = p;
    return e;
  }

  SExprPtr expr() { return imp_expr(); }

  SExprPtr imp_expr() {
    auto lhs = or_expr();
    if (peek().kind == Tok::FatArrow) {
      Pos p = next().pos;
      auto e = mk(SExpr::Implies, p);
      e->a = lhs;
      e->b = imp_expr();
      return e;
    }
    return lhs;
  }

  SExprPtr or_expr() {
    auto lhs = and_expr();
    while (peek().kind == Tok::Bar) {
      Pos p = next().pos;
      auto e = mk(SExpr::Or, p);
      e->a = lhs;
      e->b = and_expr();
      lhs = e;
    }
    return lhs;
  }

  SExprPtr and_expr() {
    auto lhs = un_expr();
    while (peek().kind == Tok::Amp) {
      Pos p = next().pos;
      auto e = mk(SExpr::And, p);
      e->a = lhs;
      e->b = un_expr();
      lhs = e;
    }
    return lhs;
  }

  SExprPtr un_expr() {
    if (peek().kind == Tok::Tilde) {
      Pos p = next().pos;
      auto e = mk(SExpr::Not, p);
      e->a = un_expr();
      return e;
    }
    return prim_expr();
  }

  SExprPtr prim_expr() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwTrue: next(); return mk(SExpr::True, t.pos);
      case Tok::KwFalse: next(); return mk(SExpr::False, t.pos);
      case Tok::LParen: {
        next();
        auto e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        Token id = next();
        if (peek().kind == Tok::Eq || peek().kind == Tok::Neq) {
          bool neq = next().kind == Tok::Neq;
          const Token& r = next();
          if (r.kind != Tok::Ident && r.kind != Tok::Number)
            throw ParseError(r.pos, "expected identifier or literal after comparison");
          auto e = mk(neq ? SExpr::NeqAtom : SExpr::EqAtom, id.pos);
          e->lhs = id.text;
          e->rhs = r.text;
          return e;
        }
        auto e = mk(SExpr::Ident, id.pos);
        e->name = id.text;
        return e;
      }
      default:
        throw ParseError(t.pos, "expected expression, got '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
};

}  // namespace

SurfaceProgram parse_program(const std::string& text) { return Parser(text).run(); }

}  // namespace dimca::lang

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "casa/ast.hpp"
#include "casa/lexer.hpp"

namespace casa {

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return program.has_value(); }
};

namespace detail {

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : toks_(std::move(tokens)), file_(std::move(file)) {}

  Program parseProgram() {
    Program prog;
    prog.file = file_;
    Span mainStart = cur().span;
    while (!at(Tok::Eof)) {
      if (at(Tok::KwClass) || (at(Tok::KwActor) && peekIs(1, Tok::KwClass))) {
        prog.classes.push_back(parseClass());
      } else if (at(Tok::KwGlobal)) {
        prog.globals.push_back(parseGlobal());
      } else {
        prog.mainBlock.stmts.push_back(parseStmt());
      }
    }
    prog.mainBlock.span = prog.mainBlock.stmts.empty()
                              ? mainStart
                              : joinSpans(prog.mainBlock.stmts.front()->span,
                                          prog.mainBlock.stmts.back()->span);
    return prog;
  }

 private:
  // ── token stream ──
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t n) const {
    size_t i = pos_ + n;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool peekIs(size_t n, Tok k) const { return peek(n).kind == k; }
  Token advance() { return toks_[pos_ + 1 < toks_.size() ? pos_++ : pos_]; }
  bool match(Tok k) {
    if (at(k)) { advance(); return true; }
    return false;
  }

  [[noreturn]] void fail(const Span& span, std::string code, std::string msg) {
    throw ParseError{Diagnostic{std::move(code), Severity::Error, span, std::move(msg)}};
  }

  Token expect(Tok k, const char* what) {
    if (at(k)) return advance();
    if (at(Tok::Eof))
      fail(cur().span, "SYN002", std::string("unexpected end of file, expected ") + what);
    fail(cur().span, "SYN001",
         std::string("expected ") + what + ", got " + tokName(cur().kind) +
             (cur().kind == Tok::Ident ? " '" + cur().text + "'" : ""));
  }

  // ── declarations ──
  ClassDecl parseClass() {
    Span start = cur().span;
    bool isActor = match(Tok::KwActor);
    expect(Tok::KwClass, "'class'");
    Token name = expect(Tok::Ident, "class name");
    ClassDecl cls;
    cls.isActor = isActor;
    cls.name = name.text;
    if (match(Tok::KwExtends)) cls.superName = expect(Tok::Ident, "superclass name").text;
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      if (at(Tok::Eof)) fail(cur().span, "SYN002", "unterminated class body");
      if (at(Tok::KwVal) || at(Tok::KwVar)) {
        cls.fields.push_back(parseField());
      } else if (at(Tok::KwDef)) {
        cls.methods.push_back(parseMethod());
      } else {
        fail(cur().span, "SYN001",
             std::string("expected field or method declaration, got ") + tokName(cur().kind));
      }
    }
    Token rb = expect(Tok::RBrace, "'}'");
    cls.span = joinSpans(start, rb.span);
    for (auto& f : cls.fields) checkTypePosition(f.type, TypePos::Field);
    return cls;
  }

  GlobalDecl parseGlobal() {
    Span start = cur().span;
    expect(Tok::KwGlobal, "'global'");
    Token name = expect(Tok::Ident, "global object name");
    GlobalDecl g;
    g.name = name.text;
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      if (at(Tok::Eof)) fail(cur().span, "SYN002", "unterminated global body");
      if (at(Tok::KwVal) || at(Tok::KwVar))
        g.fields.push_back(parseField());
      else
        fail(cur().span, "SYN001", "expected field declaration in global body");
    }
    Token rb = expect(Tok::RBrace, "'}'");
    g.span = joinSpans(start, rb.span);
    for (auto& f : g.fields) checkTypePosition(f.type, TypePos::Field);
    return g;
  }

  FieldDecl parseField() {
    Span start = cur().span;
    bool isVar = at(Tok::KwVar);
    advance();  // val | var
    Token name = expect(Tok::Ident, "field name");
    expect(Tok::Colon, "':'");
    FieldDecl f;
    f.isVar = isVar;
    f.name = name.text;
    f.type = parseType();
    Span end = f.type.span;
    if (match(Tok::Assign)) {
      f.init = parseExpr();
      end = f.init->span;
    }
    f.span = joinSpans(start, end);
    return f;
  }

  MethodDecl parseMethod() {
    Span start = cur().span;
    expect(Tok::KwDef, "'def'");
    Token name = expect(Tok::Ident, "method name");
    expect(Tok::LParen, "'('");
    MethodDecl m;
    m.name = name.text;
    bool first = true;
    while (!at(Tok::RParen)) {
      if (!first) expect(Tok::Comma, "','");
      first = false;
      Token pname = expect(Tok::Ident, "parameter name");
      expect(Tok::Colon, "':'");
      TypeExpr ptype = parseType();
      Span pspan = joinSpans(pname.span, ptype.span);
      if (ptype.isPerm()) {
        // Permission parameters link back to an earlier box parameter.
        PermParam pp;
        pp.name = pname.text;
        pp.boxParamName = ptype.name;
        pp.span = pspan;
        bool found = false;
        for (size_t i = 0; i < m.params.size(); ++i) {
          if (m.params[i].name == pp.boxParamName) {
            if (!m.params[i].type.isBox())
              fail(ptype.span, "SYN003",
                   "Perm[" + pp.boxParamName + "] must reference a Box-typed parameter");
            pp.boxParamIndex = static_cast<int>(i);
            found = true;
            break;
          }
        }
        if (!found)
          fail(ptype.span, "SYN003",
               "Perm[" + pp.boxParamName + "] references no earlier parameter named '" +
                   pp.boxParamName + "'");
        m.permParams.push_back(std::move(pp));
      } else {
        checkTypePosition(ptype, TypePos::Param);
        Param p;
        p.name = pname.text;
        p.type = std::move(ptype);
        p.span = pspan;
        m.params.push_back(std::move(p));
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Colon, "':'");
    m.returnType = parseType();
    checkTypePosition(m.returnType, TypePos::Return);
    m.body = parseBlock();
    m.span = joinSpans(start, m.body.span);
    return m;
  }

  // ── types ──
  TypeExpr parseType() {
    TypeExpr t;
    Token tok = cur();
    switch (tok.kind) {
      case Tok::KwInt: advance(); t = makeType(TypeKind::Int); t.span = tok.span; return t;
      case Tok::KwBool: advance(); t = makeType(TypeKind::Bool); t.span = tok.span; return t;
      case Tok::KwStr: advance(); t = makeType(TypeKind::Str); t.span = tok.span; return t;
      case Tok::KwUnit: advance(); t = makeType(TypeKind::Unit); t.span = tok.span; return t;
      case Tok::KwNothing: advance(); t = makeType(TypeKind::Nothing); t.span = tok.span; return t;
      case Tok::Ident:
        advance();
        t = makeClassType(tok.text);
        t.span = tok.span;
        return t;
      case Tok::KwBox: {
        advance();
        expect(Tok::LBracket, "'['");
        TypeExpr inner = parseType();
        Token rb = expect(Tok::RBracket, "']'");
        t.kind = TypeKind::Box;
        t.arg = std::make_shared<TypeExpr>(std::move(inner));
        t.span = joinSpans(tok.span, rb.span);
        return t;
      }
      case Tok::KwActorRef: {
        advance();
        expect(Tok::LBracket, "'['");
        TypeExpr inner = parseType();
        Token rb = expect(Tok::RBracket, "']'");
        t.kind = TypeKind::ActorRef;
        t.arg = std::make_shared<TypeExpr>(std::move(inner));
        t.span = joinSpans(tok.span, rb.span);
        return t;
      }
      case Tok::KwPerm: {
        advance();
        expect(Tok::LBracket, "'['");
        Token box = expect(Tok::Ident, "box parameter name");
        Token rb = expect(Tok::RBracket, "']'");
        t.kind = TypeKind::Perm;
        t.name = box.text;
        t.span = joinSpans(tok.span, rb.span);
        return t;
      }
      default:
        if (at(Tok::Eof)) fail(tok.span, "SYN002", "unexpected end of file, expected a type");
        fail(tok.span, "SYN001", std::string("expected a type, got ") + tokName(tok.kind));
    }
  }

  enum class TypePos { Field, Param, Return, Local };

  void checkTypePosition(const TypeExpr& t, TypePos pos) {
    if (t.kind == TypeKind::Nothing && pos != TypePos::Return)
      fail(t.span, "SYN004", "Nothing is only valid as a return type");
    if (t.kind == TypeKind::Perm && pos != TypePos::Param)
      fail(t.span, "SYN004", "Perm[...] is only valid as a parameter type");
    if (t.arg) checkTypePosition(*t.arg, pos);
  }

  // ── statements ──
  Block parseBlock() {
    Span start = cur().span;
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!at(Tok::RBrace)) {
      if (at(Tok::Eof)) fail(cur().span, "SYN002", "unterminated block");
      b.stmts.push_back(parseStmt());
    }
    Token rb = expect(Tok::RBrace, "'}'");
    b.span = joinSpans(start, rb.span);
    return b;
  }

  // Statements inside `{ ... => ... }` closure bodies share this helper: the
  // brace is already consumed by the caller.
  Block parseStmtsUntilRBrace(const Span& openBrace) {
    Block b;
    while (!at(Tok::RBrace)) {
      if (at(Tok::Eof)) fail(cur().span, "SYN002", "unterminated block");
      b.stmts.push_back(parseStmt());
    }
    Token rb = expect(Tok::RBrace, "'}'");
    b.span = joinSpans(openBrace, rb.span);
    return b;
  }

  StmtPtr parseStmt() {
    switch (cur().kind) {
      case Tok::KwVal:
      case Tok::KwVar: return parseLocal();
      case Tok::KwPrint: return parsePrint();
      case Tok::KwIf: return parseIf();
      case Tok::KwWhile: return parseWhile();
      case Tok::KwReturn: return parseReturn();
      case Tok::KwMkBox: return parseMkBox();
      case Tok::KwConsume: return parseConsume();
      default: return parseExprLedStmt();
    }
  }

  StmtPtr parseLocal() {
    Span start = cur().span;
    bool isVar = at(Tok::KwVar);
    advance();
    Token name = expect(Tok::Ident, "binding name");
    expect(Tok::Colon, "':'");
    auto s = std::make_unique<LocalStmt>();
    s->isVar = isVar;
    s->name = name.text;
    s->nameSpan = name.span;
    s->type = parseType();
    checkTypePosition(s->type, TypePos::Local);
    expect(Tok::Assign, "'='");
    s->init = parseExpr();
    s->span = joinSpans(start, s->init->span);
    return s;
  }

  StmtPtr parsePrint() {
    Span start = cur().span;
    expect(Tok::KwPrint, "'print'");
    expect(Tok::LParen, "'('");
    auto s = std::make_unique<PrintStmt>();
    s->value = parseExpr();
    Token rp = expect(Tok::RParen, "')'");
    s->span = joinSpans(start, rp.span);
    return s;
  }

  StmtPtr parseIf() {
    Span start = cur().span;
    expect(Tok::KwIf, "'if'");
    expect(Tok::LParen, "'('");
    auto s = std::make_unique<IfStmt>();
    s->cond = parseExpr();
    expect(Tok::RParen, "')'");
    s->thenBlock = parseBlock();
    Span end = s->thenBlock.span;
    if (match(Tok::KwElse)) {
      if (at(Tok::KwIf)) {
        Block b;
        b.stmts.push_back(parseIf());
        b.span = b.stmts.front()->span;
        s->elseBlock = std::move(b);
      } else {
        s->elseBlock = parseBlock();
      }
      end = s->elseBlock->span;
    }
    s->span = joinSpans(start, end);
    return s;
  }

  StmtPtr parseWhile() {
    Span start = cur().span;
    expect(Tok::KwWhile, "'while'");
    expect(Tok::LParen, "'('");
    auto s = std::make_unique<WhileStmt>();
    s->cond = parseExpr();
    expect(Tok::RParen, "')'");
    s->body = parseBlock();
    s->span = joinSpans(start, s->body.span);
    return s;
  }

  static bool startsExpr(Tok k) {
    switch (k) {
      case Tok::Ident: case Tok::IntLit: case Tok::StrLit: case Tok::KwTrue:
      case Tok::KwFalse: case Tok::KwThis: case Tok::KwNew: case Tok::KwSpawn:
      case Tok::LParen: case Tok::Minus: case Tok::Bang:
        return true;
      default:
        return false;
    }
  }

  StmtPtr parseReturn() {
    Span start = cur().span;
    Token ret = expect(Tok::KwReturn, "'return'");
    auto s = std::make_unique<ReturnStmt>();
    s->span = ret.span;
    if (startsExpr(cur().kind)) {
      s->value = parseExpr();
      s->span = joinSpans(start, s->value->span);
    }
    return s;
  }

  StmtPtr parseMkBox() {
    Span start = cur().span;
    expect(Tok::KwMkBox, "'mkbox'");
    expect(Tok::LBracket, "'['");
    Token cls = expect(Tok::Ident, "class name");
    expect(Tok::RBracket, "']'");
    Token lb = expect(Tok::LBrace, "'{'");
    expect(Tok::LParen, "'('");
    Token boxName = expect(Tok::Ident, "box binding name");
    expect(Tok::Comma, "','");
    Token permName = expect(Tok::Ident, "permission binding name");
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'=>'");
    auto s = std::make_unique<MkBoxStmt>();
    s->className = cls.text;
    s->classSpan = cls.span;
    s->boxName = boxName.text;
    s->boxSpan = boxName.span;
    s->permName = permName.text;
    s->permSpan = permName.span;
    s->body = parseStmtsUntilRBrace(lb.span);
    s->span = joinSpans(start, s->body.span);
    return s;
  }

  StmtPtr parseConsume() {
    Span start = cur().span;
    expect(Tok::KwConsume, "'consume'");
    expect(Tok::LParen, "'('");
    Token box = expect(Tok::Ident, "box variable");
    expect(Tok::RParen, "')'");
    auto s = std::make_unique<ConsumeStmt>();
    s->boxVar = makeVarRef(box);
    s->body = parseBlock();
    s->span = joinSpans(start, s->body.span);
    return s;
  }

  // Statements that begin with an expression: assignment, sends, open, or a
  // bare call.
  StmtPtr parseExprLedStmt() {
    Span start = cur().span;
    PostfixResult pr = parseExprAllowOpen();
    if (pr.pendingOpen) {
      if (pr.expr->kind != ExprKind::VarRef)
        fail(pr.expr->span, "SYN014", "open receiver must be a box variable");
      Token lb = expect(Tok::LBrace, "'{'");
      Token payload = expect(Tok::Ident, "payload binding name");
      expect(Tok::Arrow, "'=>'");
      auto s = std::make_unique<OpenStmt>();
      s->boxVar.reset(static_cast<VarRef*>(pr.expr.release()));
      s->payloadName = payload.text;
      s->payloadSpan = payload.span;
      s->body = parseStmtsUntilRBrace(lb.span);
      s->span = joinSpans(start, s->body.span);
      return s;
    }
    if (at(Tok::Assign)) {
      advance();
      if (pr.expr->kind != ExprKind::VarRef && pr.expr->kind != ExprKind::FieldGet)
        fail(pr.expr->span, "SYN014", "assignment target must be a variable or field");
      auto s = std::make_unique<AssignStmt>();
      s->target = std::move(pr.expr);
      s->value = parseExpr();
      s->span = joinSpans(start, s->value->span);
      return s;
    }
    if (at(Tok::Bang)) {
      advance();
      expect(Tok::LParen, "'('");
      Token box = expect(Tok::Ident, "box variable");
      expect(Tok::RParen, "')'");
      auto s = std::make_unique<SendBoxStmt>();
      s->target = std::move(pr.expr);
      s->boxVar = makeVarRef(box);
      s->body = parseBlock();
      s->span = joinSpans(start, s->body.span);
      return s;
    }
    if (at(Tok::BangBang)) {
      advance();
      auto s = std::make_unique<SendImmStmt>();
      s->target = std::move(pr.expr);
      s->value = parseExpr();
      s->span = joinSpans(start, s->value->span);
      return s;
    }
    if (pr.expr->kind != ExprKind::Call)
      fail(pr.expr->span, "SYN014", "only calls may be used as statements");
    auto s = std::make_unique<ExprStatement>();
    s->expr = std::move(pr.expr);
    s->span = s->expr->span;
    return s;
  }

  // ── expressions ──
  struct PostfixResult {
    ExprPtr expr;
    bool pendingOpen = false;
  };

  std::unique_ptr<VarRef> makeVarRef(const Token& t) {
    auto v = std::make_unique<VarRef>();
    v->name = t.text;
    v->span = t.span;
    return v;
  }

  ExprPtr parseExpr() {
    PostfixResult pr = parseOr(false);
    return std::move(pr.expr);
  }

  PostfixResult parseExprAllowOpen() { return parseOr(true); }

  PostfixResult parseOr(bool allowOpen) {
    PostfixResult lhs = parseAnd(allowOpen);
    if (lhs.pendingOpen) return lhs;
    while (at(Tok::OrOr)) {
      advance();
      PostfixResult rhs = parseAnd(false);
      auto e = std::make_unique<BinaryExpr>();
      e->op = BinOp::Or;
      e->span = joinSpans(lhs.expr->span, rhs.expr->span);
      e->lhs = std::move(lhs.expr);
      e->rhs = std::move(rhs.expr);
      lhs.expr = std::move(e);
    }
    return lhs;
  }

  PostfixResult parseAnd(bool allowOpen) {
    PostfixResult lhs = parseCmp(allowOpen);
    if (lhs.pendingOpen) return lhs;
    while (at(Tok::AndAnd)) {
      advance();
      PostfixResult rhs = parseCmp(false);
      auto e = std::make_unique<BinaryExpr>();
      e->op = BinOp::And;
      e->span = joinSpans(lhs.expr->span, rhs.expr->span);
      e->lhs = std::move(lhs.expr);
      e->rhs = std::move(rhs.expr);
      lhs.expr = std::move(e);
    }
    return lhs;
  }

  PostfixResult parseCmp(bool allowOpen) {
    PostfixResult lhs = parseAdd(allowOpen);
    if (lhs.pendingOpen) return lhs;
    BinOp op;
    switch (cur().kind) {
      case Tok::EqEq: op = BinOp::Eq; break;
      case Tok::NotEq: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default: return lhs;
    }
    advance();
    PostfixResult rhs = parseAdd(false);
    auto e = std::make_unique<BinaryExpr>();
    e->op = op;
    e->span = joinSpans(lhs.expr->span, rhs.expr->span);
    e->lhs = std::move(lhs.expr);
    e->rhs = std::move(rhs.expr);
    PostfixResult out;
    out.expr = std::move(e);
    return out;
  }

  PostfixResult parseAdd(bool allowOpen) {
    PostfixResult lhs = parseMul(allowOpen);
    if (lhs.pendingOpen) return lhs;
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      advance();
      PostfixResult rhs = parseMul(false);
      auto e = std::make_unique<BinaryExpr>();
      e->op = op;
      e->span = joinSpans(lhs.expr->span, rhs.expr->span);
      e->lhs = std::move(lhs.expr);
      e->rhs = std::move(rhs.expr);
      lhs.expr = std::move(e);
    }
    return lhs;
  }

  PostfixResult parseMul(bool allowOpen) {
    PostfixResult lhs = parseUnary(allowOpen);
    if (lhs.pendingOpen) return lhs;
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      BinOp op = at(Tok::Star) ? BinOp::Mul : at(Tok::Slash) ? BinOp::Div : BinOp::Mod;
      advance();
      PostfixResult rhs = parseUnary(false);
      auto e = std::make_unique<BinaryExpr>();
      e->op = op;
      e->span = joinSpans(lhs.expr->span, rhs.expr->span);
      e->lhs = std::move(lhs.expr);
      e->rhs = std::move(rhs.expr);
      lhs.expr = std::move(e);
    }
    return lhs;
  }

  PostfixResult parseUnary(bool allowOpen) {
    if (at(Tok::Minus) || at(Tok::Bang)) {
      Token op = advance();
      PostfixResult operand = parseUnary(false);
      auto e = std::make_unique<UnaryExpr>();
      e->op = op.kind == Tok::Minus ? UnOp::Neg : UnOp::Not;
      e->span = joinSpans(op.span, operand.expr->span);
      e->operand = std::move(operand.expr);
      PostfixResult out;
      out.expr = std::move(e);
      return out;
    }
    return parsePostfix(allowOpen);
  }

  PostfixResult parsePostfix(bool allowOpen) {
    PostfixResult r;
    r.expr = parsePrimary();
    while (at(Tok::Dot)) {
      if (allowOpen && peekIs(1, Tok::KwOpen) && peekIs(2, Tok::LBrace)) {
        advance();  // .
        advance();  // open
        r.pendingOpen = true;
        return r;
      }
      if (peekIs(1, Tok::KwOpen))
        fail(peek(1).span, "SYN014", "open { ... } is only valid as a statement");
      advance();  // .
      Token name = expect(Tok::Ident, "member name");
      if (at(Tok::LParen)) {
        auto call = std::make_unique<CallExpr>();
        call->method = name.text;
        call->methodSpan = name.span;
        Span end = parseArgs(call->args);
        call->span = joinSpans(r.expr->span, end);
        call->base = std::move(r.expr);
        r.expr = std::move(call);
      } else {
        auto get = std::make_unique<FieldGet>();
        get->name = name.text;
        get->nameSpan = name.span;
        get->span = joinSpans(r.expr->span, name.span);
        get->base = std::move(r.expr);
        r.expr = std::move(get);
      }
    }
    return r;
  }

  Span parseArgs(std::vector<ExprPtr>& args) {
    expect(Tok::LParen, "'('");
    bool first = true;
    while (!at(Tok::RParen)) {
      if (!first) expect(Tok::Comma, "','");
      first = false;
      args.push_back(parseExpr());
    }
    Token rp = expect(Tok::RParen, "')'");
    return rp.span;
  }

  ExprPtr parsePrimary() {
    Token tok = cur();
    switch (tok.kind) {
      case Tok::IntLit: {
        advance();
        auto e = std::make_unique<IntLit>();
        e->value = tok.intValue;
        e->span = tok.span;
        return e;
      }
      case Tok::StrLit: {
        advance();
        auto e = std::make_unique<StrLit>();
        e->value = tok.text;
        e->span = tok.span;
        return e;
      }
      case Tok::KwTrue:
      case Tok::KwFalse: {
        advance();
        auto e = std::make_unique<BoolLit>();
        e->value = tok.kind == Tok::KwTrue;
        e->span = tok.span;
        return e;
      }
      case Tok::KwThis: {
        advance();
        auto e = std::make_unique<ThisExpr>();
        e->span = tok.span;
        return e;
      }
      case Tok::LParen: {
        advance();
        ExprPtr inner = parseExpr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::KwNew: {
        advance();
        Token name = expect(Tok::Ident, "class name");
        expect(Tok::LParen, "'('");
        Token rp = expect(Tok::RParen, "')'");
        auto e = std::make_unique<NewExpr>();
        e->className = name.text;
        e->span = joinSpans(tok.span, rp.span);
        return e;
      }
      case Tok::KwSpawn: {
        advance();
        expect(Tok::LBracket, "'['");
        Token name = expect(Tok::Ident, "actor class name");
        Token rb = expect(Tok::RBracket, "']'");
        auto e = std::make_unique<SpawnExpr>();
        e->className = name.text;
        e->span = joinSpans(tok.span, rb.span);
        return e;
      }
      case Tok::Ident: {
        advance();
        if (at(Tok::LParen)) {
          auto call = std::make_unique<CallExpr>();
          call->method = tok.text;
          call->methodSpan = tok.span;
          Span end = parseArgs(call->args);
          call->span = joinSpans(tok.span, end);
          return call;
        }
        return makeVarRef(tok);
      }
      case Tok::Eof:
        fail(tok.span, "SYN002", "unexpected end of file in expression");
      default:
        fail(tok.span, "SYN001",
             std::string("expected an expression, got ") + tokName(tok.kind));
    }
  }

  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;
};

}  // namespace detail

// Parses MiniCasa source. On success the result holds a Program and no error
// diagnostics; on failure it holds diagnostics only.
inline ParseResult parse(std::string_view source, const std::string& file) {
  ParseResult res;
  Lexer lex(source, file);
  std::vector<Diagnostic> lexDiags;
  std::vector<Token> toks = lex.tokenize(lexDiags);
  if (!lexDiags.empty()) {
    res.diagnostics = std::move(lexDiags);
    return res;
  }
  detail::Parser p(std::move(toks), file);
  try {
    res.program = p.parseProgram();
  } catch (detail::ParseError& e) {
    res.diagnostics.push_back(std::move(e.diag));
  }
  return res;
}

}  // namespace casa

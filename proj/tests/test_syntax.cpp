#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "casa/driver.hpp"
#include "casa/parser.hpp"
#include "casa/pretty.hpp"
#include "casa/resolve.hpp"
#include "casa/walk.hpp"

using namespace casa;

namespace {

ParseResult parseText(const std::string& src) { return parse(src, "test.mc"); }

bool hasCode(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code) return true;
  return false;
}

}  // namespace

// ── parse ──────────────────────────────────────────────────────────────────

TEST(Parse, MinimalClass) {
  auto r = parseText("class A {}");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.program->classes.size(), 1u);
  EXPECT_EQ(r.program->classes[0].name, "A");
  EXPECT_TRUE(r.program->classes[0].methods.empty());
  EXPECT_TRUE(r.program->mainBlock.stmts.empty());
}

TEST(Parse, UnterminatedClassBody) {
  auto r = parseText("class A {");
  ASSERT_FALSE(r.ok());
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].code, "SYN002");
}

TEST(Parse, BoxPermSignature) {
  // A method taking a box and the permission guarding it.
  auto r = parseText(
      "class T { var n: Int = 0 }\n"
      "class W {\n"
      "  def m(b: Box[T], p: Perm[b]): Unit {\n"
      "    b.open { x => print(0) }\n"
      "  }\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  const ClassDecl& w = r.program->classes[1];
  ASSERT_EQ(w.methods.size(), 1u);
  const MethodDecl& m = w.methods[0];
  ASSERT_EQ(m.params.size(), 1u);
  EXPECT_EQ(m.params[0].name, "b");
  ASSERT_TRUE(m.params[0].type.isBox());
  ASSERT_EQ(m.permParams.size(), 1u);
  EXPECT_EQ(m.permParams[0].name, "p");
  EXPECT_EQ(m.permParams[0].boxParamName, "b");
  EXPECT_EQ(m.permParams[0].boxParamIndex, 0);
  ASSERT_EQ(m.body.stmts.size(), 1u);
  EXPECT_EQ(m.body.stmts[0]->kind, StmtKind::Open);
}

TEST(Parse, PermLinkUnknownParam) {
  auto r = parseText("class T {} class W { def m(b: Box[T], p: Perm[c]): Unit {} }");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(hasCode(r.diagnostics, "SYN003"));
}

TEST(Parse, PermLinkNonBoxParam) {
  auto r = parseText("class W { def m(n: Int, p: Perm[n]): Unit {} }");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(hasCode(r.diagnostics, "SYN003"));
}

TEST(Parse, NothingOnlyAsReturnType) {
  auto r = parseText("class W { def m(x: Nothing): Unit {} }");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(hasCode(r.diagnostics, "SYN004"));
}

TEST(Parse, PermOnlyAsParam) {
  auto r = parseText("class T {} class W { var p: Perm[x] = 0 }");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(hasCode(r.diagnostics, "SYN004"));
}

TEST(Parse, SendForms) {
  auto r = parseText(
      "class M { var n: Int = 0 }\n"
      "actor class E { def receive(n: Int): Unit { print(n) } }\n"
      "val e: ActorRef[Int] = spawn[E]\n"
      "e !! 42\n"
      "mkbox[M] { (b, p) =>\n"
      "  e ! (b) { print(1) }\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.program->mainBlock.stmts.size(), 3u);
  EXPECT_EQ(r.program->mainBlock.stmts[1]->kind, StmtKind::SendImm);
  EXPECT_EQ(r.program->mainBlock.stmts[2]->kind, StmtKind::MkBox);
}

TEST(Parse, GlobalDecl) {
  auto r = parseText("global G { var cnt: Int = 0 }");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.program->globals.size(), 1u);
  EXPECT_EQ(r.program->globals[0].fields[0].name, "cnt");
}

TEST(Parse, OpenOnlyAsStatement) {
  auto r = parseText("class T {} val x: Int = b.open { y => print(0) }");
  ASSERT_FALSE(r.ok());
}

// ── prettyPrint round trips ───────────────────────────────────────────────

TEST(Pretty, EmptyProgram) {
  auto r = parseText("");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(prettyPrint(*r.program), "");
}

TEST(Pretty, RoundTripMinimal) {
  auto r = parseText("class A {}");
  ASSERT_TRUE(r.ok());
  auto r2 = parseText(prettyPrint(*r.program));
  ASSERT_TRUE(r2.ok());
  EXPECT_TRUE(equalPrograms(*r.program, *r2.program));
}

TEST(Pretty, RoundTripBoxPermMethod) {
  auto r = parseText(
      "class T { var n: Int = 0 }\n"
      "class W {\n"
      "  def m(b: Box[T], p: Perm[b]): Unit {\n"
      "    b.open { x => print(0) }\n"
      "  }\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  std::string text = prettyPrint(*r.program);
  auto r2 = parseText(text);
  ASSERT_TRUE(r2.ok()) << text;
  EXPECT_TRUE(equalPrograms(*r.program, *r2.program));
}

// ── resolveNames ──────────────────────────────────────────────────────────

TEST(Resolve, CaptureOfMutableVar) {
  auto r = parseText(
      "class C { var n: Int = 0 }\n"
      "var leaked: Int = 0\n"
      "mkbox[C] { (b, p) =>\n"
      "  b.open { x =>\n"
      "    leaked = x.n\n"
      "  }\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_TRUE(rr.ok());
  const auto& mk = static_cast<const MkBoxStmt&>(*r.program->mainBlock.stmts[1]);
  ASSERT_EQ(mk.body.stmts[0]->kind, StmtKind::Open);
  const auto& open = static_cast<const OpenStmt&>(*mk.body.stmts[0]);
  ASSERT_EQ(open.captures.size(), 1u);
  EXPECT_EQ(open.captures[0].name, "leaked");
  EXPECT_TRUE(open.captures[0].isVar);
  // the enclosing mkbox continuation also captures it (free in its body)
  ASSERT_EQ(mk.captures.size(), 1u);
  EXPECT_EQ(mk.captures[0].name, "leaked");
}

TEST(Resolve, EmptyCaptureList) {
  auto r = parseText(
      "class C { var n: Int = 0 }\n"
      "mkbox[C] { (b, p) =>\n"
      "  b.open { x => print(x.n) }\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_TRUE(rr.ok());
  const auto& mk = static_cast<const MkBoxStmt&>(*r.program->mainBlock.stmts[0]);
  EXPECT_TRUE(mk.captures.empty());
  const auto& open = static_cast<const OpenStmt&>(*mk.body.stmts[0]);
  EXPECT_TRUE(open.captures.empty());  // b is the open receiver, not a capture
}

TEST(Resolve, UnknownIdentifier) {
  auto r = parseText("print(foo)");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_FALSE(rr.ok());
  EXPECT_TRUE(hasCode(rr.diagnostics, "SYN010"));
}

TEST(Resolve, DuplicateDefinition) {
  auto r = parseText("class A {} class A {}");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_FALSE(rr.ok());
  EXPECT_TRUE(hasCode(rr.diagnostics, "SYN011"));
}

TEST(Resolve, AssignToVal) {
  auto r = parseText("val x: Int = 1\nx = 2");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_FALSE(rr.ok());
  EXPECT_TRUE(hasCode(rr.diagnostics, "SYN013"));
}

TEST(Resolve, BareGlobalIsNotAValue) {
  auto r = parseText("global G { var n: Int = 0 }\nprint(G)");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_FALSE(rr.ok());
  EXPECT_TRUE(hasCode(rr.diagnostics, "SYN014"));
}

TEST(Resolve, ActorNeedsReceive) {
  auto r = parseText("actor class A { def f(): Unit {} }");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_FALSE(rr.ok());
  EXPECT_TRUE(hasCode(rr.diagnostics, "SYN012"));
}

TEST(Resolve, CapturedValAcrossTwoClosures) {
  auto r = parseText(
      "class C { var n: Int = 0 }\n"
      "val k: Int = 3\n"
      "mkbox[C] { (b, p) =>\n"
      "  b.open { x =>\n"
      "    x.n = k\n"
      "  }\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  auto rr = resolveNames(*r.program);
  ASSERT_TRUE(rr.ok());
  const auto& mk = static_cast<const MkBoxStmt&>(*r.program->mainBlock.stmts[1]);
  ASSERT_EQ(mk.captures.size(), 1u);
  EXPECT_EQ(mk.captures[0].name, "k");
  EXPECT_FALSE(mk.captures[0].isVar);
  const auto& open = static_cast<const OpenStmt&>(*mk.body.stmts[0]);
  ASSERT_EQ(open.captures.size(), 1u);
  EXPECT_EQ(open.captures[0].name, "k");
}

// ── properties ────────────────────────────────────────────────────────────

namespace gen {

struct Ctx {
  std::mt19937 rng;
  explicit Ctx(unsigned seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin() { return pick(2) == 0; }
};

const char* kVars[] = {"a", "b", "c", "x", "y", "z"};
const char* kFields[] = {"n", "m", "tag"};
const char* kMethods[] = {"f", "g", "run"};
const char* kClasses[] = {"A", "B", "C"};

ExprPtr genExpr(Ctx& g, int depth);

ExprPtr genLeaf(Ctx& g) {
  switch (g.pick(6)) {
    case 0: {
      auto e = std::make_unique<IntLit>();
      e->value = g.pick(1000);
      return e;
    }
    case 1: {
      auto e = std::make_unique<StrLit>();
      e->value = g.coin() ? "hi" : "final:";
      return e;
    }
    case 2: {
      auto e = std::make_unique<BoolLit>();
      e->value = g.coin();
      return e;
    }
    case 3: {
      auto e = std::make_unique<VarRef>();
      e->name = kVars[g.pick(6)];
      return e;
    }
    case 4: {
      auto e = std::make_unique<NewExpr>();
      e->className = kClasses[g.pick(3)];
      return e;
    }
    default: {
      auto e = std::make_unique<SpawnExpr>();
      e->className = kClasses[g.pick(3)];
      return e;
    }
  }
}

ExprPtr genExpr(Ctx& g, int depth) {
  if (depth <= 0) return genLeaf(g);
  switch (g.pick(6)) {
    case 0: {
      auto e = std::make_unique<BinaryExpr>();
      static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                  BinOp::Mod, BinOp::Eq,  BinOp::Lt,  BinOp::And,
                                  BinOp::Or,  BinOp::Ge};
      e->op = ops[g.pick(10)];
      e->lhs = genExpr(g, depth - 1);
      e->rhs = genExpr(g, depth - 1);
      return e;
    }
    case 1: {
      auto e = std::make_unique<UnaryExpr>();
      e->op = g.coin() ? UnOp::Neg : UnOp::Not;
      e->operand = genExpr(g, depth - 1);
      return e;
    }
    case 2: {
      auto e = std::make_unique<FieldGet>();
      e->name = kFields[g.pick(3)];
      e->base = genExpr(g, depth - 1);
      return e;
    }
    case 3: {
      auto e = std::make_unique<CallExpr>();
      e->method = kMethods[g.pick(3)];
      if (g.coin()) e->base = genExpr(g, depth - 1);
      int n = g.pick(3);
      for (int i = 0; i < n; ++i) e->args.push_back(genExpr(g, depth - 1));
      return e;
    }
    default:
      return genLeaf(g);
  }
}

TypeExpr genType(Ctx& g) {
  switch (g.pick(7)) {
    case 0: return makeType(TypeKind::Int);
    case 1: return makeType(TypeKind::Bool);
    case 2: return makeType(TypeKind::Str);
    case 3: return makeType(TypeKind::Unit);
    case 4: return makeClassType(kClasses[g.pick(3)]);
    case 5: {
      TypeExpr t;
      t.kind = TypeKind::Box;
      t.arg = std::make_shared<TypeExpr>(makeClassType(kClasses[g.pick(3)]));
      return t;
    }
    default: {
      TypeExpr t;
      t.kind = TypeKind::ActorRef;
      t.arg = std::make_shared<TypeExpr>(makeType(TypeKind::Int));
      return t;
    }
  }
}

void genBlock(Ctx& g, Block& b, int depth, int maxStmts);

StmtPtr genStmt(Ctx& g, int depth) {
  switch (g.pick(11)) {
    case 0: {
      auto s = std::make_unique<LocalStmt>();
      s->isVar = g.coin();
      s->name = kVars[g.pick(6)];
      s->type = genType(g);
      s->init = genExpr(g, depth);
      return s;
    }
    case 1: {
      auto s = std::make_unique<AssignStmt>();
      if (g.coin()) {
        auto v = std::make_unique<VarRef>();
        v->name = kVars[g.pick(6)];
        s->target = std::move(v);
      } else {
        auto fg = std::make_unique<FieldGet>();
        fg->name = kFields[g.pick(3)];
        auto v = std::make_unique<VarRef>();
        v->name = kVars[g.pick(6)];
        fg->base = std::move(v);
        s->target = std::move(fg);
      }
      s->value = genExpr(g, depth);
      return s;
    }
    case 2: {
      auto s = std::make_unique<PrintStmt>();
      s->value = genExpr(g, depth);
      return s;
    }
    case 3: {
      auto s = std::make_unique<IfStmt>();
      s->cond = genExpr(g, depth);
      genBlock(g, s->thenBlock, depth - 1, 2);
      if (g.coin()) {
        Block e;
        genBlock(g, e, depth - 1, 2);
        s->elseBlock = std::move(e);
      }
      return s;
    }
    case 4: {
      auto s = std::make_unique<WhileStmt>();
      s->cond = genExpr(g, depth);
      genBlock(g, s->body, depth - 1, 2);
      return s;
    }
    case 5: {
      // a bare return is only unambiguous in tail position; genBlock adds those
      auto s = std::make_unique<ReturnStmt>();
      s->value = genExpr(g, depth);
      return s;
    }
    case 6: {
      auto s = std::make_unique<OpenStmt>();
      s->boxVar = std::make_unique<VarRef>();
      s->boxVar->name = kVars[g.pick(6)];
      s->payloadName = "pv";
      genBlock(g, s->body, depth - 1, 2);
      return s;
    }
    case 7: {
      auto s = std::make_unique<MkBoxStmt>();
      s->className = kClasses[g.pick(3)];
      s->boxName = "bb";
      s->permName = "pp";
      genBlock(g, s->body, depth - 1, 2);
      return s;
    }
    case 8: {
      auto s = std::make_unique<ConsumeStmt>();
      s->boxVar = std::make_unique<VarRef>();
      s->boxVar->name = kVars[g.pick(6)];
      genBlock(g, s->body, depth - 1, 2);
      return s;
    }
    case 9: {
      auto s = std::make_unique<SendBoxStmt>();
      auto v = std::make_unique<VarRef>();
      v->name = kVars[g.pick(6)];
      s->target = std::move(v);
      s->boxVar = std::make_unique<VarRef>();
      s->boxVar->name = kVars[g.pick(6)];
      genBlock(g, s->body, depth - 1, 2);
      return s;
    }
    default: {
      if (g.coin()) {
        auto s = std::make_unique<SendImmStmt>();
        auto v = std::make_unique<VarRef>();
        v->name = kVars[g.pick(6)];
        s->target = std::move(v);
        s->value = genExpr(g, depth);
        return s;
      }
      auto s = std::make_unique<ExprStatement>();
      auto c = std::make_unique<CallExpr>();
      c->method = kMethods[g.pick(3)];
      if (g.coin()) {
        auto v = std::make_unique<VarRef>();
        v->name = kVars[g.pick(6)];
        c->base = std::move(v);
      }
      int n = g.pick(2);
      for (int i = 0; i < n; ++i) c->args.push_back(genExpr(g, depth));
      s->expr = std::move(c);
      return s;
    }
  }
}

void genBlock(Ctx& g, Block& b, int depth, int maxStmts) {
  if (depth < 0) return;
  int n = g.pick(maxStmts + 1);
  for (int i = 0; i < n; ++i) b.stmts.push_back(genStmt(g, depth));
  if (g.pick(8) == 0) b.stmts.push_back(std::make_unique<ReturnStmt>());
}

Program genProgram(Ctx& g) {
  Program p;
  int numClasses = g.pick(3);
  for (int i = 0; i < numClasses; ++i) {
    ClassDecl c;
    c.name = kClasses[i];
    c.isActor = false;
    if (i > 0 && g.coin()) c.superName = kClasses[g.pick(i)];
    int nf = g.pick(3);
    for (int f = 0; f < nf; ++f) {
      FieldDecl fd;
      fd.isVar = g.coin();
      fd.name = kFields[f];
      fd.type = genType(g);
      if (fd.type.isPerm()) fd.type = makeType(TypeKind::Int);
      if (g.coin()) fd.init = genExpr(g, 1);
      c.fields.push_back(std::move(fd));
    }
    int nm = g.pick(3);
    for (int m = 0; m < nm; ++m) {
      MethodDecl md;
      md.name = kMethods[m];
      int np = g.pick(3);
      for (int pi = 0; pi < np; ++pi) {
        Param pr;
        pr.name = kVars[pi];
        pr.type = genType(g);
        md.params.push_back(std::move(pr));
        if (md.params.back().type.isBox() && g.coin()) {
          PermParam pp;
          pp.name = std::string("q") + std::to_string(pi);
          pp.boxParamName = md.params.back().name;
          pp.boxParamIndex = pi;
          md.permParams.push_back(std::move(pp));
        }
      }
      md.returnType = g.coin() ? makeType(TypeKind::Unit) : makeType(TypeKind::Int);
      genBlock(g, md.body, 2, 3);
      c.methods.push_back(std::move(md));
    }
    p.classes.push_back(std::move(c));
  }
  if (g.coin()) {
    GlobalDecl gd;
    gd.name = "G";
    FieldDecl fd;
    fd.isVar = true;
    fd.name = "cnt";
    fd.type = makeType(TypeKind::Int);
    gd.fields.push_back(std::move(fd));
    p.globals.push_back(std::move(gd));
  }
  genBlock(g, p.mainBlock, 2, 4);
  return p;
}

}  // namespace gen

TEST(Property, PrettyParseRoundTrip) {
  gen::Ctx g(20240809);
  for (int iter = 0; iter < 300; ++iter) {
    Program p = gen::genProgram(g);
    std::string text = prettyPrint(p);
    auto r = parseText(text);
    ASSERT_TRUE(r.ok()) << "iteration " << iter << "\n" << text;
    EXPECT_TRUE(equalPrograms(p, *r.program)) << "iteration " << iter << "\n" << text;
    // printing is canonical: a second round trip is a fixed point
    EXPECT_EQ(prettyPrint(*r.program), text);
  }
}

namespace {

void checkSpanNesting(const Expr& e, const Span& parent) {
  ASSERT_TRUE(e.span.valid()) << e.span.str();
  ASSERT_TRUE(parent.contains(e.span))
      << "child " << e.span.str() << " not inside parent " << parent.str();
  switch (e.kind) {
    case ExprKind::FieldGet:
      checkSpanNesting(*static_cast<const FieldGet&>(e).base, e.span);
      break;
    case ExprKind::Call: {
      const auto& c = static_cast<const CallExpr&>(e);
      if (c.base) checkSpanNesting(*c.base, e.span);
      for (const auto& a : c.args) checkSpanNesting(*a, e.span);
      break;
    }
    case ExprKind::Binary: {
      const auto& b = static_cast<const BinaryExpr&>(e);
      checkSpanNesting(*b.lhs, e.span);
      checkSpanNesting(*b.rhs, e.span);
      break;
    }
    case ExprKind::Unary:
      checkSpanNesting(*static_cast<const UnaryExpr&>(e).operand, e.span);
      break;
    default:
      break;
  }
}

void checkBlockSpans(const Block& b, const Span& parent);

void checkStmtSpans(const Stmt& s, const Span& parent) {
  ASSERT_TRUE(s.span.valid());
  ASSERT_TRUE(parent.contains(s.span))
      << "stmt " << s.span.str() << " not inside " << parent.str();
  switch (s.kind) {
    case StmtKind::Local: {
      const auto& x = static_cast<const LocalStmt&>(s);
      checkSpanNesting(*x.init, s.span);
      break;
    }
    case StmtKind::Assign: {
      const auto& x = static_cast<const AssignStmt&>(s);
      checkSpanNesting(*x.target, s.span);
      checkSpanNesting(*x.value, s.span);
      break;
    }
    case StmtKind::ExprStmt:
      checkSpanNesting(*static_cast<const ExprStatement&>(s).expr, s.span);
      break;
    case StmtKind::If: {
      const auto& x = static_cast<const IfStmt&>(s);
      checkSpanNesting(*x.cond, s.span);
      checkBlockSpans(x.thenBlock, s.span);
      if (x.elseBlock) checkBlockSpans(*x.elseBlock, s.span);
      break;
    }
    case StmtKind::While: {
      const auto& x = static_cast<const WhileStmt&>(s);
      checkSpanNesting(*x.cond, s.span);
      checkBlockSpans(x.body, s.span);
      break;
    }
    case StmtKind::Return: {
      const auto& x = static_cast<const ReturnStmt&>(s);
      if (x.value) checkSpanNesting(*x.value, s.span);
      break;
    }
    case StmtKind::Print:
      checkSpanNesting(*static_cast<const PrintStmt&>(s).value, s.span);
      break;
    case StmtKind::Open: {
      const auto& x = static_cast<const OpenStmt&>(s);
      checkSpanNesting(*x.boxVar, s.span);
      checkBlockSpans(x.body, s.span);
      break;
    }
    case StmtKind::MkBox:
      checkBlockSpans(static_cast<const MkBoxStmt&>(s).body, s.span);
      break;
    case StmtKind::Consume: {
      const auto& x = static_cast<const ConsumeStmt&>(s);
      checkSpanNesting(*x.boxVar, s.span);
      checkBlockSpans(x.body, s.span);
      break;
    }
    case StmtKind::SendBox: {
      const auto& x = static_cast<const SendBoxStmt&>(s);
      checkSpanNesting(*x.target, s.span);
      checkSpanNesting(*x.boxVar, s.span);
      checkBlockSpans(x.body, s.span);
      break;
    }
    case StmtKind::SendImm: {
      const auto& x = static_cast<const SendImmStmt&>(s);
      checkSpanNesting(*x.target, s.span);
      checkSpanNesting(*x.value, s.span);
      break;
    }
  }
}

void checkBlockSpans(const Block& b, const Span& parent) {
  for (const auto& s : b.stmts) checkStmtSpans(*s, parent);
}

}  // namespace

TEST(Property, SpanNesting) {
  gen::Ctx g(777);
  for (int iter = 0; iter < 150; ++iter) {
    Program p0 = gen::genProgram(g);
    std::string text = prettyPrint(p0);
    auto r = parseText(text);
    ASSERT_TRUE(r.ok());
    const Program& p = *r.program;
    for (const auto& cls : p.classes) {
      ASSERT_TRUE(cls.span.valid());
      for (const auto& f : cls.fields) {
        ASSERT_TRUE(cls.span.contains(f.span));
        if (f.init) checkSpanNesting(*f.init, f.span);
      }
      for (const auto& m : cls.methods) {
        ASSERT_TRUE(cls.span.contains(m.span));
        checkBlockSpans(m.body, m.span);
      }
    }
    if (!p.mainBlock.stmts.empty()) checkBlockSpans(p.mainBlock, p.mainBlock.span);
  }
}

namespace {

// Independent free-variable computation for a closure body: every VarRef
// bound to a frame slot that was not introduced inside the closure.
std::set<int> slotsIntroducedIn(const Block& body, const std::vector<int>& ownSlots) {
  std::set<int> slots(ownSlots.begin(), ownSlots.end());
  walkBlock(
      body,
      [&](const Stmt& s) {
        switch (s.kind) {
          case StmtKind::Local:
            slots.insert(static_cast<const LocalStmt&>(s).slot);
            break;
          case StmtKind::Open:
            slots.insert(static_cast<const OpenStmt&>(s).payloadSlot);
            break;
          case StmtKind::MkBox: {
            const auto& m = static_cast<const MkBoxStmt&>(s);
            slots.insert(m.boxSlot);
            slots.insert(m.permSlot);
            break;
          }
          default:
            break;
        }
      },
      nullptr);
  return slots;
}

std::set<std::string> bruteForceFreeVars(const Block& body, const std::vector<int>& ownSlots) {
  std::set<int> inner = slotsIntroducedIn(body, ownSlots);
  std::set<std::string> free;
  walkBlock(body, nullptr, [&](const Expr& e) {
    if (e.kind != ExprKind::VarRef) return;
    const auto& v = static_cast<const VarRef&>(e);
    switch (v.bind) {
      case BindKind::Local:
      case BindKind::Param:
      case BindKind::PermParam:
      case BindKind::OpenVar:
      case BindKind::MkBoxVar:
      case BindKind::MkBoxPerm:
        if (!inner.count(v.slot)) free.insert(v.name);
        break;
      default:
        break;
    }
  });
  return free;
}

std::set<std::string> captureNames(const std::vector<Capture>& cs) {
  std::set<std::string> names;
  for (const auto& c : cs) names.insert(c.name);
  return names;
}

void checkCaptureCompleteness(const Block& b) {
  walkBlock(
      b,
      [&](const Stmt& s) {
        switch (s.kind) {
          case StmtKind::Open: {
            const auto& x = static_cast<const OpenStmt&>(s);
            EXPECT_EQ(captureNames(x.captures),
                      bruteForceFreeVars(x.body, {x.payloadSlot}));
            break;
          }
          case StmtKind::MkBox: {
            const auto& x = static_cast<const MkBoxStmt&>(s);
            EXPECT_EQ(captureNames(x.captures),
                      bruteForceFreeVars(x.body, {x.boxSlot, x.permSlot}));
            break;
          }
          case StmtKind::Consume: {
            const auto& x = static_cast<const ConsumeStmt&>(s);
            EXPECT_EQ(captureNames(x.captures), bruteForceFreeVars(x.body, {}));
            break;
          }
          case StmtKind::SendBox: {
            const auto& x = static_cast<const SendBoxStmt&>(s);
            EXPECT_EQ(captureNames(x.captures), bruteForceFreeVars(x.body, {}));
            break;
          }
          default:
            break;
        }
      },
      nullptr);
}

}  // namespace

TEST(Property, CaptureCompleteness) {
  const char* programs[] = {
      // nested continuations referencing an outer val at several depths
      "class C { var n: Int = 0 }\n"
      "val k: Int = 3\n"
      "val j: Int = 4\n"
      "mkbox[C] { (b, p) =>\n"
      "  b.open { x =>\n"
      "    x.n = k\n"
      "    if (x.n == j) { print(k) }\n"
      "  }\n"
      "  consume(b) {\n"
      "    print(j)\n"
      "    mkbox[C] { (b2, p2) =>\n"
      "      b2.open { y => y.n = k + j }\n"
      "    }\n"
      "  }\n"
      "}\n",
      // locals declared inside the closure are not captures
      "class C { var n: Int = 0 }\n"
      "val k: Int = 1\n"
      "mkbox[C] { (b, p) =>\n"
      "  val inner: Int = k\n"
      "  b.open { x =>\n"
      "    x.n = inner\n"
      "    val deeper: Int = inner + 1\n"
      "    print(deeper)\n"
      "  }\n"
      "}\n",
      // box and permission names crossing closure boundaries
      "class C { var n: Int = 0 }\n"
      "class W {\n"
      "  def sink(b: Box[C], p: Perm[b]): Nothing { consume(b) { print(0) } }\n"
      "}\n"
      "val w: W = new W()\n"
      "mkbox[C] { (b, p) =>\n"
      "  consume(b) {\n"
      "    print(1)\n"
      "  }\n"
      "}\n",
  };
  for (const char* src : programs) {
    auto r = parseText(src);
    ASSERT_TRUE(r.ok()) << src;
    auto rr = resolveNames(*r.program);
    ASSERT_TRUE(rr.ok()) << src;
    checkCaptureCompleteness(r.program->mainBlock);
    for (const auto& cls : r.program->classes)
      for (const auto& m : cls.methods) checkCaptureCompleteness(m.body);
  }
}

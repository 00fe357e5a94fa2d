#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "casa/diag.hpp"

namespace casa {

struct ClassDecl;
struct GlobalDecl;
struct MethodDecl;

// ── Types ─────────────────────────────────────────────────────────────────

enum class TypeKind { Int, Bool, Str, Unit, Nothing, Class, Box, ActorRef, Perm };

struct TypeExpr {
  TypeKind kind = TypeKind::Unit;
  std::string name;                  // Class: class name; Perm: guarded parameter name
  std::shared_ptr<TypeExpr> arg;     // Box / ActorRef element type
  Span span;

  bool isBox() const { return kind == TypeKind::Box; }
  bool isPerm() const { return kind == TypeKind::Perm; }
  bool isClass() const { return kind == TypeKind::Class; }
  bool isBuiltinValue() const {
    return kind == TypeKind::Int || kind == TypeKind::Bool || kind == TypeKind::Str ||
           kind == TypeKind::Unit;
  }
};

inline TypeExpr makeType(TypeKind k) { return TypeExpr{k, "", nullptr, {}}; }

inline TypeExpr makeClassType(std::string name) {
  return TypeExpr{TypeKind::Class, std::move(name), nullptr, {}};
}

inline bool sameType(const TypeExpr& a, const TypeExpr& b) {
  if (a.kind != b.kind) return false;
  if (a.name != b.name) return false;
  if (!!a.arg != !!b.arg) return false;
  if (a.arg && !sameType(*a.arg, *b.arg)) return false;
  return true;
}

inline std::string typeToString(const TypeExpr& t) {
  switch (t.kind) {
    case TypeKind::Int: return "Int";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Str: return "Str";
    case TypeKind::Unit: return "Unit";
    case TypeKind::Nothing: return "Nothing";
    case TypeKind::Class: return t.name;
    case TypeKind::Box: return "Box[" + typeToString(*t.arg) + "]";
    case TypeKind::ActorRef: return "ActorRef[" + typeToString(*t.arg) + "]";
    case TypeKind::Perm: return "Perm[" + t.name + "]";
  }
  return "?";
}

// ── Expressions ───────────────────────────────────────────────────────────

enum class ExprKind {
  IntLit,
  BoolLit,
  StrLit,
  VarRef,
  This,
  FieldGet,
  Call,
  New,
  Spawn,
  Binary,
  Unary,
};

// How a name resolved. Filled in by resolveNames.
enum class BindKind {
  Unresolved,
  Local,
  Param,
  PermParam,
  OpenVar,    // payload binding of an open body
  MkBoxVar,   // box binding of a mkbox continuation
  MkBoxPerm,  // permission binding of a mkbox continuation
  Field,      // bare name resolved to a field of the enclosing class
  Global,     // name of a global singleton object
};

struct Expr {
  ExprKind kind;
  Span span;
  explicit Expr(ExprKind k) : kind(k) {}
  virtual ~Expr() = default;
  Expr(const Expr&) = delete;
  Expr& operator=(const Expr&) = delete;
};

using ExprPtr = std::unique_ptr<Expr>;

struct IntLit : Expr {
  long long value = 0;
  IntLit() : Expr(ExprKind::IntLit) {}
};

struct BoolLit : Expr {
  bool value = false;
  BoolLit() : Expr(ExprKind::BoolLit) {}
};

struct StrLit : Expr {
  std::string value;
  StrLit() : Expr(ExprKind::StrLit) {}
};

struct VarRef : Expr {
  std::string name;
  // resolution results
  BindKind bind = BindKind::Unresolved;
  int slot = -1;
  const TypeExpr* declType = nullptr;
  bool isVarBinding = false;
  const ClassDecl* fieldClass = nullptr;
  int fieldIndex = -1;
  const GlobalDecl* global = nullptr;
  VarRef() : Expr(ExprKind::VarRef) {}
};

struct ThisExpr : Expr {
  const ClassDecl* cls = nullptr;
  ThisExpr() : Expr(ExprKind::This) {}
};

struct FieldGet : Expr {
  ExprPtr base;
  std::string name;
  Span nameSpan;
  // resolution: either a class field (static class known) or a global field
  const ClassDecl* staticClass = nullptr;
  int fieldIndex = -1;
  const GlobalDecl* global = nullptr;
  int globalFieldIndex = -1;
  FieldGet() : Expr(ExprKind::FieldGet) {}
};

struct CallExpr : Expr {
  ExprPtr base;  // null for bare this-calls
  std::string method;
  Span methodSpan;
  std::vector<ExprPtr> args;
  const ClassDecl* staticClass = nullptr;
  const MethodDecl* callee = nullptr;
  CallExpr() : Expr(ExprKind::Call) {}
};

struct NewExpr : Expr {
  std::string className;
  const ClassDecl* cls = nullptr;
  NewExpr() : Expr(ExprKind::New) {}
};

struct SpawnExpr : Expr {
  std::string className;
  const ClassDecl* cls = nullptr;
  TypeExpr refType;  // ActorRef[M], filled by the resolver
  SpawnExpr() : Expr(ExprKind::Spawn) {}
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct BinaryExpr : Expr {
  BinOp op = BinOp::Add;
  ExprPtr lhs;
  ExprPtr rhs;
  BinaryExpr() : Expr(ExprKind::Binary) {}
};

enum class UnOp { Neg, Not };

struct UnaryExpr : Expr {
  UnOp op = UnOp::Neg;
  ExprPtr operand;
  UnaryExpr() : Expr(ExprKind::Unary) {}
};

// ── Statements ────────────────────────────────────────────────────────────

enum class StmtKind {
  Local,
  Assign,
  ExprStmt,
  If,
  While,
  Return,
  Print,
  Open,
  MkBox,
  Consume,
  SendBox,
  SendImm,
};

struct Stmt {
  StmtKind kind;
  Span span;
  explicit Stmt(StmtKind k) : kind(k) {}
  virtual ~Stmt() = default;
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;
};

using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
  Span span;
};

// A binding captured by a closure body from an enclosing scope.
struct Capture {
  std::string name;
  bool isVar = false;
  const TypeExpr* type = nullptr;
  BindKind from = BindKind::Local;
  Span firstUse;
};

struct LocalStmt : Stmt {
  bool isVar = false;
  std::string name;
  Span nameSpan;
  TypeExpr type;
  ExprPtr init;
  int slot = -1;
  LocalStmt() : Stmt(StmtKind::Local) {}
};

struct AssignStmt : Stmt {
  ExprPtr target;  // VarRef or FieldGet
  ExprPtr value;
  AssignStmt() : Stmt(StmtKind::Assign) {}
};

struct ExprStatement : Stmt {
  ExprPtr expr;
  ExprStatement() : Stmt(StmtKind::ExprStmt) {}
};

struct IfStmt : Stmt {
  ExprPtr cond;
  Block thenBlock;
  std::optional<Block> elseBlock;
  IfStmt() : Stmt(StmtKind::If) {}
};

struct WhileStmt : Stmt {
  ExprPtr cond;
  Block body;
  WhileStmt() : Stmt(StmtKind::While) {}
};

struct ReturnStmt : Stmt {
  ExprPtr value;  // null for bare return
  ReturnStmt() : Stmt(StmtKind::Return) {}
};

struct PrintStmt : Stmt {
  ExprPtr value;
  PrintStmt() : Stmt(StmtKind::Print) {}
};

// b.open { x => body }
struct OpenStmt : Stmt {
  std::unique_ptr<VarRef> boxVar;
  std::string payloadName;
  Span payloadSpan;
  int payloadSlot = -1;
  const ClassDecl* payloadClass = nullptr;
  TypeExpr payloadType;  // payload class type, filled by the resolver
  Block body;
  std::vector<Capture> captures;
  OpenStmt() : Stmt(StmtKind::Open) {}
};

// mkbox[C] { (b, p) => body }
struct MkBoxStmt : Stmt {
  std::string className;
  Span classSpan;
  const ClassDecl* cls = nullptr;
  std::string boxName;
  Span boxSpan;
  int boxSlot = -1;
  std::string permName;
  Span permSpan;
  int permSlot = -1;
  Block body;
  std::vector<Capture> captures;
  TypeExpr boxType;  // Box[C], filled by the resolver for capture classification
  MkBoxStmt() : Stmt(StmtKind::MkBox) {}
};

// consume(b) { body }
struct ConsumeStmt : Stmt {
  std::unique_ptr<VarRef> boxVar;
  Block body;
  std::vector<Capture> captures;
  ConsumeStmt() : Stmt(StmtKind::Consume) {}
};

// target ! (b) { body }
struct SendBoxStmt : Stmt {
  ExprPtr target;
  std::unique_ptr<VarRef> boxVar;
  Block body;
  std::vector<Capture> captures;
  SendBoxStmt() : Stmt(StmtKind::SendBox) {}
};

// target !! value
struct SendImmStmt : Stmt {
  ExprPtr target;
  ExprPtr value;
  SendImmStmt() : Stmt(StmtKind::SendImm) {}
};

// ── Declarations ──────────────────────────────────────────────────────────

struct Param {
  std::string name;
  TypeExpr type;
  Span span;
  int slot = -1;
};

// A parameter of type Perm[box]; resolved to the index of the box parameter.
struct PermParam {
  std::string name;
  std::string boxParamName;
  Span span;
  int slot = -1;
  int boxParamIndex = -1;
};

struct FieldDecl {
  bool isVar = false;
  std::string name;
  TypeExpr type;
  ExprPtr init;  // may be null
  Span span;
  int index = -1;
};

struct MethodDecl {
  std::string name;
  std::vector<Param> params;
  std::vector<PermParam> permParams;
  TypeExpr returnType;
  Block body;
  Span span;
  int slotCount = 0;
  const ClassDecl* owner = nullptr;
};

struct ClassDecl {
  std::string name;
  std::string superName;  // empty when none
  bool isActor = false;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  Span span;
};

struct GlobalDecl {
  std::string name;
  std::vector<FieldDecl> fields;
  Span span;
};

struct Program {
  std::vector<ClassDecl> classes;
  std::vector<GlobalDecl> globals;
  Block mainBlock;
  std::string file;
  int mainSlotCount = 0;
};

// ── Structural equality (spans and resolution state ignored) ─────────────

inline bool equalExpr(const Expr* a, const Expr* b);
inline bool equalBlock(const Block& a, const Block& b);

inline bool equalExprPtr(const ExprPtr& a, const ExprPtr& b) {
  if (!a && !b) return true;
  if (!a || !b) return false;
  return equalExpr(a.get(), b.get());
}

inline bool equalExpr(const Expr* a, const Expr* b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit:
      return static_cast<const IntLit*>(a)->value == static_cast<const IntLit*>(b)->value;
    case ExprKind::BoolLit:
      return static_cast<const BoolLit*>(a)->value == static_cast<const BoolLit*>(b)->value;
    case ExprKind::StrLit:
      return static_cast<const StrLit*>(a)->value == static_cast<const StrLit*>(b)->value;
    case ExprKind::VarRef:
      return static_cast<const VarRef*>(a)->name == static_cast<const VarRef*>(b)->name;
    case ExprKind::This:
      return true;
    case ExprKind::FieldGet: {
      auto* x = static_cast<const FieldGet*>(a);
      auto* y = static_cast<const FieldGet*>(b);
      return x->name == y->name && equalExprPtr(x->base, y->base);
    }
    case ExprKind::Call: {
      auto* x = static_cast<const CallExpr*>(a);
      auto* y = static_cast<const CallExpr*>(b);
      if (x->method != y->method || !equalExprPtr(x->base, y->base)) return false;
      if (x->args.size() != y->args.size()) return false;
      for (size_t i = 0; i < x->args.size(); ++i)
        if (!equalExprPtr(x->args[i], y->args[i])) return false;
      return true;
    }
    case ExprKind::New:
      return static_cast<const NewExpr*>(a)->className == static_cast<const NewExpr*>(b)->className;
    case ExprKind::Spawn:
      return static_cast<const SpawnExpr*>(a)->className == static_cast<const SpawnExpr*>(b)->className;
    case ExprKind::Binary: {
      auto* x = static_cast<const BinaryExpr*>(a);
      auto* y = static_cast<const BinaryExpr*>(b);
      return x->op == y->op && equalExprPtr(x->lhs, y->lhs) && equalExprPtr(x->rhs, y->rhs);
    }
    case ExprKind::Unary: {
      auto* x = static_cast<const UnaryExpr*>(a);
      auto* y = static_cast<const UnaryExpr*>(b);
      return x->op == y->op && equalExprPtr(x->operand, y->operand);
    }
  }
  return false;
}

inline bool equalStmt(const Stmt* a, const Stmt* b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case StmtKind::Local: {
      auto* x = static_cast<const LocalStmt*>(a);
      auto* y = static_cast<const LocalStmt*>(b);
      return x->isVar == y->isVar && x->name == y->name && sameType(x->type, y->type) &&
             equalExprPtr(x->init, y->init);
    }
    case StmtKind::Assign: {
      auto* x = static_cast<const AssignStmt*>(a);
      auto* y = static_cast<const AssignStmt*>(b);
      return equalExprPtr(x->target, y->target) && equalExprPtr(x->value, y->value);
    }
    case StmtKind::ExprStmt:
      return equalExprPtr(static_cast<const ExprStatement*>(a)->expr,
                          static_cast<const ExprStatement*>(b)->expr);
    case StmtKind::If: {
      auto* x = static_cast<const IfStmt*>(a);
      auto* y = static_cast<const IfStmt*>(b);
      if (!equalExprPtr(x->cond, y->cond)) return false;
      if (!equalBlock(x->thenBlock, y->thenBlock)) return false;
      if (x->elseBlock.has_value() != y->elseBlock.has_value()) return false;
      return !x->elseBlock || equalBlock(*x->elseBlock, *y->elseBlock);
    }
    case StmtKind::While: {
      auto* x = static_cast<const WhileStmt*>(a);
      auto* y = static_cast<const WhileStmt*>(b);
      return equalExprPtr(x->cond, y->cond) && equalBlock(x->body, y->body);
    }
    case StmtKind::Return:
      return equalExprPtr(static_cast<const ReturnStmt*>(a)->value,
                          static_cast<const ReturnStmt*>(b)->value);
    case StmtKind::Print:
      return equalExprPtr(static_cast<const PrintStmt*>(a)->value,
                          static_cast<const PrintStmt*>(b)->value);
    case StmtKind::Open: {
      auto* x = static_cast<const OpenStmt*>(a);
      auto* y = static_cast<const OpenStmt*>(b);
      return x->boxVar->name == y->boxVar->name && x->payloadName == y->payloadName &&
             equalBlock(x->body, y->body);
    }
    case StmtKind::MkBox: {
      auto* x = static_cast<const MkBoxStmt*>(a);
      auto* y = static_cast<const MkBoxStmt*>(b);
      return x->className == y->className && x->boxName == y->boxName &&
             x->permName == y->permName && equalBlock(x->body, y->body);
    }
    case StmtKind::Consume: {
      auto* x = static_cast<const ConsumeStmt*>(a);
      auto* y = static_cast<const ConsumeStmt*>(b);
      return x->boxVar->name == y->boxVar->name && equalBlock(x->body, y->body);
    }
    case StmtKind::SendBox: {
      auto* x = static_cast<const SendBoxStmt*>(a);
      auto* y = static_cast<const SendBoxStmt*>(b);
      return equalExprPtr(x->target, y->target) && x->boxVar->name == y->boxVar->name &&
             equalBlock(x->body, y->body);
    }
    case StmtKind::SendImm: {
      auto* x = static_cast<const SendImmStmt*>(a);
      auto* y = static_cast<const SendImmStmt*>(b);
      return equalExprPtr(x->target, y->target) && equalExprPtr(x->value, y->value);
    }
  }
  return false;
}

inline bool equalBlock(const Block& a, const Block& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (size_t i = 0; i < a.stmts.size(); ++i)
    if (!equalStmt(a.stmts[i].get(), b.stmts[i].get())) return false;
  return true;
}

inline bool equalFields(const std::vector<FieldDecl>& a, const std::vector<FieldDecl>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].isVar != b[i].isVar || a[i].name != b[i].name ||
        !sameType(a[i].type, b[i].type) || !equalExprPtr(a[i].init, b[i].init))
      return false;
  }
  return true;
}

inline bool equalPrograms(const Program& a, const Program& b) {
  if (a.classes.size() != b.classes.size() || a.globals.size() != b.globals.size())
    return false;
  for (size_t i = 0; i < a.classes.size(); ++i) {
    const auto& x = a.classes[i];
    const auto& y = b.classes[i];
    if (x.name != y.name || x.superName != y.superName || x.isActor != y.isActor)
      return false;
    if (!equalFields(x.fields, y.fields)) return false;
    if (x.methods.size() != y.methods.size()) return false;
    for (size_t m = 0; m < x.methods.size(); ++m) {
      const auto& p = x.methods[m];
      const auto& q = y.methods[m];
      if (p.name != q.name || !sameType(p.returnType, q.returnType)) return false;
      if (p.params.size() != q.params.size() || p.permParams.size() != q.permParams.size())
        return false;
      for (size_t k = 0; k < p.params.size(); ++k)
        if (p.params[k].name != q.params[k].name || !sameType(p.params[k].type, q.params[k].type))
          return false;
      for (size_t k = 0; k < p.permParams.size(); ++k)
        if (p.permParams[k].name != q.permParams[k].name ||
            p.permParams[k].boxParamName != q.permParams[k].boxParamName)
          return false;
      if (!equalBlock(p.body, q.body)) return false;
    }
  }
  for (size_t i = 0; i < a.globals.size(); ++i) {
    if (a.globals[i].name != b.globals[i].name) return false;
    if (!equalFields(a.globals[i].fields, b.globals[i].fields)) return false;
  }
  return equalBlock(a.mainBlock, b.mainBlock);
}

}  // namespace casa

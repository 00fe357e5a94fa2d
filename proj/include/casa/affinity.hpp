#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "casa/ocap.hpp"
#include "casa/resolve.hpp"

namespace casa {

using PermissionId = std::uint64_t;

// ── deep immutability ─────────────────────────────────────────────────────

// Greatest fixpoint over the class graph: a class is deeply immutable when
// every field is a val of a deeply immutable type. Box, ActorRef, and Perm
// types never qualify.
inline std::unordered_set<const ClassDecl*> deeplyImmutableClasses(const Program& prog,
                                                                   const SymbolTable& sym) {
  std::unordered_set<const ClassDecl*> immutable;
  for (const auto& c : prog.classes) immutable.insert(&c);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : prog.classes) {
      if (!immutable.count(&c)) continue;
      bool ok = true;
      for (const auto& f : c.fields) {
        if (f.isVar) { ok = false; break; }
        const TypeExpr& t = f.type;
        if (t.isBuiltinValue()) continue;
        if (t.isClass()) {
          const ClassDecl* fc = sym.classNamed(t.name);
          if (!fc || !immutable.count(fc)) { ok = false; break; }
          continue;
        }
        ok = false;  // Box / ActorRef / Perm / Nothing
        break;
      }
      if (!ok) {
        immutable.erase(&c);
        changed = true;
      }
    }
  }
  return immutable;
}

inline bool isDeeplyImmutable(const TypeExpr& t, const Program& prog, const SymbolTable& sym) {
  if (t.isBuiltinValue()) return true;
  if (!t.isClass()) return false;
  const ClassDecl* c = sym.classNamed(t.name);
  if (!c) return false;
  return deeplyImmutableClasses(prog, sym).count(c) > 0;
}

// ── capture classification ────────────────────────────────────────────────

enum class CaptureRule {
  AllowedImmutableVal,
  ForbiddenVar,
  ForbiddenBox,
  ForbiddenPermission,
  ForbiddenMutableType,
};

// Open bodies are restricted like the boxed value they see; continuation
// bodies are the rest of the computation and may keep using live boxes
// (permission liveness is enforced separately at every use).
enum class ClosureKind { OpenBody, Continuation };

// Classifies one captured binding. Actor references are handles without
// mutable state, so capturing them is allowed alongside deeply immutable
// vals; everything else mutable-or-affine is rejected.
inline CaptureRule classifyCapture(const Capture& c,
                                   const std::unordered_set<const ClassDecl*>& immutableSet,
                                   const SymbolTable& sym) {
  if (c.from == BindKind::PermParam || c.from == BindKind::MkBoxPerm)
    return CaptureRule::ForbiddenPermission;
  if (c.isVar) return CaptureRule::ForbiddenVar;
  if (c.type && c.type->isBox()) return CaptureRule::ForbiddenBox;
  if (!c.type) return CaptureRule::ForbiddenMutableType;
  if (c.type->isBuiltinValue()) return CaptureRule::AllowedImmutableVal;
  if (c.type->kind == TypeKind::ActorRef) return CaptureRule::AllowedImmutableVal;
  if (c.type->isClass()) {
    const ClassDecl* cls = sym.classNamed(c.type->name);
    if (cls && immutableSet.count(cls)) return CaptureRule::AllowedImmutableVal;
  }
  return CaptureRule::ForbiddenMutableType;
}

// ── permission environment ────────────────────────────────────────────────

// Scoped liveness of box permissions. Bindings are keyed by the frame slot of
// the box variable (unique per activation); consumption kills the binding for
// the rest of the activation, matching the flow-insensitive reading where a
// consume poisons its continuation and everything after it.
class PermissionEnv {
 public:
  void pushScope() { scopes_.push_back({}); }

  void popScope() {
    for (int slot : scopes_.back()) perms_.erase(slot);
    scopes_.pop_back();
  }

  PermissionId bind(int slot) {
    PermissionId id = nextId_++;
    perms_[slot] = {id, true};
    if (!scopes_.empty()) scopes_.back().push_back(slot);
    return id;
  }

  bool hasLive(int slot) const {
    auto it = perms_.find(slot);
    return it != perms_.end() && it->second.live;
  }

  std::optional<PermissionId> idOf(int slot) const {
    auto it = perms_.find(slot);
    if (it == perms_.end() || !it->second.live) return std::nullopt;
    return it->second.id;
  }

  void kill(int slot) {
    auto it = perms_.find(slot);
    if (it != perms_.end()) it->second.live = false;
  }

 private:
  struct Entry {
    PermissionId id = 0;
    bool live = false;
  };
  std::unordered_map<int, Entry> perms_;
  std::vector<std::vector<int>> scopes_;
  PermissionId nextId_ = 1;
};

// ── implicit permission resolution at call sites ──────────────────────────

struct PermResolution {
  std::vector<std::pair<const PermParam*, PermissionId>> mapping;
  std::vector<int> boxSlots;  // slots whose permissions the callee receives
  std::optional<Diagnostic> error;
};

// Selects, for every permission parameter of the callee, the live permission
// of the box argument bound to it. Call sites never pass permissions
// explicitly. The caller is responsible for killing the returned slots when
// the callee's return type is Nothing.
inline PermResolution resolvePermissionArgs(const CallExpr& call, PermissionEnv& env) {
  PermResolution out;
  if (!call.callee) return out;
  for (const auto& pp : call.callee->permParams) {
    if (pp.boxParamIndex < 0 ||
        static_cast<size_t>(pp.boxParamIndex) >= call.args.size()) {
      out.error = Diagnostic{"AF03", Severity::Error, call.span,
                             "cannot resolve a permission for parameter '" + pp.name + "'"};
      return out;
    }
    const Expr& arg = *call.args[pp.boxParamIndex];
    if (arg.kind != ExprKind::VarRef) {
      out.error = Diagnostic{"AF03", Severity::Error, arg.span,
                             "box argument must be a named box variable with a live permission"};
      return out;
    }
    const auto& v = static_cast<const VarRef&>(arg);
    auto id = env.idOf(v.slot);
    if (!id) {
      out.error = Diagnostic{"AF03", Severity::Error, arg.span,
                             "no live permission for box '" + v.name + "' at this call"};
      return out;
    }
    out.mapping.push_back({&pp, *id});
    out.boxSlots.push_back(v.slot);
  }
  return out;
}

// ── the affinity checker ──────────────────────────────────────────────────

namespace detail {

class AffinityChecker {
 public:
  AffinityChecker(const Program& prog, const SymbolTable& sym, const OcapReport& ocap)
      : prog_(prog), sym_(sym), ocap_(ocap),
        immutable_(deeplyImmutableClasses(prog, sym)) {}

  std::vector<Diagnostic> run() {
    for (const auto& cls : prog_.classes) {
      for (const auto& f : cls.fields)
        if (f.type.isBox())
          report("AF08", f.span, "box-typed field '" + f.name + "' is not allowed");
      const ActorInfo* info = sym_.actorInfo(&cls);
      if (info && !info->boxedReceive &&
          !typeDeeplyImmutable(info->receive->params[0].type)) {
        report("AF09", info->receive->params[0].span,
               "receive message type must be deeply immutable; use a boxed receive instead");
      }
      for (const auto& m : cls.methods) checkMethod(cls, m);
    }
    for (const auto& g : prog_.globals)
      for (const auto& f : g.fields)
        if (f.type.isBox())
          report("AF08", f.span, "box-typed field '" + f.name + "' is not allowed");
    checkMain();
    std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      if (a.span.startLine != b.span.startLine) return a.span.startLine < b.span.startLine;
      return a.span.startCol < b.span.startCol;
    });
    return std::move(diags_);
  }

 private:
  struct ActivationCtx {
    bool returnsNothing = false;
    bool isReceive = false;
    std::unordered_set<int> ownBoxParamSlots;  // box params guarded by a perm param
    std::string methodName;
  };

  void report(std::string code, const Span& span, std::string msg) {
    auto key = std::make_tuple(code, span.startLine, span.startCol);
    if (!reported_.insert(key).second) return;
    diags_.push_back({std::move(code), Severity::Error, span, std::move(msg)});
  }

  bool typeDeeplyImmutable(const TypeExpr& t) const {
    if (t.isBuiltinValue()) return true;
    if (!t.isClass()) return false;
    const ClassDecl* c = sym_.classNamed(t.name);
    return c && immutable_.count(c);
  }

  void checkMethod(const ClassDecl& cls, const MethodDecl& m) {
    ActivationCtx ctx;
    ctx.returnsNothing = m.returnType.kind == TypeKind::Nothing;
    ctx.methodName = cls.name + "." + m.name;
    const ActorInfo* info = sym_.actorInfo(&cls);
    ctx.isReceive = info && info->receive == &m;
    PermissionEnv env;
    env.pushScope();
    for (const auto& pp : m.permParams) {
      if (pp.boxParamIndex >= 0) {
        int slot = m.params[pp.boxParamIndex].slot;
        env.bind(slot);
        ctx.ownBoxParamSlots.insert(slot);
      }
    }
    walkBlockStmts(m.body, env, ctx);
    env.popScope();
  }

  void checkMain() {
    ActivationCtx ctx;
    ctx.methodName = "<main>";
    PermissionEnv env;
    env.pushScope();
    walkBlockStmts(prog_.mainBlock, env, ctx);
    env.popScope();
  }

  // Consume a permission; flags AF05 when the permission belongs to one of
  // the activation's own guarded box parameters and the method can return.
  void killPerm(int slot, const Span& site, PermissionEnv& env, ActivationCtx& ctx) {
    env.kill(slot);
    if (ctx.ownBoxParamSlots.count(slot) && !ctx.returnsNothing && !ctx.isReceive)
      report("AF05", site,
             "method " + ctx.methodName +
                 " consumes a parameter's permission; its return type must be Nothing");
  }

  // Requires a live permission for the box variable; returns its slot.
  std::optional<int> requireLive(const VarRef& box, PermissionEnv& env) {
    if (box.bind == BindKind::Unresolved) return std::nullopt;
    bool isBoxBinding = box.declType && box.declType->isBox();
    if (!isBoxBinding || !env.hasLive(box.slot)) {
      report("AF03", box.span, "no live permission for box '" + box.name + "' in this scope");
      return std::nullopt;
    }
    return box.slot;
  }

  void checkCaptures(const std::vector<Capture>& captures, ClosureKind kind) {
    for (const auto& c : captures) {
      switch (classifyCapture(c, immutable_, sym_)) {
        case CaptureRule::AllowedImmutableVal:
          break;
        case CaptureRule::ForbiddenVar:
          report("AF01", c.firstUse,
                 "closure captures mutable variable '" + c.name + "'");
          break;
        case CaptureRule::ForbiddenBox:
          if (kind == ClosureKind::OpenBody)
            report("AF02", c.firstUse, "open body captures box '" + c.name + "'");
          // continuations may keep using live boxes; every use is
          // permission-checked on its own
          break;
        case CaptureRule::ForbiddenPermission:
          if (kind == ClosureKind::OpenBody)
            report("AF07", c.firstUse, "closure captures permission '" + c.name + "'");
          break;
        case CaptureRule::ForbiddenMutableType:
          if (kind == ClosureKind::OpenBody)
            report("AF02", c.firstUse,
                   "open body captures '" + c.name + "' whose type is not deeply immutable");
          break;
      }
    }
  }

  // Walks an expression; returns true when it contains a call to a
  // Nothing-typed method (which makes the enclosing statement terminal).
  bool walkE(const Expr& e, PermissionEnv& env, ActivationCtx& ctx) {
    bool terminal = false;
    switch (e.kind) {
      case ExprKind::VarRef: {
        const auto& v = static_cast<const VarRef&>(e);
        if (v.bind == BindKind::PermParam || v.bind == BindKind::MkBoxPerm)
          report("AF07", v.span,
                 "permission '" + v.name + "' cannot be used as a value");
        return false;
      }
      case ExprKind::FieldGet:
        return walkE(*static_cast<const FieldGet&>(e).base, env, ctx);
      case ExprKind::Call: {
        const auto& c = static_cast<const CallExpr&>(e);
        if (c.base) terminal |= walkE(*c.base, env, ctx);
        for (const auto& a : c.args) terminal |= walkE(*a, env, ctx);
        if (c.callee) {
          PermResolution res = resolvePermissionArgs(c, env);
          if (res.error) {
            report(res.error->code, res.error->span, res.error->message);
          } else if (c.callee->returnType.kind == TypeKind::Nothing) {
            for (int slot : res.boxSlots) killPerm(slot, c.span, env, ctx);
          }
          if (c.callee->returnType.kind == TypeKind::Nothing) terminal = true;
        } else {
          // Dynamically dispatched call: box arguments cannot be permission-checked.
          for (const auto& a : c.args) {
            if (a->kind == ExprKind::VarRef) {
              const auto& v = static_cast<const VarRef&>(*a);
              if (v.declType && v.declType->isBox())
                report("AF03", v.span,
                       "cannot resolve a permission for box '" + v.name +
                           "' at a dynamically dispatched call");
            }
          }
        }
        return terminal;
      }
      case ExprKind::Binary: {
        const auto& b = static_cast<const BinaryExpr&>(e);
        terminal |= walkE(*b.lhs, env, ctx);
        terminal |= walkE(*b.rhs, env, ctx);
        return terminal;
      }
      case ExprKind::Unary:
        return walkE(*static_cast<const UnaryExpr&>(e).operand, env, ctx);
      default:
        return false;
    }
  }

  // Walks one statement; returns true when the statement never falls through
  // to its successor (continuation forms and Nothing-typed calls).
  bool walkS(const Stmt& s, PermissionEnv& env, ActivationCtx& ctx) {
    switch (s.kind) {
      case StmtKind::Local: {
        const auto& x = static_cast<const LocalStmt&>(s);
        return walkE(*x.init, env, ctx);
      }
      case StmtKind::Assign: {
        const auto& x = static_cast<const AssignStmt&>(s);
        bool t = walkE(*x.value, env, ctx);
        t |= walkE(*x.target, env, ctx);
        return t;
      }
      case StmtKind::ExprStmt:
        return walkE(*static_cast<const ExprStatement&>(s).expr, env, ctx);
      case StmtKind::If: {
        const auto& x = static_cast<const IfStmt&>(s);
        bool t = walkE(*x.cond, env, ctx);
        bool thenTerm = walkBlockStmts(x.thenBlock, env, ctx);
        bool elseTerm = false;
        if (x.elseBlock) elseTerm = walkBlockStmts(*x.elseBlock, env, ctx);
        return t || (thenTerm && x.elseBlock.has_value() && elseTerm);
      }
      case StmtKind::While: {
        const auto& x = static_cast<const WhileStmt&>(s);
        walkE(*x.cond, env, ctx);
        walkBlockStmts(x.body, env, ctx);
        return false;
      }
      case StmtKind::Return: {
        const auto& x = static_cast<const ReturnStmt&>(s);
        if (x.value) walkE(*x.value, env, ctx);
        return false;
      }
      case StmtKind::Print:
        return walkE(*static_cast<const PrintStmt&>(s).value, env, ctx);
      case StmtKind::Open: {
        const auto& x = static_cast<const OpenStmt&>(s);
        requireLive(*x.boxVar, env);
        checkCaptures(x.captures, ClosureKind::OpenBody);
        env.pushScope();
        walkBlockStmts(x.body, env, ctx);
        env.popScope();
        return false;
      }
      case StmtKind::MkBox: {
        const auto& x = static_cast<const MkBoxStmt&>(s);
        if (x.cls) {
          const OcapVerdict* v = ocap_.find(x.className);
          if (v && !v->conformant)
            report("AF04", x.classSpan,
                   "mkbox[" + x.className + "]: class does not conform to the "
                   "object-capability discipline");
        }
        checkCaptures(x.captures, ClosureKind::Continuation);
        env.pushScope();
        env.bind(x.boxSlot);
        walkBlockStmts(x.body, env, ctx);
        env.popScope();
        return true;
      }
      case StmtKind::Consume: {
        const auto& x = static_cast<const ConsumeStmt&>(s);
        auto slot = requireLive(*x.boxVar, env);
        if (slot) killPerm(*slot, x.span, env, ctx);
        checkCaptures(x.captures, ClosureKind::Continuation);
        env.pushScope();
        walkBlockStmts(x.body, env, ctx);
        env.popScope();
        return true;
      }
      case StmtKind::SendBox: {
        const auto& x = static_cast<const SendBoxStmt&>(s);
        walkE(*x.target, env, ctx);
        auto slot = requireLive(*x.boxVar, env);
        if (slot) killPerm(*slot, x.span, env, ctx);
        checkSendBoxTypes(x);
        checkCaptures(x.captures, ClosureKind::Continuation);
        env.pushScope();
        walkBlockStmts(x.body, env, ctx);
        env.popScope();
        return true;
      }
      case StmtKind::SendImm: {
        const auto& x = static_cast<const SendImmStmt&>(s);
        walkE(*x.target, env, ctx);
        walkE(*x.value, env, ctx);
        checkSendImmTypes(x);
        return false;
      }
    }
    return false;
  }

  void checkSendBoxTypes(const SendBoxStmt& x) {
    const TypeExpr* rt = staticTypeOf(*x.target, sym_);
    const TypeExpr* bt = x.boxVar->declType;
    if (rt && rt->kind != TypeKind::ActorRef) {
      report("AF10", x.target->span, "send target is not an actor reference");
      return;
    }
    if (rt && bt && bt->isBox() && !sameType(*rt->arg, *bt->arg))
      report("AF10", x.boxVar->span,
             "message type " + typeToString(*bt->arg) + " does not match target " +
                 typeToString(*rt));
  }

  void checkSendImmTypes(const SendImmStmt& x) {
    const TypeExpr* vt = staticTypeOf(*x.value, sym_);
    if (vt && !typeDeeplyImmutable(*vt))
      report("AF09", x.value->span,
             "type " + typeToString(*vt) + " is not deeply immutable; send it in a box");
    const TypeExpr* rt = staticTypeOf(*x.target, sym_);
    if (rt && rt->kind != TypeKind::ActorRef) {
      report("AF10", x.target->span, "send target is not an actor reference");
      return;
    }
    if (rt && vt && !sameType(*rt->arg, *vt))
      report("AF10", x.value->span,
             "message type " + typeToString(*vt) + " does not match target " +
                 typeToString(*rt));
  }

  // Returns true when the block cannot fall through (its tail is terminal).
  bool walkBlockStmts(const Block& b, PermissionEnv& env, ActivationCtx& ctx) {
    env.pushScope();
    bool terminal = false;
    bool flaggedUnreachable = false;
    for (const auto& sp : b.stmts) {
      if (terminal && !flaggedUnreachable) {
        report("AF06", sp->span, "statement is unreachable after a non-returning form");
        flaggedUnreachable = true;
      }
      bool t = walkS(*sp, env, ctx);
      terminal = terminal || t;
    }
    env.popScope();
    return terminal;
  }

  const Program& prog_;
  const SymbolTable& sym_;
  const OcapReport& ocap_;
  std::unordered_set<const ClassDecl*> immutable_;
  std::vector<Diagnostic> diags_;
  std::set<std::tuple<std::string, int, int>> reported_;
};

}  // namespace detail

// Checks the affine box/permission discipline. An empty result means the
// program is accepted.
inline std::vector<Diagnostic> checkAffinity(const Program& prog, const SymbolTable& sym,
                                             const OcapReport& ocap) {
  detail::AffinityChecker checker(prog, sym, ocap);
  return checker.run();
}

}  // namespace casa

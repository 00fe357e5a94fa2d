#pragma once

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "casa/ast.hpp"

namespace casa {

inline const TypeExpr& builtinType(TypeKind k) {
  static const TypeExpr intT = makeType(TypeKind::Int);
  static const TypeExpr boolT = makeType(TypeKind::Bool);
  static const TypeExpr strT = makeType(TypeKind::Str);
  static const TypeExpr unitT = makeType(TypeKind::Unit);
  static const TypeExpr nothingT = makeType(TypeKind::Nothing);
  switch (k) {
    case TypeKind::Int: return intT;
    case TypeKind::Bool: return boolT;
    case TypeKind::Str: return strT;
    case TypeKind::Nothing: return nothingT;
    default: return unitT;
  }
}

// How messages reach an actor class: either boxed with a permission, or as a
// plain deeply-immutable value.
struct ActorInfo {
  bool boxedReceive = false;
  const ClassDecl* msgClass = nullptr;  // boxed form
  TypeExpr msgType;                     // declared message type (unboxed)
  const MethodDecl* receive = nullptr;
};

struct SymbolTable {
  std::unordered_map<std::string, const ClassDecl*> classes;
  std::unordered_map<std::string, const GlobalDecl*> globals;
  std::unordered_map<const ClassDecl*, ActorInfo> actors;
  std::unordered_map<const ClassDecl*, TypeExpr> classTypes;

  const ClassDecl* classNamed(const std::string& n) const {
    auto it = classes.find(n);
    return it == classes.end() ? nullptr : it->second;
  }
  const TypeExpr* typeOfClass(const ClassDecl* c) const {
    auto it = classTypes.find(c);
    return it == classTypes.end() ? nullptr : &it->second;
  }
  const ActorInfo* actorInfo(const ClassDecl* c) const {
    auto it = actors.find(c);
    return it == actors.end() ? nullptr : &it->second;
  }
};

struct ResolveResult {
  std::optional<SymbolTable> symbols;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return symbols.has_value(); }
};

namespace detail {

class Resolver {
 public:
  explicit Resolver(Program& prog) : prog_(prog) {}

  ResolveResult run() {
    indexDecls();
    for (auto& cls : prog_.classes) resolveClass(cls);
    resolveMain();
    ResolveResult res;
    res.diagnostics = std::move(diags_);
    bool hasError = false;
    for (const auto& d : res.diagnostics)
      if (d.severity == Severity::Error) hasError = true;
    if (!hasError) res.symbols = std::move(sym_);
    return res;
  }

 private:
  struct Binding {
    BindKind kind = BindKind::Local;
    bool isVar = false;
    const TypeExpr* type = nullptr;
    int slot = -1;
    int scopeIndex = -1;
  };

  struct Scope {
    std::unordered_map<std::string, Binding> names;
  };

  struct ClosureFrame {
    std::vector<Capture>* captures = nullptr;
    size_t scopeDepthAtEntry = 0;
    std::unordered_set<std::string> seen;
  };

  void error(const Span& span, std::string code, std::string msg) {
    diags_.push_back({std::move(code), Severity::Error, span, std::move(msg)});
  }

  // ── indexing ──
  void indexDecls() {
    for (auto& cls : prog_.classes) {
      if (sym_.classes.count(cls.name) || sym_.globals.count(cls.name)) {
        error(cls.span, "SYN011", "duplicate definition of '" + cls.name + "'");
        continue;
      }
      sym_.classes[cls.name] = &cls;
      TypeExpr t = makeClassType(cls.name);
      sym_.classTypes.emplace(&cls, std::move(t));
    }
    for (auto& g : prog_.globals) {
      if (sym_.classes.count(g.name) || sym_.globals.count(g.name)) {
        error(g.span, "SYN011", "duplicate definition of '" + g.name + "'");
        continue;
      }
      sym_.globals[g.name] = &g;
    }
    for (auto& cls : prog_.classes) {
      std::unordered_set<std::string> members;
      int idx = 0;
      for (auto& f : cls.fields) {
        if (!members.insert(f.name).second)
          error(f.span, "SYN011", "duplicate member '" + f.name + "' in class " + cls.name);
        f.index = idx++;
        checkTypeNames(f.type);
      }
      for (auto& m : cls.methods) {
        if (!members.insert(m.name).second)
          error(m.span, "SYN011", "duplicate member '" + m.name + "' in class " + cls.name);
        m.owner = &cls;
      }
      if (!cls.superName.empty() && !sym_.classes.count(cls.superName))
        error(cls.span, "SYN010", "unknown superclass '" + cls.superName + "'");
      if (cls.isActor) validateActor(cls);
    }
    for (auto& g : prog_.globals) {
      std::unordered_set<std::string> members;
      int idx = 0;
      for (auto& f : g.fields) {
        if (!members.insert(f.name).second)
          error(f.span, "SYN011", "duplicate field '" + f.name + "' in global " + g.name);
        f.index = idx++;
        checkTypeNames(f.type);
      }
    }
  }

  void validateActor(ClassDecl& cls) {
    const MethodDecl* receive = nullptr;
    int count = 0;
    for (auto& m : cls.methods) {
      if (m.name == "receive") {
        ++count;
        receive = &m;
      }
    }
    if (count != 1) {
      error(cls.span, "SYN012",
            "actor class " + cls.name + " must declare exactly one receive method");
      return;
    }
    ActorInfo info;
    info.receive = receive;
    if (receive->returnType.kind != TypeKind::Unit) {
      error(receive->span, "SYN012", "receive must return Unit");
      return;
    }
    if (receive->params.size() == 1 && receive->params[0].type.isBox() &&
        receive->permParams.size() == 1) {
      const TypeExpr& payload = *receive->params[0].type.arg;
      if (!payload.isClass()) {
        error(receive->params[0].span, "SYN012", "boxed receive must carry a class message");
        return;
      }
      info.boxedReceive = true;
      info.msgClass = sym_.classNamed(payload.name);
      info.msgType = payload;
    } else if (receive->params.size() == 1 && receive->permParams.empty()) {
      const TypeExpr& t = receive->params[0].type;
      if (t.isBox() || t.isPerm()) {
        error(receive->params[0].span, "SYN012",
              "receive takes either (msg: Box[C], p: Perm[msg]) or a deeply immutable message");
        return;
      }
      info.boxedReceive = false;
      info.msgType = t;
    } else {
      error(receive->span, "SYN012",
            "receive takes either (msg: Box[C], p: Perm[msg]) or a single immutable message");
      return;
    }
    sym_.actors.emplace(&cls, std::move(info));
  }

  void checkTypeNames(const TypeExpr& t) {
    if (t.isClass() && !sym_.classes.count(t.name))
      error(t.span, "SYN010", "unknown type '" + t.name + "'");
    if (t.arg) checkTypeNames(*t.arg);
  }

  // ── scopes ──
  Binding* lookup(const std::string& name, int* foundScope) {
    for (int i = static_cast<int>(scopes_.size()) - 1; i >= 0; --i) {
      auto it = scopes_[i].names.find(name);
      if (it != scopes_[i].names.end()) {
        *foundScope = i;
        return &it->second;
      }
    }
    return nullptr;
  }

  bool declare(const std::string& name, const Span& span, Binding b) {
    int idx;
    if (lookup(name, &idx)) {
      error(span, "SYN011", "'" + name + "' is already defined in an enclosing scope");
      return false;
    }
    b.scopeIndex = static_cast<int>(scopes_.size()) - 1;
    scopes_.back().names.emplace(name, b);
    return true;
  }

  int newSlot() { return (*slotCounter_)++; }

  // Records captures for a binding found below closure boundaries.
  void noteCapture(const std::string& name, const Binding& b, int bindingScope,
                   const Span& useSpan) {
    for (auto& frame : closures_) {
      if (static_cast<size_t>(bindingScope) < frame.scopeDepthAtEntry) {
        if (frame.seen.insert(name).second) {
          Capture c;
          c.name = name;
          c.isVar = b.isVar;
          c.type = b.type;
          c.from = b.kind;
          c.firstUse = useSpan;
          frame.captures->push_back(std::move(c));
        }
      }
    }
  }

  // ── class + method resolution ──
  void resolveClass(ClassDecl& cls) {
    curClass_ = &cls;
    // field initializers run with `this` bound and fields in scope
    for (auto& f : cls.fields)
      if (f.init) resolveExpr(*f.init);
    for (auto& m : cls.methods) resolveMethod(m);
    curClass_ = nullptr;
  }

  void resolveMethod(MethodDecl& m) {
    int slots = 0;
    slotCounter_ = &slots;
    scopes_.clear();
    closures_.clear();
    scopes_.push_back({});
    for (auto& p : m.params) {
      checkTypeNames(p.type);
      p.slot = newSlot();
      declare(p.name, p.span, {BindKind::Param, false, &p.type, p.slot});
    }
    for (auto& pp : m.permParams) {
      pp.slot = newSlot();
      declare(pp.name, pp.span, {BindKind::PermParam, false, nullptr, pp.slot});
    }
    checkTypeNames(m.returnType);
    resolveBlock(m.body);
    scopes_.pop_back();
    m.slotCount = slots;
    slotCounter_ = nullptr;
  }

  void resolveMain() {
    curClass_ = nullptr;
    int slots = 0;
    slotCounter_ = &slots;
    scopes_.clear();
    closures_.clear();
    scopes_.push_back({});
    resolveBlock(prog_.mainBlock);
    scopes_.pop_back();
    prog_.mainSlotCount = slots;
    slotCounter_ = nullptr;
  }

  // ── statements ──
  void resolveBlock(Block& b) {
    scopes_.push_back({});
    for (auto& s : b.stmts) resolveStmt(*s);
    scopes_.pop_back();
  }

  void resolveStmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Local: {
        auto& x = static_cast<LocalStmt&>(s);
        checkTypeNames(x.type);
        resolveExpr(*x.init);
        x.slot = newSlot();
        declare(x.name, x.nameSpan, {BindKind::Local, x.isVar, &x.type, x.slot});
        return;
      }
      case StmtKind::Assign: {
        auto& x = static_cast<AssignStmt&>(s);
        resolveExpr(*x.value);
        resolveAssignTarget(*x.target);
        return;
      }
      case StmtKind::ExprStmt:
        resolveExpr(*static_cast<ExprStatement&>(s).expr);
        return;
      case StmtKind::If: {
        auto& x = static_cast<IfStmt&>(s);
        resolveExpr(*x.cond);
        resolveBlock(x.thenBlock);
        if (x.elseBlock) resolveBlock(*x.elseBlock);
        return;
      }
      case StmtKind::While: {
        auto& x = static_cast<WhileStmt&>(s);
        resolveExpr(*x.cond);
        resolveBlock(x.body);
        return;
      }
      case StmtKind::Return: {
        auto& x = static_cast<ReturnStmt&>(s);
        if (x.value) resolveExpr(*x.value);
        return;
      }
      case StmtKind::Print:
        resolveExpr(*static_cast<PrintStmt&>(s).value);
        return;
      case StmtKind::Open: {
        auto& x = static_cast<OpenStmt&>(s);
        resolveExpr(*x.boxVar);
        // payload class comes from the box variable's declared type
        if (x.boxVar->declType && x.boxVar->declType->isBox() &&
            x.boxVar->declType->arg->isClass()) {
          x.payloadType = *x.boxVar->declType->arg;
          x.payloadClass = sym_.classNamed(x.payloadType.name);
        } else {
          x.payloadType = makeClassType("");
        }
        enterClosure(&x.captures);
        scopes_.push_back({});
        x.payloadSlot = newSlot();
        declare(x.payloadName, x.payloadSpan,
                {BindKind::OpenVar, false, &x.payloadType, x.payloadSlot});
        for (auto& st : x.body.stmts) resolveStmt(*st);
        scopes_.pop_back();
        leaveClosure();
        return;
      }
      case StmtKind::MkBox: {
        auto& x = static_cast<MkBoxStmt&>(s);
        x.cls = sym_.classNamed(x.className);
        if (!x.cls) {
          error(x.classSpan, "SYN010", "unknown class '" + x.className + "'");
        } else {
          x.boxType.kind = TypeKind::Box;
          x.boxType.arg = std::make_shared<TypeExpr>(makeClassType(x.className));
          x.boxType.span = x.classSpan;
        }
        enterClosure(&x.captures);
        scopes_.push_back({});
        x.boxSlot = newSlot();
        declare(x.boxName, x.boxSpan, {BindKind::MkBoxVar, false, &x.boxType, x.boxSlot});
        x.permSlot = newSlot();
        declare(x.permName, x.permSpan, {BindKind::MkBoxPerm, false, nullptr, x.permSlot});
        for (auto& st : x.body.stmts) resolveStmt(*st);
        scopes_.pop_back();
        leaveClosure();
        return;
      }
      case StmtKind::Consume: {
        auto& x = static_cast<ConsumeStmt&>(s);
        resolveExpr(*x.boxVar);
        enterClosure(&x.captures);
        resolveBlock(x.body);
        leaveClosure();
        return;
      }
      case StmtKind::SendBox: {
        auto& x = static_cast<SendBoxStmt&>(s);
        resolveExpr(*x.target);
        resolveExpr(*x.boxVar);
        enterClosure(&x.captures);
        resolveBlock(x.body);
        leaveClosure();
        return;
      }
      case StmtKind::SendImm: {
        auto& x = static_cast<SendImmStmt&>(s);
        resolveExpr(*x.target);
        resolveExpr(*x.value);
        return;
      }
    }
  }

  void enterClosure(std::vector<Capture>* captures) {
    ClosureFrame f;
    f.captures = captures;
    f.scopeDepthAtEntry = scopes_.size();
    closures_.push_back(std::move(f));
  }

  void leaveClosure() { closures_.pop_back(); }

  void resolveAssignTarget(Expr& target) {
    if (target.kind == ExprKind::VarRef) {
      auto& v = static_cast<VarRef&>(target);
      resolveExpr(v);
      switch (v.bind) {
        case BindKind::Local:
          if (!v.isVarBinding)
            error(v.span, "SYN013", "cannot assign to val '" + v.name + "'");
          break;
        case BindKind::Field: {
          const FieldDecl& f = v.fieldClass->fields[v.fieldIndex];
          if (!f.isVar) error(v.span, "SYN013", "cannot assign to val field '" + v.name + "'");
          break;
        }
        case BindKind::Param:
        case BindKind::OpenVar:
        case BindKind::MkBoxVar:
          error(v.span, "SYN013", "cannot assign to immutable binding '" + v.name + "'");
          break;
        case BindKind::PermParam:
        case BindKind::MkBoxPerm:
          error(v.span, "SYN013", "permissions cannot be assigned");
          break;
        default:
          break;
      }
      return;
    }
    auto& fg = static_cast<FieldGet&>(target);
    resolveExpr(fg);
    if (fg.global && fg.globalFieldIndex >= 0) {
      if (!fg.global->fields[fg.globalFieldIndex].isVar)
        error(fg.span, "SYN013", "cannot assign to val field '" + fg.name + "'");
    } else if (fg.staticClass && fg.fieldIndex >= 0) {
      if (!fg.staticClass->fields[fg.fieldIndex].isVar)
        error(fg.span, "SYN013", "cannot assign to val field '" + fg.name + "'");
    }
  }

  // ── expressions ──
  void resolveExpr(Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
      case ExprKind::StrLit:
        return;
      case ExprKind::VarRef: {
        auto& v = static_cast<VarRef&>(e);
        int scopeIdx;
        if (Binding* b = lookup(v.name, &scopeIdx)) {
          v.bind = b->kind;
          v.slot = b->slot;
          v.declType = b->type;
          v.isVarBinding = b->isVar;
          noteCapture(v.name, *b, scopeIdx, v.span);
          return;
        }
        if (curClass_) {
          if (const FieldDecl* f = fieldOf(curClass_, v.name)) {
            v.bind = BindKind::Field;
            v.fieldClass = curClass_;
            v.fieldIndex = f->index;
            v.declType = &f->type;
            v.isVarBinding = f->isVar;
            return;
          }
        }
        if (sym_.globals.count(v.name)) {
          // bare global only makes sense as the base of a field access,
          // which is resolved in FieldGet below
          error(v.span, "SYN014", "global object '" + v.name + "' is not a value");
          return;
        }
        error(v.span, "SYN010", "unknown identifier '" + v.name + "'");
        return;
      }
      case ExprKind::This: {
        auto& t = static_cast<ThisExpr&>(e);
        if (!curClass_) {
          error(t.span, "SYN014", "'this' is only valid inside a class");
          return;
        }
        t.cls = curClass_;
        return;
      }
      case ExprKind::FieldGet: {
        auto& fg = static_cast<FieldGet&>(e);
        // Global.field
        if (fg.base->kind == ExprKind::VarRef) {
          auto& base = static_cast<VarRef&>(*fg.base);
          int scopeIdx;
          if (!lookup(base.name, &scopeIdx) && !(curClass_ && fieldOf(curClass_, base.name))) {
            auto git = sym_.globals.find(base.name);
            if (git != sym_.globals.end()) {
              base.bind = BindKind::Global;
              base.global = git->second;
              fg.global = git->second;
              const FieldDecl* f = fieldOf(git->second, fg.name);
              if (!f) {
                error(fg.nameSpan, "SYN010",
                      "global " + base.name + " has no field '" + fg.name + "'");
                return;
              }
              fg.globalFieldIndex = f->index;
              return;
            }
          }
        }
        resolveExpr(*fg.base);
        if (const TypeExpr* bt = staticTypeOfResolved(*fg.base)) {
          if (bt->isClass()) {
            const ClassDecl* cls = sym_.classNamed(bt->name);
            if (cls) {
              const FieldDecl* f = fieldOf(cls, fg.name);
              if (!f) {
                error(fg.nameSpan, "SYN010",
                      "class " + cls->name + " has no field '" + fg.name + "'");
                return;
              }
              fg.staticClass = cls;
              fg.fieldIndex = f->index;
            }
          } else {
            error(fg.nameSpan, "SYN010",
                  "type " + typeToString(*bt) + " has no field '" + fg.name + "'");
          }
        }
        return;
      }
      case ExprKind::Call: {
        auto& c = static_cast<CallExpr&>(e);
        for (auto& a : c.args) resolveExpr(*a);
        const ClassDecl* cls = nullptr;
        if (c.base) {
          resolveExpr(*c.base);
          const TypeExpr* bt = staticTypeOfResolved(*c.base);
          if (!bt) return;  // dynamic dispatch; the affinity pass re-checks box args
          if (!bt->isClass()) {
            error(c.methodSpan, "SYN010",
                  "type " + typeToString(*bt) + " has no method '" + c.method + "'");
            return;
          }
          cls = sym_.classNamed(bt->name);
        } else {
          if (!curClass_) {
            error(c.methodSpan, "SYN010", "unknown function '" + c.method + "'");
            return;
          }
          cls = curClass_;
        }
        if (!cls) return;
        const MethodDecl* m = methodOf(cls, c.method);
        if (!m) {
          error(c.methodSpan, "SYN010",
                "class " + cls->name + " has no method '" + c.method + "'");
          return;
        }
        if (m->params.size() != c.args.size()) {
          error(c.span, "SYN014",
                "call to " + cls->name + "." + c.method + " expects " +
                    std::to_string(m->params.size()) + " argument(s), got " +
                    std::to_string(c.args.size()));
          return;
        }
        c.staticClass = cls;
        c.callee = m;
        return;
      }
      case ExprKind::New: {
        auto& n = static_cast<NewExpr&>(e);
        n.cls = sym_.classNamed(n.className);
        if (!n.cls) error(n.span, "SYN010", "unknown class '" + n.className + "'");
        return;
      }
      case ExprKind::Spawn: {
        auto& sp = static_cast<SpawnExpr&>(e);
        sp.cls = sym_.classNamed(sp.className);
        if (!sp.cls) {
          error(sp.span, "SYN010", "unknown class '" + sp.className + "'");
          return;
        }
        auto it = sym_.actors.find(sp.cls);
        if (it == sym_.actors.end()) {
          error(sp.span, "SYN012", "spawn[" + sp.className + "]: not an actor class");
          return;
        }
        sp.refType.kind = TypeKind::ActorRef;
        sp.refType.arg = std::make_shared<TypeExpr>(it->second.msgType);
        sp.refType.span = sp.span;
        return;
      }
      case ExprKind::Binary: {
        auto& b = static_cast<BinaryExpr&>(e);
        resolveExpr(*b.lhs);
        resolveExpr(*b.rhs);
        return;
      }
      case ExprKind::Unary:
        resolveExpr(*static_cast<UnaryExpr&>(e).operand);
        return;
    }
  }

  static const FieldDecl* fieldOf(const ClassDecl* cls, const std::string& name) {
    for (const auto& f : cls->fields)
      if (f.name == name) return &f;
    return nullptr;
  }

  static const FieldDecl* fieldOf(const GlobalDecl* g, const std::string& name) {
    for (const auto& f : g->fields)
      if (f.name == name) return &f;
    return nullptr;
  }

  static const MethodDecl* methodOf(const ClassDecl* cls, const std::string& name) {
    for (const auto& m : cls->methods)
      if (m.name == name) return &m;
    return nullptr;
  }

  // Static type of an already-resolved subexpression; null when unknown.
  const TypeExpr* staticTypeOfResolved(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return &builtinType(TypeKind::Int);
      case ExprKind::BoolLit: return &builtinType(TypeKind::Bool);
      case ExprKind::StrLit: return &builtinType(TypeKind::Str);
      case ExprKind::VarRef: return static_cast<const VarRef&>(e).declType;
      case ExprKind::This: {
        const auto& t = static_cast<const ThisExpr&>(e);
        return t.cls ? sym_.typeOfClass(t.cls) : nullptr;
      }
      case ExprKind::FieldGet: {
        const auto& fg = static_cast<const FieldGet&>(e);
        if (fg.global && fg.globalFieldIndex >= 0)
          return &fg.global->fields[fg.globalFieldIndex].type;
        if (fg.staticClass && fg.fieldIndex >= 0)
          return &fg.staticClass->fields[fg.fieldIndex].type;
        return nullptr;
      }
      case ExprKind::Call: {
        const auto& c = static_cast<const CallExpr&>(e);
        return c.callee ? &c.callee->returnType : nullptr;
      }
      case ExprKind::New: {
        const auto& n = static_cast<const NewExpr&>(e);
        return n.cls ? sym_.typeOfClass(n.cls) : nullptr;
      }
      case ExprKind::Spawn: {
        const auto& sp = static_cast<const SpawnExpr&>(e);
        return sp.refType.kind == TypeKind::ActorRef ? &sp.refType : nullptr;
      }
      case ExprKind::Binary: {
        const auto& b = static_cast<const BinaryExpr&>(e);
        switch (b.op) {
          case BinOp::Add: {
            const TypeExpr* lt = staticTypeOfResolved(*b.lhs);
            if (lt && lt->kind == TypeKind::Str) return lt;
            return &builtinType(TypeKind::Int);
          }
          case BinOp::Sub: case BinOp::Mul: case BinOp::Div: case BinOp::Mod:
            return &builtinType(TypeKind::Int);
          default:
            return &builtinType(TypeKind::Bool);
        }
      }
      case ExprKind::Unary:
        return static_cast<const UnaryExpr&>(e).op == UnOp::Neg
                   ? &builtinType(TypeKind::Int)
                   : &builtinType(TypeKind::Bool);
    }
    return nullptr;
  }

  Program& prog_;
  SymbolTable sym_;
  std::vector<Diagnostic> diags_;
  std::vector<Scope> scopes_;
  std::vector<ClosureFrame> closures_;
  const ClassDecl* curClass_ = nullptr;
  int* slotCounter_ = nullptr;
};

}  // namespace detail

// Binds every name in the program, assigns frame slots, and records the
// captured environment of each closure body. Returns diagnostics instead of a
// symbol table when anything fails to resolve.
inline ResolveResult resolveNames(Program& prog) {
  detail::Resolver r(prog);
  return r.run();
}

// Static type of a resolved expression, independent of any resolver instance.
// Null when the type cannot be determined from declarations alone.
inline const TypeExpr* staticTypeOf(const Expr& e, const SymbolTable& sym) {
  switch (e.kind) {
    case ExprKind::IntLit: return &builtinType(TypeKind::Int);
    case ExprKind::BoolLit: return &builtinType(TypeKind::Bool);
    case ExprKind::StrLit: return &builtinType(TypeKind::Str);
    case ExprKind::VarRef: return static_cast<const VarRef&>(e).declType;
    case ExprKind::This: {
      const auto& t = static_cast<const ThisExpr&>(e);
      return t.cls ? sym.typeOfClass(t.cls) : nullptr;
    }
    case ExprKind::FieldGet: {
      const auto& fg = static_cast<const FieldGet&>(e);
      if (fg.global && fg.globalFieldIndex >= 0)
        return &fg.global->fields[fg.globalFieldIndex].type;
      if (fg.staticClass && fg.fieldIndex >= 0)
        return &fg.staticClass->fields[fg.fieldIndex].type;
      return nullptr;
    }
    case ExprKind::Call: {
      const auto& c = static_cast<const CallExpr&>(e);
      return c.callee ? &c.callee->returnType : nullptr;
    }
    case ExprKind::New: {
      const auto& n = static_cast<const NewExpr&>(e);
      return n.cls ? sym.typeOfClass(n.cls) : nullptr;
    }
    case ExprKind::Spawn: {
      const auto& sp = static_cast<const SpawnExpr&>(e);
      return sp.refType.kind == TypeKind::ActorRef ? &sp.refType : nullptr;
    }
    case ExprKind::Binary: {
      const auto& b = static_cast<const BinaryExpr&>(e);
      switch (b.op) {
        case BinOp::Add: {
          const TypeExpr* lt = staticTypeOf(*b.lhs, sym);
          if (lt && lt->kind == TypeKind::Str) return lt;
          return &builtinType(TypeKind::Int);
        }
        case BinOp::Sub: case BinOp::Mul: case BinOp::Div: case BinOp::Mod:
          return &builtinType(TypeKind::Int);
        default:
          return &builtinType(TypeKind::Bool);
      }
    }
    case ExprKind::Unary:
      return static_cast<const UnaryExpr&>(e).op == UnOp::Neg ? &builtinType(TypeKind::Int)
                                                              : &builtinType(TypeKind::Bool);
  }
  return nullptr;
}

}  // namespace casa

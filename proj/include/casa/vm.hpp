#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "casa/affinity.hpp"
#include "casa/resolve.hpp"
#include "casa/values.hpp"
#include "casa/wire.hpp"

#include "json.hpp"

namespace casa {

enum class Transport { Move, DeepCopy };

struct RunConfig {
  Transport transport = Transport::Move;
  std::uint64_t seed = 0;
  int nodes = 1;
  long long maxSteps = 10'000'000;
  bool audit = false;
};

struct TraceEvent {
  enum class Kind { Print, Trap, Halt } kind = Kind::Print;
  std::string text;      // print payload
  std::string code;      // trap code
  Span span;             // trap site
  long long steps = 0;   // halt step count

  bool operator==(const TraceEvent& o) const {
    return kind == o.kind && text == o.text && code == o.code && steps == o.steps;
  }
};

using Trace = std::vector<TraceEvent>;

inline nlohmann::ordered_json traceEventToJson(const TraceEvent& e) {
  nlohmann::ordered_json j;
  switch (e.kind) {
    case TraceEvent::Kind::Print:
      j["ev"] = "print";
      j["s"] = e.text;
      break;
    case TraceEvent::Kind::Trap:
      j["ev"] = "trap";
      j["code"] = e.code;
      break;
    case TraceEvent::Kind::Halt:
      j["ev"] = "halt";
      j["steps"] = e.steps;
      break;
  }
  return j;
}

inline std::string traceToJsonLines(const Trace& t) {
  std::string out;
  for (const auto& e : t) out += traceEventToJson(e).dump() + "\n";
  return out;
}

struct RunStats {
  long long deliveries = 0;
  long long sends = 0;
  long long steps = 0;
  long long heapObjects = 0;
  long long cellsCreated = 0;
};

struct RunOutcome {
  Trace trace;
  RunStats stats;
  bool trapped = false;
  std::string trapCode;
};

namespace detail {

struct TrapSignal {
  std::string code;
  Span span;
  std::string note;
};

class Vm {
 public:
  Vm(const Program& prog, const SymbolTable& sym, const RunConfig& cfg)
      : prog_(prog), sym_(sym), cfg_(cfg) {
    auto immutable = deeplyImmutableClasses(prog_, sym_);
    for (const auto& cls : prog_.classes) {
      ClassRt rt;
      rt.decl = &cls;
      rt.deeplyImmutable = immutable.count(&cls) > 0;
      for (const auto& m : cls.methods) rt.methods.emplace(m.name, &m);
      for (const auto& f : cls.fields) rt.fieldIdx.emplace(f.name, f.index);
      rt.actor = sym_.actorInfo(&cls);
      classes_.emplace(&cls, std::move(rt));
    }
  }

  RunOutcome run() {
    RunOutcome out;
    try {
      initGlobals();
      Frame main;
      main.slots.resize(static_cast<std::size_t>(prog_.mainSlotCount));
      main.thisVal = Value::unit();
      main.node = 0;
      frames_.push_back(&main);
      execBlock(main, prog_.mainBlock);
      frames_.pop_back();
      schedule();
    } catch (TrapSignal& t) {
      TraceEvent e;
      e.kind = TraceEvent::Kind::Trap;
      e.code = t.code;
      e.span = t.span;
      trace_.push_back(e);
      trapped_ = true;
      trapCode_ = t.code;
    }
    out.trace = std::move(trace_);
    out.stats.deliveries = deliveries_;
    out.stats.sends = sends_;
    out.stats.steps = deliveries_;
    out.stats.heapObjects = static_cast<long long>(heap_.size());
    out.stats.cellsCreated = static_cast<long long>(cells_.size());
    out.trapped = trapped_;
    out.trapCode = trapCode_;
    return out;
  }

  std::vector<HeapObject>& heap() { return heap_; }

 private:
  struct ClassRt {
    const ClassDecl* decl = nullptr;
    bool deeplyImmutable = false;
    std::unordered_map<std::string, const MethodDecl*> methods;
    std::unordered_map<std::string, int> fieldIdx;
    const ActorInfo* actor = nullptr;
  };

  struct Frame {
    std::vector<Value> slots;
    Value thisVal;
    int node = 0;
  };

  enum class Flow { Normal, Jumped, Returned };

  [[noreturn]] void trap(const char* code, const Span& span, std::string note = "") {
    throw TrapSignal{code, span, std::move(note)};
  }

  const ClassRt& rtOf(const ClassDecl* cls) { return classes_.at(cls); }

  // ── globals ──
  void initGlobals() {
    for (const auto& g : prog_.globals) {
      std::vector<Value> fields(g.fields.size());
      Frame f;
      f.thisVal = Value::unit();
      f.node = 0;
      frames_.push_back(&f);
      for (const auto& fd : g.fields)
        fields[static_cast<std::size_t>(fd.index)] =
            fd.init ? eval(f, *fd.init) : defaultValue(fd.type);
      frames_.pop_back();
      globals_.emplace(&g, std::move(fields));
    }
  }

  static Value defaultValue(const TypeExpr& t) {
    switch (t.kind) {
      case TypeKind::Int: return Value::ofInt(0);
      case TypeKind::Bool: return Value::ofBool(false);
      case TypeKind::Str: return Value::ofStr("");
      case TypeKind::Unit: return Value::unit();
      default: return Value::null();
    }
  }

  // ── heap ──
  long long instantiate(const ClassDecl* cls, int node, const Span& site) {
    long long id = static_cast<long long>(heap_.size());
    heap_.push_back(HeapObject{cls, {}, node});
    heap_[static_cast<std::size_t>(id)].fields.resize(cls->fields.size());
    {
      Frame f;
      f.thisVal = Value::obj(id);
      f.node = node;
      frames_.push_back(&f);
      for (const auto& fd : cls->fields) {
        Value v = fd.init ? eval(f, *fd.init) : defaultValue(fd.type);
        heap_[static_cast<std::size_t>(id)].fields[static_cast<std::size_t>(fd.index)] =
            std::move(v);
      }
      frames_.pop_back();
    }
    (void)site;
    return id;
  }

  HeapObject& obj(long long id) { return heap_[static_cast<std::size_t>(id)]; }
  BoxCell& cell(long long id) { return cells_[static_cast<std::size_t>(id)]; }

  std::uint64_t mintToken() { return ++tokenCounter_; }

  // ── value helpers ──
  static std::string stringify(const Value& v) {
    switch (v.tag) {
      case Value::Tag::Unit: return "()";
      case Value::Tag::Null: return "null";
      case Value::Tag::Int: return std::to_string(v.i);
      case Value::Tag::Bool: return v.b ? "true" : "false";
      case Value::Tag::Str: return *v.s;
      case Value::Tag::Obj: return "<object>";
      case Value::Tag::Box: return "<box>";
      case Value::Tag::Actor: return "actor:" + std::to_string(v.i);
    }
    return "?";
  }

  bool valueDeeplyImmutable(const Value& v) {
    switch (v.tag) {
      case Value::Tag::Unit:
      case Value::Tag::Null:
      case Value::Tag::Int:
      case Value::Tag::Bool:
      case Value::Tag::Str:
        return true;
      case Value::Tag::Obj:
        return rtOf(obj(v.i).cls).deeplyImmutable;
      default:
        return false;
    }
  }

  // ── expression evaluation ──
  Value eval(Frame& f, const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
        return Value::ofInt(static_cast<const IntLit&>(e).value);
      case ExprKind::BoolLit:
        return Value::ofBool(static_cast<const BoolLit&>(e).value);
      case ExprKind::StrLit:
        return Value::ofStr(static_cast<const StrLit&>(e).value);
      case ExprKind::VarRef: {
        const auto& v = static_cast<const VarRef&>(e);
        switch (v.bind) {
          case BindKind::Field: {
            if (f.thisVal.tag != Value::Tag::Obj)
              trap("RT05", v.span, "field access without a receiver");
            return obj(f.thisVal.i).fields[static_cast<std::size_t>(v.fieldIndex)];
          }
          case BindKind::Global:
            trap("RT08", v.span, "global object used as a value");
          default:
            return f.slots[static_cast<std::size_t>(v.slot)];
        }
      }
      case ExprKind::This:
        return f.thisVal;
      case ExprKind::FieldGet: {
        const auto& fg = static_cast<const FieldGet&>(e);
        if (fg.global)
          return globals_.at(fg.global)[static_cast<std::size_t>(fg.globalFieldIndex)];
        Value base = eval(f, *fg.base);
        if (base.tag == Value::Tag::Null) trap("RT05", fg.span);
        if (base.tag != Value::Tag::Obj) trap("RT08", fg.span, "field access on a non-object");
        HeapObject& o = obj(base.i);
        int idx = fg.fieldIndex;
        if (fg.staticClass != o.cls) {
          auto it = rtOf(o.cls).fieldIdx.find(fg.name);
          if (it == rtOf(o.cls).fieldIdx.end())
            trap("RT08", fg.span, "no field '" + fg.name + "' on " + o.cls->name);
          idx = it->second;
        }
        return o.fields[static_cast<std::size_t>(idx)];
      }
      case ExprKind::Call:
        return evalCall(f, static_cast<const CallExpr&>(e));
      case ExprKind::New: {
        const auto& n = static_cast<const NewExpr&>(e);
        return Value::obj(instantiate(n.cls, f.node, n.span));
      }
      case ExprKind::Spawn: {
        const auto& sp = static_cast<const SpawnExpr&>(e);
        if (!sp.cls || !rtOf(sp.cls).actor) trap("RT03", sp.span);
        int node = cfg_.nodes > 0 ? static_cast<int>(actors_.size()) % cfg_.nodes : 0;
        long long objId = instantiate(sp.cls, node, sp.span);
        ActorRec a;
        a.id = static_cast<int>(actors_.size());
        a.cls = sp.cls;
        a.objId = objId;
        a.node = node;
        actors_.push_back(std::move(a));
        return Value::actor(actors_.back().id);
      }
      case ExprKind::Binary:
        return evalBinary(f, static_cast<const BinaryExpr&>(e));
      case ExprKind::Unary: {
        const auto& u = static_cast<const UnaryExpr&>(e);
        Value v = eval(f, *u.operand);
        if (u.op == UnOp::Neg) {
          if (v.tag != Value::Tag::Int) trap("RT08", u.span, "negation of a non-integer");
          return Value::ofInt(-v.i);
        }
        if (v.tag != Value::Tag::Bool) trap("RT08", u.span, "logical not of a non-boolean");
        return Value::ofBool(!v.b);
      }
    }
    trap("RT08", e.span, "unevaluable expression");
  }

  Value evalBinary(Frame& f, const BinaryExpr& b) {
    if (b.op == BinOp::And || b.op == BinOp::Or) {
      Value l = eval(f, *b.lhs);
      if (l.tag != Value::Tag::Bool) trap("RT08", b.span, "logical operand is not a boolean");
      if (b.op == BinOp::And && !l.b) return Value::ofBool(false);
      if (b.op == BinOp::Or && l.b) return Value::ofBool(true);
      Value r = eval(f, *b.rhs);
      if (r.tag != Value::Tag::Bool) trap("RT08", b.span, "logical operand is not a boolean");
      return r;
    }
    Value l = eval(f, *b.lhs);
    Value r = eval(f, *b.rhs);
    switch (b.op) {
      case BinOp::Add:
        if (l.tag == Value::Tag::Str || r.tag == Value::Tag::Str)
          return Value::ofStr(stringify(l) + stringify(r));
        if (l.tag == Value::Tag::Int && r.tag == Value::Tag::Int)
          return Value::ofInt(l.i + r.i);
        trap("RT08", b.span, "operands of + must be integers or strings");
      case BinOp::Sub:
      case BinOp::Mul:
      case BinOp::Div:
      case BinOp::Mod: {
        if (l.tag != Value::Tag::Int || r.tag != Value::Tag::Int)
          trap("RT08", b.span, "arithmetic on non-integers");
        if ((b.op == BinOp::Div || b.op == BinOp::Mod) && r.i == 0) trap("RT06", b.span);
        switch (b.op) {
          case BinOp::Sub: return Value::ofInt(l.i - r.i);
          case BinOp::Mul: return Value::ofInt(l.i * r.i);
          case BinOp::Div: return Value::ofInt(l.i / r.i);
          default: return Value::ofInt(l.i % r.i);
        }
      }
      case BinOp::Eq:
      case BinOp::Ne: {
        bool eq = valueEquals(l, r);
        return Value::ofBool(b.op == BinOp::Eq ? eq : !eq);
      }
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge: {
        if (l.tag != Value::Tag::Int || r.tag != Value::Tag::Int)
          trap("RT08", b.span, "comparison of non-integers");
        switch (b.op) {
          case BinOp::Lt: return Value::ofBool(l.i < r.i);
          case BinOp::Le: return Value::ofBool(l.i <= r.i);
          case BinOp::Gt: return Value::ofBool(l.i > r.i);
          default: return Value::ofBool(l.i >= r.i);
        }
      }
      default:
        trap("RT08", b.span, "bad operator");
    }
  }

  static bool valueEquals(const Value& l, const Value& r) {
    if (l.tag != r.tag) return false;
    switch (l.tag) {
      case Value::Tag::Unit: return true;
      case Value::Tag::Null: return true;
      case Value::Tag::Int: return l.i == r.i;
      case Value::Tag::Bool: return l.b == r.b;
      case Value::Tag::Str: return *l.s == *r.s;
      default: return l.i == r.i;  // identity for Obj / Box / Actor
    }
  }

  Value evalCall(Frame& f, const CallExpr& c) {
    Value receiver;
    if (c.base) {
      receiver = eval(f, *c.base);
      if (receiver.tag == Value::Tag::Null) trap("RT05", c.span);
      if (receiver.tag != Value::Tag::Obj)
        trap("RT08", c.span, "method call on a non-object");
    } else {
      receiver = f.thisVal;
      if (receiver.tag != Value::Tag::Obj)
        trap("RT08", c.span, "bare call without a receiver");
    }
    const ClassDecl* cls = obj(receiver.i).cls;
    const MethodDecl* m = c.callee;
    if (!m || m->owner != cls) {
      auto it = rtOf(cls).methods.find(c.method);
      if (it == rtOf(cls).methods.end())
        trap("RT08", c.span, "no method '" + c.method + "' on " + cls->name);
      m = it->second;
    }
    if (m->params.size() != c.args.size())
      trap("RT08", c.span, "call arity mismatch");
    if (++callDepth_ > kMaxCallDepth) trap("RT02", c.span, "call depth exceeded");
    Frame callee;
    callee.slots.resize(static_cast<std::size_t>(m->slotCount));
    callee.thisVal = receiver;
    callee.node = f.node;
    for (std::size_t i = 0; i < c.args.size(); ++i)
      callee.slots[static_cast<std::size_t>(m->params[i].slot)] = eval(f, *c.args[i]);
    frames_.push_back(&callee);
    Flow flow = execBlock(callee, m->body);
    frames_.pop_back();
    --callDepth_;
    return flow == Flow::Returned ? retVal_ : Value::unit();
  }

  // ── statements ──
  Flow execBlock(Frame& f, const Block& b) {
    Flow result = Flow::Normal;
    for (const auto& s : b.stmts) {
      Flow flow = execStmt(f, *s);
      if (flow != Flow::Normal) {
        result = flow;
        break;
      }
    }
    // bindings of this block are out of scope now; clearing the slots keeps
    // the audit's reachability view honest
    for (const auto& s : b.stmts)
      if (s->kind == StmtKind::Local)
        f.slots[static_cast<std::size_t>(static_cast<const LocalStmt&>(*s).slot)] =
            Value::unit();
    return result;
  }

  Flow execStmt(Frame& f, const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Local: {
        const auto& x = static_cast<const LocalStmt&>(s);
        f.slots[static_cast<std::size_t>(x.slot)] = eval(f, *x.init);
        return Flow::Normal;
      }
      case StmtKind::Assign: {
        const auto& x = static_cast<const AssignStmt&>(s);
        Value v = eval(f, *x.value);
        assign(f, *x.target, std::move(v));
        return Flow::Normal;
      }
      case StmtKind::ExprStmt:
        eval(f, *static_cast<const ExprStatement&>(s).expr);
        return Flow::Normal;
      case StmtKind::If: {
        const auto& x = static_cast<const IfStmt&>(s);
        Value c = eval(f, *x.cond);
        if (c.tag != Value::Tag::Bool) trap("RT08", x.cond->span, "condition is not a boolean");
        if (c.b) return execBlock(f, x.thenBlock);
        if (x.elseBlock) return execBlock(f, *x.elseBlock);
        return Flow::Normal;
      }
      case StmtKind::While: {
        const auto& x = static_cast<const WhileStmt&>(s);
        while (true) {
          Value c = eval(f, *x.cond);
          if (c.tag != Value::Tag::Bool)
            trap("RT08", x.cond->span, "condition is not a boolean");
          if (!c.b) return Flow::Normal;
          Flow flow = execBlock(f, x.body);
          if (flow != Flow::Normal) return flow;
        }
      }
      case StmtKind::Return: {
        const auto& x = static_cast<const ReturnStmt&>(s);
        retVal_ = x.value ? eval(f, *x.value) : Value::unit();
        return Flow::Returned;
      }
      case StmtKind::Print: {
        const auto& x = static_cast<const PrintStmt&>(s);
        TraceEvent e;
        e.kind = TraceEvent::Kind::Print;
        e.text = stringify(eval(f, *x.value));
        trace_.push_back(std::move(e));
        return Flow::Normal;
      }
      case StmtKind::Open: {
        const auto& x = static_cast<const OpenStmt&>(s);
        Value bv = f.slots[static_cast<std::size_t>(x.boxVar->slot)];
        long long cid = requireUsableBox(bv, x.boxVar->span);
        f.slots[static_cast<std::size_t>(x.payloadSlot)] = cell(cid).payload;
        Flow flow = execBlock(f, x.body);
        f.slots[static_cast<std::size_t>(x.payloadSlot)] = Value::unit();
        return flow;
      }
      case StmtKind::MkBox: {
        const auto& x = static_cast<const MkBoxStmt&>(s);
        long long payload = instantiate(x.cls, f.node, x.span);
        long long cid = static_cast<long long>(cells_.size());
        BoxCell bc;
        bc.payload = Value::obj(payload);
        bc.state = BoxCell::State::Live;
        bc.tokenId = mintToken();
        bc.tokenLive = true;
        bc.node = f.node;
        bc.owner = curActor_;
        cells_.push_back(bc);
        f.slots[static_cast<std::size_t>(x.boxSlot)] = Value::box(cid, bc.tokenId);
        f.slots[static_cast<std::size_t>(x.permSlot)] = Value::unit();
        Flow flow = execBlock(f, x.body);
        f.slots[static_cast<std::size_t>(x.boxSlot)] = Value::unit();
        return flow == Flow::Returned ? Flow::Returned : Flow::Jumped;
      }
      case StmtKind::Consume: {
        const auto& x = static_cast<const ConsumeStmt&>(s);
        Value bv = f.slots[static_cast<std::size_t>(x.boxVar->slot)];
        long long cid = requireUsableBox(bv, x.boxVar->span);
        cell(cid).state = BoxCell::State::Consumed;
        cell(cid).tokenLive = false;
        Flow flow = execBlock(f, x.body);
        return flow == Flow::Returned ? Flow::Returned : Flow::Jumped;
      }
      case StmtKind::SendBox: {
        const auto& x = static_cast<const SendBoxStmt&>(s);
        Value target = eval(f, *x.target);
        if (target.tag == Value::Tag::Null) trap("RT05", x.target->span);
        if (target.tag != Value::Tag::Actor)
          trap("RT08", x.target->span, "send target is not an actor reference");
        Value bv = f.slots[static_cast<std::size_t>(x.boxVar->slot)];
        long long cid = requireUsableBox(bv, x.boxVar->span);
        sendBoxTo(static_cast<int>(target.i), cid, f.node, x.span);
        Flow flow = execBlock(f, x.body);
        return flow == Flow::Returned ? Flow::Returned : Flow::Jumped;
      }
      case StmtKind::SendImm: {
        const auto& x = static_cast<const SendImmStmt&>(s);
        Value target = eval(f, *x.target);
        if (target.tag == Value::Tag::Null) trap("RT05", x.target->span);
        if (target.tag != Value::Tag::Actor)
          trap("RT08", x.target->span, "send target is not an actor reference");
        Value v = eval(f, *x.value);
        if (!valueDeeplyImmutable(v)) trap("RT04", x.value->span);
        ActorRec& a = actors_[static_cast<std::size_t>(target.i)];
        Value payload = v;
        if (payload.tag == Value::Tag::Obj &&
            (a.node != f.node || cfg_.transport == Transport::DeepCopy))
          payload = wireTransfer(payload, a.node);
        Message m;
        m.boxed = false;
        m.imm = std::move(payload);
        a.mailbox.push_back(std::move(m));
        ++sends_;
        return Flow::Normal;
      }
    }
    return Flow::Normal;
  }

  void assign(Frame& f, const Expr& target, Value v) {
    if (target.kind == ExprKind::VarRef) {
      const auto& var = static_cast<const VarRef&>(target);
      if (var.bind == BindKind::Field) {
        if (f.thisVal.tag != Value::Tag::Obj) trap("RT05", var.span);
        obj(f.thisVal.i).fields[static_cast<std::size_t>(var.fieldIndex)] = std::move(v);
        return;
      }
      f.slots[static_cast<std::size_t>(var.slot)] = std::move(v);
      return;
    }
    const auto& fg = static_cast<const FieldGet&>(target);
    if (fg.global) {
      globals_.at(fg.global)[static_cast<std::size_t>(fg.globalFieldIndex)] = std::move(v);
      return;
    }
    Value base = eval(f, *fg.base);
    if (base.tag == Value::Tag::Null) trap("RT05", fg.span);
    if (base.tag != Value::Tag::Obj) trap("RT08", fg.span, "field assignment on a non-object");
    HeapObject& o = obj(base.i);
    int idx = fg.fieldIndex;
    if (fg.staticClass != o.cls) {
      auto it = rtOf(o.cls).fieldIdx.find(fg.name);
      if (it == rtOf(o.cls).fieldIdx.end())
        trap("RT08", fg.span, "no field '" + fg.name + "' on " + o.cls->name);
      idx = it->second;
    }
    o.fields[static_cast<std::size_t>(idx)] = std::move(v);
  }

  // ── the affine transfer machinery ──

  // A box is usable when the cell is live and the reference carries the
  // cell's current, unrevoked token.
  long long requireUsableBox(const Value& bv, const Span& site) {
    if (bv.tag != Value::Tag::Box) trap("RT01", site, "not a live box");
    BoxCell& c = cell(bv.i);
    if (c.state != BoxCell::State::Live || !c.tokenLive || c.tokenId != bv.token)
      trap("RT01", site);
    return bv.i;
  }

  void sendBoxTo(int targetId, long long cid, int senderNode, const Span& site) {
    ActorRec& target = actors_[static_cast<std::size_t>(targetId)];
    BoxCell& c = cell(cid);
    bool cross = target.node != senderNode;
    long long sentCell = cid;
    if (cross || cfg_.transport == Transport::DeepCopy) {
      Value copied = cross ? wireTransfer(c.payload, target.node)
                           : deepCopyValue(c.payload, target.node);
      BoxCell fresh;
      fresh.payload = copied;
      fresh.state = BoxCell::State::Live;
      fresh.tokenId = 0;
      fresh.tokenLive = false;  // a new token is minted at delivery
      fresh.node = target.node;
      fresh.owner = targetId;
      sentCell = static_cast<long long>(cells_.size());
      cells_.push_back(fresh);
      c.state = BoxCell::State::Consumed;
      c.tokenLive = false;
    } else {
      c.tokenLive = false;  // revoked for the sender; re-minted at delivery
      c.node = target.node;
      c.owner = targetId;
    }
    Message m;
    m.boxed = true;
    m.cell = sentCell;
    target.mailbox.push_back(std::move(m));
    ++sends_;
    if (cfg_.audit) auditIsolation(targetId, site);
  }

  Value wireTransfer(const Value& payload, int node) {
    try {
      std::vector<std::uint8_t> bytes = wire::encodeGraph(heap_, payload);
      return wire::decodeGraph(heap_, bytes, node, sym_);
    } catch (const wire::WireError& e) {
      trap("RT08", Span{}, e.what());
    }
  }

  // Structure-preserving copy: isomorphic graph, disjoint heap ids.
  Value deepCopyValue(const Value& root, int node) {
    if (root.tag != Value::Tag::Obj) return root;
    std::unordered_map<long long, long long> mapping;
    std::vector<long long> order;
    std::vector<long long> stack{root.i};
    mapping[root.i] = static_cast<long long>(heap_.size());
    heap_.push_back(HeapObject{obj(root.i).cls, {}, node});
    order.push_back(root.i);
    while (!stack.empty()) {
      long long id = stack.back();
      stack.pop_back();
      // copy of the field vector: instantiation below may grow the heap
      std::vector<Value> fields = obj(id).fields;
      for (const Value& fv : fields) {
        if (fv.tag == Value::Tag::Obj && !mapping.count(fv.i)) {
          mapping[fv.i] = static_cast<long long>(heap_.size());
          heap_.push_back(HeapObject{obj(fv.i).cls, {}, node});
          order.push_back(fv.i);
          stack.push_back(fv.i);
        }
        if (fv.tag == Value::Tag::Box)
          trap("RT08", Span{}, "box inside a message payload");
      }
    }
    for (long long oldId : order) {
      std::vector<Value> fields = obj(oldId).fields;
      for (Value& fv : fields)
        if (fv.tag == Value::Tag::Obj) fv = Value::obj(mapping.at(fv.i));
      obj(mapping.at(oldId)).fields = std::move(fields);
    }
    return Value::obj(mapping.at(root.i));
  }

  // ── isolation audit ──

  // Language-level reachability: fields of objects, plus payloads of boxes
  // whose token is actually usable.
  void reach(const Value& v, std::unordered_set<long long>& seen) {
    switch (v.tag) {
      case Value::Tag::Obj: {
        if (!seen.insert(v.i).second) return;
        for (const Value& f : obj(v.i).fields) reach(f, seen);
        return;
      }
      case Value::Tag::Box: {
        const BoxCell& c = cell(v.i);
        if (c.state == BoxCell::State::Live && c.tokenLive && c.tokenId == v.token)
          reach(c.payload, seen);
        return;
      }
      default:
        return;
    }
  }

  void reachMessage(const Message& m, std::unordered_set<long long>& seen) {
    if (m.boxed) {
      const BoxCell& c = cell(m.cell);
      if (c.state == BoxCell::State::Live) reach(c.payload, seen);
    } else {
      reach(m.imm, seen);
    }
  }

  void auditIsolation(int receiverId, const Span& site) {
    std::unordered_set<long long> sender;
    for (const Frame* fr : frames_) {
      reach(fr->thisVal, sender);
      for (const Value& v : fr->slots) reach(v, sender);
    }
    if (curActor_ >= 0) {
      const ActorRec& a = actors_[static_cast<std::size_t>(curActor_)];
      reach(Value::obj(a.objId), sender);
      for (const Message& m : a.mailbox) reachMessage(m, sender);
    }
    std::unordered_set<long long> receiver;
    const ActorRec& r = actors_[static_cast<std::size_t>(receiverId)];
    reach(Value::obj(r.objId), receiver);
    for (const Message& m : r.mailbox) reachMessage(m, receiver);
    for (long long id : receiver) {
      if (sender.count(id) && !rtOf(obj(id).cls).deeplyImmutable)
        trap("RT07", site, "object shared across actors after a box transfer");
    }
  }

  // ── actors ──
  void schedule() {
    if (actors_.empty()) return;
    std::size_t cursor = static_cast<std::size_t>(cfg_.seed % actors_.size());
    while (true) {
      if (deliveries_ >= cfg_.maxSteps) {
        bool pending = false;
        for (const auto& a : actors_)
          if (!a.mailbox.empty()) pending = true;
        if (pending) {
          TraceEvent t;
          t.kind = TraceEvent::Kind::Trap;
          t.code = "RT02";
          trace_.push_back(t);
          trapped_ = true;
          trapCode_ = "RT02";
          TraceEvent h;
          h.kind = TraceEvent::Kind::Halt;
          h.steps = deliveries_;
          trace_.push_back(h);
        }
        return;
      }
      int found = -1;
      std::size_t n = actors_.size();
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t idx = (cursor + k) % n;
        if (!actors_[idx].mailbox.empty()) {
          found = static_cast<int>(idx);
          break;
        }
      }
      if (found < 0) return;
      deliver(found);
      cursor = (static_cast<std::size_t>(found) + 1) % actors_.size();
    }
  }

  void deliver(int actorId) {
    ActorRec& a = actors_[static_cast<std::size_t>(actorId)];
    if (a.processing) trap("RT08", Span{}, "re-entrant delivery");
    a.processing = true;
    Message msg = std::move(a.mailbox.front());
    a.mailbox.pop_front();
    ++deliveries_;

    const ActorInfo* info = rtOf(a.cls).actor;
    if (!info) trap("RT03", Span{});
    const MethodDecl* recv = info->receive;
    Frame f;
    f.slots.resize(static_cast<std::size_t>(recv->slotCount));
    f.thisVal = Value::obj(a.objId);
    f.node = a.node;

    int prevActor = curActor_;
    curActor_ = actorId;
    long long boxedCell = -1;
    if (msg.boxed) {
      BoxCell& c = cell(msg.cell);
      if (info->boxedReceive) {
        c.tokenId = mintToken();
        c.tokenLive = true;
        c.owner = actorId;
        boxedCell = msg.cell;
        f.slots[static_cast<std::size_t>(recv->params[0].slot)] =
            Value::box(msg.cell, c.tokenId);
        for (const auto& pp : recv->permParams)
          f.slots[static_cast<std::size_t>(pp.slot)] = Value::unit();
      } else {
        // simplified form: hand over the (immutable) payload directly
        if (c.payload.tag == Value::Tag::Obj && !valueDeeplyImmutable(c.payload))
          trap("RT04", recv->params[0].span);
        f.slots[static_cast<std::size_t>(recv->params[0].slot)] = c.payload;
        c.state = BoxCell::State::Consumed;
        c.tokenLive = false;
      }
    } else {
      if (info->boxedReceive) {
        if (msg.imm.tag != Value::Tag::Obj)
          trap("RT08", recv->params[0].span, "scalar message for a boxed receive");
        // boxed up on arrival, as if sent through the full protocol
        BoxCell bc;
        bc.payload = msg.imm;
        bc.state = BoxCell::State::Live;
        bc.tokenId = mintToken();
        bc.tokenLive = true;
        bc.node = a.node;
        bc.owner = actorId;
        long long cid = static_cast<long long>(cells_.size());
        cells_.push_back(bc);
        boxedCell = cid;
        f.slots[static_cast<std::size_t>(recv->params[0].slot)] = Value::box(cid, bc.tokenId);
        for (const auto& pp : recv->permParams)
          f.slots[static_cast<std::size_t>(pp.slot)] = Value::unit();
      } else {
        f.slots[static_cast<std::size_t>(recv->params[0].slot)] = msg.imm;
      }
    }

    frames_.push_back(&f);
    execBlock(f, recv->body);
    frames_.pop_back();

    // the permission delivered with a box is scoped to the receive body
    if (boxedCell >= 0) {
      BoxCell& c = cell(boxedCell);
      if (c.state == BoxCell::State::Live) c.tokenLive = false;
    }
    curActor_ = prevActor;
    a.processing = false;
  }

  const Program& prog_;
  const SymbolTable& sym_;
  RunConfig cfg_;
  std::unordered_map<const ClassDecl*, ClassRt> classes_;
  std::unordered_map<const GlobalDecl*, std::vector<Value>> globals_;
  std::vector<HeapObject> heap_;
  std::vector<BoxCell> cells_;
  std::vector<ActorRec> actors_;
  std::vector<Frame*> frames_;
  Trace trace_;
  Value retVal_;
  std::uint64_t tokenCounter_ = 0;
  long long deliveries_ = 0;
  long long sends_ = 0;
  int curActor_ = -1;
  int callDepth_ = 0;
  bool trapped_ = false;
  std::string trapCode_;

  static constexpr int kMaxCallDepth = 4096;
};

}  // namespace detail

// Executes a checked (or explicitly unchecked) program under the
// deterministic scheduler. Identical (program, config) pairs produce
// identical traces.
inline RunOutcome run(const Program& prog, const SymbolTable& sym, const RunConfig& cfg) {
  detail::Vm vm(prog, sym, cfg);
  return vm.run();
}

// Stand-alone deep copy used by tests and by the runtime's copy transport.
// Returns the new root id; the copied graph is isomorphic to the source and
// shares no heap ids with it.
inline long long deepCopy(std::vector<HeapObject>& heap, long long rootId, int node) {
  std::unordered_map<long long, long long> mapping;
  std::vector<long long> order;
  std::vector<long long> stack{rootId};
  mapping[rootId] = static_cast<long long>(heap.size());
  heap.push_back(HeapObject{heap[static_cast<std::size_t>(rootId)].cls, {}, node});
  order.push_back(rootId);
  while (!stack.empty()) {
    long long id = stack.back();
    stack.pop_back();
    std::vector<Value> fields = heap[static_cast<std::size_t>(id)].fields;
    for (const Value& fv : fields) {
      if (fv.tag == Value::Tag::Obj && !mapping.count(fv.i)) {
        mapping[fv.i] = static_cast<long long>(heap.size());
        heap.push_back(HeapObject{heap[static_cast<std::size_t>(fv.i)].cls, {}, node});
        order.push_back(fv.i);
        stack.push_back(fv.i);
      }
    }
  }
  for (long long oldId : order) {
    std::vector<Value> fields = heap[static_cast<std::size_t>(oldId)].fields;
    for (Value& fv : fields)
      if (fv.tag == Value::Tag::Obj) fv = Value::obj(mapping.at(fv.i));
    heap[static_cast<std::size_t>(mapping.at(oldId))].fields = std::move(fields);
  }
  return mapping.at(rootId);
}

}  // namespace casa

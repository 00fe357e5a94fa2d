#pragma once

#include <string>

#include "casa/ast.hpp"

namespace casa {

namespace detail {

class Printer {
 public:
  std::string print(const Program& p) {
    for (const auto& g : p.globals) printGlobal(g);
    for (const auto& c : p.classes) printClass(c);
    for (const auto& s : p.mainBlock.stmts) printStmt(*s);
    return std::move(out_);
  }

 private:
  static int precedenceOf(BinOp op) {
    switch (op) {
      case BinOp::Or: return 1;
      case BinOp::And: return 2;
      case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
      case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 3;
      case BinOp::Add: case BinOp::Sub: return 4;
      case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 5;
    }
    return 0;
  }

  static const char* opText(BinOp op) {
    switch (op) {
      case BinOp::Add: return "+";
      case BinOp::Sub: return "-";
      case BinOp::Mul: return "*";
      case BinOp::Div: return "/";
      case BinOp::Mod: return "%";
      case BinOp::Eq: return "==";
      case BinOp::Ne: return "!=";
      case BinOp::Lt: return "<";
      case BinOp::Le: return "<=";
      case BinOp::Gt: return ">";
      case BinOp::Ge: return ">=";
      case BinOp::And: return "&&";
      case BinOp::Or: return "||";
    }
    return "?";
  }

  void line(const std::string& s) {
    out_.append(indent_ * 2, ' ');
    out_ += s;
    out_ += '\n';
  }

  void printGlobal(const GlobalDecl& g) {
    line("global " + g.name + " {");
    ++indent_;
    for (const auto& f : g.fields) line(fieldText(f));
    --indent_;
    line("}");
  }

  std::string fieldText(const FieldDecl& f) {
    std::string s = (f.isVar ? "var " : "val ") + f.name + ": " + typeToString(f.type);
    if (f.init) s += " = " + expr(*f.init, 0);
    return s;
  }

  void printClass(const ClassDecl& c) {
    std::string head = (c.isActor ? "actor class " : "class ") + c.name;
    if (!c.superName.empty()) head += " extends " + c.superName;
    line(head + " {");
    ++indent_;
    for (const auto& f : c.fields) line(fieldText(f));
    for (const auto& m : c.methods) printMethod(m);
    --indent_;
    line("}");
  }

  void printMethod(const MethodDecl& m) {
    // Parameters are printed in declaration order: each permission parameter
    // directly after the box parameter it guards keeps re-parsing valid.
    std::string sig = "def " + m.name + "(";
    bool first = true;
    for (size_t i = 0; i < m.params.size(); ++i) {
      if (!first) sig += ", ";
      first = false;
      sig += m.params[i].name + ": " + typeToString(m.params[i].type);
      for (const auto& pp : m.permParams) {
        if (pp.boxParamIndex == static_cast<int>(i) ||
            (pp.boxParamIndex < 0 && pp.boxParamName == m.params[i].name)) {
          sig += ", " + pp.name + ": Perm[" + pp.boxParamName + "]";
        }
      }
    }
    sig += "): " + typeToString(m.returnType) + " {";
    line(sig);
    ++indent_;
    for (const auto& s : m.body.stmts) printStmt(*s);
    --indent_;
    line("}");
  }

  void printBlockBody(const Block& b) {
    ++indent_;
    for (const auto& s : b.stmts) printStmt(*s);
    --indent_;
  }

  void printStmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Local: {
        const auto& x = static_cast<const LocalStmt&>(s);
        line((x.isVar ? "var " : "val ") + x.name + ": " + typeToString(x.type) + " = " +
             expr(*x.init, 0));
        return;
      }
      case StmtKind::Assign: {
        const auto& x = static_cast<const AssignStmt&>(s);
        line(expr(*x.target, 0) + " = " + expr(*x.value, 0));
        return;
      }
      case StmtKind::ExprStmt:
        line(expr(*static_cast<const ExprStatement&>(s).expr, 0));
        return;
      case StmtKind::If: {
        const auto& x = static_cast<const IfStmt&>(s);
        line("if (" + expr(*x.cond, 0) + ") {");
        printBlockBody(x.thenBlock);
        if (x.elseBlock) {
          line("} else {");
          printBlockBody(*x.elseBlock);
        }
        line("}");
        return;
      }
      case StmtKind::While: {
        const auto& x = static_cast<const WhileStmt&>(s);
        line("while (" + expr(*x.cond, 0) + ") {");
        printBlockBody(x.body);
        line("}");
        return;
      }
      case StmtKind::Return: {
        const auto& x = static_cast<const ReturnStmt&>(s);
        line(x.value ? "return " + expr(*x.value, 0) : "return");
        return;
      }
      case StmtKind::Print:
        line("print(" + expr(*static_cast<const PrintStmt&>(s).value, 0) + ")");
        return;
      case StmtKind::Open: {
        const auto& x = static_cast<const OpenStmt&>(s);
        line(x.boxVar->name + ".open { " + x.payloadName + " =>");
        printBlockBody(x.body);
        line("}");
        return;
      }
      case StmtKind::MkBox: {
        const auto& x = static_cast<const MkBoxStmt&>(s);
        line("mkbox[" + x.className + "] { (" + x.boxName + ", " + x.permName + ") =>");
        printBlockBody(x.body);
        line("}");
        return;
      }
      case StmtKind::Consume: {
        const auto& x = static_cast<const ConsumeStmt&>(s);
        line("consume(" + x.boxVar->name + ") {");
        printBlockBody(x.body);
        line("}");
        return;
      }
      case StmtKind::SendBox: {
        const auto& x = static_cast<const SendBoxStmt&>(s);
        line(expr(*x.target, 7) + " ! (" + x.boxVar->name + ") {");
        printBlockBody(x.body);
        line("}");
        return;
      }
      case StmtKind::SendImm: {
        const auto& x = static_cast<const SendImmStmt&>(s);
        line(expr(*x.target, 7) + " !! " + expr(*x.value, 0));
        return;
      }
    }
  }

  // minPrec: parenthesize when this expression binds looser than the context.
  std::string expr(const Expr& e, int minPrec) {
    switch (e.kind) {
      case ExprKind::IntLit:
        return std::to_string(static_cast<const IntLit&>(e).value);
      case ExprKind::BoolLit:
        return static_cast<const BoolLit&>(e).value ? "true" : "false";
      case ExprKind::StrLit: {
        std::string out = "\"";
        for (char c : static_cast<const StrLit&>(e).value) {
          switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
          }
        }
        return out + "\"";
      }
      case ExprKind::VarRef:
        return static_cast<const VarRef&>(e).name;
      case ExprKind::This:
        return "this";
      case ExprKind::FieldGet: {
        const auto& x = static_cast<const FieldGet&>(e);
        return expr(*x.base, 7) + "." + x.name;
      }
      case ExprKind::Call: {
        const auto& x = static_cast<const CallExpr&>(e);
        std::string s = x.base ? expr(*x.base, 7) + "." + x.method : x.method;
        s += "(";
        for (size_t i = 0; i < x.args.size(); ++i) {
          if (i) s += ", ";
          s += expr(*x.args[i], 0);
        }
        return s + ")";
      }
      case ExprKind::New:
        return "new " + static_cast<const NewExpr&>(e).className + "()";
      case ExprKind::Spawn:
        return "spawn[" + static_cast<const SpawnExpr&>(e).className + "]";
      case ExprKind::Binary: {
        const auto& x = static_cast<const BinaryExpr&>(e);
        int prec = precedenceOf(x.op);
        bool nonAssoc = prec == 3;
        // left-associative: the lhs may sit at the same level, the rhs may not
        std::string s = expr(*x.lhs, nonAssoc ? prec + 1 : prec) + " " + opText(x.op) + " " +
                        expr(*x.rhs, prec + 1);
        if (prec < minPrec) return "(" + s + ")";
        return s;
      }
      case ExprKind::Unary: {
        const auto& x = static_cast<const UnaryExpr&>(e);
        std::string inner = expr(*x.operand, 6);
        // "!!" would lex as the send operator
        std::string s = (x.op == UnOp::Neg ? "-" : inner[0] == '!' ? "! " : "!") + inner;
        if (6 < minPrec) return "(" + s + ")";
        return s;
      }
    }
    return "";
  }

  std::string out_;
  int indent_ = 0;
};

}  // namespace detail

// Canonical source text; parse(prettyPrint(p)) is structurally equal to p.
inline std::string prettyPrint(const Program& p) {
  detail::Printer pr;
  return pr.print(p);
}

}  // namespace casa

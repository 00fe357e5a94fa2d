#pragma once

#include <functional>

#include "casa/ast.hpp"

namespace casa {

// Pre-order traversal over an expression tree.
inline void walkExpr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  switch (e.kind) {
    case ExprKind::FieldGet:
      walkExpr(*static_cast<const FieldGet&>(e).base, fn);
      return;
    case ExprKind::Call: {
      const auto& c = static_cast<const CallExpr&>(e);
      if (c.base) walkExpr(*c.base, fn);
      for (const auto& a : c.args) walkExpr(*a, fn);
      return;
    }
    case ExprKind::Binary: {
      const auto& b = static_cast<const BinaryExpr&>(e);
      walkExpr(*b.lhs, fn);
      walkExpr(*b.rhs, fn);
      return;
    }
    case ExprKind::Unary:
      walkExpr(*static_cast<const UnaryExpr&>(e).operand, fn);
      return;
    default:
      return;
  }
}

// Pre-order traversal over statements (including nested blocks) and every
// expression they contain.
inline void walkBlock(const Block& b, const std::function<void(const Stmt&)>& sfn,
                      const std::function<void(const Expr&)>& efn) {
  for (const auto& sp : b.stmts) {
    const Stmt& s = *sp;
    if (sfn) sfn(s);
    switch (s.kind) {
      case StmtKind::Local: {
        const auto& x = static_cast<const LocalStmt&>(s);
        if (x.init && efn) walkExpr(*x.init, efn);
        break;
      }
      case StmtKind::Assign: {
        const auto& x = static_cast<const AssignStmt&>(s);
        if (efn) {
          walkExpr(*x.target, efn);
          walkExpr(*x.value, efn);
        }
        break;
      }
      case StmtKind::ExprStmt:
        if (efn) walkExpr(*static_cast<const ExprStatement&>(s).expr, efn);
        break;
      case StmtKind::If: {
        const auto& x = static_cast<const IfStmt&>(s);
        if (efn) walkExpr(*x.cond, efn);
        walkBlock(x.thenBlock, sfn, efn);
        if (x.elseBlock) walkBlock(*x.elseBlock, sfn, efn);
        break;
      }
      case StmtKind::While: {
        const auto& x = static_cast<const WhileStmt&>(s);
        if (efn) walkExpr(*x.cond, efn);
        walkBlock(x.body, sfn, efn);
        break;
      }
      case StmtKind::Return: {
        const auto& x = static_cast<const ReturnStmt&>(s);
        if (x.value && efn) walkExpr(*x.value, efn);
        break;
      }
      case StmtKind::Print:
        if (efn) walkExpr(*static_cast<const PrintStmt&>(s).value, efn);
        break;
      case StmtKind::Open: {
        const auto& x = static_cast<const OpenStmt&>(s);
        if (efn) walkExpr(*x.boxVar, efn);
        walkBlock(x.body, sfn, efn);
        break;
      }
      case StmtKind::MkBox:
        walkBlock(static_cast<const MkBoxStmt&>(s).body, sfn, efn);
        break;
      case StmtKind::Consume: {
        const auto& x = static_cast<const ConsumeStmt&>(s);
        if (efn) walkExpr(*x.boxVar, efn);
        walkBlock(x.body, sfn, efn);
        break;
      }
      case StmtKind::SendBox: {
        const auto& x = static_cast<const SendBoxStmt&>(s);
        if (efn) {
          walkExpr(*x.target, efn);
          walkExpr(*x.boxVar, efn);
        }
        walkBlock(x.body, sfn, efn);
        break;
      }
      case StmtKind::SendImm: {
        const auto& x = static_cast<const SendImmStmt&>(s);
        if (efn) {
          walkExpr(*x.target, efn);
          walkExpr(*x.value, efn);
        }
        break;
      }
    }
  }
}

}  // namespace casa

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "casa/resolve.hpp"
#include "casa/walk.hpp"

namespace casa {

enum class ViolationKind {
  GlobalAccess,
  NonOcapInstantiation,
  NonOcapSuper,
  NonOcapFieldType,
  NonOcapParamEscape,
};

inline const char* violationKindName(ViolationKind k) {
  switch (k) {
    case ViolationKind::GlobalAccess: return "GlobalAccess";
    case ViolationKind::NonOcapInstantiation: return "NonOcapInstantiation";
    case ViolationKind::NonOcapSuper: return "NonOcapSuper";
    case ViolationKind::NonOcapFieldType: return "NonOcapFieldType";
    case ViolationKind::NonOcapParamEscape: return "NonOcapParamEscape";
  }
  return "?";
}

inline const char* violationCode(ViolationKind k) {
  switch (k) {
    case ViolationKind::GlobalAccess: return "OC01";
    case ViolationKind::NonOcapInstantiation: return "OC02";
    case ViolationKind::NonOcapSuper: return "OC03";
    case ViolationKind::NonOcapFieldType: return "OC04";
    case ViolationKind::NonOcapParamEscape: return "OC05";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  Span span;
  std::string detail;
};

struct OcapVerdict {
  std::string className;
  bool conformant = true;
  std::vector<Violation> violations;
};

struct OcapReport {
  std::vector<OcapVerdict> verdicts;  // declaration order
  std::unordered_map<std::string, size_t> index;

  const OcapVerdict* find(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? nullptr : &verdicts[it->second];
  }
};

// Verdict lookup used by the affinity checker to gate mkbox[C].
inline bool isOcap(const std::string& className, const OcapReport& report) {
  const OcapVerdict* v = report.find(className);
  if (!v) throw std::invalid_argument("isOcap: unknown class '" + className + "'");
  return v->conformant;
}

namespace detail {

struct ClassFacts {
  std::vector<std::pair<Span, std::string>> globalAccesses;          // span, detail
  std::vector<std::pair<std::string, Span>> instantiations;          // class, span
  std::vector<std::pair<std::string, Span>> fieldClassTypes;
  std::vector<std::pair<std::string, Span>> paramClassTypes;
};

inline void collectExprFacts(const Expr& e, ClassFacts& facts) {
  walkExpr(e, [&](const Expr& node) {
    if (node.kind == ExprKind::FieldGet) {
      const auto& fg = static_cast<const FieldGet&>(node);
      if (fg.global)
        facts.globalAccesses.push_back(
            {fg.span, "accesses global '" + fg.global->name + "." + fg.name + "'"});
    } else if (node.kind == ExprKind::New) {
      const auto& n = static_cast<const NewExpr&>(node);
      facts.instantiations.push_back({n.className, n.span});
    }
  });
}

}  // namespace detail

// Greatest-fixpoint conformance check: every class starts conformant and is
// demoted until stable. A class is demoted when its body touches a global,
// when it instantiates or extends a non-conformant class, or when a field or
// parameter has a non-conformant class type.
inline OcapReport checkOcap(const Program& prog, const SymbolTable& /*sym*/) {
  std::vector<detail::ClassFacts> facts(prog.classes.size());
  for (size_t i = 0; i < prog.classes.size(); ++i) {
    const ClassDecl& cls = prog.classes[i];
    detail::ClassFacts& f = facts[i];
    for (const auto& fd : cls.fields) {
      if (fd.type.isClass()) f.fieldClassTypes.push_back({fd.type.name, fd.span});
      if (fd.init) detail::collectExprFacts(*fd.init, f);
    }
    for (const auto& m : cls.methods) {
      for (const auto& p : m.params)
        if (p.type.isClass()) f.paramClassTypes.push_back({p.type.name, p.span});
      walkBlock(
          m.body, nullptr, [&](const Expr& e) {
            if (e.kind == ExprKind::FieldGet) {
              const auto& fg = static_cast<const FieldGet&>(e);
              if (fg.global)
                f.globalAccesses.push_back(
                    {fg.span, "accesses global '" + fg.global->name + "." + fg.name + "'"});
            } else if (e.kind == ExprKind::New) {
              const auto& n = static_cast<const NewExpr&>(e);
              f.instantiations.push_back({n.className, n.span});
            }
          });
    }
  }

  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < prog.classes.size(); ++i) index[prog.classes[i].name] = i;

  std::vector<bool> conformant(prog.classes.size(), true);
  auto classConformant = [&](const std::string& name) {
    auto it = index.find(name);
    return it == index.end() ? true : static_cast<bool>(conformant[it->second]);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < prog.classes.size(); ++i) {
      if (!conformant[i]) continue;
      const ClassDecl& cls = prog.classes[i];
      bool bad = !facts[i].globalAccesses.empty();
      if (!bad && !cls.superName.empty()) bad = !classConformant(cls.superName);
      if (!bad)
        for (const auto& [name, span] : facts[i].instantiations)
          if (!classConformant(name)) { bad = true; break; }
      if (!bad)
        for (const auto& [name, span] : facts[i].fieldClassTypes)
          if (!classConformant(name)) { bad = true; break; }
      if (!bad)
        for (const auto& [name, span] : facts[i].paramClassTypes)
          if (!classConformant(name)) { bad = true; break; }
      if (bad) {
        conformant[i] = false;
        changed = true;
      }
    }
  }

  OcapReport report;
  report.verdicts.reserve(prog.classes.size());
  for (size_t i = 0; i < prog.classes.size(); ++i) {
    const ClassDecl& cls = prog.classes[i];
    OcapVerdict v;
    v.className = cls.name;
    v.conformant = conformant[i];
    if (!conformant[i]) {
      // Violations in source order: header, then fields, then method bodies.
      if (!cls.superName.empty() && !classConformant(cls.superName))
        v.violations.push_back({ViolationKind::NonOcapSuper, cls.span,
                                "extends non-conformant class '" + cls.superName + "'"});
      for (const auto& [name, span] : facts[i].fieldClassTypes)
        if (!classConformant(name))
          v.violations.push_back({ViolationKind::NonOcapFieldType, span,
                                  "field of non-conformant class type '" + name + "'"});
      for (const auto& [name, span] : facts[i].paramClassTypes)
        if (!classConformant(name))
          v.violations.push_back({ViolationKind::NonOcapParamEscape, span,
                                  "parameter of non-conformant class type '" + name + "'"});
      for (const auto& [span, detail] : facts[i].globalAccesses)
        v.violations.push_back({ViolationKind::GlobalAccess, span, detail});
      for (const auto& [name, span] : facts[i].instantiations)
        if (!classConformant(name))
          v.violations.push_back({ViolationKind::NonOcapInstantiation, span,
                                  "instantiates non-conformant class '" + name + "'"});
      // order by source position for determinism
      std::stable_sort(v.violations.begin(), v.violations.end(),
                       [](const Violation& a, const Violation& b) {
                         if (a.span.startLine != b.span.startLine)
                           return a.span.startLine < b.span.startLine;
                         return a.span.startCol < b.span.startCol;
                       });
    }
    report.index[v.className] = report.verdicts.size();
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

inline nlohmann::ordered_json spanToJson(const Span& s) {
  nlohmann::ordered_json j;
  j["file"] = s.file;
  j["line"] = s.startLine;
  j["col"] = s.startCol;
  j["endLine"] = s.endLine;
  j["endCol"] = s.endCol;
  return j;
}

inline nlohmann::ordered_json verdictToJson(const OcapVerdict& v) {
  nlohmann::ordered_json j;
  j["class"] = v.className;
  j["ocap"] = v.conformant;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& viol : v.violations) {
    nlohmann::ordered_json vj;
    vj["kind"] = violationKindName(viol.kind);
    vj["code"] = violationCode(viol.kind);
    vj["span"] = spanToJson(viol.span);
    vj["detail"] = viol.detail;
    arr.push_back(std::move(vj));
  }
  j["violations"] = std::move(arr);
  return j;
}

}  // namespace casa

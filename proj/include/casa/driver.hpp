#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "casa/affinity.hpp"
#include "casa/ocap.hpp"
#include "casa/parser.hpp"
#include "casa/resolve.hpp"

namespace casa {

inline std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Result of the full static pipeline: parse -> resolve -> ocap -> affinity.
// The Program owns the AST every later stage points into; keep it alive as
// long as symbols/report are used.
struct CheckResult {
  std::optional<Program> program;
  std::optional<SymbolTable> symbols;
  std::optional<OcapReport> ocapReport;
  std::vector<Diagnostic> diagnostics;

  bool parsed() const { return program.has_value(); }
  bool resolved() const { return symbols.has_value(); }
  bool accepted() const { return parsed() && resolved() && diagnostics.empty(); }
};

inline CheckResult checkSource(std::string_view source, const std::string& file) {
  CheckResult res;
  ParseResult pr = parse(source, file);
  if (!pr.ok()) {
    res.diagnostics = std::move(pr.diagnostics);
    return res;
  }
  res.program = std::move(pr.program);
  ResolveResult rr = resolveNames(*res.program);
  if (!rr.ok()) {
    res.diagnostics = std::move(rr.diagnostics);
    return res;
  }
  res.symbols = std::move(rr.symbols);
  res.ocapReport = checkOcap(*res.program, *res.symbols);
  res.diagnostics = checkAffinity(*res.program, *res.symbols, *res.ocapReport);
  return res;
}

}  // namespace casa

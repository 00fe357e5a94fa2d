#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "casa/driver.hpp"

namespace casa {

struct StatsRow {
  std::string program;
  int locBase = 0;
  int locSafe = 0;
  int additions = 0;
  int deletions = 0;
  double changePercent = 0.0;  // 100*(add+del)/locBase, one decimal
};

namespace diffdetail {

// Lines that count: whitespace-trimmed, blank lines excluded.
inline std::vector<std::string> significantLines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line =
        nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b != std::string::npos) {
      std::size_t e = line.find_last_not_of(" \t\r");
      out.push_back(line.substr(b, e - b + 1));
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

// Classic dynamic-programming LCS length.
inline int lcsLength(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline double round1(double x) { return std::round(x * 10.0) / 10.0; }

inline std::string fmt1(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", x);
  return std::string(buf);
}

inline std::string stemOf(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  const std::string suffix = "_base";
  if (name.size() > suffix.size() &&
      name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
    name = name.substr(0, name.size() - suffix.size());
  return name;
}

}  // namespace diffdetail

// Line-based edit metric between a program and its ported version: the
// minimal edit script over an LCS, with blank lines excluded from both the
// counts and the diff.
inline StatsRow diffStats(const std::string& basePath, const std::string& safePath) {
  auto baseText = readFile(basePath);
  if (!baseText) throw std::runtime_error("cannot read " + basePath);
  auto safeText = readFile(safePath);
  if (!safeText) throw std::runtime_error("cannot read " + safePath);
  std::vector<std::string> base = diffdetail::significantLines(*baseText);
  std::vector<std::string> safe = diffdetail::significantLines(*safeText);
  int lcs = diffdetail::lcsLength(base, safe);
  StatsRow row;
  row.program = diffdetail::stemOf(basePath);
  row.locBase = static_cast<int>(base.size());
  row.locSafe = static_cast<int>(safe.size());
  row.additions = static_cast<int>(safe.size()) - lcs;
  row.deletions = static_cast<int>(base.size()) - lcs;
  row.changePercent =
      row.locBase == 0
          ? 0.0
          : diffdetail::round1(100.0 * (row.additions + row.deletions) / row.locBase);
  return row;
}

inline nlohmann::ordered_json statsRowToJson(const StatsRow& r) {
  nlohmann::ordered_json j;
  j["program"] = r.program;
  j["locBase"] = r.locBase;
  j["locSafe"] = r.locSafe;
  j["additions"] = r.additions;
  j["deletions"] = r.deletions;
  j["changePercent"] = r.changePercent;
  return j;
}

// Aligned text table with the per-pair rows plus an Average row (mean LOC
// rounded to integers, mean of the rounded percentages to one decimal).
inline std::string statsTable(const std::vector<StatsRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Program", "LOC(base)", "LOC(safe)", "Changes", "Changes(%)"});
  for (const auto& r : rows) {
    cells.push_back({r.program, std::to_string(r.locBase), std::to_string(r.locSafe),
                     std::to_string(r.additions) + " add./" + std::to_string(r.deletions) +
                         " del.",
                     diffdetail::fmt1(r.changePercent) + "%"});
  }
  if (!rows.empty()) {
    double locBase = 0, locSafe = 0, pct = 0;
    for (const auto& r : rows) {
      locBase += r.locBase;
      locSafe += r.locSafe;
      pct += r.changePercent;
    }
    double n = static_cast<double>(rows.size());
    cells.push_back({"Average", std::to_string(static_cast<long long>(std::llround(locBase / n))),
                     std::to_string(static_cast<long long>(std::llround(locSafe / n))), "",
                     diffdetail::fmt1(diffdetail::round1(pct / n)) + "%"});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      std::string cell = cells[r][c];
      cell.resize(width[c], ' ');
      out += cell;
      if (c + 1 < cells[r].size()) out += "  ";
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < width.size(); ++c) {
        rule += std::string(width[c], '-');
        if (c + 1 < width.size()) rule += "  ";
      }
      out += rule + '\n';
    }
  }
  return out;
}

}  // namespace casa

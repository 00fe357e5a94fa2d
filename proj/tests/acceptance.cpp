// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion carries its own wall-clock budget.
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "casa/bench.hpp"
#include "casa/diffstats.hpp"
#include "casa/driver.hpp"
#include "casa/vm.hpp"
#include "support.hpp"

using namespace casa;

namespace {

int failures = 0;

void report(int number, const std::string& what, bool ok, double ms, double budgetMs) {
  bool inBudget = ms <= budgetMs;
  std::printf("[%s] criterion %d: %s (%.0f ms, budget %.0f ms)\n",
              ok && inBudget ? "PASS" : "FAIL", number, what.c_str(), ms, budgetMs);
  if (!ok || !inBudget) ++failures;
}

template <typename F>
void criterion(int number, const std::string& what, double budgetMs, F body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    std::printf("  exception: %s\n", e.what());
    ok = false;
  }
  auto t1 = std::chrono::steady_clock::now();
  report(number, what, ok, std::chrono::duration<double, std::milli>(t1 - t0).count(),
         budgetMs);
}

std::string corpusPath(const std::string& rel) { return std::string(CASA_CORPUS_DIR) + "/" + rel; }

std::string slurp(const std::string& rel) {
  auto t = readFile(corpusPath(rel));
  return t.value_or("");
}

std::set<std::string> codesOf(const std::string& rel) {
  CheckResult r = checkSource(slurp(rel), rel);
  std::set<std::string> codes;
  for (const auto& d : r.diagnostics) codes.insert(d.code);
  return codes;
}

struct CmdResult {
  int exitCode = -1;
  std::string out;
};

CmdResult runCli(const std::string& args) {
  std::string cmd = std::string(CASA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  CmdResult r;
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// rooted-graph isomorphism with an id bijection
bool isomorphic(const std::vector<HeapObject>& heap, long long a, long long b,
                std::unordered_map<long long, long long>& bij) {
  auto it = bij.find(a);
  if (it != bij.end()) return it->second == b;
  const HeapObject& oa = heap[static_cast<std::size_t>(a)];
  const HeapObject& ob = heap[static_cast<std::size_t>(b)];
  if (oa.cls != ob.cls || oa.fields.size() != ob.fields.size()) return false;
  bij[a] = b;
  for (std::size_t i = 0; i < oa.fields.size(); ++i) {
    const Value& x = oa.fields[i];
    const Value& y = ob.fields[i];
    if (x.tag != y.tag) return false;
    switch (x.tag) {
      case Value::Tag::Int:
        if (x.i != y.i) return false;
        break;
      case Value::Tag::Bool:
        if (x.b != y.b) return false;
        break;
      case Value::Tag::Str:
        if (*x.s != *y.s) return false;
        break;
      case Value::Tag::Obj:
        if (!isomorphic(heap, x.i, y.i, bij)) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

}  // namespace

int main() {
  // 1. the three illegal constructs are rejected with exactly the expected codes
  criterion(1, "rejection of the illegal listings (AF01 / AF04+OC01 / AF03)", 1000, [] {
    bool ok = codesOf("samples/var_capture.mc") == std::set<std::string>{"AF01"};
    CheckResult leaky = checkSource(slurp("samples/leaky_global.mc"), "leaky_global.mc");
    std::set<std::string> leakyCodes;
    for (const auto& d : leaky.diagnostics) leakyCodes.insert(d.code);
    ok = ok && leakyCodes == std::set<std::string>{"AF04"};
    const OcapVerdict* v = leaky.ocapReport ? leaky.ocapReport->find("LeakyCounter") : nullptr;
    ok = ok && v && !v->conformant && v->violations.size() == 1 &&
         v->violations[0].kind == ViolationKind::GlobalAccess &&
         v->violations[0].span.startLine == 12;  // the Global.cnt store
    ok = ok && codesOf("samples/consume_then_use.mc") == std::set<std::string>{"AF03"};
    return ok;
  });

  // 2. the legal listings check cleanly
  criterion(2, "acceptance of the permission and consume listings", 1000, [] {
    return codesOf("samples/open_perm.mc").empty() &&
           codesOf("samples/consume_chain.mc").empty();
  });

  // 3+7b. transport equivalence with the isolation audit enabled
  criterion(3, "transport equivalence across move/deepcopy/4-node", 30000, [] {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::vector<RunConfig> cfgs(3);
      cfgs[0].transport = Transport::Move;
      cfgs[0].nodes = 1;
      cfgs[1].transport = Transport::DeepCopy;
      cfgs[1].nodes = 1;
      cfgs[2].transport = Transport::Move;
      cfgs[2].nodes = 4;
      for (auto& c : cfgs) {
        c.seed = seed;
        c.audit = true;  // criterion 7: audited cross-node sends stay isolated
      }
      std::array<std::function<BenchResult(const RunConfig&)>, 3> benches = {
          [](const RunConfig& c) { return benchThreadRing(10, 1000, c); },
          [](const RunConfig& c) { return benchChameneos(4, 200, c); },
          [](const RunConfig& c) { return benchBanking(10, 500, c); },
      };
      for (auto& bench : benches) {
        BenchResult a = bench(cfgs[0]);
        BenchResult b = bench(cfgs[1]);
        BenchResult c = bench(cfgs[2]);
        if (a.checkOutcome != "accepted" || !a.postconditionOk) return false;
        if (!(a.trace == b.trace) || !(a.trace == c.trace)) return false;
      }
    }
    return true;
  });

  // 4. benchmark correctness at the stated sizes
  criterion(4, "benchmark correctness (ring mod, meeting sums, conservation)", 5000, [] {
    RunConfig cfg;
    BenchResult ring = benchThreadRing(100, 100000, cfg);
    bool ok = ring.checkOutcome == "accepted" && ring.postconditionOk &&
              ring.messagesProcessed == 100000;
    bool sawFinal = false;
    for (const auto& e : ring.trace)
      if (e.kind == TraceEvent::Kind::Print && e.text == "final:0") sawFinal = true;
    ok = ok && sawFinal;
    for (auto [c, m] : std::vector<std::pair<int, long long>>{{2, 1}, {4, 200}, {10, 2000}}) {
      BenchResult r = benchChameneos(c, m, cfg);
      long long sum = 0;
      for (const auto& e : r.trace)
        if (e.kind == TraceEvent::Kind::Print && e.text.rfind("count:", 0) == 0)
          sum += std::stoll(e.text.substr(6));
      ok = ok && r.postconditionOk && sum == 2 * m;
    }
    for (Transport tr : {Transport::Move, Transport::DeepCopy}) {
      RunConfig bc;
      bc.transport = tr;
      BenchResult r = benchBanking(10, 1000, bc);
      std::string last;
      for (const auto& e : r.trace)
        if (e.kind == TraceEvent::Kind::Print) last = e.text;
      ok = ok && r.postconditionOk && last == "total:10000";
    }
    return ok;
  });

  // 5. AF03-rejected corpus programs trap RT01 when run unchecked
  criterion(5, "dynamic defense: AF03-only rejections trap RT01 unchecked", 5000, [] {
    for (const char* rel : {"samples/consume_then_use.mc", "bench/chameneos_base.mc"}) {
      if (codesOf(rel) != std::set<std::string>{"AF03"}) return false;
      auto pr = parse(slurp(rel), rel);
      if (!pr.ok()) return false;
      auto rr = resolveNames(*pr.program);
      if (!rr.ok()) return false;
      RunOutcome o = run(*pr.program, *rr.symbols, RunConfig{});
      if (!o.trapped || o.trapCode != "RT01") return false;
    }
    return true;
  });

  // 6. greatest-fixpoint conformance equals exhaustive enumeration
  criterion(6, "ocap fixpoint vs brute force on 50 random class graphs", 10000, [] {
    std::mt19937 rng(20260809);
    for (int iter = 0; iter < 50; ++iter) {
      support::GraphModel g = support::randomGraph(rng, 5);
      std::string src = support::graphToSource(g);
      CheckResult cr = checkSource(src, "graph.mc");
      if (!cr.resolved()) return false;
      std::vector<bool> expected = support::bruteForceOcap(g);
      for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (isOcap("K" + std::to_string(i), *cr.ocapReport) != expected[i]) return false;
    }
    return true;
  });

  // 7. deep copies are isomorphic with disjoint ids
  criterion(7, "deep-copy isomorphism on 100 random graphs", 10000, [] {
    auto pr = parse(
        "class NodeA { var v: Int = 0  var s: Str = \"\"  var a: NodeA  var b: NodeA }\n"
        "class NodeB { var v: Int = 0  var a: NodeA  var b: NodeB }\n",
        "g.mc");
    if (!pr.ok()) return false;
    auto rr = resolveNames(*pr.program);
    if (!rr.ok()) return false;
    const ClassDecl* clsA = rr.symbols->classNamed("NodeA");
    const ClassDecl* clsB = rr.symbols->classNamed("NodeB");
    std::mt19937 rng(77);
    for (int iter = 0; iter < 100; ++iter) {
      std::vector<HeapObject> heap;
      int n = std::uniform_int_distribution<int>(1, 200)(rng);
      std::vector<long long> ids;
      for (int i = 0; i < n; ++i) {
        bool a = rng() % 2 == 0;
        HeapObject o;
        o.cls = a ? clsA : clsB;
        if (a)
          o.fields = {Value::ofInt(static_cast<long long>(rng() % 100)),
                      Value::ofStr(std::to_string(rng() % 10)), Value::null(), Value::null()};
        else
          o.fields = {Value::ofInt(static_cast<long long>(rng() % 100)), Value::null(),
                      Value::null()};
        heap.push_back(std::move(o));
        ids.push_back(static_cast<long long>(heap.size()) - 1);
      }
      // random wiring with sharing and cycles
      for (long long id : ids) {
        HeapObject& o = heap[static_cast<std::size_t>(id)];
        for (std::size_t f = (o.cls == clsA ? 2 : 1); f < o.fields.size(); ++f)
          if (rng() % 3 != 0) {
            long long onto = ids[rng() % ids.size()];
            // NodeB.a must point at a NodeA
            if (o.cls == clsB && f == 1) {
              if (heap[static_cast<std::size_t>(onto)].cls != clsA) continue;
            }
            o.fields[f] = Value::obj(onto);
          }
      }
      long long root = ids[static_cast<std::size_t>(rng() % ids.size())];
      std::size_t before = heap.size();
      long long copy = deepCopy(heap, root, 1);
      std::unordered_map<long long, long long> bij;
      if (!isomorphic(heap, root, copy, bij)) return false;
      for (const auto& [oldId, newId] : bij)
        if (newId < static_cast<long long>(before)) return false;  // shared id
    }
    return true;
  });

  // 8. the diff metric formula and the bundled corpus rows
  criterion(8, "stats formula and bundled-pair diff rows", 1000, [] {
    auto mkLines = [](int from, int count, const char* prefix) {
      std::string out;
      for (int i = from; i < from + count; ++i)
        out += std::string(prefix) + std::to_string(i) + "\n";
      return out;
    };
    struct Case {
      int base, add, del;
      double pct;
    } cases[] = {{130, 27, 10, 28.5}, {143, 26, 7, 23.1}, {118, 27, 12, 33.1}};
    for (const auto& c : cases) {
      std::string bp = "/tmp/casa_acc_base.txt";
      std::string sp = "/tmp/casa_acc_safe.txt";
      {
        std::FILE* f = std::fopen(bp.c_str(), "w");
        std::string t = mkLines(0, c.base, "line");
        std::fwrite(t.data(), 1, t.size(), f);
        std::fclose(f);
        f = std::fopen(sp.c_str(), "w");
        t = mkLines(c.del, c.base - c.del, "line") + mkLines(0, c.add, "new");
        std::fwrite(t.data(), 1, t.size(), f);
        std::fclose(f);
      }
      StatsRow row = diffStats(bp, sp);
      if (row.additions != c.add || row.deletions != c.del) return false;
      if (row.changePercent != c.pct) return false;
    }
    // bundled pairs against an independent LCS oracle (recursive, memoized)
    struct Pair {
      const char* base;
      const char* safe;
    } pairs[] = {{"bench/threadring_base.mc", "bench/threadring_safe.mc"},
                 {"bench/chameneos_base.mc", "bench/chameneos_safe.mc"},
                 {"bench/banking_base.mc", "bench/banking_safe.mc"}};
    for (const auto& p : pairs) {
      StatsRow row = diffStats(corpusPath(p.base), corpusPath(p.safe));
      auto baseLines = diffdetail::significantLines(slurp(p.base));
      auto safeLines = diffdetail::significantLines(slurp(p.safe));
      std::vector<std::vector<int>> memo(baseLines.size() + 1,
                                         std::vector<int>(safeLines.size() + 1, -1));
      std::function<int(std::size_t, std::size_t)> lcs = [&](std::size_t i,
                                                             std::size_t j) -> int {
        if (i == baseLines.size() || j == safeLines.size()) return 0;
        int& m = memo[i][j];
        if (m >= 0) return m;
        if (baseLines[i] == safeLines[j]) return m = 1 + lcs(i + 1, j + 1);
        return m = std::max(lcs(i + 1, j), lcs(i, j + 1));
      };
      int l = lcs(0, 0);
      if (row.additions != static_cast<int>(safeLines.size()) - l) return false;
      if (row.deletions != static_cast<int>(baseLines.size()) - l) return false;
    }
    return true;
  });

  // 9. repeated CLI invocations are byte-identical
  criterion(9, "byte-identical JSON across repeated invocations", 60000, [] {
    std::vector<std::string> invocations = {
        "bench threadring -N 10 -R 1000 --seed 0",
        "bench threadring -N 10 -R 1000 --seed 0 --transport deepcopy",
        "bench threadring -N 10 -R 1000 --seed 0 --nodes 4",
        "bench chameneos -C 4 -M 200 --seed 5",
        "bench chameneos -C 4 -M 200 --seed 5 --transport deepcopy",
        "bench chameneos -C 4 -M 200 --seed 5 --nodes 4",
        "bench banking -A 10 -T 500 --seed 9",
        "bench banking -A 10 -T 500 --seed 9 --transport deepcopy",
        "bench banking -A 10 -T 500 --seed 9 --nodes 4",
        "run " + corpusPath("samples/echo.mc") + " --json",
        "run " + corpusPath("samples/consume_then_use.mc") + " --no-check --json",
        "run " + corpusPath("samples/consume_chain.mc") + " --json --transport deepcopy",
    };
    for (const auto& args : invocations) {
      CmdResult a = runCli(args);
      CmdResult b = runCli(args);
      if (a.exitCode != b.exitCode || a.out != b.out) return false;
      if (a.out.empty()) return false;
    }
    return true;
  });

  std::printf(failures == 0 ? "acceptance: all criteria passed\n"
                            : "acceptance: %d criterion(s) failed\n",
              failures);
  return failures == 0 ? 0 : 1;
}

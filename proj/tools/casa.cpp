// casa: check, run, and benchmark MiniCasa programs.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casa/bench.hpp"
#include "casa/diffstats.hpp"
#include "casa/driver.hpp"
#include "casa/vm.hpp"

namespace {

using namespace casa;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTrap = 3;

struct CheckOpts {
  std::vector<std::string> files;
  bool json = false;
  bool explainOcap = false;
  std::string explain;
};

struct RunOpts {
  std::string file;
  std::string transport = "move";
  int nodes = 1;
  std::uint64_t seed = 0;
  long long maxSteps = 10'000'000;
  bool noCheck = false;
  bool json = false;
  bool audit = false;
};

struct BenchOpts {
  std::string name;
  long long ringActors = 10;   // -N
  long long ringHops = 1000;   // -R
  long long creatures = 4;     // -C
  long long meetings = 200;    // -M
  long long accounts = 10;     // -A
  long long transactions = 500;  // -T
  std::string transport = "move";
  int nodes = 1;
  std::uint64_t seed = 0;
  long long maxSteps = 10'000'000;
  bool timing = false;
  bool audit = false;
  bool noCheck = false;
};

struct StatsOpts {
  std::vector<std::string> paths;  // (base, safe)*
  bool json = false;
};

void emitDiagnostics(const std::vector<Diagnostic>& diags, bool json) {
  for (const auto& d : diags) {
    if (json)
      std::cout << diagnosticToJson(d).dump() << "\n";
    else
      std::cerr << formatDiagnostic(d) << "\n";
  }
}

int cmdCheck(const CheckOpts& opts) {
  if (!opts.explain.empty()) {
    auto text = explainCode(opts.explain);
    if (!text) {
      std::cerr << "casa: unknown diagnostic code '" << opts.explain << "'\n";
      return kExitUsage;
    }
    std::cout << *text << "\n";
    if (opts.files.empty()) return kExitOk;
  }
  if (opts.files.empty()) {
    std::cerr << "casa check: no input files\n";
    return kExitUsage;
  }
  bool anyDiag = false;
  for (const auto& path : opts.files) {
    auto text = readFile(path);
    if (!text) {
      std::cerr << "casa: cannot read '" << path << "'\n";
      return kExitUsage;
    }
    CheckResult res = checkSource(*text, path);
    emitDiagnostics(res.diagnostics, opts.json);
    if (!res.diagnostics.empty()) anyDiag = true;
    if (opts.explainOcap && res.ocapReport) {
      for (const auto& v : res.ocapReport->verdicts) {
        if (opts.json) {
          std::cout << verdictToJson(v).dump() << "\n";
        } else {
          std::cerr << path << ": class " << v.className << ": "
                    << (v.conformant ? "ocap" : "not ocap") << "\n";
          for (const auto& viol : v.violations)
            std::cerr << "  " << violationCode(viol.kind) << " " << violationKindName(viol.kind)
                      << " at " << viol.span.str() << ": " << viol.detail << "\n";
        }
      }
    }
  }
  return anyDiag ? kExitCheckFailed : kExitOk;
}

bool parseTransport(const std::string& name, Transport* out) {
  if (name == "move") {
    *out = Transport::Move;
    return true;
  }
  if (name == "deepcopy") {
    *out = Transport::DeepCopy;
    return true;
  }
  return false;
}

int emitOutcome(const RunOutcome& outcome, bool json) {
  for (const auto& ev : outcome.trace) {
    if (json) {
      std::cout << traceEventToJson(ev).dump() << "\n";
      continue;
    }
    switch (ev.kind) {
      case TraceEvent::Kind::Print:
        std::cout << ev.text << "\n";
        break;
      case TraceEvent::Kind::Trap:
        std::cerr << "trap " << ev.code
                  << (ev.span.file.empty() ? "" : " at " + ev.span.str()) << "\n";
        break;
      case TraceEvent::Kind::Halt:
        std::cerr << "halt after " << ev.steps << " steps\n";
        break;
    }
  }
  return outcome.trapped ? kExitTrap : kExitOk;
}

int cmdRun(const RunOpts& opts) {
  RunConfig cfg;
  if (!parseTransport(opts.transport, &cfg.transport)) {
    std::cerr << "casa run: unknown transport '" << opts.transport << "'\n";
    return kExitUsage;
  }
  if (opts.nodes < 1) {
    std::cerr << "casa run: --nodes must be >= 1\n";
    return kExitUsage;
  }
  cfg.nodes = opts.nodes;
  cfg.seed = opts.seed;
  cfg.maxSteps = opts.maxSteps;
  cfg.audit = opts.audit;

  auto text = readFile(opts.file);
  if (!text) {
    std::cerr << "casa: cannot read '" << opts.file << "'\n";
    return kExitUsage;
  }
  ParseResult pr = parse(*text, opts.file);
  if (!pr.ok()) {
    emitDiagnostics(pr.diagnostics, opts.json);
    return kExitCheckFailed;
  }
  ResolveResult rr = resolveNames(*pr.program);
  if (!rr.ok()) {
    emitDiagnostics(rr.diagnostics, opts.json);
    return kExitCheckFailed;
  }
  if (!opts.noCheck) {
    OcapReport report = checkOcap(*pr.program, *rr.symbols);
    std::vector<Diagnostic> diags = checkAffinity(*pr.program, *rr.symbols, report);
    if (!diags.empty()) {
      emitDiagnostics(diags, opts.json);
      return kExitCheckFailed;
    }
  }
  RunOutcome outcome = run(*pr.program, *rr.symbols, cfg);
  return emitOutcome(outcome, opts.json);
}

int cmdBench(const BenchOpts& opts) {
  RunConfig cfg;
  if (!parseTransport(opts.transport, &cfg.transport)) {
    std::cerr << "casa bench: unknown transport '" << opts.transport << "'\n";
    return kExitUsage;
  }
  if (opts.nodes < 1) {
    std::cerr << "casa bench: --nodes must be >= 1\n";
    return kExitUsage;
  }
  cfg.nodes = opts.nodes;
  cfg.seed = opts.seed;
  cfg.maxSteps = opts.maxSteps;
  cfg.audit = opts.audit;

  BenchResult result;
  if (opts.name == "threadring") {
    if (opts.ringActors < 2 || opts.ringHops < 0) {
      std::cerr << "casa bench threadring: need -N >= 2 and -R >= 0\n";
      return kExitUsage;
    }
    result = benchThreadRing(static_cast<int>(opts.ringActors), opts.ringHops, cfg,
                             opts.noCheck);
  } else if (opts.name == "chameneos") {
    if (opts.creatures < 2 || opts.meetings < 0) {
      std::cerr << "casa bench chameneos: need -C >= 2 and -M >= 0\n";
      return kExitUsage;
    }
    result = benchChameneos(static_cast<int>(opts.creatures), opts.meetings, cfg,
                            opts.noCheck);
  } else if (opts.name == "banking") {
    if (opts.accounts < 1 || opts.transactions < 0) {
      std::cerr << "casa bench banking: need -A >= 1 and -T >= 0\n";
      return kExitUsage;
    }
    result = benchBanking(static_cast<int>(opts.accounts), opts.transactions, cfg,
                          opts.noCheck);
  } else {
    std::cerr << "casa bench: unknown benchmark '" << opts.name
              << "' (threadring | chameneos | banking)\n";
    return kExitUsage;
  }
  std::cout << benchResultToJson(result, opts.timing).dump() << "\n";
  if (result.checkOutcome != "accepted") return kExitCheckFailed;
  return result.postconditionOk ? kExitOk : kExitCheckFailed;
}

int cmdStats(const StatsOpts& opts) {
  if (opts.paths.empty() || opts.paths.size() % 2 != 0) {
    std::cerr << "casa stats: expects one or more BASE SAFE file pairs\n";
    return kExitUsage;
  }
  std::vector<StatsRow> rows;
  for (std::size_t i = 0; i + 1 < opts.paths.size(); i += 2) {
    try {
      rows.push_back(diffStats(opts.paths[i], opts.paths[i + 1]));
    } catch (const std::exception& e) {
      std::cerr << "casa stats: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  if (opts.json) {
    for (const auto& r : rows) std::cout << statsRowToJson(r).dump() << "\n";
    double pct = 0;
    for (const auto& r : rows) pct += r.changePercent;
    nlohmann::ordered_json avg;
    avg["program"] = "Average";
    avg["changePercent"] = diffdetail::round1(pct / static_cast<double>(rows.size()));
    std::cout << avg.dump() << "\n";
  } else {
    std::cout << statsTable(rows);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"checker and isolated-actor runtime for the MiniCasa language"};
  app.require_subcommand(1);

  CheckOpts checkOpts;
  CLI::App* check = app.add_subcommand("check", "statically check programs");
  check->add_option("files", checkOpts.files, "MiniCasa source files");
  check->add_flag("--json", checkOpts.json, "machine-readable diagnostics on stdout");
  check->add_flag("--explain-ocap", checkOpts.explainOcap, "emit the per-class capability report");
  check->add_option("--explain", checkOpts.explain, "print the catalog entry for a diagnostic code");

  RunOpts runOpts;
  CLI::App* runCmd = app.add_subcommand("run", "check and execute a program");
  runCmd->add_option("file", runOpts.file, "MiniCasa source file")->required();
  runCmd->add_option("--transport", runOpts.transport, "message transport: move | deepcopy");
  runCmd->add_option("--nodes", runOpts.nodes, "simulated node count (round-robin placement)");
  runCmd->add_option("--seed", runOpts.seed, "scheduler seed");
  runCmd->add_option("--max-steps", runOpts.maxSteps, "delivery limit before halting");
  runCmd->add_flag("--no-check", runOpts.noCheck, "skip the capability and affinity checks");
  runCmd->add_flag("--json", runOpts.json, "emit the trace as JSON lines");
  runCmd->add_flag("--audit", runOpts.audit, "verify heap isolation after every box send");

  BenchOpts benchOpts;
  CLI::App* bench = app.add_subcommand("bench", "run a bundled benchmark");
  bench->add_option("name", benchOpts.name, "threadring | chameneos | banking")->required();
  bench->add_option("-N", benchOpts.ringActors, "threadring: ring size");
  bench->add_option("-R", benchOpts.ringHops, "threadring: hops");
  bench->add_option("-C", benchOpts.creatures, "chameneos: creatures");
  bench->add_option("-M", benchOpts.meetings, "chameneos: meetings");
  bench->add_option("-A", benchOpts.accounts, "banking: accounts");
  bench->add_option("-T", benchOpts.transactions, "banking: transactions");
  bench->add_option("--transport", benchOpts.transport, "message transport: move | deepcopy");
  bench->add_option("--nodes", benchOpts.nodes, "simulated node count");
  bench->add_option("--seed", benchOpts.seed, "scheduler seed");
  bench->add_option("--max-steps", benchOpts.maxSteps, "delivery limit");
  bench->add_flag("--timing", benchOpts.timing, "include wall time in the result");
  bench->add_flag("--no-check", benchOpts.noCheck, "skip the capability and affinity checks");
  bench->add_flag("--audit", benchOpts.audit, "verify heap isolation during the run");

  StatsOpts statsOpts;
  CLI::App* stats = app.add_subcommand("stats", "line-diff metric over (base, safe) pairs");
  stats->add_option("paths", statsOpts.paths, "BASE SAFE file pairs");
  stats->add_flag("--json", statsOpts.json, "machine-readable rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cmdCheck(checkOpts);
    if (runCmd->parsed()) return cmdRun(runOpts);
    if (bench->parsed()) return cmdBench(benchOpts);
    if (stats->parsed()) return cmdStats(statsOpts);
  } catch (const std::exception& e) {
    std::cerr << "casa: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

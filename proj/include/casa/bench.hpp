#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "casa/driver.hpp"
#include "casa/vm.hpp"

namespace casa {

// ── program generators ────────────────────────────────────────────────────
// The benchmark programs are emitted as MiniCasa source for the requested
// sizes. Setup that needs one message per actor is generated as a nested
// send chain: box sends never return, so the rest of the setup lives in the
// continuation.

inline std::string threadRingSource(int n, long long r) {
  std::string src;
  src +=
      "class RingMsg {\n"
      "  var kind: Int = 0\n"
      "  var hops: Int = 0\n"
      "  var id: Int = 0\n"
      "  var next: ActorRef[RingMsg]\n"
      "}\n"
      "actor class RingActor {\n"
      "  var next: ActorRef[RingMsg]\n"
      "  var id: Int = 0\n"
      "  var mkind: Int = 0\n"
      "  var mhops: Int = 0\n"
      "  def receive(msg: Box[RingMsg], p: Perm[msg]): Unit {\n"
      "    msg.open { m =>\n"
      "      mkind = m.kind\n"
      "      mhops = m.hops\n"
      "      if (m.kind == 0) {\n"
      "        next = m.next\n"
      "        id = m.id\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 1) {\n"
      "      if (mhops == 0) {\n"
      "        print(\"final:\" + id)\n"
      "      } else {\n"
      "        msg.open { m2 =>\n"
      "          m2.hops = mhops - 1\n"
      "        }\n"
      "        next ! (msg) { }\n"
      "      }\n"
      "    }\n"
      "  }\n"
      "}\n";
  for (int i = 0; i < n; ++i)
    src += "val r" + std::to_string(i) + ": ActorRef[RingMsg] = spawn[RingActor]\n";
  std::string tail =
      "mkbox[RingMsg] { (t, qt) =>\n"
      "  t.open { m =>\n"
      "    m.kind = 1\n"
      "    m.hops = " + std::to_string(r) + "\n"
      "  }\n"
      "  r0 ! (t) { }\n"
      "}\n";
  // wire the ring from the last actor inward so the token send ends up in the
  // innermost continuation
  for (int i = n - 1; i >= 0; --i) {
    std::string bi = "c" + std::to_string(i);
    std::string qi = "q" + std::to_string(i);
    std::string body;
    body += "mkbox[RingMsg] { (" + bi + ", " + qi + ") =>\n";
    body += "  " + bi + ".open { m =>\n";
    body += "    m.kind = 0\n";
    body += "    m.id = " + std::to_string(i) + "\n";
    body += "    m.next = r" + std::to_string((i + 1) % n) + "\n";
    body += "  }\n";
    body += "  r" + std::to_string(i) + " ! (" + bi + ") {\n";
    std::string indented;
    for (std::size_t pos = 0; pos < tail.size();) {
      std::size_t nl = tail.find('\n', pos);
      indented += "    " + tail.substr(pos, nl - pos) + "\n";
      pos = nl + 1;
    }
    body += indented;
    body += "  }\n";
    body += "}\n";
    tail = std::move(body);
  }
  src += tail;
  return src;
}

inline std::string chameneosSource(int c, long long m) {
  std::string src;
  src +=
      "class CMsg {\n"
      "  var kind: Int = 0\n"
      "  var color: Int = 0\n"
      "  var n: Int = 0\n"
      "  var peer: ActorRef[CMsg]\n"
      "  var me: ActorRef[CMsg]\n"
      "}\n"
      "actor class Broker {\n"
      "  var meetingsLeft: Int = 0\n"
      "  var total: Int = 0\n"
      "  var reports: Int = 0\n"
      "  var sum: Int = 0\n"
      "  var hasWaiting: Int = 0\n"
      "  var waiting: ActorRef[CMsg]\n"
      "  var waitingColor: Int = 0\n"
      "  var mkind: Int = 0\n"
      "  var mcolor: Int = 0\n"
      "  var mn: Int = 0\n"
      "  var mpeer: ActorRef[CMsg]\n"
      "  def receive(msg: Box[CMsg], p: Perm[msg]): Unit {\n"
      "    msg.open { e =>\n"
      "      mkind = e.kind\n"
      "      mcolor = e.color\n"
      "      mn = e.n\n"
      "      mpeer = e.peer\n"
      "    }\n"
      "    if (mkind == 5) {\n"
      "      meetingsLeft = mn\n"
      "      total = mcolor\n"
      "    }\n"
      "    if (mkind == 3) {\n"
      "      sum = sum + mn\n"
      "      reports = reports + 1\n"
      "      print(\"count:\" + mn)\n"
      "      if (reports == total) {\n"
      "        print(\"sum:\" + sum)\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 1) {\n"
      "      if (meetingsLeft == 0) {\n"
      "        mkbox[CMsg] { (sb, sq) =>\n"
      "          sb.open { s => s.kind = 4 }\n"
      "          mpeer ! (sb) { }\n"
      "        }\n"
      "      } else {\n"
      "        if (hasWaiting == 0) {\n"
      "          waiting = mpeer\n"
      "          waitingColor = mcolor\n"
      "          hasWaiting = 1\n"
      "        } else {\n"
      "          meetingsLeft = meetingsLeft - 1\n"
      "          hasWaiting = 0\n"
      "          mkbox[CMsg] { (b1, q1) =>\n"
      "            b1.open { x =>\n"
      "              x.kind = 2\n"
      "              x.color = waitingColor\n"
      "            }\n"
      "            mpeer ! (b1) {\n"
      "              mkbox[CMsg] { (b2, q2) =>\n"
      "                b2.open { y =>\n"
      "                  y.kind = 2\n"
      "                  y.color = mcolor\n"
      "                }\n"
      "                waiting ! (b2) { }\n"
      "              }\n"
      "            }\n"
      "          }\n"
      "        }\n"
      "      }\n"
      "    }\n"
      "  }\n"
      "}\n"
      "actor class Creature {\n"
      "  var broker: ActorRef[CMsg]\n"
      "  var me: ActorRef[CMsg]\n"
      "  var color: Int = 0\n"
      "  var meetings: Int = 0\n"
      "  var mkind: Int = 0\n"
      "  var mcolor: Int = 0\n"
      "  def receive(msg: Box[CMsg], p: Perm[msg]): Unit {\n"
      "    msg.open { e =>\n"
      "      mkind = e.kind\n"
      "      mcolor = e.color\n"
      "      if (e.kind == 0) {\n"
      "        broker = e.peer\n"
      "        me = e.me\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 0) {\n"
      "      color = mcolor\n"
      "      request()\n"
      "    }\n"
      "    if (mkind == 2) {\n"
      "      meetings = meetings + 1\n"
      "      color = complement(color, mcolor)\n"
      "      request()\n"
      "    }\n"
      "    if (mkind == 4) {\n"
      "      mkbox[CMsg] { (rb, rq) =>\n"
      "        rb.open { s =>\n"
      "          s.kind = 3\n"
      "          s.n = meetings\n"
      "        }\n"
      "        broker ! (rb) { }\n"
      "      }\n"
      "    }\n"
      "  }\n"
      "  def request(): Unit {\n"
      "    mkbox[CMsg] { (b, q) =>\n"
      "      b.open { x =>\n"
      "        x.kind = 1\n"
      "        x.color = color\n"
      "        x.peer = me\n"
      "      }\n"
      "      broker ! (b) { }\n"
      "    }\n"
      "  }\n"
      "  def complement(c1: Int, c2: Int): Int {\n"
      "    if (c1 == c2) { return c1 }\n"
      "    if (c1 == 0) {\n"
      "      if (c2 == 1) { return 2 } else { return 1 }\n"
      "    }\n"
      "    if (c1 == 1) {\n"
      "      if (c2 == 0) { return 2 } else { return 0 }\n"
      "    }\n"
      "    if (c2 == 0) { return 1 }\n"
      "    return 0\n"
      "  }\n"
      "}\n";
  src += "val broker: ActorRef[CMsg] = spawn[Broker]\n";
  for (int i = 0; i < c; ++i)
    src += "val c" + std::to_string(i) + ": ActorRef[CMsg] = spawn[Creature]\n";
  std::string tail;
  for (int i = c - 1; i >= 0; --i) {
    std::string b = "z" + std::to_string(i);
    std::string q = "w" + std::to_string(i);
    std::string body;
    body += "mkbox[CMsg] { (" + b + ", " + q + ") =>\n";
    body += "  " + b + ".open { e =>\n";
    body += "    e.kind = 0\n";
    body += "    e.color = " + std::to_string(i % 3) + "\n";
    body += "    e.peer = broker\n";
    body += "    e.me = c" + std::to_string(i) + "\n";
    body += "  }\n";
    body += "  c" + std::to_string(i) + " ! (" + b + ") {\n";
    for (std::size_t pos = 0; pos < tail.size();) {
      std::size_t nl = tail.find('\n', pos);
      body += "    " + tail.substr(pos, nl - pos) + "\n";
      pos = nl + 1;
    }
    body += "  }\n";
    body += "}\n";
    tail = std::move(body);
  }
  std::string init;
  init += "mkbox[CMsg] { (ib, iq) =>\n";
  init += "  ib.open { e =>\n";
  init += "    e.kind = 5\n";
  init += "    e.n = " + std::to_string(m) + "\n";
  init += "    e.color = " + std::to_string(c) + "\n";
  init += "  }\n";
  init += "  broker ! (ib) {\n";
  for (std::size_t pos = 0; pos < tail.size();) {
    std::size_t nl = tail.find('\n', pos);
    init += "    " + tail.substr(pos, nl - pos) + "\n";
    pos = nl + 1;
  }
  init += "  }\n";
  init += "}\n";
  src += init;
  return src;
}

inline std::string bankingSource(int a, long long t, std::uint64_t seed) {
  long long s = static_cast<long long>(seed % 2147483648ull);
  std::string src;
  src +=
      "class BMsg {\n"
      "  var kind: Int = 0\n"
      "  var n: Int = 0\n"
      "  var amt: Int = 0\n"
      "  var src: ActorRef[BMsg]\n"
      "  var dst: ActorRef[BMsg]\n"
      "  var reply: ActorRef[BMsg]\n"
      "}\n"
      "actor class Account {\n"
      "  var balance: Int = 1000\n"
      "  var mkind: Int = 0\n"
      "  var mamt: Int = 0\n"
      "  var mdst: ActorRef[BMsg]\n"
      "  var mreply: ActorRef[BMsg]\n"
      "  def receive(msg: Box[BMsg], p: Perm[msg]): Unit {\n"
      "    msg.open { e =>\n"
      "      mkind = e.kind\n"
      "      mamt = e.amt\n"
      "      mdst = e.dst\n"
      "      mreply = e.reply\n"
      "    }\n"
      "    if (mkind == 2) {\n"
      "      balance = balance - mamt\n"
      "      mkbox[BMsg] { (cb, cq) =>\n"
      "        cb.open { x =>\n"
      "          x.kind = 3\n"
      "          x.amt = mamt\n"
      "          x.reply = mreply\n"
      "        }\n"
      "        mdst ! (cb) { }\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 3) {\n"
      "      balance = balance + mamt\n"
      "      mkbox[BMsg] { (db, dq) =>\n"
      "        db.open { x => x.kind = 4 }\n"
      "        mreply ! (db) { }\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 5) {\n"
      "      mkbox[BMsg] { (rb, rq) =>\n"
      "        rb.open { x =>\n"
      "          x.kind = 6\n"
      "          x.n = balance\n"
      "        }\n"
      "        mreply ! (rb) { }\n"
      "      }\n"
      "    }\n"
      "  }\n"
      "}\n"
      "actor class Teller {\n"
      "  var remaining: Int = 0\n"
      "  var rng: Int = 0\n"
      "  var acctCount: Int = 0\n"
      "  var me: ActorRef[BMsg]\n"
      "  var audits: Int = 0\n"
      "  var sum: Int = 0\n"
      "  var pick: ActorRef[BMsg]\n"
      "  var mkind: Int = 0\n"
      "  var mn: Int = 0\n"
      "  var mamt: Int = 0\n"
      "  var msrc: ActorRef[BMsg]\n"
      "  var mreply: ActorRef[BMsg]\n";
  for (int i = 0; i < a; ++i) src += "  var a" + std::to_string(i) + ": ActorRef[BMsg]\n";
  src +=
      "  def receive(msg: Box[BMsg], p: Perm[msg]): Unit {\n"
      "    msg.open { e =>\n"
      "      mkind = e.kind\n"
      "      mn = e.n\n"
      "      mamt = e.amt\n"
      "      msrc = e.src\n"
      "      mreply = e.reply\n"
      "    }\n"
      "    if (mkind == 0) {\n"
      "      store(mn)\n"
      "    }\n"
      "    if (mkind == 1) {\n"
      "      remaining = mn\n"
      "      rng = mamt\n"
      "      me = mreply\n"
      "      acctCount = " + std::to_string(a) + "\n"
      "      if (remaining == 0) {\n"
      "        audit()\n"
      "      } else {\n"
      "        transact()\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 4) {\n"
      "      remaining = remaining - 1\n"
      "      if (remaining == 0) {\n"
      "        audit()\n"
      "      } else {\n"
      "        transact()\n"
      "      }\n"
      "    }\n"
      "    if (mkind == 6) {\n"
      "      sum = sum + mn\n"
      "      audits = audits + 1\n"
      "      if (audits == acctCount) {\n"
      "        print(\"total:\" + sum)\n"
      "      }\n"
      "    }\n"
      "  }\n"
      "  def store(i: Int): Unit {\n";
  for (int i = 0; i < a; ++i)
    src += "    if (i == " + std::to_string(i) + ") { a" + std::to_string(i) + " = msrc }\n";
  src +=
      "  }\n"
      "  def select(i: Int): Unit {\n";
  for (int i = 0; i < a; ++i)
    src += "    if (i == " + std::to_string(i) + ") { pick = a" + std::to_string(i) + " }\n";
  src +=
      "  }\n"
      "  def transact(): Unit {\n"
      "    rng = (rng * 1103515245 + 12345) % 2147483648\n"
      "    val from: Int = rng % acctCount\n"
      "    rng = (rng * 1103515245 + 12345) % 2147483648\n"
      "    val to: Int = rng % acctCount\n"
      "    rng = (rng * 1103515245 + 12345) % 2147483648\n"
      "    val amount: Int = rng % 100\n"
      "    select(from)\n"
      "    val srcRef: ActorRef[BMsg] = pick\n"
      "    select(to)\n"
      "    val dstRef: ActorRef[BMsg] = pick\n"
      "    mkbox[BMsg] { (tb, tq) =>\n"
      "      tb.open { x =>\n"
      "        x.kind = 2\n"
      "        x.amt = amount\n"
      "        x.dst = dstRef\n"
      "        x.reply = me\n"
      "      }\n"
      "      srcRef ! (tb) { }\n"
      "    }\n"
      "  }\n"
      "  def audit(): Unit {\n";
  std::string tail;
  for (int i = a - 1; i >= 0; --i) {
    std::string b = "u" + std::to_string(i);
    std::string q = "v" + std::to_string(i);
    std::string body;
    body += "mkbox[BMsg] { (" + b + ", " + q + ") =>\n";
    body += "  " + b + ".open { x =>\n";
    body += "    x.kind = 5\n";
    body += "    x.reply = me\n";
    body += "  }\n";
    body += "  a" + std::to_string(i) + " ! (" + b + ") {\n";
    for (std::size_t pos = 0; pos < tail.size();) {
      std::size_t nl = tail.find('\n', pos);
      body += "    " + tail.substr(pos, nl - pos) + "\n";
      pos = nl + 1;
    }
    body += "  }\n";
    body += "}\n";
    tail = std::move(body);
  }
  for (std::size_t pos = 0; pos < tail.size();) {
    std::size_t nl = tail.find('\n', pos);
    src += "    " + tail.substr(pos, nl - pos) + "\n";
    pos = nl + 1;
  }
  src +=
      "  }\n"
      "}\n";
  src += "val teller: ActorRef[BMsg] = spawn[Teller]\n";
  for (int i = 0; i < a; ++i)
    src += "val b" + std::to_string(i) + ": ActorRef[BMsg] = spawn[Account]\n";
  std::string go;
  go += "mkbox[BMsg] { (gb, gq) =>\n";
  go += "  gb.open { e =>\n";
  go += "    e.kind = 1\n";
  go += "    e.n = " + std::to_string(t) + "\n";
  go += "    e.amt = " + std::to_string(s) + "\n";
  go += "    e.reply = teller\n";
  go += "  }\n";
  go += "  teller ! (gb) { }\n";
  go += "}\n";
  std::string chain = std::move(go);
  for (int i = a - 1; i >= 0; --i) {
    std::string b = "s" + std::to_string(i);
    std::string q = "x" + std::to_string(i);
    std::string body;
    body += "mkbox[BMsg] { (" + b + ", " + q + ") =>\n";
    body += "  " + b + ".open { e =>\n";
    body += "    e.kind = 0\n";
    body += "    e.n = " + std::to_string(i) + "\n";
    body += "    e.src = b" + std::to_string(i) + "\n";
    body += "  }\n";
    body += "  teller ! (" + b + ") {\n";
    for (std::size_t pos = 0; pos < chain.size();) {
      std::size_t nl = chain.find('\n', pos);
      body += "    " + chain.substr(pos, nl - pos) + "\n";
      pos = nl + 1;
    }
    body += "  }\n";
    body += "}\n";
    chain = std::move(body);
  }
  src += chain;
  return src;
}

// ── harness ───────────────────────────────────────────────────────────────

inline std::string fnv1a64Hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

struct BenchResult {
  std::string name;
  nlohmann::ordered_json params;
  std::string checkOutcome;  // "accepted" | "rejected"
  std::string traceDigest;
  double wallTimeMs = 0;
  long long messagesProcessed = 0;
  bool postconditionOk = false;
  Trace trace;
};

inline nlohmann::ordered_json benchResultToJson(const BenchResult& r, bool includeTiming = false) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["params"] = r.params;
  j["check"] = r.checkOutcome;
  j["digest"] = r.traceDigest;
  j["messages"] = r.messagesProcessed;
  j["ok"] = r.postconditionOk;
  if (includeTiming) j["wallMs"] = r.wallTimeMs;
  return j;
}

namespace detail {

struct BenchRun {
  bool accepted = false;
  RunOutcome outcome;
  double wallMs = 0;
};

inline BenchRun checkAndRun(const std::string& src, const RunConfig& cfg, bool noCheck) {
  BenchRun br;
  if (noCheck) {
    auto pr = parse(src, "<bench>");
    if (!pr.ok()) return br;
    auto rr = resolveNames(*pr.program);
    if (!rr.ok()) return br;
    br.accepted = true;
    auto t0 = std::chrono::steady_clock::now();
    br.outcome = run(*pr.program, *rr.symbols, cfg);
    auto t1 = std::chrono::steady_clock::now();
    br.wallMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return br;
  }
  CheckResult cr = checkSource(src, "<bench>");
  if (!cr.accepted()) return br;
  br.accepted = true;
  auto t0 = std::chrono::steady_clock::now();
  br.outcome = run(*cr.program, *cr.symbols, cfg);
  auto t1 = std::chrono::steady_clock::now();
  br.wallMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return br;
}

inline std::string lastPrint(const Trace& t) {
  for (auto it = t.rbegin(); it != t.rend(); ++it)
    if (it->kind == TraceEvent::Kind::Print) return it->text;
  return "";
}

}  // namespace detail

inline BenchResult benchThreadRing(int n, long long r, const RunConfig& cfg,
                                   bool noCheck = false) {
  BenchResult res;
  res.name = "threadring";
  res.params["N"] = n;
  res.params["R"] = r;
  res.params["seed"] = cfg.seed;
  if (n < 2 || r < 0) {
    res.checkOutcome = "rejected";
    return res;
  }
  detail::BenchRun br = detail::checkAndRun(threadRingSource(n, r), cfg, noCheck);
  res.checkOutcome = br.accepted ? "accepted" : "rejected";
  if (!br.accepted) return res;
  res.wallTimeMs = br.wallMs;
  res.trace = br.outcome.trace;
  res.traceDigest = fnv1a64Hex(traceToJsonLines(br.outcome.trace));
  // token deliveries: everything except the n ring-setup messages and the
  // delivery that prints the final line
  res.messagesProcessed = br.outcome.stats.deliveries - n - 1;
  std::string expect = "final:" + std::to_string(r % n);
  res.postconditionOk = !br.outcome.trapped && detail::lastPrint(br.outcome.trace) == expect &&
                        res.messagesProcessed == r;
  return res;
}

inline BenchResult benchChameneos(int c, long long m, const RunConfig& cfg,
                                  bool noCheck = false) {
  BenchResult res;
  res.name = "chameneos";
  res.params["C"] = c;
  res.params["M"] = m;
  res.params["seed"] = cfg.seed;
  if (c < 2 || m < 0) {
    res.checkOutcome = "rejected";
    return res;
  }
  detail::BenchRun br = detail::checkAndRun(chameneosSource(c, m), cfg, noCheck);
  res.checkOutcome = br.accepted ? "accepted" : "rejected";
  if (!br.accepted) return res;
  res.wallTimeMs = br.wallMs;
  res.trace = br.outcome.trace;
  res.traceDigest = fnv1a64Hex(traceToJsonLines(br.outcome.trace));
  res.messagesProcessed = br.outcome.stats.deliveries;
  long long countSum = 0;
  int countLines = 0;
  long long reportedSum = -1;
  for (const auto& ev : br.outcome.trace) {
    if (ev.kind != TraceEvent::Kind::Print) continue;
    if (ev.text.rfind("count:", 0) == 0) {
      countSum += std::stoll(ev.text.substr(6));
      ++countLines;
    } else if (ev.text.rfind("sum:", 0) == 0) {
      reportedSum = std::stoll(ev.text.substr(4));
    }
  }
  res.postconditionOk = !br.outcome.trapped && countLines == c && reportedSum == 2 * m &&
                        countSum == reportedSum;
  return res;
}

inline BenchResult benchBanking(int a, long long t, const RunConfig& cfg,
                                bool noCheck = false) {
  BenchResult res;
  res.name = "banking";
  res.params["A"] = a;
  res.params["T"] = t;
  res.params["seed"] = cfg.seed;
  if (a < 1 || t < 0) {
    res.checkOutcome = "rejected";
    return res;
  }
  detail::BenchRun br = detail::checkAndRun(bankingSource(a, t, cfg.seed), cfg, noCheck);
  res.checkOutcome = br.accepted ? "accepted" : "rejected";
  if (!br.accepted) return res;
  res.wallTimeMs = br.wallMs;
  res.trace = br.outcome.trace;
  res.traceDigest = fnv1a64Hex(traceToJsonLines(br.outcome.trace));
  res.messagesProcessed = br.outcome.stats.deliveries;
  std::string expect = "total:" + std::to_string(1000ll * a);
  res.postconditionOk = !br.outcome.trapped && detail::lastPrint(br.outcome.trace) == expect;
  return res;
}

}  // namespace casa

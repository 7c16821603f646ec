#include <memory>
#include <vector>

#include "bench.hpp"
#include "doctest.h"
#include "priosim/cqcn.hpp"
#include "priosim/loss_ledger.hpp"
#include "priosim/tcp.hpp"

using namespace priosim;
using namespace priosim::test;

namespace {

FlowSpec flow_of(uint64_t bytes, FlowId id = 9, uint8_t cls = 1) {
  FlowSpec f;
  f.id = id;
  f.src = 0;
  f.dst = 1;
  f.size_bytes = bytes;
  f.priority_class = cls;
  f.arrival_ns = 0;
  return f;
}

// Sender wired to a live receiver over a fixed one-way delay. The filter
// sees every first-transmission data packet and may swallow it.
struct Loop {
  Bench ctx;
  LossLedger ledger;
  FlowSpec spec;
  TcpConfig cfg;
  std::unique_ptr<TcpSender> snd;
  std::unique_ptr<TcpReceiver> rcv;
  std::function<bool(const Packet&)> drop_first_tx;
  std::vector<Packet> data_log;
  SimTime owd = 50 * kUsec;

  Loop(uint64_t bytes, TcpConfig c) : spec(flow_of(bytes)), cfg(c) {
    snd = std::make_unique<TcpSender>(ctx, spec, cfg, &ledger);
    rcv = std::make_unique<TcpReceiver>(ctx, spec, cfg);
    ctx.on_emit = [this](NodeId, Packet&& p) {
      if (p.kind == PktKind::kData) {
        data_log.push_back(p);
        if (!p.retx && drop_first_tx && drop_first_tx(p)) return;
        ctx.eng.schedule_in(owd, [this, p] { rcv->on_data(p); });
      } else if (p.kind == PktKind::kAck) {
        ctx.eng.schedule_in(owd, [this, p] { snd->on_ack(p); });
      }
    };
  }

  void run(SimTime until) {
    // Late start so send timestamps are nonzero and echoable.
    ctx.eng.schedule_in(kUsec, [this] { snd->start(); });
    ctx.eng.run_until(until);
  }
};

}  // namespace

TEST_CASE("retransmit timer formula") {
  RttEstimator e;
  SUBCASE("smoothed 100us, jitter 25us: the 1ms floor wins") {
    e.srtt = 100 * kUsec;
    e.rttvar = 25 * kUsec;
    e.valid = true;
    CHECK(compute_rto(e, kMsec, 60 * kSec, kMsec) == kMsec);
  }
  SUBCASE("smoothed 4ms, jitter 1ms: 4ms + 4*1ms = 8ms") {
    e.srtt = 4 * kMsec;
    e.rttvar = kMsec;
    e.valid = true;
    CHECK(compute_rto(e, kMsec, 60 * kSec, kMsec) == 8 * kMsec);
  }
  SUBCASE("no samples yet: the configured initial value") {
    CHECK(compute_rto(e, kMsec, 60 * kSec, 3 * kMsec) == 3 * kMsec);
  }
  SUBCASE("ceiling clamps a huge estimate") {
    e.srtt = 100 * kSec;
    e.rttvar = 0;
    e.valid = true;
    CHECK(compute_rto(e, kMsec, 60 * kSec, kMsec) == 60 * kSec);
  }
}

TEST_CASE("rtt estimator: first sample seeds, later samples smooth") {
  RttEstimator e;
  e.sample(200 * kUsec);
  CHECK(e.srtt == 200 * kUsec);
  CHECK(e.rttvar == 100 * kUsec);
  e.sample(100 * kUsec);
  // var = (3*100us + |200-100|us)/4, srtt = (7*200us + 100us)/8
  CHECK(e.rttvar == 100 * kUsec);
  CHECK(e.srtt == 187500);
}

TEST_CASE("timeouts double the timer: 1ms, 2ms, 4ms") {
  Bench ctx;
  LossLedger lg;
  TcpConfig cfg;
  cfg.sack = false;
  cfg.cc = CcAlgo::kNewReno;
  auto spec = flow_of(64 * 1460);
  TcpSender snd(ctx, spec, cfg, &lg);
  std::vector<std::pair<SimTime, Packet>> sent;
  ctx.on_emit = [&](NodeId, Packet&& p) {
    sent.emplace_back(ctx.eng.now(), std::move(p));
  };
  snd.start();  // nothing is ever acked
  ctx.eng.run_until(20 * kMsec);
  std::vector<SimTime> retx_at;
  for (auto& [t, p] : sent)
    if (p.retx && p.seq_start == 0) retx_at.push_back(t);
  REQUIRE(retx_at.size() >= 3);
  CHECK(retx_at[0] == kMsec);
  CHECK(retx_at[1] - retx_at[0] == 2 * kMsec);
  CHECK(retx_at[2] - retx_at[1] == 4 * kMsec);
  CHECK(snd.st().cwnd == doctest::Approx(1460));  // never below one segment
  // First timeout: window was 2 segments, so the restart threshold is the
  // two-segment floor.
  CHECK(snd.st().ssthresh == doctest::Approx(2 * 1460));
}

TEST_CASE("initial window: exactly two segments leave at start") {
  Bench ctx;
  LossLedger lg;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, TcpConfig{}, &lg);
  std::vector<Packet> sent;
  capture_into(ctx, sent);
  snd.start();
  REQUIRE(sent.size() == 2);
  CHECK(sent[0].seq_start == 0);
  CHECK(sent[0].seq_end == 1460);
  CHECK(sent[1].seq_start == 1460);
  CHECK(sent[1].seq_end == 2920);
}

TEST_CASE("ramp-up: each full ack opens the window by one segment") {
  Bench ctx;
  LossLedger lg;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, TcpConfig{}, &lg);
  ctx.on_emit = [](NodeId, Packet&&) {};
  snd.start();
  CHECK(snd.st().cwnd == doctest::Approx(2 * 1460));
  snd.on_ack(make_ack(spec.id, 1460));
  CHECK(snd.st().cwnd == doctest::Approx(3 * 1460));
  snd.on_ack(make_ack(spec.id, 2920));
  CHECK(snd.st().cwnd == doctest::Approx(4 * 1460));
}

TEST_CASE("clean transfer completes without a single retransmission") {
  TcpConfig cfg;  // cubic + selective acks
  Loop loop(64 * 1460, cfg);
  loop.run(kSec);
  REQUIRE(loop.ctx.completed.size() == 1);
  const FlowStats& st = loop.ctx.completed[0].second;
  CHECK(st.retx == 0);
  CHECK(st.spurious_retx == 0);
  CHECK(st.data_pkts_sent == 64);
  CHECK(loop.rcv->cum() == 64 * 1460);
  CHECK(loop.snd->st().protocol_faults == 0);
}

TEST_CASE("classic no-sack recovery state machine") {
  Bench ctx;
  LossLedger lg;
  TcpConfig cfg;
  cfg.cc = CcAlgo::kNewReno;
  cfg.sack = false;
  cfg.mss = 1024;
  cfg.iw_pkts = 64;  // opening window 65536 bytes
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, cfg, &lg);
  std::vector<Packet> sent;
  capture_into(ctx, sent);
  snd.start();
  REQUIRE(sent.size() == 64);
  CHECK(snd.st().cwnd == doctest::Approx(65536));

  auto dup = make_ack(spec.id, 0);
  snd.on_ack(dup);
  snd.on_ack(dup);
  CHECK(snd.st().phase == TcpPhase::kOpen);
  size_t before = sent.size();
  snd.on_ack(dup);  // third duplicate trips recovery

  CHECK(snd.st().phase == TcpPhase::kFastRecovery);
  CHECK(snd.st().ssthresh == doctest::Approx(32768));  // half of 64KB
  // window deflates to half plus three duplicate credits
  CHECK(snd.st().cwnd == doctest::Approx(32768 + 3 * 1024));
  REQUIRE(sent.size() > before);
  CHECK(sent[before].retx);
  CHECK(sent[before].seq_start == 0);

  SUBCASE("each further duplicate inflates the window by one segment") {
    double w = snd.st().cwnd;
    snd.on_ack(dup);
    CHECK(snd.st().cwnd == doctest::Approx(w + 1024));
  }
  SUBCASE("a partial ack exposes and resends the next hole") {
    size_t n = sent.size();
    snd.on_ack(make_ack(spec.id, 1024));
    REQUIRE(sent.size() > n);
    CHECK(sent[n].retx);
    CHECK(sent[n].seq_start == 1024);
    CHECK(snd.st().phase == TcpPhase::kFastRecovery);
  }
  SUBCASE("the full ack ends recovery at the halved operating point") {
    snd.on_ack(make_ack(spec.id, 65536));
    CHECK(snd.st().phase == TcpPhase::kOpen);
    CHECK(snd.st().cwnd == doctest::Approx(32768));
  }
  SUBCASE("a timeout inside recovery collapses to one segment") {
    ctx.eng.run_until(20 * kMsec);  // no acks: the armed timer fires
    CHECK(snd.st().cwnd == doctest::Approx(1024));
    CHECK(snd.st().phase == TcpPhase::kRtoRecovery);
  }
}

TEST_CASE("after a timeout the window replays the stream from the hole") {
  Bench ctx;
  LossLedger lg;
  TcpConfig cfg;
  cfg.sack = false;
  cfg.cc = CcAlgo::kNewReno;
  cfg.mss = 1024;
  cfg.iw_pkts = 4;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, cfg, &lg);
  std::vector<std::pair<SimTime, Packet>> sent;
  ctx.on_emit = [&](NodeId, Packet&& p) {
    sent.emplace_back(ctx.eng.now(), std::move(p));
  };
  snd.start();
  REQUIRE(sent.size() == 4);
  ctx.eng.run_until(2 * kMsec);  // timeout at 1ms
  REQUIRE(sent.size() == 5);  // one-segment window: only the head went out
  CHECK(sent[4].second.retx);
  CHECK(sent[4].second.seq_start == 0);
  CHECK(sent[4].first == kMsec);
  snd.on_ack(make_ack(spec.id, 1024));  // slow-start regrowth: window of two
  REQUIRE(sent.size() == 7);
  CHECK(sent[5].second.seq_start == 1024);
  CHECK(sent[5].second.retx);
  CHECK(sent[6].second.seq_start == 2048);
  CHECK(sent[6].second.retx);
}

TEST_CASE("selective acks pinpoint the hole and fund exactly one resend") {
  TcpConfig cfg;
  cfg.iw_pkts = 5;
  Loop loop(5 * 1460, cfg);
  loop.drop_first_tx = [&](const Packet& p) {
    if (p.seq_start == 1460) {
      loop.ledger.record_drop(p.flow, p.seq_start, p.seq_end);
      return true;
    }
    return false;
  };
  loop.run(kSec);
  REQUIRE(loop.ctx.completed.size() == 1);
  const FlowStats& st = loop.ctx.completed[0].second;
  CHECK(st.retx == 1);
  CHECK(st.spurious_retx == 0);
  CHECK(st.data_pkts_sent == 6);
  int retx_seen = 0;
  for (auto& p : loop.data_log)
    if (p.retx) {
      retx_seen++;
      CHECK(p.seq_start == 1460);
      CHECK(p.seq_end == 2920);
    }
  CHECK(retx_seen == 1);
}

TEST_CASE("a resend the fabric never dropped is charged as spurious") {
  TcpConfig cfg;
  cfg.iw_pkts = 5;
  Loop loop(5 * 1460, cfg);
  // Swallow the segment but record nothing: to the ledger it was a stall.
  loop.drop_first_tx = [](const Packet& p) { return p.seq_start == 1460; };
  loop.run(kSec);
  REQUIRE(loop.ctx.completed.size() == 1);
  CHECK(loop.ctx.completed[0].second.retx == 1);
  CHECK(loop.ctx.completed[0].second.spurious_retx == 1);
}

TEST_CASE("without selective acks the same loss still completes") {
  TcpConfig cfg;
  cfg.sack = false;
  cfg.cc = CcAlgo::kNewReno;
  cfg.iw_pkts = 5;
  Loop loop(5 * 1460, cfg);
  loop.drop_first_tx = [&](const Packet& p) {
    if (p.seq_start == 1460) {
      loop.ledger.record_drop(p.flow, p.seq_start, p.seq_end);
      return true;
    }
    return false;
  };
  loop.run(kSec);
  REQUIRE(loop.ctx.completed.size() == 1);
  CHECK(loop.rcv->cum() == 5 * 1460);
  CHECK(loop.ctx.completed[0].second.retx >= 1);
  CHECK(loop.snd->st().protocol_faults == 0);
}

TEST_CASE("an ack beyond anything sent is a counted protocol fault") {
  Bench ctx;
  LossLedger lg;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, TcpConfig{}, &lg);
  ctx.on_emit = [](NodeId, Packet&&) {};
  snd.start();
  snd.on_ack(make_ack(spec.id, 1 << 30));
  CHECK(snd.st().protocol_faults == 1);
  CHECK_FALSE(snd.done());
  snd.on_ack(make_ack(spec.id, 1460));  // still operating normally
  CHECK(snd.st().highest_acked == 1460);
}

TEST_CASE("retransmitted echoes never feed the rtt estimator") {
  Bench ctx;
  LossLedger lg;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, TcpConfig{}, &lg);
  ctx.on_emit = [](NodeId, Packet&&) {};
  snd.start();
  snd.on_ack(make_ack(spec.id, 1460, {}, /*echo_sent_at=*/500,
                      /*echo_retx=*/true));
  CHECK_FALSE(snd.st().rtt.valid);
  ctx.eng.run_until(300 * kUsec);
  snd.on_ack(make_ack(spec.id, 2920, {}, /*echo_sent_at=*/100 * kUsec));
  CHECK(snd.st().rtt.valid);
  CHECK(snd.st().rtt.srtt == 200 * kUsec);  // arrival 300us minus echo 100us
}

TEST_CASE("cubic curve passes through its own ceiling at t = k") {
  CubicState cu;
  cu.c = 0.4;
  cu.w_max = 100.0;
  cu.k = 2.5;
  CHECK(cu.window_mss(2.5) == 100.0);  // identically, no tolerance
  CHECK(cu.window_mss(3.5) == doctest::Approx(100.4));
  CHECK(cu.window_mss(1.5) == doctest::Approx(99.6));
}

TEST_CASE("loss response: cubic keeps 70%, classic keeps 50%") {
  auto shrink = [](CcAlgo cc) {
    Bench ctx;
    LossLedger lg;
    TcpConfig cfg;
    cfg.cc = cc;
    cfg.iw_pkts = 100;
    auto spec = flow_of(1 << 20);
    TcpSender snd(ctx, spec, cfg, &lg);
    ctx.on_emit = [](NodeId, Packet&&) {};
    snd.start();
    auto dup = make_ack(spec.id, 0);
    snd.on_ack(dup);
    snd.on_ack(dup);
    snd.on_ack(dup);
    REQUIRE(snd.st().phase == TcpPhase::kFastRecovery);
    return snd.st();
  };
  auto cubic = shrink(CcAlgo::kCubic);
  CHECK(cubic.ssthresh == doctest::Approx(0.7 * 100 * 1460));
  CHECK(cubic.cwnd == doctest::Approx(0.7 * 100 * 1460));
  CHECK(cubic.cubic.w_max == doctest::Approx(100.0));
  auto reno = shrink(CcAlgo::kNewReno);
  CHECK(reno.ssthresh == doctest::Approx(0.5 * 100 * 1460));
  CHECK(reno.cwnd == doctest::Approx(0.5 * 100 * 1460));
}

TEST_CASE("delay-target controller holds, fills, and yields exactly") {
  Bench ctx;
  LossLedger lg;
  TcpConfig cfg;
  cfg.flavor = LpFlavor::kLedbat;
  cfg.iw_pkts = 4;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, cfg, &lg);
  ctx.on_emit = [](NodeId, Packet&&) {};
  snd.start();
  const double mss = 1460;
  const SimTime base = kMsec;
  const SimTime target = cfg.ledbat_target;  // 3.2ms
  // First ack pins the base delay; zero queue earns one full segment.
  snd.on_ack(make_ack(spec.id, 1460, {}, 0, false, base));
  CHECK(snd.st().cwnd == doctest::Approx(4 * mss + mss));
  // Queue exactly at target: the window must not move.
  snd.on_ack(make_ack(spec.id, 2920, {}, 0, false, base + target));
  CHECK(snd.st().cwnd == doctest::Approx(5 * mss));
  // Queue at twice the target: one full segment is handed back.
  snd.on_ack(make_ack(spec.id, 4380, {}, 0, false, base + 2 * target));
  CHECK(snd.st().cwnd == doctest::Approx(4 * mss));
}

TEST_CASE("early-backoff controller: add, halve, collapse") {
  Bench ctx;
  LossLedger lg;
  TcpConfig cfg;
  cfg.flavor = LpFlavor::kTcpLp;
  cfg.iw_pkts = 4;
  auto spec = flow_of(1 << 20);
  TcpSender snd(ctx, spec, cfg, &lg);
  ctx.on_emit = [](NodeId, Packet&&) {};
  snd.start();
  // Flat delay: additive increase only.
  snd.on_ack(make_ack(spec.id, 1460, {}, 0, false, 0));
  double w1 = snd.st().cwnd;
  CHECK(w1 == doctest::Approx(4 * 1460.0 + 1460.0 * 1460.0 / (4 * 1460.0)));
  // Delay jumps: smoothed value has not crossed the threshold yet.
  snd.on_ack(make_ack(spec.id, 2920, {}, 0, false, 8 * kMsec));
  double w2 = snd.st().cwnd;
  CHECK(w2 > w1);
  // Second elevated sample pushes the smoothed delay over: halve once.
  snd.on_ack(make_ack(spec.id, 4380, {}, 0, false, 8 * kMsec));
  CHECK(snd.st().cwnd == doctest::Approx(w2 / 2));
  // Another indication inside the inference window: floor of one segment.
  snd.on_ack(make_ack(spec.id, 5840, {}, 0, false, 8 * kMsec));
  CHECK(snd.st().cwnd == doctest::Approx(1460));
}

TEST_CASE("freeze parks the sender bitwise; thaw replays deferred acks") {
  TcpConfig cfg;
  Loop loop(256 * 1460, cfg);
  loop.ctx.eng.schedule_in(kUsec, [&] { loop.snd->start(); });
  loop.ctx.eng.run_until(300 * kUsec);  // mid-transfer, healthy state
  REQUIRE_FALSE(loop.snd->done());

  loop.snd->freeze();
  auto before = loop.snd->st();
  uint64_t board = loop.snd->scoreboard_hash();
  size_t sent_before = loop.data_log.size();

  // Acks keep arriving while frozen; they must change nothing yet.
  loop.ctx.eng.run_until(5 * kMsec);
  loop.snd->on_ack(make_ack(loop.spec.id, before.highest_acked + 1460));
  CHECK(loop.snd->st().cwnd == before.cwnd);
  CHECK(loop.snd->st().ssthresh == before.ssthresh);
  CHECK(loop.snd->st().rtt.srtt == before.rtt.srtt);
  CHECK(loop.snd->st().rtt.rttvar == before.rtt.rttvar);
  CHECK(loop.snd->st().highest_acked == before.highest_acked);
  CHECK(loop.snd->scoreboard_hash() == board);
  CHECK(loop.data_log.size() == sent_before);

  loop.snd->thaw();  // deferred cumulative acks land now, in arrival order
  CHECK(loop.snd->st().highest_acked >= before.highest_acked + 1460);
  CHECK(loop.data_log.size() > sent_before);
  loop.ctx.eng.run_until(kSec);
  REQUIRE(loop.ctx.completed.size() == 1);
  CHECK(loop.ctx.completed[0].second.frozen_sends == 0);
}

TEST_CASE("the retransmit clock stops cold during a freeze") {
  Bench ctx;
  LossLedger lg;
  auto spec = flow_of(64 * 1460);
  TcpSender snd(ctx, spec, TcpConfig{}, &lg);
  std::vector<std::pair<SimTime, Packet>> sent;
  ctx.on_emit = [&](NodeId, Packet&& p) {
    sent.emplace_back(ctx.eng.now(), std::move(p));
  };
  ctx.eng.schedule_in(kUsec, [&] { snd.start(); });
  ctx.eng.run_until(500 * kUsec);
  size_t before = sent.size();
  snd.freeze();  // timer had 501us left until the 1.001ms deadline
  ctx.eng.run_until(2 * kMsec);  // deadline passes silently
  CHECK(sent.size() == before);
  snd.thaw();
  ctx.eng.run_until(10 * kMsec);
  REQUIRE(sent.size() > before);
  // The remaining 501us resume from the thaw instant at t=2ms.
  CHECK(sent[before].first == 2 * kMsec + 501 * kUsec);
  CHECK(sent[before].second.retx);
}

TEST_CASE("receiver reports the freshest out-of-order ranges first") {
  Bench ctx;
  TcpConfig cfg;
  auto spec = flow_of(1 << 20);
  TcpReceiver rcv(ctx, spec, cfg);
  std::vector<Packet> acks;
  capture_into(ctx, acks);
  auto seg = [&](int i) {
    Packet p;
    p.flow = spec.id;
    p.kind = PktKind::kData;
    p.seq_start = uint64_t(i) * 1460;
    p.seq_end = uint64_t(i + 1) * 1460;
    p.size = 1500;
    p.sent_at = 1;
    return p;
  };
  rcv.on_data(seg(0));  // in order
  rcv.on_data(seg(2));
  rcv.on_data(seg(4));
  rcv.on_data(seg(6));
  REQUIRE(acks.size() == 4);
  CHECK(acks[3].ack.cum == 1460);
  REQUIRE(acks[3].ack.nblocks == 3);
  CHECK(acks[3].ack.blocks[0].start == 6 * 1460);  // newest first
  CHECK(acks[3].ack.blocks[1].start == 4 * 1460);
  CHECK(acks[3].ack.blocks[2].start == 2 * 1460);
  // A fourth hole range: the stalest report drops off, the new one leads.
  rcv.on_data(seg(8));
  REQUIRE(acks[4].ack.nblocks == 3);
  CHECK(acks[4].ack.blocks[0].start == 8 * 1460);
  CHECK(acks[4].ack.blocks[1].start == 6 * 1460);
  CHECK(acks[4].ack.blocks[2].start == 4 * 1460);
  // Filling the first hole advances the cumulative edge over ranges 0-2.
  rcv.on_data(seg(1));
  CHECK(acks[5].ack.cum == 3 * 1460);
  CHECK(rcv.delivered_bytes() == 6 * 1460);
}

TEST_CASE("receiver coalesces overlapping and adjacent arrivals") {
  Bench ctx;
  TcpConfig cfg;
  auto spec = flow_of(1 << 20);
  TcpReceiver rcv(ctx, spec, cfg);
  std::vector<Packet> acks;
  capture_into(ctx, acks);
  Packet a;
  a.flow = spec.id;
  a.kind = PktKind::kData;
  a.sent_at = 1;
  a.size = 1500;
  a.seq_start = 1000;
  a.seq_end = 2000;
  rcv.on_data(a);
  a.seq_start = 1500;  // overlaps the tail
  a.seq_end = 2500;
  rcv.on_data(a);
  a.seq_start = 0;  // touches the head, completes the prefix
  a.seq_end = 1000;
  rcv.on_data(a);
  CHECK(rcv.cum() == 2500);
  CHECK(rcv.delivered_bytes() == 2500);
  CHECK(acks.back().ack.nblocks == 0);
}

TEST_CASE("pair controller: probe train, pause, ordered resume") {
  Bench ctx;
  LossLedger lg;
  TcpConfig cfg;  // 64-byte probes every 100us
  auto s1 = flow_of(64 * 1460, 11);
  auto s2 = flow_of(64 * 1460, 12);
  TcpSender snd1(ctx, s1, cfg, &lg);
  TcpSender snd2(ctx, s2, cfg, &lg);
  std::vector<std::pair<SimTime, Packet>> probes;
  ctx.on_emit = [&](NodeId, Packet&& p) {
    if (p.kind == PktKind::kProbe) probes.emplace_back(ctx.eng.now(), p);
  };
  CqcnPairController pc(ctx, 0, 1, cfg);
  pc.add_member(s1.id, &snd1);
  pc.add_member(s2.id, &snd2);
  CHECK(pc.member_count() == 2);
  REQUIRE(probes.size() == 1);  // the first probe leaves immediately
  CHECK(probes[0].second.size == 64);
  CHECK(probes[0].second.priority_class == 0);  // senses the foreground queue
  CHECK(probes[0].second.ecn_capable);

  ctx.eng.run_until(350 * kUsec);
  REQUIRE(probes.size() == 4);  // t = 0, 100us, 200us, 300us
  for (size_t i = 0; i < probes.size(); ++i) {
    CHECK(probes[i].first == SimTime(i) * 100 * kUsec);
    CHECK(probes[i].second.probe_seq == i);
  }

  SUBCASE("a marked echo freezes every member until a clean one returns") {
    pc.on_echo(true);
    CHECK(pc.paused());
    CHECK(snd1.frozen());
    CHECK(snd2.frozen());
    CHECK(pc.stats().pauses == 1);
    pc.on_echo(true);  // still congested: one pause, not two
    CHECK(pc.stats().pauses == 1);
    pc.on_echo(false);
    CHECK_FALSE(pc.paused());
    CHECK_FALSE(snd1.frozen());
    CHECK_FALSE(snd2.frozen());
    CHECK(pc.stats().echoes_marked == 2);
    CHECK(pc.stats().echoes_clear == 1);
  }
  SUBCASE("a flow that joins mid-pause starts out held") {
    pc.on_echo(true);
    auto s3 = flow_of(1460, 13);
    TcpSender snd3(ctx, s3, cfg, &lg);
    pc.add_member(s3.id, &snd3);
    CHECK(snd3.frozen());
    pc.on_echo(false);
    CHECK_FALSE(snd3.frozen());
  }
  SUBCASE("the probe train stops with the last member") {
    pc.remove_member(s1.id);
    size_t n = probes.size();
    ctx.eng.run_until(700 * kUsec);
    CHECK(probes.size() > n);  // one member left: probing continues
    pc.remove_member(s2.id);
    CHECK_FALSE(pc.paused());
    n = probes.size();
    ctx.eng.run_until(2 * kMsec);
    CHECK(probes.size() == n);  // silence after the pair empties
  }
}

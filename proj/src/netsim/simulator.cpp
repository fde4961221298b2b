#include "geost/netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <variant>

#include <fmt/format.h>

#include "geost/hashing.hpp"
#include "geost/recovery.hpp"
#include "geost/state_model.hpp"
#include "geost/transfer.hpp"

namespace geost::netsim {

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::kTraceChange: return "TraceChange";
    case EventKind::kMessageDelivery: return "MessageDelivery";
    case EventKind::kVerificationDone: return "VerificationDone";
    case EventKind::kLogDelivery: return "LogDelivery";
    case EventKind::kTick: return "Tick";
  }
  return "?";
}

std::optional<double> SimReport::finish_ratio() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool any = false;
  for (const auto& r : replicas) {
    if (!r.finish_time_s || r.chunks_delivered == 0) continue;
    lo = std::min(lo, *r.finish_time_s);
    hi = std::max(hi, *r.finish_time_s);
    any = true;
  }
  if (!any || !(lo > 0.0)) return std::nullopt;
  return hi / lo;
}

namespace {

constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

struct LinkWake {
  std::uint64_t version = 0;
};
struct Delivery {
  std::size_t link = 0;
  Message message;
};
struct VerifyDone {
  ChunkIndex index = 0;
  ReplicaId sender;
  bool whole = false;
};
struct LogArrival {
  LogEntry entry;
};
struct TickEvent {
  bool deadline = false;
};

using Payload = std::variant<LinkWake, Delivery, VerifyDone, LogArrival, TickEvent>;

struct Event {
  TimeNs time = 0;
  EventKind kind = EventKind::kTick;
  std::uint64_t seq = 0;
  Payload payload;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

struct Link {
  std::size_t src = 0;
  std::size_t dst = 0;
  const LinkTrace* trace = nullptr;  // nullptr: unlimited rate
  TimeNs delay = 0;
  double slow_factor = 1.0;
  TimeNs slow_from = kNever;

  std::deque<Message> pending;
  std::optional<Message> current;
  std::uint64_t current_bytes = 0;
  double remaining_bits = 0.0;
  double rate = 0.0;  // effective bits/s since the last recompute
};

struct TransferNode {
  ReplicaId id;
  std::unique_ptr<TransferSession> session;
  std::optional<FaultSpec> fault;
  std::size_t link_to_recovery = 0;

  bool active(FaultBehavior b, TimeNs now) const {
    return fault && fault->behavior == b && now >= seconds_to_ns(fault->start_time_s);
  }
};

class Simulation {
 public:
  Simulation(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt), rng_(sc.seed) {}

  SimReport run();

 private:
  void setup();
  void push(TimeNs t, EventKind kind, Payload p);
  void send(std::size_t src, std::size_t dst, Message m, TimeNs now);
  void try_start(std::size_t link, TimeNs now);
  void advance(TimeNs now);
  void recompute(TimeNs now);
  void complete_transmission(std::size_t link, TimeNs now);
  double link_rate(const Link& l, TimeNs now) const;
  TimeNs verify_cost(std::uint64_t bytes) const;
  void schedule_verification(ChunkIndex index, ReplicaId sender, std::uint64_t bytes, bool whole,
                             TimeNs now);

  void handle(Event& ev);
  void on_delivery(Delivery& d, TimeNs now);
  void at_transfer(TransferNode& node, std::size_t from, Message& m, TimeNs now);
  void at_recovery(std::size_t from, Message& m, TimeNs now);
  void handle_outcome(ChunkOutcome o, TimeNs now);
  void send_all(std::vector<Outbound> out, TimeNs now);
  void finish(TimeNs now);
  void log_event(const Event& ev, const std::string& detail);
  SimReport build_report();

  const Scenario& sc_;
  const RunOptions& opt_;
  std::mt19937_64 rng_;

  std::vector<Event> heap_;
  std::uint64_t seq_ = 0;
  std::uint64_t wake_version_ = 0;
  TimeNs scheduled_wake_ = kNever;
  TimeNs last_update_ = 0;

  std::vector<Link> links_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> link_index_;
  std::size_t recovery_ = 0;
  std::map<std::size_t, TransferNode> transfers_;
  std::unique_ptr<RecoverySession> session_;

  std::shared_ptr<const ChunkTable> honest_table_;
  std::optional<StateImage> honest_image_;
  std::vector<LogEntry> delivered_log_;
  std::uint64_t next_log_seq_ = 1;

  TimeNs interval_ = 0;
  TimeNs cpu_busy_until_ = 0;
  TimeNs verify_cpu_ = 0;
  TimeNs whole_span_ = 0;
  bool terminated_ = false;
  TimeNs end_time_ = 0;

  std::map<std::size_t, ReplicaReport> stats_;
  std::uint64_t events_ = 0;
  std::array<std::uint64_t, kEventKinds> by_kind_{};
};

void Simulation::push(TimeNs t, EventKind kind, Payload p) {
  heap_.push_back(Event{t, kind, seq_++, std::move(p)});
  std::push_heap(heap_.begin(), heap_.end(), EventAfter{});
}

void Simulation::setup() {
  sc_.validate();
  recovery_ = sc_.recovery_id().value;
  interval_ = static_cast<TimeNs>(std::llround(sc_.interval_ms * static_cast<double>(kNsPerMs)));

  // State image shared by all honest transfer replicas.
  if (sc_.payload == PayloadMode::kMaterialized) {
    StateImage img;
    img.checkpoint.resize(sc_.state_size_bytes);
    for (std::uint64_t off = 0; off < img.checkpoint.size(); off += 8) {
      const std::uint64_t w = rng_();
      const std::uint64_t n = std::min<std::uint64_t>(8, img.checkpoint.size() - off);
      std::memcpy(img.checkpoint.data() + off, &w, n);
    }
    std::uniform_int_distribution<std::int64_t> delta(-1000, 1000);
    for (std::uint32_t i = 1; i <= sc_.initial_log_entries; ++i) {
      img.log.push_back(LogEntry{i, CounterService::encode(delta(rng_))});
    }
    const Bytes serialized = serialize_state(img);
    honest_table_ = std::make_shared<const ChunkTable>(chunkify(serialized, sc_.n_chunks));
    honest_image_ = std::move(img);
    // Start one entry before the end of L so the overlap path is exercised.
    next_log_seq_ = sc_.initial_log_entries > 0 ? sc_.initial_log_entries : 1;
  } else {
    honest_table_ = std::make_shared<const ChunkTable>(
        ChunkTable::synthetic(sc_.state_size_bytes, sc_.n_chunks, rng_()));
  }

  auto add_link = [&](std::size_t src, std::size_t dst) {
    Link l;
    l.src = src;
    l.dst = dst;
    l.trace = sc_.find_trace(sc_.replicas[src].region, sc_.replicas[dst].region);
    const double delay_ms = l.trace ? l.trace->propagation_delay_ms : sc_.default_delay_ms;
    l.delay = static_cast<TimeNs>(std::llround(delay_ms * static_cast<double>(kNsPerMs)));
    link_index_[{src, dst}] = links_.size();
    links_.push_back(std::move(l));
    return links_.size() - 1;
  };

  for (ReplicaId t : sc_.transfer_ids()) {
    TransferNode node;
    node.id = t;
    node.session = std::make_unique<TransferSession>(t, honest_table_, sc_.mode);
    for (const auto& fs : sc_.faults) {
      if (fs.replica == sc_.replicas[t.value].region) node.fault = fs;
    }
    node.link_to_recovery = add_link(t.value, recovery_);
    add_link(recovery_, t.value);
    if (node.fault && node.fault->behavior == FaultBehavior::kSlow) {
      links_[node.link_to_recovery].slow_factor = node.fault->slow_factor;
      links_[node.link_to_recovery].slow_from = seconds_to_ns(node.fault->start_time_s);
    }
    ReplicaReport rep;
    rep.region = sc_.replicas[t.value].region;
    rep.name = sc_.replicas[t.value].name;
    rep.faulty = node.fault.has_value();
    stats_[t.value] = rep;
    transfers_.emplace(t.value, std::move(node));
  }

  RecoveryConfig cfg;
  cfg.n_chunks = sc_.n_chunks;
  cfg.interval = interval_;
  cfg.f = sc_.f;
  cfg.mode = sc_.mode;
  cfg.verification = sc_.verification;
  cfg.transfer_replicas = sc_.transfer_ids();
  cfg.policy = sc_.allocation_policy();
  cfg.smoothing_window = sc_.smoothing_window;
  cfg.deadline = seconds_to_ns(sc_.deadline_s);
  session_ = std::make_unique<RecoverySession>(std::move(cfg));
}

double Simulation::link_rate(const Link& l, TimeNs now) const {
  if (l.trace == nullptr) return kInfiniteRate;
  double r = l.trace->bits_per_second_at(now);
  if (now >= l.slow_from) r /= l.slow_factor;
  return r;
}

void Simulation::advance(TimeNs now) {
  const TimeNs dt = now - last_update_;
  if (dt > 0) {
    for (auto& l : links_) {
      if (!l.current || !std::isfinite(l.rate)) continue;
      l.remaining_bits = std::max(0.0, l.remaining_bits - l.rate * static_cast<double>(dt) / 1e9);
    }
  }
  last_update_ = now;
}

void Simulation::recompute(TimeNs now) {
  bool changed = true;
  while (changed && !terminated_) {
    changed = false;
    for (auto& l : links_) {
      if (l.current) l.rate = link_rate(l, now);
    }
    if (sc_.ingress_cap_mbps) {
      const double cap = *sc_.ingress_cap_mbps * 1e6;
      double sum = 0.0;
      for (const auto& l : links_) {
        if (l.current && l.dst == recovery_) sum += l.rate;
      }
      if (sum > cap) {
        for (auto& l : links_) {
          if (!l.current || l.dst != recovery_) continue;
          l.rate = std::isfinite(sum) ? l.rate * cap / sum : (std::isfinite(l.rate) ? 0.0 : cap);
        }
      }
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
      auto& l = links_[i];
      if (!l.current) continue;
      const double eps = 1e-6 + 1e-12 * static_cast<double>(l.current_bytes) * 8.0;
      if (l.remaining_bits <= eps || std::isinf(l.rate)) {
        complete_transmission(i, now);
        changed = true;
      }
    }
  }
  if (terminated_) return;

  TimeNs next = kNever;
  for (const auto& l : links_) {
    if (!l.current) continue;
    if (l.rate > 0.0) {
      const double need = std::ceil(l.remaining_bits / l.rate * 1e9);
      next = std::min(next, now + std::max<TimeNs>(1, static_cast<TimeNs>(need)));
    }
    if (l.trace) next = std::min(next, l.trace->next_change_after(now));
    if (l.slow_from > now) next = std::min(next, l.slow_from);
  }
  if (next != kNever && next != scheduled_wake_) {
    scheduled_wake_ = next;
    push(next, EventKind::kTraceChange, LinkWake{++wake_version_});
  }
}

void Simulation::complete_transmission(std::size_t li, TimeNs now) {
  Link& l = links_[li];
  Message m = std::move(*l.current);
  l.current.reset();
  l.remaining_bits = 0.0;
  l.rate = 0.0;
  if (std::holds_alternative<ChunkResponse>(m)) {
    auto it = transfers_.find(l.src);
    if (it != transfers_.end()) it->second.session->transmission_complete();
  }
  push(now + l.delay, EventKind::kMessageDelivery, Delivery{li, std::move(m)});
  try_start(li, now);
}

void Simulation::try_start(std::size_t li, TimeNs now) {
  Link& l = links_[li];
  if (l.current) return;
  std::optional<Message> m;
  if (!l.pending.empty()) {
    m = std::move(l.pending.front());
    l.pending.pop_front();
  } else if (l.dst == recovery_) {
    auto& node = transfers_.at(l.src);
    if (!node.active(FaultBehavior::kSilent, now)) {
      if (auto chunk = node.session->next_chunk()) {
        if (node.active(FaultBehavior::kFakeChunks, now)) {
          chunk->data = chunk->data.tampered(rng_() | 1);
        }
        m = std::move(*chunk);
      }
    }
  }
  if (!m) return;
  l.current_bytes = wire_size(*m);
  l.remaining_bits = static_cast<double>(l.current_bytes) * 8.0;
  if (l.dst == recovery_) {
    auto& st = stats_.at(l.src);
    st.bytes_sent += l.current_bytes;
    if (std::holds_alternative<ChunkResponse>(*m)) ++st.chunks_sent;
  }
  l.current = std::move(m);
  l.rate = link_rate(l, now);
}

void Simulation::send(std::size_t src, std::size_t dst, Message m, TimeNs now) {
  const std::size_t li = link_index_.at({src, dst});
  links_[li].pending.push_back(std::move(m));
  try_start(li, now);
}

void Simulation::send_all(std::vector<Outbound> out, TimeNs now) {
  for (auto& o : out) send(recovery_, o.to.value, std::move(o.message), now);
}

TimeNs Simulation::verify_cost(std::uint64_t bytes) const {
  const double ms = sc_.verify_ms_per_mib * static_cast<double>(bytes) / static_cast<double>(kMiB) +
                    sc_.verify_overhead_ms;
  return static_cast<TimeNs>(std::llround(ms * static_cast<double>(kNsPerMs)));
}

void Simulation::schedule_verification(ChunkIndex index, ReplicaId sender, std::uint64_t bytes,
                                       bool whole, TimeNs now) {
  const TimeNs cost = verify_cost(bytes);
  const TimeNs begin = std::max(now, cpu_busy_until_);
  cpu_busy_until_ = begin + cost;
  verify_cpu_ += cost;
  if (whole) whole_span_ += cost;
  push(cpu_busy_until_, EventKind::kVerificationDone, VerifyDone{index, sender, whole});
}

void Simulation::log_event(const Event& ev, const std::string& detail) {
  if (opt_.event_log == nullptr) return;
  *opt_.event_log << ev.time << ' ' << event_name(ev.kind) << ' ' << detail << '\n';
}

void Simulation::handle_outcome(ChunkOutcome o, TimeNs now) {
  if (o == ChunkOutcome::kCompleted || o == ChunkOutcome::kFailed) finish(now);
}

void Simulation::at_transfer(TransferNode& node, std::size_t from, Message& m, TimeNs now) {
  if (node.active(FaultBehavior::kSilent, now)) return;
  const ReplicaId requester(static_cast<std::uint32_t>(from));
  if (auto* hr = std::get_if<HashRequest>(&m)) {
    auto resp = node.session->on_hash_request(requester, *hr);
    if (!resp) return;
    if (node.active(FaultBehavior::kFakeHashes, now)) {
      auto hashes = *decode_hashes(resp->wire);
      if (rng_() % 5 == 0 && hashes.size() > 1) {
        hashes.pop_back();  // malformed: wrong length
      } else {
        for (auto& h : hashes) {
          for (auto& b : h.digest) b = static_cast<std::uint8_t>(rng_());
        }
      }
      resp->wire = encode_hashes(hashes);
    }
    links_[node.link_to_recovery].pending.push_back(std::move(*resp));
    try_start(node.link_to_recovery, now);
  } else if (auto* cr = std::get_if<ChunkRequest>(&m)) {
    node.session->on_chunk_request(requester, *cr);
    try_start(node.link_to_recovery, now);
  }
}

void Simulation::at_recovery(std::size_t from, Message& m, TimeNs now) {
  const ReplicaId sender(static_cast<std::uint32_t>(from));
  auto& st = stats_.at(from);
  st.bytes_delivered += wire_size(m);
  if (auto* hr = std::get_if<HashResponse>(&m)) {
    const HashOutcome h = session_->on_hashes(sender, hr->wire);
    if (h.completed || session_->phase() == Phase::kDone || session_->phase() == Phase::kFailed) {
      finish(now);
    }
  } else if (auto* cr = std::get_if<ChunkResponse>(&m)) {
    ++st.chunks_delivered;
    st.finish_time_s = to_seconds(now);
    const std::uint64_t bytes = cr->data.size();
    const ChunkIndex index = cr->index;
    const ChunkOutcome o = session_->receive_chunk(sender, index, std::move(cr->data), now);
    if (o == ChunkOutcome::kPending) {
      schedule_verification(index, sender, bytes, false, now);
    } else if (o == ChunkOutcome::kAwaitingWholeVerification) {
      schedule_verification(0, sender, honest_table_->total_bytes(), true, now);
    } else {
      handle_outcome(o, now);
    }
  }
}

void Simulation::on_delivery(Delivery& d, TimeNs now) {
  const Link& l = links_[d.link];
  if (l.dst == recovery_) {
    at_recovery(l.src, d.message, now);
  } else {
    at_transfer(transfers_.at(l.dst), l.src, d.message, now);
  }
}

void Simulation::handle(Event& ev) {
  const TimeNs now = ev.time;
  switch (ev.kind) {
    case EventKind::kTraceChange:
      log_event(ev, "links");
      break;
    case EventKind::kMessageDelivery: {
      auto& d = std::get<Delivery>(ev.payload);
      const Link& l = links_[d.link];
      std::string detail = fmt::format("{}->{} {}", sc_.replicas[l.src].region,
                                       sc_.replicas[l.dst].region, message_name(d.message));
      if (const auto* c = std::get_if<ChunkResponse>(&d.message)) {
        detail += fmt::format(" chunk={} bytes={}", c->index, c->data.size());
      } else if (const auto* r = std::get_if<ChunkRequest>(&d.message)) {
        detail += fmt::format(" round={} count={}", r->round, r->indices.size());
      }
      log_event(ev, detail);
      on_delivery(d, now);
      break;
    }
    case EventKind::kVerificationDone: {
      const auto& v = std::get<VerifyDone>(ev.payload);
      ChunkOutcome o;
      if (v.whole) {
        o = session_->finish_whole_state_verification();
        log_event(ev, fmt::format("whole-state {}", outcome_name(o)));
      } else {
        o = session_->verify_candidate(v.index, v.sender);
        log_event(ev, fmt::format("chunk={} from={} {}", v.index, sc_.replicas[v.sender.value].region,
                                  outcome_name(o)));
      }
      handle_outcome(o, now);
      break;
    }
    case EventKind::kLogDelivery: {
      auto& e = std::get<LogArrival>(ev.payload).entry;
      log_event(ev, fmt::format("seq={}", e.sequence_number));
      delivered_log_.push_back(e);
      session_->on_log_entry(std::move(e));
      std::uniform_int_distribution<std::int64_t> delta(-1000, 1000);
      push(now + static_cast<TimeNs>(std::llround(sc_.log_interval_ms * static_cast<double>(kNsPerMs))),
           EventKind::kLogDelivery, LogArrival{LogEntry{next_log_seq_++, CounterService::encode(delta(rng_))}});
      break;
    }
    case EventKind::kTick: {
      const bool deadline = std::get<TickEvent>(ev.payload).deadline;
      if (deadline) {
        session_->check_deadline(now);
        log_event(ev, fmt::format("deadline {}", phase_name(session_->phase())));
      } else {
        auto out = session_->on_tick(now);
        log_event(ev, fmt::format("round={} requests={}", session_->round(), out.size()));
        send_all(std::move(out), now);
        push(now + interval_, EventKind::kTick, TickEvent{false});
      }
      if (session_->phase() == Phase::kTimedOut) finish(now);
      break;
    }
  }
}

void Simulation::finish(TimeNs now) {
  if (terminated_) return;
  terminated_ = true;
  end_time_ = now;
}

SimReport Simulation::run() {
  setup();
  push(seconds_to_ns(sc_.deadline_s), EventKind::kTick, TickEvent{true});
  push(interval_, EventKind::kTick, TickEvent{false});
  if (sc_.payload == PayloadMode::kMaterialized && sc_.log_interval_ms > 0.0) {
    std::uniform_int_distribution<std::int64_t> delta(-1000, 1000);
    push(static_cast<TimeNs>(std::llround(sc_.log_interval_ms * static_cast<double>(kNsPerMs))),
         EventKind::kLogDelivery, LogArrival{LogEntry{next_log_seq_++, CounterService::encode(delta(rng_))}});
  }
  send_all(session_->start(0), 0);
  recompute(0);

  while (!terminated_ && !heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), EventAfter{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    if (ev.kind == EventKind::kTraceChange &&
        std::get<LinkWake>(ev.payload).version != wake_version_) {
      continue;  // superseded
    }
    if (ev.kind == EventKind::kTraceChange) scheduled_wake_ = kNever;
    advance(ev.time);
    ++events_;
    ++by_kind_[static_cast<std::size_t>(ev.kind)];
    handle(ev);
    if (!terminated_) recompute(ev.time);
    end_time_ = ev.time;
  }
  return build_report();
}

SimReport Simulation::build_report() {
  SimReport rep;
  rep.scenario = sc_.name;
  rep.policy = policy_name(sc_.policy);
  rep.mode = sc_.mode == FaultModel::kBft ? "bft" : "cft";
  rep.verification = sc_.verification == VerificationMode::kPerChunk ? "per-chunk" : "whole-state";
  rep.outcome = session_->phase();
  rep.total_time_s = to_seconds(end_time_);
  rep.rounds = session_->round();
  rep.rejected = session_->rejected_count();
  rep.verify_cpu_s = to_seconds(verify_cpu_);
  rep.whole_verify_span_s = to_seconds(whole_span_);
  rep.events = events_;
  rep.events_by_kind = by_kind_;
  rep.coverage_checks = session_->coverage_checks();
  rep.coverage_violations = session_->coverage_violations();
  rep.requested_verified_index = session_->requested_verified_index();
  rep.buffered_log_entries = static_cast<std::uint32_t>(session_->buffered_log().size());

  // Bytes still on the wire or propagating at termination.
  for (const auto& l : links_) {
    if (l.dst == recovery_ && l.current) stats_.at(l.src).bytes_in_flight += l.current_bytes;
  }
  for (const auto& ev : heap_) {
    if (const auto* d = std::get_if<Delivery>(&ev.payload)) {
      const Link& l = links_[d->link];
      if (l.dst == recovery_) stats_.at(l.src).bytes_in_flight += wire_size(d->message);
    }
  }

  if (session_->phase() == Phase::kDone) {
    for (ChunkIndex i = 0; i < sc_.n_chunks; ++i) {
      ++stats_.at(session_->sender_of(i).value).chunks_admitted;
    }
    if (session_->state_digest()) rep.state_digest = to_hex(*session_->state_digest());
    if (honest_image_) {
      const ServiceState honest = apply_recovered(*honest_image_, delivered_log_);
      rep.state_matches = session_->recovered_image() == honest_image_ &&
                          session_->service_state() == std::optional<ServiceState>(honest);
    } else {
      rep.state_matches = session_->state_digest() == std::optional<Digest>(whole_state_digest(*honest_table_));
    }
  }
  for (auto& [id, st] : stats_) rep.replicas.push_back(st);
  return rep;
}

}  // namespace

SimReport run(const Scenario& scenario, const RunOptions& options) {
  Simulation sim(scenario, options);
  return sim.run();
}

void write_report_csv(std::ostream& out, const std::vector<SimReport>& reports) {
  out << "scenario,policy,mode,verification,outcome,total_time_s,rounds,rejected,verify_cpu_s,"
         "replica,name,faulty,bytes_sent,bytes_delivered,chunks_sent,chunks_delivered,"
         "chunks_admitted,finish_time_s\n";
  for (const auto& r : reports) {
    for (const auto& p : r.replicas) {
      out << fmt::format("{},{},{},{},{},{:.9f},{},{},{:.9f},{},{},{},{},{},{},{},{},{}\n", r.scenario,
                         r.policy, r.mode, r.verification, phase_name(r.outcome), r.total_time_s,
                         r.rounds, r.rejected, r.verify_cpu_s, p.region, p.name, p.faulty ? 1 : 0,
                         p.bytes_sent, p.bytes_delivered, p.chunks_sent, p.chunks_delivered,
                         p.chunks_admitted,
                         p.finish_time_s ? fmt::format("{:.9f}", *p.finish_time_s) : std::string());
    }
  }
}

void write_report_summary(std::ostream& out, const SimReport& r) {
  out << fmt::format("scenario      {}\n", r.scenario);
  out << fmt::format("policy        {} ({}, {})\n", r.policy, r.mode, r.verification);
  out << fmt::format("outcome       {}\n", phase_name(r.outcome));
  out << fmt::format("total time    {:.3f} s\n", r.total_time_s);
  out << fmt::format("rounds        {}\n", r.rounds);
  out << fmt::format("rejected      {}\n", r.rejected);
  out << fmt::format("verify cpu    {:.3f} s\n", r.verify_cpu_s);
  if (auto ratio = r.finish_ratio()) out << fmt::format("finish ratio  {:.3f}\n", *ratio);
  if (r.state_matches) out << fmt::format("state match   {}\n", *r.state_matches ? "yes" : "NO");
  out << fmt::format("events        {}\n", r.events);
  out << fmt::format("{:<16} {:>8} {:>14} {:>9} {:>9} {:>11}\n", "replica", "faulty", "bytes",
                     "chunks", "admitted", "finish_s");
  for (const auto& p : r.replicas) {
    out << fmt::format("{:<16} {:>8} {:>14} {:>9} {:>9} {:>11}\n", p.region, p.faulty ? "yes" : "no",
                       p.bytes_delivered, p.chunks_delivered, p.chunks_admitted,
                       p.finish_time_s ? fmt::format("{:.3f}", *p.finish_time_s) : "-");
  }
}

}  // namespace geost::netsim

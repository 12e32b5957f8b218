#include "sim/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cinttypes>
#include <cstdio>

#include "phy/sinr.hpp"
#include "sensing/sensing.hpp"

namespace uwbsim {

namespace {

const char* kDropSleeping = "sleeping";
const char* kDropTxBusy = "tx-busy";
const char* kDropReceiverBusy = "receiver-busy";
const char* kDropBelowSensitivity = "below-sensitivity";

}  // namespace

std::vector<FlowMetrics> Simulation::flow_shells(const Scenario& s) {
    std::vector<FlowMetrics> shells;
    for (const auto& f : s.flows) {
        FlowMetrics m;
        m.name = f.name;
        m.src = f.src;
        m.dst = f.dst;
        m.payload_bits_hint = f.payload_bits;
        shells.push_back(std::move(m));
    }
    if (s.sensing) {
        for (const auto& n : s.nodes) {
            if (n.role != NodeRole::Sensor) continue;
            FlowMetrics m;
            m.name = "report-" + std::to_string(n.id);
            m.src = n.id;
            m.dst = s.sensing->sink;
            m.payload_bits_hint = s.sensing->report_payload_bits;
            shells.push_back(std::move(m));
        }
    }
    return shells;
}

Simulation::Simulation(const Scenario& scenario, std::uint64_t seed)
    : scenario_(scenario),
      seed_(seed),
      kernel_([this](const Event& ev) { dispatch(ev); }),
      streams_(seed),
      accumulator_(flow_shells(scenario)) {
    const std::size_t n = scenario_.nodes.size();
    nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        NodeRuntime& rt = nodes_[i];
        rt.spec = &scenario_.nodes[i];
        rt.ths = scenario_.ths_for(*rt.spec);
        rt.sensitivity_w = scenario_.sensitivity_w(*rt.spec);
        rt.profile = &scenario_.profiles.at(rt.spec->power_profile);
        rt.ctx_by_slot.resize(scenario_.radio.slots_per_frame);
        index_of_[rt.spec->id] = static_cast<std::uint32_t>(i);
    }

    spread_ticks_ = ticks_from_seconds(scenario_.channel.delay_spread_s).value_or(0);

    power_matrix_.assign(n * n, 0.0);
    delay_matrix_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        LinkBudget budget{scenario_.node_tx_power_w(scenario_.nodes[i]), scenario_.radio.tx_gain,
                          scenario_.radio.rx_gain};
        for (std::size_t k = 0; k < n; ++k) {
            if (i == k) continue;
            const double d = distance(scenario_.nodes[i].position, scenario_.nodes[k].position);
            const double p = received_power(budget, d, scenario_.channel);
            power_matrix_[i * n + k] = p;
            delay_matrix_[i * n + k] = propagation_delay(d, scenario_.channel);
            if (p >= scenario_.effective_floor_w) {
                nodes_[i].fanout.push_back(
                    {static_cast<std::uint32_t>(k), delay_matrix_[i * n + k], p});
            }
        }
    }

    std::uint32_t flow_id = 0;
    for (const auto& f : scenario_.flows) {
        flow_rt_.push_back({&f, f.start});
        ++flow_id;
    }
    if (scenario_.sensing) {
        for (std::size_t i = 0; i < n; ++i) {
            if (scenario_.nodes[i].role == NodeRole::Sensor) {
                report_flow_of_[static_cast<std::uint32_t>(i)] = flow_id++;
            }
        }
    }
}

void Simulation::emit(const TraceRecord& r) {
    accumulator_.emit(r);
    for (TraceSink* s : extra_sinks_) s->emit(r);
}

void Simulation::dispatch(const Event& ev) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, EvPulseTx>) {
                handle_pulse_tx(p.tx, p.bit);
            } else if constexpr (std::is_same_v<T, EvPulseArrive>) {
                handle_pulse_arrive(p.tx, p.rx, p.bit);
            } else if constexpr (std::is_same_v<T, EvWindowClose>) {
                handle_window_close(p.rx, p.slot);
            } else if constexpr (std::is_same_v<T, EvMacHandoff>) {
                handle_mac_handoff(p.tx, p.rx);
            } else if constexpr (std::is_same_v<T, EvTxComplete>) {
                handle_tx_complete(p.node, p.tx);
            } else if constexpr (std::is_same_v<T, EvAckTimeout>) {
                handle_ack_timeout(p.node, p.token);
            } else if constexpr (std::is_same_v<T, EvMacFrame>) {
                handle_mac_frame(p.node);
            } else if constexpr (std::is_same_v<T, EvTraffic>) {
                handle_traffic(p.flow);
            } else if constexpr (std::is_same_v<T, EvPhenomenonEmit>) {
                handle_phenomenon_emit();
            } else if constexpr (std::is_same_v<T, EvSenseArrive>) {
                handle_sense_sample(p.node, p.intensity);
            } else if constexpr (std::is_same_v<T, EvSensorSample>) {
                handle_self_sample(p.node);
            } else if constexpr (std::is_same_v<T, EvAction>) {
                p.fn();
            }
        },
        ev.payload);
}

MetricsSummary Simulation::run() {
    for (std::size_t i = 0; i < flow_rt_.size(); ++i) {
        if (flow_rt_[i].spec->start < flow_rt_[i].spec->stop) {
            kernel_.schedule(flow_rt_[i].spec->start, static_cast<std::uint32_t>(i), Layer::App,
                             EvTraffic{static_cast<std::uint32_t>(i)});
        }
    }
    if (scenario_.sensing) {
        if (scenario_.sensing->phenomenon) {
            kernel_.schedule(scenario_.sensing->phenomenon->start, 0, Layer::Sensor,
                             EvPhenomenonEmit{0});
        }
        // Self-sampling only matters when a quiet sensor can still fire.
        if (scenario_.sensing->device.false_positive_rate > 0.0) {
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                if (scenario_.nodes[i].role == NodeRole::Sensor) {
                    kernel_.schedule(0, static_cast<std::uint32_t>(i), Layer::Sensor,
                                     EvSensorSample{static_cast<std::uint32_t>(i)});
                }
            }
        }
    }

    const RunStats stats = kernel_.run_until(scenario_.duration);
    finalize_run();
    return accumulator_.finalize(seed_, scenario_.duration, stats.dispatched);
}

// ---------------------------------------------------------------------------
// PHY: transmission
// ---------------------------------------------------------------------------

void Simulation::start_transmission(std::uint32_t node, std::uint32_t pdu_idx,
                                    std::uint32_t attempt) {
    NodeRuntime& rt = nodes_[node];
    assert(!rt.transmitting);
    const MacPdu& pdu = pdus_[pdu_idx];
    const SimTime now = kernel_.now();

    Transmission tx;
    tx.pdu = pdu_idx;
    tx.attempt = attempt;
    tx.src = node;
    tx.first_pulse = wait_for_slot(now, rt.ths);
    if (pdu.kind == PduKind::Data && scenario_.mac.forced_data_loss_p > 0.0) {
        tx.forced_loss = streams_.uniform(rt.spec->id, StreamPurpose::MacForcedLoss) <
                         scenario_.mac.forced_data_loss_p;
    }
    const std::uint32_t tx_id = static_cast<std::uint32_t>(txs_.size());
    txs_.push_back(tx);

    rt.transmitting = true;
    rt.tx_first_pulse = tx.first_pulse;
    rt.tx_end = tx.first_pulse + transmission_duration(pdu.l_pdu, rt.ths);
    rt.current_tx = tx_id;

    // Transmitting claims our hop slot; any reception in progress there ends.
    auto& own_ctx = rt.ctx_by_slot[rt.ths.hop_slot];
    if (own_ctx) {
        const MacPdu& dropped = pdus_[txs_[own_ctx->tx].pdu];
        TraceRecord r;
        r.time = now;
        r.node = rt.spec->id;
        r.layer = Layer::Phy;
        r.event = TraceEvent::PhyDrop;
        r.packet = dropped.uid;
        r.src = dropped.src;
        r.dst = dropped.dst;
        r.slot = rt.ths.hop_slot;
        r.detail = kDropTxBusy;
        emit(r);
        own_ctx.reset();
    }

    TraceRecord r;
    r.time = now;
    r.node = rt.spec->id;
    r.layer = Layer::Mac;
    r.event = TraceEvent::MacTxStart;
    r.packet = pdu.uid;
    r.src = pdu.src;
    r.dst = pdu.dst;
    r.seq = pdu.seq;
    r.attempt = attempt;
    r.flow = pdu.flow;
    r.value = pdu.l_pdu;
    if (pdu.kind == PduKind::Ack) r.detail = "ack";
    emit(r);

    kernel_.schedule(tx.first_pulse, node, Layer::Phy, EvPulseTx{tx_id, 0});
}

void Simulation::handle_pulse_tx(std::uint32_t tx_id, std::uint32_t bit) {
    const Transmission& tx = txs_[tx_id];
    NodeRuntime& rt = nodes_[tx.src];
    const MacPdu& pdu = pdus_[tx.pdu];
    const SimTime now = kernel_.now();

    rt.ledger.account_pulse_tx();
    rt.ledger.account_state(SlotState::Transmit, rt.ths.slot_ticks);
    for (const LinkOut& link : rt.fanout) {
        kernel_.schedule(now + link.delay, link.dst, Layer::Phy,
                         EvPulseArrive{tx_id, link.dst, bit});
    }
    if (bit + 1 < pdu.l_pdu) {
        kernel_.schedule(now + rt.ths.frame_ticks, tx.src, Layer::Phy,
                         EvPulseTx{tx_id, bit + 1});
    } else {
        kernel_.schedule(rt.tx_end, tx.src, Layer::Mac, EvTxComplete{tx.src, tx_id});
    }
}

// ---------------------------------------------------------------------------
// PHY: reception
// ---------------------------------------------------------------------------

void Simulation::handle_pulse_arrive(std::uint32_t tx_id, std::uint32_t rx, std::uint32_t bit) {
    NodeRuntime& rt = nodes_[rx];
    const Transmission& tx = txs_[tx_id];
    const MacPdu& pdu = pdus_[tx.pdu];
    const SimTime now = kernel_.now();
    const double power = power_matrix_[tx.src * nodes_.size() + rx];

    auto drop_record = [&](const char* reason) {
        TraceRecord r;
        r.time = now;
        r.node = rt.spec->id;
        r.layer = Layer::Phy;
        r.event = TraceEvent::PhyDrop;
        r.packet = pdu.uid;
        r.src = pdu.src;
        r.dst = pdu.dst;
        r.attempt = tx.attempt;
        r.detail = reason;
        emit(r);
    };

    if (rt.dozing) {
        if (bit == 0) drop_record(kDropSleeping);
        return;
    }
    if (rt.transmitting && now >= rt.tx_first_pulse && now < rt.tx_end &&
        current_slot(now, rt.ths) == rt.ths.hop_slot) {
        // Half duplex per slot: our hop slot is occupied by our own pulses.
        if (bit == 0) drop_record(kDropTxBusy);
        return;
    }

    const std::int64_t s = absolute_slot(now, rt.ths);
    auto& window = rt.windows[s];
    if (window.empty()) {
        kernel_.schedule(slot_start(s + 1, rt.ths) + spread_ticks_, rx, Layer::Phy,
                         EvWindowClose{rx, s});
    }
    window.push_back({now, power, pdu.src, tx_id, bit, true});

    // A pulse landing within the delay spread of an earlier slot also blurs
    // into that slot's window as interference.
    if (spread_ticks_ > 0) {
        for (std::int64_t k = s - 1; k >= 0; --k) {
            if (slot_start(k + 1, rt.ths) + spread_ticks_ <= now) break;
            auto it = rt.windows.find(k);
            if (it != rt.windows.end()) {
                it->second.push_back({now, power, pdu.src, tx_id, bit, false});
            }
        }
    }

    if (bit != 0) return;

    if (power < rt.sensitivity_w) {
        drop_record(kDropBelowSensitivity);
        return;
    }
    const std::uint32_t rel = static_cast<std::uint32_t>(
        s % static_cast<std::int64_t>(rt.ths.slots_per_frame));
    auto& ctx = rt.ctx_by_slot[rel];
    if (!ctx) {
        ReceptionContext c;
        c.tx = tx_id;
        c.source = pdu.src;
        c.expected_slot = rel;
        c.first_abs_slot = s;
        c.lock_tick = now;
        c.first_arrival = now;
        c.lock_power_w = power;
        c.l_pdu = pdu.l_pdu;
        ctx = c;
        TraceRecord r;
        r.time = now;
        r.node = rt.spec->id;
        r.layer = Layer::Phy;
        r.event = TraceEvent::PhyLock;
        r.packet = pdu.uid;
        r.src = pdu.src;
        r.dst = pdu.dst;
        r.slot = rel;
        r.value = dbm_from_watts(power);
        emit(r);
        return;
    }
    if (ctx->lock_tick == now && ctx->bits_elapsed == 0 && ctx->tx != tx_id &&
        (power > ctx->lock_power_w ||
         (power == ctx->lock_power_w && pdu.src < pdus_[txs_[ctx->tx].pdu].src))) {
        // Two packets opened on the same tick; the stronger one keeps the
        // lock, ties resolved toward the lower source id.
        const MacPdu& losing = pdus_[txs_[ctx->tx].pdu];
        TraceRecord r;
        r.time = now;
        r.node = rt.spec->id;
        r.layer = Layer::Phy;
        r.event = TraceEvent::PhyDrop;
        r.packet = losing.uid;
        r.src = losing.src;
        r.dst = losing.dst;
        r.slot = rel;
        r.detail = kDropReceiverBusy;
        emit(r);
        ReceptionContext c;
        c.tx = tx_id;
        c.source = pdu.src;
        c.expected_slot = rel;
        c.first_abs_slot = s;
        c.lock_tick = now;
        c.first_arrival = now;
        c.lock_power_w = power;
        c.l_pdu = pdu.l_pdu;
        ctx = c;
        TraceRecord lock;
        lock.time = now;
        lock.node = rt.spec->id;
        lock.layer = Layer::Phy;
        lock.event = TraceEvent::PhyLock;
        lock.packet = pdu.uid;
        lock.src = pdu.src;
        lock.dst = pdu.dst;
        lock.slot = rel;
        lock.value = dbm_from_watts(power);
        emit(lock);
        return;
    }
    drop_record(kDropReceiverBusy);
}

void Simulation::handle_window_close(std::uint32_t rx, std::int64_t slot) {
    NodeRuntime& rt = nodes_[rx];
    auto wit = rt.windows.find(slot);
    if (wit == rt.windows.end()) return;
    std::vector<PulseArrival> members = std::move(wit->second);
    rt.windows.erase(wit);

    const std::uint32_t rel = static_cast<std::uint32_t>(
        slot % static_cast<std::int64_t>(rt.ths.slots_per_frame));
    ReceptionContext* ctx = nullptr;
    auto& slot_ctx = rt.ctx_by_slot[rel];
    if (slot_ctx && slot_ctx->first_abs_slot +
                            static_cast<std::int64_t>(slot_ctx->bits_elapsed) *
                                rt.ths.slots_per_frame ==
                        slot) {
        ctx = &*slot_ctx;
    }

    const WindowOutcome outcome = decide_window(
        ctx, std::span<const PulseArrival>(members), rt.sensitivity_w,
        scenario_.channel.noise_figure, noise_power(scenario_.channel), scenario_.ber_table,
        [&] { return streams_.uniform(rt.spec->id, StreamPurpose::PhyBitError); });

    if (outcome.collision) {
        TraceRecord r;
        r.time = kernel_.now();
        r.node = rt.spec->id;
        r.layer = Layer::Phy;
        r.event = TraceEvent::PhyCollision;
        r.slot = rel;
        r.value = static_cast<double>(members.size());
        emit(r);
    }

    // The pulse-transmit path already claims our own transmit slot; a window
    // that closed on that very slot must not claim it twice.
    const bool own_tx_slot = rt.transmitting && rel == rt.ths.hop_slot &&
                             slot_start(slot, rt.ths) >= rt.tx_first_pulse &&
                             slot_start(slot, rt.ths) < rt.tx_end;
    if (!own_tx_slot) {
        rt.ledger.account_state(outcome.state, rt.ths.slot_ticks);
    }
    if (outcome.decoded_bit) rt.ledger.account_pulse_rx();

    if (ctx && ctx->bits_elapsed == ctx->l_pdu) {
        const Transmission& tx = txs_[ctx->tx];
        const MacPdu& pdu = pdus_[tx.pdu];
        const PacketOutcome po = finalize_packet(*ctx, tx.forced_loss);
        if (po == PacketOutcome::Delivered) {
            TraceRecord r;
            r.time = kernel_.now();
            r.node = rt.spec->id;
            r.layer = Layer::Phy;
            r.event = TraceEvent::PhyDeliver;
            r.packet = pdu.uid;
            r.src = pdu.src;
            r.dst = pdu.dst;
            r.slot = rel;
            emit(r);
            const SimTime handoff =
                ctx->first_arrival + static_cast<SimTime>(ctx->l_pdu) * rt.ths.frame_ticks;
            kernel_.schedule(handoff, rx, Layer::Mac, EvMacHandoff{ctx->tx, rx});
        } else {
            TraceRecord r;
            r.time = kernel_.now();
            r.node = rt.spec->id;
            r.layer = Layer::Phy;
            r.event = TraceEvent::PhyDrop;
            r.packet = pdu.uid;
            r.src = pdu.src;
            r.dst = pdu.dst;
            r.slot = rel;
            r.attempt = tx.attempt;
            r.value = ctx->bit_errors;
            r.detail = to_string(po);
            emit(r);
        }
        slot_ctx.reset();
        update_doze(rx);
    }
}

// ---------------------------------------------------------------------------
// MAC
// ---------------------------------------------------------------------------

std::uint32_t Simulation::make_pdu(std::uint32_t src_id, std::uint32_t dst_id, PduKind kind,
                                   std::uint32_t flow, std::uint32_t payload_bits) {
    MacPdu pdu;
    pdu.uid = pdus_.size();
    pdu.src = src_id;
    pdu.dst = dst_id;
    pdu.kind = kind;
    pdu.flow = flow;
    pdu.payload_bits = payload_bits;
    pdu.l_pdu = scenario_.mac.header_bits + payload_bits;
    pdu.enqueue_tick = kernel_.now();
    if (kind == PduKind::Data) {
        pdu.seq = next_seq_[{src_id, dst_id}]++;
    }
    pdus_.push_back(pdu);
    return static_cast<std::uint32_t>(pdus_.size() - 1);
}

const std::vector<std::uint32_t>& Simulation::allocation_of(std::uint32_t node) const {
    static const std::vector<std::uint32_t> kNone;
    auto it = scenario_.mac.allocation.find(nodes_[node].spec->id);
    return it == scenario_.mac.allocation.end() ? kNone : it->second;
}

void Simulation::mac_request_send(std::uint32_t node, std::uint32_t pdu_idx) {
    NodeRuntime& rt = nodes_[node];
    const MacPdu& pdu = pdus_[pdu_idx];
    wake(node);
    if (pdu.kind == PduKind::Data) {
        TraceRecord r;
        r.time = kernel_.now();
        r.node = rt.spec->id;
        r.layer = Layer::Mac;
        r.event = TraceEvent::MacEnqueue;
        r.packet = pdu.uid;
        r.src = pdu.src;
        r.dst = pdu.dst;
        r.seq = pdu.seq;
        r.flow = pdu.flow;
        r.value = pdu.payload_bits;
        emit(r);
        rt.mac.queue.push_back(pdu_idx);
    } else {
        // Acknowledgments do not wait behind queued data.
        rt.mac.queue.push_front(pdu_idx);
    }
    mac_try_start(node);
}

void Simulation::mac_try_start(std::uint32_t node) {
    NodeRuntime& rt = nodes_[node];
    if (rt.mac.queue.empty() && !(is_reliable(scenario_.mac.protocol) && rt.mac.outstanding)) {
        return;
    }
    if (is_slotted(scenario_.mac.protocol)) {
        if (!rt.mac.queue.empty() || rt.mac.outstanding) mac_ensure_frame_event(node);
        return;
    }
    if (rt.transmitting || rt.mac.queue.empty()) return;
    const std::uint32_t front = rt.mac.queue.front();
    if (pdus_[front].kind == PduKind::Data && is_reliable(scenario_.mac.protocol)) {
        if (rt.mac.outstanding) return;  // one outstanding PDU at a time
        rt.mac.queue.pop_front();
        rt.mac.outstanding = front;
        rt.mac.attempts = 1;
        start_transmission(node, front, 1);
        return;
    }
    rt.mac.queue.pop_front();
    start_transmission(node, front, 1);
}

void Simulation::mac_ensure_frame_event(std::uint32_t node) {
    NodeRuntime& rt = nodes_[node];
    if (rt.mac.frame_event_pending) return;
    const auto& frames = allocation_of(node);
    if (frames.empty()) return;  // validated away for senders
    const SimTime due = next_allocated_frame_start(kernel_.now(), scenario_.mac, frames);
    rt.mac.frame_event_pending = true;
    kernel_.schedule(due, node, Layer::Mac, EvMacFrame{node});
}

void Simulation::handle_mac_frame(std::uint32_t node) {
    NodeRuntime& rt = nodes_[node];
    rt.mac.frame_event_pending = false;
    if (rt.transmitting) {
        // Still draining the previous packet; take the next allocated frame.
        mac_ensure_frame_event(node);
        return;
    }
    if (is_reliable(scenario_.mac.protocol) && rt.mac.outstanding) {
        // No acknowledgment before this frame front: retransmit here, or give
        // up once the retry budget is spent.
        if (rt.mac.attempts >= scenario_.mac.retransmission_limit + 1) {
            const MacPdu& pdu = pdus_[*rt.mac.outstanding];
            TraceRecord r;
            r.time = kernel_.now();
            r.node = rt.spec->id;
            r.layer = Layer::Mac;
            r.event = TraceEvent::MacFailure;
            r.packet = pdu.uid;
            r.src = pdu.src;
            r.dst = pdu.dst;
            r.seq = pdu.seq;
            r.attempt = rt.mac.attempts;
            r.flow = pdu.flow;
            emit(r);
            rt.mac.outstanding.reset();
            rt.mac.attempts = 0;
        } else {
            rt.mac.attempts += 1;
            start_transmission(node, *rt.mac.outstanding, rt.mac.attempts);
            return;
        }
    }
    if (!rt.mac.queue.empty()) {
        const std::uint32_t front = rt.mac.queue.front();
        rt.mac.queue.pop_front();
        if (pdus_[front].kind == PduKind::Data && is_reliable(scenario_.mac.protocol)) {
            rt.mac.outstanding = front;
            rt.mac.attempts = 1;
        }
        start_transmission(node, front, 1);
        return;
    }
    update_doze(node);
}

void Simulation::handle_tx_complete(std::uint32_t node, std::uint32_t tx_id) {
    NodeRuntime& rt = nodes_[node];
    rt.transmitting = false;
    const MacPdu& pdu = pdus_[txs_[tx_id].pdu];
    if (pdu.kind == PduKind::Data && is_reliable(scenario_.mac.protocol) && rt.mac.outstanding &&
        *rt.mac.outstanding == txs_[tx_id].pdu) {
        if (is_slotted(scenario_.mac.protocol)) {
            mac_ensure_frame_event(node);
        } else {
            const std::uint64_t token = ++timeout_counter_;
            rt.mac.timeout_token = token;
            kernel_.schedule(kernel_.now() + scenario_.mac.retransmission_delay, node, Layer::Mac,
                             EvAckTimeout{node, token});
        }
    }
    mac_try_start(node);
    update_doze(node);
}

void Simulation::handle_ack_timeout(std::uint32_t node, std::uint64_t token) {
    NodeRuntime& rt = nodes_[node];
    if (token != rt.mac.timeout_token || !rt.mac.outstanding) return;
    if (rt.transmitting) {
        // Busy sending something else (an ACK of our own); check again as
        // soon as the radio frees up.
        const std::uint64_t fresh = ++timeout_counter_;
        rt.mac.timeout_token = fresh;
        kernel_.schedule(std::max(kernel_.now(), rt.tx_end), node, Layer::Mac,
                         EvAckTimeout{node, fresh});
        return;
    }
    if (rt.mac.attempts >= scenario_.mac.retransmission_limit + 1) {
        const MacPdu& pdu = pdus_[*rt.mac.outstanding];
        TraceRecord r;
        r.time = kernel_.now();
        r.node = rt.spec->id;
        r.layer = Layer::Mac;
        r.event = TraceEvent::MacFailure;
        r.packet = pdu.uid;
        r.src = pdu.src;
        r.dst = pdu.dst;
        r.seq = pdu.seq;
        r.attempt = rt.mac.attempts;
        r.flow = pdu.flow;
        emit(r);
        rt.mac.outstanding.reset();
        rt.mac.attempts = 0;
        mac_try_start(node);
        update_doze(node);
        return;
    }
    rt.mac.attempts += 1;
    start_transmission(node, *rt.mac.outstanding, rt.mac.attempts);
}

void Simulation::mac_send_ack(std::uint32_t node, const MacPdu& data) {
    const std::uint32_t ack = make_pdu(nodes_[node].spec->id, data.src, PduKind::Ack, data.flow, 0);
    pdus_[ack].seq = data.seq;
    mac_request_send(node, ack);
}

void Simulation::handle_mac_handoff(std::uint32_t tx_id, std::uint32_t rx) {
    NodeRuntime& rt = nodes_[rx];
    const Transmission& tx = txs_[tx_id];
    const MacPdu pdu = pdus_[tx.pdu];  // by value: mac_send_ack may grow pdus_
    const SimTime now = kernel_.now();

    TraceRecord r;
    r.time = now;
    r.node = rt.spec->id;
    r.layer = Layer::Mac;
    r.packet = pdu.uid;
    r.src = pdu.src;
    r.dst = pdu.dst;
    r.seq = pdu.seq;
    r.attempt = tx.attempt;
    r.flow = pdu.flow;

    if (pdu.dst != rt.spec->id) {
        // No routing: packets for other nodes end here.
        r.event = TraceEvent::MacForeign;
        emit(r);
        return;
    }

    if (pdu.kind == PduKind::Data) {
        auto it = rt.mac.last_seq_from.find(pdu.src);
        const bool duplicate =
            it != rt.mac.last_seq_from.end() && it->second == static_cast<std::int64_t>(pdu.seq);
        if (duplicate) {
            r.event = TraceEvent::MacDuplicate;
            emit(r);
        } else {
            rt.mac.last_seq_from[pdu.src] = pdu.seq;
            r.event = TraceEvent::MacDeliver;
            r.value = static_cast<double>(now - pdu.enqueue_tick);
            emit(r);
        }
        if (is_reliable(scenario_.mac.protocol)) mac_send_ack(rx, pdu);
        return;
    }

    // Acknowledgment: must match the outstanding DATA.
    if (rt.mac.outstanding) {
        const MacPdu& out = pdus_[*rt.mac.outstanding];
        if (out.dst == pdu.src && out.seq == pdu.seq) {
            r.event = TraceEvent::MacAckRx;
            emit(r);
            rt.mac.outstanding.reset();
            rt.mac.attempts = 0;
            ++timeout_counter_;
            rt.mac.timeout_token = timeout_counter_;  // invalidate pending timeout
            mac_try_start(rx);
            update_doze(rx);
            return;
        }
    }
    r.event = TraceEvent::MacAckUnexpected;
    emit(r);
}

// ---------------------------------------------------------------------------
// Traffic and sensing
// ---------------------------------------------------------------------------

void Simulation::handle_traffic(std::uint32_t flow) {
    FlowRuntime& fr = flow_rt_[flow];
    const FlowSpec& spec = *fr.spec;
    const std::uint32_t src = node_index(spec.src);
    const std::uint32_t pdu =
        make_pdu(spec.src, spec.dst, PduKind::Data, flow, spec.payload_bits);
    mac_request_send(src, pdu);
    fr.next_emit += spec.period_ticks;
    if (fr.next_emit < spec.stop) {
        kernel_.schedule(fr.next_emit, flow, Layer::App, EvTraffic{flow});
    }
}

void Simulation::handle_phenomenon_emit() {
    const Phenomenon& ph = *scenario_.sensing->phenomenon;
    const SimTime now = kernel_.now();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (scenario_.nodes[i].role != NodeRole::Sensor) continue;
        const double d = distance(ph.position, scenario_.nodes[i].position);
        const double intensity = received_intensity(ph, d);
        if (ph.wave_velocity_mps > 0.0) {
            kernel_.schedule(now + round_ticks(d / ph.wave_velocity_mps),
                             static_cast<std::uint32_t>(i), Layer::Sensor,
                             EvSenseArrive{static_cast<std::uint32_t>(i), intensity});
        } else {
            handle_sense_sample(static_cast<std::uint32_t>(i), intensity);
        }
    }
    const SimTime next = now + ph.period_ticks;
    if (next <= ph.stop) {
        kernel_.schedule(next, 0, Layer::Sensor, EvPhenomenonEmit{0});
    }
}

void Simulation::handle_self_sample(std::uint32_t node) {
    const auto& sensing = *scenario_.sensing;
    const SimTime now = kernel_.now();
    const bool phenomenon_active = sensing.phenomenon && now >= sensing.phenomenon->start &&
                                   now <= sensing.phenomenon->stop;
    if (!phenomenon_active) {
        handle_sense_sample(node, 0.0);
    }
    const SimTime next = now + sensing.device.period_ticks;
    if (next < scenario_.duration) {
        kernel_.schedule(next, node, Layer::Sensor, EvSensorSample{node});
    }
}

void Simulation::handle_sense_sample(std::uint32_t node, double intensity) {
    NodeRuntime& rt = nodes_[node];
    const SensorDevice& dev = scenario_.sensing->device;
    const SimTime now = kernel_.now();

    const double u = sense_needs_draw(dev, intensity)
                         ? streams_.uniform(rt.spec->id, StreamPurpose::Sensing)
                         : 1.0;
    const bool detected = sense(dev, intensity, u);

    TraceRecord r;
    r.time = now;
    r.node = rt.spec->id;
    r.layer = Layer::Sensor;
    r.event = TraceEvent::SensorSample;
    r.value = intensity;
    r.detail = detected ? (intensity >= dev.detection_threshold ? "detected" : "false-positive")
                        : (intensity >= dev.detection_threshold ? "missed" : "quiet");
    emit(r);

    if (!detected) return;
    if (scenario_.sensing->suppression_ticks > 0 &&
        rt.last_report != std::numeric_limits<SimTime>::min() &&
        now - rt.last_report < scenario_.sensing->suppression_ticks) {
        return;
    }
    rt.last_report = now;
    const std::uint32_t flow = report_flow_of_.at(node);
    const std::uint32_t pdu = make_pdu(rt.spec->id, scenario_.sensing->sink, PduKind::Data, flow,
                                       scenario_.sensing->report_payload_bits);
    TraceRecord rep;
    rep.time = now;
    rep.node = rt.spec->id;
    rep.layer = Layer::Sensor;
    rep.event = TraceEvent::SensorReport;
    rep.packet = pdus_[pdu].uid;
    rep.dst = scenario_.sensing->sink;
    rep.flow = flow;
    emit(rep);
    mac_request_send(node, pdu);
}

// ---------------------------------------------------------------------------
// Doze and end-of-run accounting
// ---------------------------------------------------------------------------

void Simulation::wake(std::uint32_t node) {
    NodeRuntime& rt = nodes_[node];
    if (!rt.dozing) return;
    rt.ledger.account_state(SlotState::Sleep, kernel_.now() - rt.doze_since);
    rt.dozing = false;
}

void Simulation::update_doze(std::uint32_t node) {
    NodeRuntime& rt = nodes_[node];
    if (!scenario_.mac.doze || rt.spec->role != NodeRole::Sensor) return;
    bool rx_active = !rt.windows.empty();
    for (const auto& c : rt.ctx_by_slot) rx_active = rx_active || c.has_value();
    const bool should = !rt.transmitting && !rt.mac.outstanding && rt.mac.queue.empty() &&
                        !rx_active && !rt.mac.frame_event_pending;
    if (should && !rt.dozing) {
        rt.dozing = true;
        rt.doze_since = kernel_.now();
    } else if (!should && rt.dozing) {
        wake(node);
    }
}

void Simulation::finalize_run() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        NodeRuntime& rt = nodes_[i];
        if (rt.dozing) {
            rt.ledger.account_state(SlotState::Sleep, scenario_.duration - rt.doze_since);
            rt.dozing = false;
        }
        const SimTime idle = scenario_.duration - rt.ledger.total_state_ticks();
        assert(idle >= 0);
        rt.ledger.account_state(SlotState::Idle, idle);

        char detail[320];
        char total[40];
        std::snprintf(total, sizeof total, "%.17g", rt.ledger.total_joules(*rt.profile));
        std::snprintf(detail, sizeof detail,
                      "pulses_tx=%" PRIu64 ";pulses_rx=%" PRIu64 ";t_transmit_ps=%" PRId64
                      ";t_receive_ps=%" PRId64 ";t_sense_ps=%" PRId64 ";t_idle_ps=%" PRId64
                      ";t_sleep_ps=%" PRId64 ";total_j=%s",
                      rt.ledger.pulses_tx(), rt.ledger.pulses_rx(),
                      rt.ledger.state_ticks(SlotState::Transmit),
                      rt.ledger.state_ticks(SlotState::Receive),
                      rt.ledger.state_ticks(SlotState::Sense),
                      rt.ledger.state_ticks(SlotState::Idle),
                      rt.ledger.state_ticks(SlotState::Sleep), total);

        TraceRecord r;
        r.time = scenario_.duration;
        r.node = rt.spec->id;
        r.layer = Layer::Kernel;
        r.event = TraceEvent::EnergyReport;
        r.detail = detail;
        emit(r);
    }
}

MetricsSummary run_scenario(const Scenario& scenario, std::uint64_t seed,
                            const std::string& trace_path) {
    Simulation sim(scenario, seed);
    std::unique_ptr<CsvTraceWriter> writer;
    if (!trace_path.empty()) {
        writer = std::make_unique<CsvTraceWriter>(trace_path);
        sim.add_sink(writer.get());
    }
    MetricsSummary m = sim.run();
    if (writer) writer->close();
    return m;
}

}  // namespace uwbsim

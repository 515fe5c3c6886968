// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#include "lyquor/sim/simnet.hpp"
#include "lyquor/hashing.hpp"

#include <algorithm>

namespace lyquor::sim {

namespace {

std::string
fmt_step(Step s)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(s));
    return buf;
}

Bytes
encode_batch_notify(const fco::BatchInfo& b, const std::vector<fco::LogEntry>& entries)
{
    ByteWriter w;
    w.u64(b.number);
    w.u64(b.first);
    w.u64(b.last);
    w.u32(static_cast<uint32_t>(entries.size()));
    for (const auto& e : entries)
        w.blob(e.encode());
    return w.take();
}

void
decode_batch_notify(const Bytes& payload, fco::BatchInfo& b, std::vector<fco::LogEntry>& entries)
{
    ByteReader r(payload);
    b.number = r.u64();
    b.first = r.u64();
    b.last = r.u64();
    b.sealed = true;
    uint32_t n = r.u32();
    entries.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        entries.push_back(fco::LogEntry::decode(r.blob()));
    r.expect_done();
}

Bytes
encode_pull(uint64_t batch, Position lo, Position hi, const std::set<ServiceId>& targets)
{
    ByteWriter w;
    w.u64(batch);
    w.u64(lo);
    w.u64(hi);
    w.u32(static_cast<uint32_t>(targets.size()));
    for (const auto& t : targets)
        w.str(t);
    return w.take();
}

Bytes
encode_pull_reply(uint64_t batch, bool behind, const std::vector<runtime::EffectRecord>& recs)
{
    ByteWriter w;
    w.u64(batch);
    w.u8(behind ? 1 : 0);
    w.raw(runtime::encode_records(recs));
    return w.take();
}

Bytes
encode_upc_request(uint64_t call, const upc::UpcSpec& spec, uint32_t depth, uint64_t deadline)
{
    ByteWriter w;
    w.u64(call);
    w.str(spec.service);
    w.str(spec.handler);
    w.u32(static_cast<uint32_t>(spec.args.size()));
    for (const auto& a : spec.args)
        a.encode(w);
    w.u32(depth);
    w.u64(deadline);
    return w.take();
}

Bytes
encode_upc_response(uint64_t call, const upc::UpcResponse& r)
{
    ByteWriter w;
    w.u64(call);
    w.u8(r.has_payload ? 1 : 0);
    w.u8(static_cast<uint8_t>(r.fault));
    r.payload.encode(w);
    return w.take();
}

} // namespace

std::string_view
msg_kind_name(MsgKind k)
{
    switch (k)
    {
    case MsgKind::Gateway:
        return "gateway";
    case MsgKind::GatewayReply:
        return "gateway-reply";
    case MsgKind::EffectsPull:
        return "effects-pull";
    case MsgKind::EffectsReply:
        return "effects-reply";
    case MsgKind::UpcRequest:
        return "upc-request";
    case MsgKind::UpcResponse:
        return "upc-response";
    case MsgKind::BatchNotify:
        return "batch-notify";
    }
    return "unknown";
}

Simnet::Simnet(SimConfig cfg, fco::SequencerConfig seq_cfg)
    : mCfg(cfg), mSequencer(seq_cfg), mRng(cfg.seed)
{
    if (mCfg.min_delay > mCfg.max_delay)
        fail(Errc::bad_request, "min delay above max delay");
}

Simnet::~Simnet() = default;

std::string
Simnet::addr_name(NodeId id) const
{
    if (id == kSequencerId)
        return "seq";
    if (id == kClientId)
        return "client";
    return std::to_string(id);
}

void
Simnet::trace_line(std::string line)
{
    mTrace.push_back(std::move(line));
}

std::string
Simnet::trace_text() const
{
    std::string out;
    for (const auto& l : mTrace)
    {
        out += l;
        out.push_back('\n');
    }
    return out;
}

NodeId
Simnet::spawn_node(node::HostingProfile profile, NodeConfig cfg)
{
    NodeId id = mNextNode++;
    SimNode sn;
    sn.impl = std::make_unique<node::Node>(id, std::move(profile), cfg.data_dir);
    sn.cfg = cfg;
    sn.invoker = std::make_unique<NodeInvoker>(*this, id);
    sn.impl->engine().set_upc_invoker(sn.invoker.get());
    sn.impl->set_exec_observer([this, id](const node::ExecEvent& ev) {
        trace_line("step=" + fmt_step(mNow) + " ev=exec node=" + std::to_string(id) +
                   " pos=" + std::to_string(ev.position) + " svc=" + ev.service +
                   " via=" + std::string(node::apply_mode_name(ev.mode)) +
                   " status=" + std::string(runtime::call_status_name(ev.status)) +
                   (ev.code.empty() ? "" : " code=" + ev.code));
    });
    mNodes.emplace(id, std::move(sn));
    return id;
}

node::Node&
Simnet::get(NodeId id)
{
    auto it = mNodes.find(id);
    if (it == mNodes.end())
        fail(Errc::bad_request, "no such node: " + std::to_string(id));
    return *it->second.impl;
}

std::vector<NodeId>
Simnet::node_ids() const
{
    std::vector<NodeId> out;
    for (const auto& [id, _] : mNodes)
        out.push_back(id);
    return out;
}

void
Simnet::deploy(const runtime::LyquidBundle& bundle)
{
    mSequencer.register_service(bundle.name);
    for (auto& [id, sn] : mNodes)
        sn.impl->deploy(bundle);
}

void
Simnet::finish_deploys()
{
    for (auto& [id, sn] : mNodes)
        sn.impl->snapshot_genesis();
}

// ---------------------------------------------------------------------------
// scripting

void
Simnet::push_event(Step step, int cls, Event ev)
{
    uint64_t seq = ev.kind == Event::Kind::Delivery ? ev.msg.id
                   : ev.kind == Event::Kind::Timer  ? ev.timer_id
                                                    : mNextScript++;
    mQueue.emplace(QueueKey{step, cls, seq}, std::move(ev));
}

void
Simnet::at_submit(Step step, fco::CallIntent intent)
{
    Event ev;
    ev.kind = Event::Kind::Script;
    ev.script.kind = ScriptOp::Kind::Submit;
    ev.script.intent = std::move(intent);
    push_event(step, 1, std::move(ev));
}

void
Simnet::at_seal(Step step)
{
    Event ev;
    ev.kind = Event::Kind::Script;
    ev.script.kind = ScriptOp::Kind::Seal;
    push_event(step, 1, std::move(ev));
}

void
Simnet::at_call(Step step, std::string call_id, NodeId node, node::GatewayRequest req)
{
    Event ev;
    ev.kind = Event::Kind::Script;
    ev.script.kind = ScriptOp::Kind::Call;
    ev.script.call_id = std::move(call_id);
    ev.script.node = node;
    ev.script.request = std::move(req);
    push_event(step, 1, std::move(ev));
}

void
Simnet::inject(const Fault& fault, Step step)
{
    if (step < mNow)
        fail(Errc::past_step, "fault scheduled in the past");
    Event ev;
    ev.kind = Event::Kind::FaultAt;
    ev.script.kind = ScriptOp::Kind::Fault;
    ev.script.fault = fault;
    push_event(step, 0, std::move(ev));
}

// ---------------------------------------------------------------------------
// transport

Step
Simnet::sample_delay()
{
    if (mCfg.min_delay == mCfg.max_delay)
        return mCfg.min_delay;
    std::uniform_int_distribution<Step> dist(mCfg.min_delay, mCfg.max_delay);
    return dist(mRng);
}

uint64_t
Simnet::send(NodeId from, NodeId to, MsgKind kind, Bytes payload, bool immediate)
{
    Message m;
    m.id = mNextMsg++;
    m.from = from;
    m.to = to;
    m.kind = kind;
    m.payload = std::move(payload);
    m.send_step = mNow;
    m.deliver_step = mNow + (immediate ? 0 : sample_delay());

    trace_line("step=" + fmt_step(mNow) + " ev=send id=" + std::to_string(m.id) + " kind=" +
               std::string(msg_kind_name(kind)) + " from=" + addr_name(from) + " to=" +
               addr_name(to) + " digest=" + short_digest_hex(m.payload));

    Event ev;
    ev.kind = Event::Kind::Delivery;
    ev.msg = std::move(m);
    Step at = ev.msg.deliver_step;
    push_event(at, 2, std::move(ev));
    return mNextMsg - 1;
}

bool
Simnet::delivery_blocked(const Message& m, std::string& reason) const
{
    auto it = mNodes.find(m.to);
    if (it != mNodes.end() && it->second.crashed)
    {
        reason = "crashed";
        return true;
    }
    if (mPartitionActive)
    {
        bool a2b = mPartitionA.count(m.from) && mPartitionB.count(m.to);
        bool b2a = mPartitionB.count(m.from) && mPartitionA.count(m.to);
        if (a2b || b2a)
        {
            reason = "partitioned";
            return true;
        }
    }
    return false;
}

uint64_t
Simnet::schedule_timer(Step at, TimerInfo info)
{
    uint64_t id = mNextTimer++;
    mTimers[id] = info;
    Event ev;
    ev.kind = Event::Kind::Timer;
    ev.timer_id = id;
    push_event(at, 3, std::move(ev));
    return id;
}

// ---------------------------------------------------------------------------
// event loop

void
Simnet::advance_to(Step step)
{
    if (step > mNow)
    {
        flush_upc_buffers();
        mNow = step;
    }
}

void
Simnet::pump(const std::function<bool()>& done)
{
    while (!(done && done()))
    {
        if (mQueue.empty())
        {
            flush_upc_buffers();
            if (done && done())
                return;
            break;
        }
        auto it = mQueue.begin();
        Step step = std::get<0>(it->first);
        if (step > mCfg.step_limit)
        {
            if (!mLimitHit)
            {
                mLimitHit = true;
                trace_line("step=" + fmt_step(mNow) + " ev=limit reason=step-limit-exceeded");
            }
            // expire every pending UPC call so origins can unwind
            flush_upc_buffers();
            for (auto& [id, call] : mUpcCalls)
                if (!call.done)
                {
                    call.done = true;
                    call.failed = true;
                    call.error = "step limit exceeded";
                }
            break;
        }
        advance_to(step);
        Event ev = std::move(it->second);
        mQueue.erase(it);
        dispatch(ev);
    }
}

void
Simnet::dispatch(Event& ev)
{
    switch (ev.kind)
    {
    case Event::Kind::FaultAt:
        apply_fault(ev.script.fault);
        break;
    case Event::Kind::Script:
        handle_script(ev.script);
        break;
    case Event::Kind::Delivery:
        handle_delivery(ev.msg);
        break;
    case Event::Kind::Timer:
    {
        auto it = mTimers.find(ev.timer_id);
        if (it == mTimers.end())
            break;
        TimerInfo info = it->second;
        mTimers.erase(it);
        handle_timer(info);
        break;
    }
    }
}

RunReport
Simnet::run()
{
    pump(nullptr);
    flush_upc_buffers();
    mReport.step_limit_exceeded = mLimitHit;
    mReport.final_step = mNow;
    return mReport;
}

// ---------------------------------------------------------------------------
// handlers

void
Simnet::handle_script(const ScriptOp& op)
{
    switch (op.kind)
    {
    case ScriptOp::Kind::Submit:
    {
        try
        {
            Position pos = mSequencer.submit(op.intent);
            trace_line("step=" + fmt_step(mNow) + " ev=script op=submit pos=" +
                       std::to_string(pos) + " target=" + op.intent.target + " method=" +
                       op.intent.method);
        }
        catch (const Error& e)
        {
            trace_line("step=" + fmt_step(mNow) + " ev=script op=submit err=" +
                       std::string(errc_name(e.code())));
        }
        break;
    }
    case ScriptOp::Kind::Seal:
    {
        fco::BatchInfo b = mSequencer.seal_batch();
        std::vector<fco::LogEntry> entries;
        if (!b.empty())
            entries = mSequencer.read(b.first, b.last);
        mSealedBatches.emplace_back(b, entries);
        trace_line("step=" + fmt_step(mNow) + " ev=script op=seal batch=" +
                   std::to_string(b.number) + " range=[" + std::to_string(b.first) + "," +
                   std::to_string(b.last) + "]");
        Bytes payload = encode_batch_notify(b, entries);
        for (const auto& [id, _] : mNodes)
            send(kSequencerId, id, MsgKind::BatchNotify, payload);
        break;
    }
    case ScriptOp::Kind::Call:
    {
        trace_line("step=" + fmt_step(mNow) + " ev=script op=call id=" + op.call_id +
                   " node=" + std::to_string(op.node));
        ByteWriter w;
        w.str(op.call_id);
        w.str(op.request.to_line());
        send(kClientId, op.node, MsgKind::Gateway, w.take(), true);
        break;
    }
    case ScriptOp::Kind::Fault:
        apply_fault(op.fault);
        break;
    }
}

void
Simnet::apply_fault(const Fault& f)
{
    switch (f.kind)
    {
    case Fault::Kind::Crash:
        trace_line("step=" + fmt_step(mNow) + " ev=fault kind=crash node=" +
                   std::to_string(f.node));
        if (auto it = mNodes.find(f.node); it != mNodes.end())
            it->second.crashed = true;
        break;
    case Fault::Kind::Recover:
    {
        trace_line("step=" + fmt_step(mNow) + " ev=fault kind=recover node=" +
                   std::to_string(f.node));
        auto it = mNodes.find(f.node);
        if (it == mNodes.end() || !it->second.crashed)
            fail(Errc::bad_request, "recover of a node that is not crashed");
        it->second.crashed = false;
        notify_batches(f.node, true);
        break;
    }
    case Fault::Kind::Partition:
        trace_line("step=" + fmt_step(mNow) + " ev=fault kind=partition");
        mPartitionActive = true;
        mPartitionA = f.side_a;
        mPartitionB = f.side_b;
        break;
    case Fault::Kind::Heal:
        trace_line("step=" + fmt_step(mNow) + " ev=fault kind=heal");
        mPartitionActive = false;
        mPartitionA.clear();
        mPartitionB.clear();
        renotify_all();
        break;
    }
}

void
Simnet::notify_batches(NodeId target, bool all_batches)
{
    for (const auto& [b, entries] : mSealedBatches)
    {
        (void)all_batches;
        Bytes payload = encode_batch_notify(b, entries);
        send(kSequencerId, target, MsgKind::BatchNotify, payload);
    }
}

void
Simnet::renotify_all()
{
    for (const auto& [id, _] : mNodes)
        notify_batches(id, true);
}

void
Simnet::handle_delivery(const Message& m)
{
    std::string reason;
    if (delivery_blocked(m, reason))
    {
        trace_line("step=" + fmt_step(mNow) + " ev=drop id=" + std::to_string(m.id) + " kind=" +
                   std::string(msg_kind_name(m.kind)) + " from=" + addr_name(m.from) + " to=" +
                   addr_name(m.to) + " reason=" + reason);
        return;
    }
    trace_line("step=" + fmt_step(mNow) + " ev=deliver id=" + std::to_string(m.id) + " kind=" +
               std::string(msg_kind_name(m.kind)) + " from=" + addr_name(m.from) + " to=" +
               addr_name(m.to) + " digest=" + short_digest_hex(m.payload));

    if (m.to == kSequencerId)
    {
        seq_handle(m);
        return;
    }
    auto it = mNodes.find(m.to);
    if (it == mNodes.end())
        return;
    node_handle(it->second, m);
}

void
Simnet::seq_handle(const Message& m)
{
    if (m.kind != MsgKind::Gateway)
        return;
    ByteReader r(m.payload);
    uint64_t req_id = r.u64();
    fco::CallIntent intent = fco::CallIntent::decode(r);
    ByteWriter w;
    w.u64(req_id);
    try
    {
        Position pos = mSequencer.submit(intent);
        w.u8(1);
        w.u64(pos);
    }
    catch (const Error& e)
    {
        w.u8(0);
        w.str(std::string(errc_name(e.code())));
    }
    send(kSequencerId, m.from, MsgKind::GatewayReply, w.take());
}

void
Simnet::node_handle(SimNode& sn, const Message& m)
{
    node::Node& n = *sn.impl;
    switch (m.kind)
    {
    case MsgKind::BatchNotify:
    {
        fco::BatchInfo b;
        std::vector<fco::LogEntry> entries;
        decode_batch_notify(m.payload, b, entries);
        n.on_batch(b, std::move(entries));
        try_advance(n.id());
        break;
    }
    case MsgKind::EffectsPull:
    {
        ByteReader r(m.payload);
        uint64_t batch = r.u64();
        Position lo = r.u64();
        Position hi = r.u64();
        uint32_t cnt = r.u32();
        std::set<ServiceId> targets;
        for (uint32_t i = 0; i < cnt; ++i)
            targets.insert(r.str());
        try
        {
            auto recs = n.serve_effects(targets, lo, hi);
            send(n.id(), m.from, MsgKind::EffectsReply, encode_pull_reply(batch, false, recs));
        }
        catch (const Error& e)
        {
            if (e.code() == Errc::frontier_behind)
                send(n.id(), m.from, MsgKind::EffectsReply, encode_pull_reply(batch, true, {}));
            else
                throw;
        }
        break;
    }
    case MsgKind::EffectsReply:
    {
        ByteReader r(m.payload);
        uint64_t batch = r.u64();
        bool behind = r.u8() == 1;
        sn.outstanding_pulls.erase(batch);
        if (behind)
        {
            schedule_timer(mNow + sn.cfg.poll_interval,
                           {TimerInfo::Kind::PullRetry, n.id(), batch, 0});
            break;
        }
        Bytes rest(m.payload.begin() + 9, m.payload.end());
        n.supply_effects(batch, runtime::decode_records(rest));
        try_advance(n.id());
        break;
    }
    case MsgKind::UpcRequest:
    {
        ByteReader r(m.payload);
        uint64_t call = r.u64();
        ServiceId service = r.str();
        std::string handler = r.str();
        uint32_t argc = r.u32();
        std::vector<Value> args;
        args.reserve(argc);
        for (uint32_t i = 0; i < argc; ++i)
            args.push_back(Value::decode(r));
        uint32_t depth = r.u32();
        uint64_t deadline = r.u64();

        upc::UpcResponse resp;
        resp.responder = n.id();
        try
        {
            resp.payload = n.engine().exec_upc_handler(service, handler, args,
                                                       Address::from_service(service),
                                                       depth, deadline);
            resp.has_payload = true;
        }
        catch (const Error&)
        {
            resp.has_payload = false;
            resp.fault = upc::FaultMarker::Invalid;
        }
        send(n.id(), m.from, MsgKind::UpcResponse, encode_upc_response(call, resp));
        break;
    }
    case MsgKind::UpcResponse:
    {
        ByteReader r(m.payload);
        uint64_t call = r.u64();
        upc::UpcResponse resp;
        resp.responder = m.from;
        resp.has_payload = r.u8() == 1;
        resp.fault = static_cast<upc::FaultMarker>(r.u8());
        resp.payload = Value::decode(r);
        auto it = mUpcCalls.find(call);
        if (it == mUpcCalls.end() || it->second.done)
        {
            trace_line("step=" + fmt_step(mNow) + " ev=upc id=" + std::to_string(call) +
                       " phase=late node=" + std::to_string(m.from));
            break;
        }
        it->second.buffer.push_back(std::move(resp));
        break;
    }
    case MsgKind::Gateway:
    {
        ByteReader r(m.payload);
        std::string call_id = r.str();
        std::string line = r.str();
        node::GatewayRequest req;
        try
        {
            req = node::GatewayRequest::parse(line);
        }
        catch (const Error& e)
        {
            mReport.call_results[call_id] =
                node::GatewayResponse::make_error(e.code(), e.detail()).to_line();
            break;
        }
        if (req.kind == node::GatewayRequest::Kind::Send)
        {
            // forward to the sequencer, answer when the reply arrives
            ByteWriter w;
            uint64_t req_id = mNextMsg; // id of the message about to be sent
            w.u64(req_id);
            fco::CallIntent intent{req.caller, req.service, req.method, req.args,
                                   req.gas_limit};
            intent.encode(w);
            uint64_t sent = send(n.id(), kSequencerId, MsgKind::Gateway, w.take());
            mPendingGateway[sent] = call_id;
            break;
        }
        std::string resp = n.gateway_call(req, nullptr).to_line();
        mReport.call_results[call_id] = resp;
        trace_line("step=" + fmt_step(mNow) + " ev=gateway node=" + std::to_string(n.id()) +
                   " id=" + call_id + " resp=" + Value(resp).to_text());
        break;
    }
    case MsgKind::GatewayReply:
    {
        ByteReader r(m.payload);
        uint64_t req_id = r.u64();
        bool ok = r.u8() == 1;
        node::GatewayResponse resp;
        if (ok)
            resp = node::GatewayResponse::make_position(r.u64());
        else
        {
            std::string code = r.str();
            resp.ok = false;
            resp.code = code;
        }
        auto it = mPendingGateway.find(req_id);
        if (it != mPendingGateway.end())
        {
            mReport.call_results[it->second] = resp.to_line();
            trace_line("step=" + fmt_step(mNow) + " ev=gateway node=" +
                       std::to_string(m.to) + " id=" + it->second + " resp=" +
                       Value(resp.to_line()).to_text());
            mPendingGateway.erase(it);
        }
        break;
    }
    }
}

void
Simnet::try_advance(NodeId id)
{
    auto& sn = mNodes.at(id);
    if (sn.crashed)
        return;
    node::Node& n = *sn.impl;
    auto req = n.advance(n.known_sealed());
    if (!req)
        return;
    if (sn.outstanding_pulls.count(req->batch))
        return; // a pull for this batch is already in flight
    sn.outstanding_pulls.insert(req->batch);
    send(id, sn.cfg.archival_peer, MsgKind::EffectsPull,
         encode_pull(req->batch, req->lo, req->hi, req->targets));
    schedule_timer(mNow + sn.cfg.poll_interval, {TimerInfo::Kind::PullRetry, id, req->batch, 0});
}

void
Simnet::handle_timer(const TimerInfo& t)
{
    switch (t.kind)
    {
    case TimerInfo::Kind::PullRetry:
    {
        auto& sn = mNodes.at(t.node);
        if (sn.crashed)
            return;
        node::Node& n = *sn.impl;
        if (n.has_effects_for(t.batch))
            return;
        auto req = n.advance(n.known_sealed());
        if (!req || req->batch != t.batch)
            return;
        sn.outstanding_pulls.insert(t.batch);
        send(t.node, sn.cfg.archival_peer, MsgKind::EffectsPull,
             encode_pull(req->batch, req->lo, req->hi, req->targets));
        schedule_timer(mNow + sn.cfg.poll_interval,
                       {TimerInfo::Kind::PullRetry, t.node, t.batch, 0});
        break;
    }
    case TimerInfo::Kind::UpcDeadline:
    {
        auto it = mUpcCalls.find(t.call_id);
        if (it == mUpcCalls.end() || it->second.done)
            return;
        PendingUpc& call = it->second;
        try
        {
            call.result = call.agg->finalize();
        }
        catch (const Error& e)
        {
            call.failed = true;
            call.error = e.detail();
        }
        call.done = true;
        break;
    }
    }
}

// ---------------------------------------------------------------------------
// UPC origin

void
Simnet::flush_upc_buffers()
{
    for (auto& [id, call] : mUpcCalls)
    {
        if (call.buffer.empty())
            continue;
        std::vector<upc::UpcResponse> batch = std::move(call.buffer);
        call.buffer.clear();
        // same-step ties resolve to the lowest node id
        std::sort(batch.begin(), batch.end(),
                  [](const auto& a, const auto& b) { return a.responder < b.responder; });
        for (const auto& r : batch)
        {
            if (call.done)
            {
                trace_line("step=" + fmt_step(mNow) + " ev=upc id=" + std::to_string(id) +
                           " phase=late node=" + std::to_string(r.responder));
                continue;
            }
            bool used = call.agg->feed(r);
            trace_line("step=" + fmt_step(mNow) + " ev=upc id=" + std::to_string(id) +
                       " phase=response node=" + std::to_string(r.responder) + " payload=" +
                       (r.has_payload ? "valid" : "fault") + (used ? "" : " discarded=1"));
            if (call.agg->done())
            {
                call.result = call.agg->finalize();
                call.done = true;
            }
        }
    }
}

Value
Simnet::upc_invoke(NodeId origin, const upc::UpcSpec& spec, uint32_t caller_depth,
                   uint64_t caller_deadline)
{
    if (spec.quorum < 1 || spec.deadline == 0)
        fail(Errc::bad_request, "upc call needs quorum >= 1 and a positive deadline");
    if (caller_depth >= mCfg.upc_depth_limit)
        fail(Errc::depth_exceeded,
             "upc recursion depth " + std::to_string(caller_depth + 1) + " above limit");

    node::Node& on = get(origin);
    if (!on.hosts(spec.service) || !on.engine().hosts(spec.service))
        fail(Errc::not_hosted, "origin does not host " + spec.service);
    if (!on.engine().has_upc_handler(spec.service, spec.handler))
        fail(Errc::method_not_found, "no upc handler " + spec.handler);

    // cluster = nodes hosting the service, ascending id (crashed ones are
    // selected too; they simply never answer)
    std::vector<NodeId> cluster;
    for (const auto& [id, sn] : mNodes)
        if (sn.impl->hosts(spec.service) && sn.impl->engine().hosts(spec.service))
            cluster.push_back(id);

    auto read_root = [&](const std::string& root) {
        return on.engine().read_root(spec.service, root);
    };
    std::vector<NodeId> selected = upc::select_nodes(spec.selector, cluster, read_root);
    if (selected.empty())
        fail(Errc::no_eligible_nodes, "selection produced no nodes");

    Step deadline = mNow + spec.deadline;
    if (caller_deadline != 0)
        deadline = std::min(deadline, caller_deadline);

    uint64_t call_id = mNextUpc++;
    PendingUpc call;
    call.id = call_id;
    call.origin = origin;
    call.spec = spec;
    call.agg = std::make_unique<upc::AggregationState>(spec.aggregator, spec.quorum, selected);
    call.deadline = deadline;
    auto [it, _] = mUpcCalls.emplace(call_id, std::move(call));

    std::string sel_text;
    for (size_t i = 0; i < selected.size(); ++i)
        sel_text += (i ? "," : "") + std::to_string(selected[i]);
    trace_line("step=" + fmt_step(mNow) + " ev=upc id=" + std::to_string(call_id) +
               " phase=start svc=" + spec.service + " handler=" + spec.handler + " selected=[" +
               sel_text + "] quorum=" + std::to_string(spec.quorum) + " deadline=" +
               std::to_string(deadline));

    Bytes request = encode_upc_request(call_id, spec, caller_depth + 1, deadline);
    for (NodeId target : selected)
        send(origin, target, MsgKind::UpcRequest, request);
    schedule_timer(deadline + 1, {TimerInfo::Kind::UpcDeadline, origin, 0, call_id});

    pump([&]() { return mUpcCalls.at(call_id).done; });

    PendingUpc& done_call = mUpcCalls.at(call_id);
    if (!done_call.done)
    {
        // queue exhausted below the step limit without settling (should not
        // happen: the deadline timer always fires)
        done_call.done = true;
        done_call.failed = true;
        done_call.error = "event queue exhausted";
    }
    if (done_call.failed)
    {
        trace_line("step=" + fmt_step(mNow) + " ev=upc id=" + std::to_string(call_id) +
                   " phase=done err=QuorumNotMet");
        fail(Errc::quorum_not_met, done_call.error);
    }
    Value result = *done_call.result;
    Bytes enc = result.encode();
    trace_line("step=" + fmt_step(mNow) + " ev=upc id=" + std::to_string(call_id) +
               " phase=done digest=" + short_digest_hex(enc));
    return result;
}

} // namespace lyquor::sim

// Copyright 2026 the Lyquor prototype developers. Licensed under the
// Apache License, Version 2.0: http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "lyquor/fco/log.hpp"
#include "lyquor/node/node.hpp"
#include "lyquor/upc/upc.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace lyquor::sim {

struct SimConfig {
    uint64_t seed = 1;
    uint32_t min_delay = 1;
    uint32_t max_delay = 3;
    uint64_t step_limit = 5000;
    uint32_t upc_depth_limit = 4;
};

struct Fault {
    enum class Kind { Crash, Recover, Partition, Heal };
    Kind kind = Kind::Crash;
    NodeId node = 0;               // crash/recover
    std::set<NodeId> side_a;       // partition
    std::set<NodeId> side_b;
};

enum class MsgKind : uint8_t {
    Gateway = 0,
    GatewayReply = 1,
    EffectsPull = 2,
    EffectsReply = 3,
    UpcRequest = 4,
    UpcResponse = 5,
    BatchNotify = 6,
};

std::string_view msg_kind_name(MsgKind k);

struct Message {
    uint64_t id = 0;
    NodeId from = 0;
    NodeId to = 0;
    MsgKind kind = MsgKind::Gateway;
    Bytes payload;
    Step send_step = 0;
    Step deliver_step = 0;
};

struct NodeConfig {
    NodeId archival_peer = 0;
    Step poll_interval = 3;
    std::optional<std::filesystem::path> data_dir;
};

struct RunReport {
    bool step_limit_exceeded = false;
    Step final_step = 0;
    std::map<std::string, std::string> call_results; // scripted call id -> response line
};

// The sequencer occupies address 0; scripted clients appear as kClient.
constexpr NodeId kSequencerId = 0;
constexpr NodeId kClientId = 0xFFFFFFFFu;

// Deterministic single-threaded discrete-event network. Messages are
// processed in (deliver step, id) order; a seeded generator draws delivery
// delays; faults drop traffic to crashed or partitioned nodes at delivery
// time. Blocking behavior (a UPC origin awaiting responses) is modeled by
// reentrant pumping of the same event queue.
class Simnet {
  public:
    explicit Simnet(SimConfig cfg, fco::SequencerConfig seq_cfg = {});
    ~Simnet();

    Simnet(const Simnet&) = delete;
    Simnet& operator=(const Simnet&) = delete;

    fco::Sequencer& sequencer() { return mSequencer; }
    NodeId spawn_node(node::HostingProfile profile, NodeConfig cfg = {});
    node::Node& get(NodeId id);
    std::vector<NodeId> node_ids() const;

    // Registers with the sequencer and deploys to every node hosting it.
    void deploy(const runtime::LyquidBundle& bundle);
    void finish_deploys(); // genesis snapshots on archival nodes

    // -- script --------------------------------------------------------------
    void at_submit(Step step, fco::CallIntent intent);
    void at_seal(Step step);
    void at_call(Step step, std::string call_id, NodeId node, node::GatewayRequest req);
    void inject(const Fault& fault, Step step); // PastStep if step < now

    RunReport run();

    Step now() const { return mNow; }
    const std::vector<std::string>& trace() const { return mTrace; }
    std::string trace_text() const;

    // Origin-side UPC invocation: fans out requests, pumps the event loop
    // until the aggregation settles or the (possibly nested) deadline hits.
    Value upc_invoke(NodeId origin, const upc::UpcSpec& spec, uint32_t caller_depth,
                     uint64_t caller_deadline);

  private:
    struct ScriptOp {
        enum class Kind { Submit, Seal, Call, Fault } kind;
        fco::CallIntent intent;
        std::string call_id;
        NodeId node = 0;
        node::GatewayRequest request;
        Fault fault;
    };

    struct Event {
        enum class Kind { FaultAt, Script, Delivery, Timer } kind;
        Message msg;            // Delivery
        ScriptOp script;        // Script / FaultAt
        uint64_t timer_id = 0;  // Timer
    };

    struct TimerInfo {
        enum class Kind { PullRetry, UpcDeadline } kind;
        NodeId node = 0;
        uint64_t batch = 0;
        uint64_t call_id = 0;
    };

    struct PendingUpc {
        uint64_t id = 0;
        NodeId origin = 0;
        upc::UpcSpec spec;
        std::unique_ptr<upc::AggregationState> agg;
        Step deadline = 0;
        bool done = false;
        bool failed = false;
        std::string error;
        std::optional<Value> result;
        std::vector<upc::UpcResponse> buffer; // same-step arrivals
    };

    class NodeInvoker : public runtime::UpcInvoker {
      public:
        NodeInvoker(Simnet& sim, NodeId id) : mSim(sim), mId(id) {}
        Value invoke(const upc::UpcSpec& spec, uint32_t caller_depth,
                     uint64_t caller_deadline) override
        {
            return mSim.upc_invoke(mId, spec, caller_depth, caller_deadline);
        }

      private:
        Simnet& mSim;
        NodeId mId;
    };

    struct SimNode {
        std::unique_ptr<node::Node> impl;
        NodeConfig cfg;
        bool crashed = false;
        std::set<uint64_t> outstanding_pulls; // batch numbers
        std::unique_ptr<NodeInvoker> invoker;
    };

    using QueueKey = std::tuple<Step, int, uint64_t>; // (step, class, seq)

    void push_event(Step step, int cls, Event ev);
    void pump(const std::function<bool()>& done);
    void flush_upc_buffers();
    void advance_to(Step step);
    void dispatch(Event& ev);

    uint64_t send(NodeId from, NodeId to, MsgKind kind, Bytes payload, bool immediate = false);
    bool delivery_blocked(const Message& m, std::string& reason) const;
    Step sample_delay();
    uint64_t schedule_timer(Step at, TimerInfo info);

    void handle_delivery(const Message& m);
    void handle_script(const ScriptOp& op);
    void apply_fault(const Fault& f);
    void handle_timer(const TimerInfo& t);

    void seq_handle(const Message& m);
    void node_handle(SimNode& n, const Message& m);
    void try_advance(NodeId id);
    void notify_batches(NodeId target_or_all, bool all_batches);
    void renotify_all();

    void trace_line(std::string line);
    std::string addr_name(NodeId id) const;

    SimConfig mCfg;
    fco::Sequencer mSequencer;
    std::map<NodeId, SimNode> mNodes;
    NodeId mNextNode = 1;

    std::map<QueueKey, Event> mQueue;
    uint64_t mNextMsg = 1;
    uint64_t mNextTimer = 1;
    uint64_t mNextScript = 1;
    std::map<uint64_t, TimerInfo> mTimers;
    Step mNow = 0;
    bool mLimitHit = false;

    std::mt19937_64 mRng;
    std::vector<std::string> mTrace;

    std::map<uint64_t, PendingUpc> mUpcCalls;
    uint64_t mNextUpc = 1;

    std::map<uint64_t, std::string> mPendingGateway; // msg id -> call id
    RunReport mReport;

    bool mPartitionActive = false;
    std::set<NodeId> mPartitionA;
    std::set<NodeId> mPartitionB;

    std::vector<std::pair<fco::BatchInfo, std::vector<fco::LogEntry>>> mSealedBatches;
};

} // namespace lyquor::sim

#pragma once

// Single-threaded deterministic network: per-(from,to) FIFO queues, a
// seeded scheduler picking among non-empty queues, and every delivery
// feeding observation facts to the audit log. Also hosts the two
// infrastructure services whose trust model varies by deployment: the
// ordering service and the uniqueness notary.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ledgerlab/audit.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/ledger.hpp"
#include "ledgerlab/merkle.hpp"

namespace ledgerlab::netsim {

enum class Role { Party, Orderer, Notary, TxManager, Authority };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::Party: return "party";
        case Role::Orderer: return "orderer";
        case Role::Notary: return "notary";
        case Role::TxManager: return "txmanager";
        case Role::Authority: return "authority";
    }
    return "?";
}

struct ActorId {
    Role role = Role::Party;
    std::string name;

    bool operator<(const ActorId& o) const {
        if (role != o.role) return role < o.role;
        return name < o.name;
    }
    bool operator==(const ActorId& o) const { return role == o.role && name == o.name; }

    // Audit-log label. Names are unique across roles by construction, so
    // the bare name keys knowledge sets and policy scopes.
    const std::string& label() const { return name; }
};

// How much of a transaction's confidential content a recipient got.
enum class ContentClass { Full, EncryptedOnly, HashOnly, TearOffView, Nothing };

inline const char* content_class_name(ContentClass c) {
    switch (c) {
        case ContentClass::Full: return "Full";
        case ContentClass::EncryptedOnly: return "EncryptedOnly";
        case ContentClass::HashOnly: return "HashOnly";
        case ContentClass::TearOffView: return "TearOffView";
        case ContentClass::Nothing: return "Nothing";
    }
    return "?";
}

struct TxProposal {
    ledger::Transaction tx;
};

struct TxDistribution {
    ledger::Transaction tx;
    ContentClass content = ContentClass::Full;
    std::optional<merkle::TearOffView> view;  // set when content == TearOffView
};

struct OrderRequest {
    ledger::Transaction tx;
};

struct OrderedBatch {
    std::vector<ledger::Transaction> txs;
    std::uint64_t sequence = 0;
};

struct NotarySignRequest {
    crypto::Digest tx_id;
    std::vector<ledger::AssetRef> inputs;
    Bytes signing_message;
    std::optional<ledger::Transaction> tx;  // present only for a validating notary
};

struct NotarySignature {
    crypto::Digest tx_id;
    bool ok = true;
    crypto::Signature signature;
    ledger::Rejection reason = ledger::Rejection::None;
};

// Off-band confidential delivery: anchored data, wrapped keys, linking
// certificates. `kind` tags the blob for the receiving handler.
struct PrivatePayload {
    crypto::Digest tx_id;
    std::string kind;
    Bytes blob;
};

using MessageBody = std::variant<TxProposal, TxDistribution, OrderRequest, OrderedBatch,
                                 NotarySignRequest, NotarySignature, PrivatePayload>;

struct Envelope {
    ActorId from;
    ActorId to;
    MessageBody body;
    // What the recipient learns on delivery; computed by the sender-side
    // flow logic. Every delivery must teach at least one fact.
    std::vector<audit::Fact> facts;
};

enum class OrdererMode { SharedThirdParty, MemberRun };
enum class NotaryMode { Validating, NonValidating };

struct SimConfig {
    std::uint64_t seed = 0;
    OrdererMode orderer_mode = OrdererMode::SharedThirdParty;
    NotaryMode notary_mode = NotaryMode::Validating;
};

class Simulation {
public:
    Simulation(const SimConfig& config, std::vector<ActorId> actors, audit::AuditLog& log)
        : config_(config), rng_(config.seed), log_(log) {
        for (ActorId& a : actors) add_actor(a);
    }

    void add_actor(const ActorId& actor) {
        if (actors_.count(actor))
            throw LabError(ErrorCode::DuplicateActor, "actor already spawned: " + actor.name);
        actors_.insert(actor);
    }

    bool has_actor(const ActorId& actor) const { return actors_.count(actor) > 0; }
    const std::set<ActorId>& actors() const { return actors_; }

    void send(Envelope env) {
        queues_[{env.from, env.to}].push_back(std::move(env));
    }

    bool idle() const {
        for (const auto& [_, q] : queues_)
            if (!q.empty()) return false;
        return true;
    }

    // Delivers one message: picks a non-empty queue with the seeded rng
    // (per-pair order stays FIFO), records the envelope's facts at the
    // new delivery index, and hands the envelope back for dispatch.
    // Unknown recipients become dead letters and are not dispatched.
    std::optional<Envelope> step() {
        std::vector<std::pair<ActorId, ActorId>> ready;
        for (const auto& [key, q] : queues_)
            if (!q.empty()) ready.push_back(key);
        if (ready.empty()) return std::nullopt;
        const auto& key = ready[static_cast<std::size_t>(rng_.next_u64() % ready.size())];
        Envelope env = std::move(queues_[key].front());
        queues_[key].pop_front();
        ++delivery_index_;
        if (!actors_.count(env.to)) {
            log_.record_dead_letter(env.from.label(), env.to.label(), delivery_index_);
            return std::nullopt;
        }
        for (const audit::Fact& f : env.facts) log_.record(env.to.label(), f, delivery_index_);
        return env;
    }

    using Dispatcher = std::function<void(const Envelope&)>;

    // Runs until every queue drains; returns the number of deliveries
    // that reached a live actor. The dispatcher may send more messages.
    std::size_t run_to_idle(const Dispatcher& dispatch = {}) {
        std::size_t delivered = 0;
        while (!idle()) {
            auto env = step();
            if (!env) continue;  // dead letter
            ++delivered;
            if (dispatch) dispatch(*env);
        }
        return delivered;
    }

    std::uint64_t delivery_index() const { return delivery_index_; }
    const SimConfig& config() const { return config_; }
    crypto::DetRng& rng() { return rng_; }
    audit::AuditLog& log() { return log_; }

private:
    SimConfig config_;
    crypto::DetRng rng_;
    audit::AuditLog& log_;
    std::set<ActorId> actors_;
    std::map<std::pair<ActorId, ActorId>, std::deque<Envelope>> queues_;
    std::uint64_t delivery_index_ = 0;
};

// Sequences transactions in arrival order. What the service learns from
// the bytes it orders depends on who runs it: a shared third party
// accrues its own knowledge; a member-run orderer scopes those facts to
// the operating member, so non-members learn nothing new.
class OrderingService {
public:
    OrderingService(ActorId id, OrdererMode mode, std::string operator_member = {})
        : id_(std::move(id)), mode_(mode), operator_member_(std::move(operator_member)) {}

    const ActorId& id() const { return id_; }
    OrdererMode mode() const { return mode_; }

    std::vector<ledger::Transaction> order(std::vector<ledger::Transaction> batch,
                                           audit::AuditLog& log, std::uint64_t delivery_index) {
        for (const ledger::Transaction& tx : batch) observe(tx, log, delivery_index);
        ++sequence_;
        return batch;  // arrival order is preserved
    }

    // Facts the operator of the ordering node learns from one
    // transaction's wire bytes. Confidential content is visible only
    // when the payload actually carries it inline.
    std::vector<audit::Fact> observed_facts(const ledger::Transaction& tx) const {
        std::vector<audit::Fact> facts;
        facts.push_back(audit::TxExistence{tx.id});
        facts.push_back(audit::TxParticipants{tx.id, tx.participants});
        if (!tx.inputs.empty()) facts.push_back(audit::InputRef{tx.id, tx.inputs});
        if (std::holds_alternative<ledger::InlinePayload>(tx.payload))
            facts.push_back(audit::TxPayload{tx.id, ledger::payload_content_hash(tx.payload)});
        return facts;
    }

    std::uint64_t sequence() const { return sequence_; }

    std::string knowledge_scope() const {
        return mode_ == OrdererMode::SharedThirdParty ? id_.label() : operator_member_;
    }

private:
    void observe(const ledger::Transaction& tx, audit::AuditLog& log, std::uint64_t delivery_index) {
        const std::string scope = knowledge_scope();
        for (const audit::Fact& f : observed_facts(tx)) log.record(scope, f, delivery_index);
    }

    ActorId id_;
    OrdererMode mode_;
    std::string operator_member_;
    std::uint64_t sequence_ = 0;
};

// Uniqueness service: consumes input refs exactly once. A validating
// notary sees whole transactions; a non-validating one sees only ids
// and input refs, trading notary knowledge against notary assurance.
class NotaryService {
public:
    NotaryService(ActorId id, NotaryMode mode, crypto::KeyPair keys)
        : id_(std::move(id)), mode_(mode), keys_(std::move(keys)) {}

    const ActorId& id() const { return id_; }
    NotaryMode mode() const { return mode_; }
    const Bytes& public_key() const { return keys_.public_key; }

    NotarySignature notarize(const NotarySignRequest& req, audit::AuditLog& log,
                             std::uint64_t delivery_index) {
        log.record(id_.label(), audit::TxExistence{req.tx_id}, delivery_index);
        if (!req.inputs.empty())
            log.record(id_.label(), audit::InputRef{req.tx_id, req.inputs}, delivery_index);
        if (mode_ == NotaryMode::Validating && req.tx) {
            log.record(id_.label(), audit::TxParticipants{req.tx_id, req.tx->participants},
                       delivery_index);
            log.record(id_.label(),
                       audit::TxPayload{req.tx_id, ledger::payload_content_hash(req.tx->payload)},
                       delivery_index);
        }
        NotarySignature out;
        out.tx_id = req.tx_id;
        for (const ledger::AssetRef& ref : req.inputs) {
            if (consumed_.count(ref)) {
                out.ok = false;
                out.reason = ledger::Rejection::DoubleSpend;
                return out;
            }
        }
        for (const ledger::AssetRef& ref : req.inputs) consumed_.insert(ref);
        out.signature = crypto::sign(keys_.secret, req.signing_message);
        return out;
    }

    bool is_consumed(const ledger::AssetRef& ref) const { return consumed_.count(ref) > 0; }

private:
    ActorId id_;
    NotaryMode mode_;
    crypto::KeyPair keys_;
    std::set<ledger::AssetRef> consumed_;
};

}  // namespace ledgerlab::netsim

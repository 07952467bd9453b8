#pragma once

// Three deployment topologies behind one strategy interface:
//   Channelized        — per-group shared ledgers, a central ordering
//                        service that sees transaction bytes, off-chain
//                        collections anchored by salted hashes.
//   PointToPoint       — per-party vaults, transactions travel only to
//                        involved parties, a uniqueness notary, one-time
//                        keys and Merkle tear-off views for attestors.
//   PublicAnchor       — one global chain carrying content hashes and a
//                        public participant list; plaintext moves through
//                        a transaction manager to participants only.
// Every information transfer lands in the audit log, so the same
// scenario replayed across topologies yields comparable leakage matrices.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ledgerlab/audit.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/identity.hpp"
#include "ledgerlab/ledger.hpp"
#include "ledgerlab/merkle.hpp"
#include "ledgerlab/netsim.hpp"

namespace ledgerlab::topo {

using crypto::Digest;

enum class TopologyKind { Channelized, PointToPoint, PublicAnchor };

inline const char* topology_name(TopologyKind k) {
    switch (k) {
        case TopologyKind::Channelized: return "channelized";
        case TopologyKind::PointToPoint: return "p2p";
        case TopologyKind::PublicAnchor: return "public-anchor";
    }
    return "?";
}

inline std::optional<TopologyKind> topology_from_name(const std::string& name) {
    if (name == "channelized") return TopologyKind::Channelized;
    if (name == "p2p" || name == "point-to-point") return TopologyKind::PointToPoint;
    if (name == "public-anchor") return TopologyKind::PublicAnchor;
    return std::nullopt;
}

enum class LedgerScope { SharedChannel, PairwisePerTx, GlobalWithPrivateState };

// Privacy mechanisms a platform may provide, and how much work each
// costs there: supported natively, possible with available hooks, needs
// a platform rewrite, or not applicable to the architecture.
enum class Mechanism {
    SeparationOfLedgers,
    OneTimePublicKeys,
    OffChainPeerData,
    SymmetricKeys,
    MerkleTearOffs,
    InstallOnInvolvedNodes,
    OffChainExecutionEngine,
};

inline constexpr Mechanism kAllMechanisms[] = {
    Mechanism::SeparationOfLedgers,    Mechanism::OneTimePublicKeys,
    Mechanism::OffChainPeerData,       Mechanism::SymmetricKeys,
    Mechanism::MerkleTearOffs,         Mechanism::InstallOnInvolvedNodes,
    Mechanism::OffChainExecutionEngine,
};

inline const char* mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::SeparationOfLedgers: return "separation-of-ledgers";
        case Mechanism::OneTimePublicKeys: return "one-time-public-keys";
        case Mechanism::OffChainPeerData: return "off-chain-peer-data";
        case Mechanism::SymmetricKeys: return "symmetric-keys";
        case Mechanism::MerkleTearOffs: return "merkle-tear-offs";
        case Mechanism::InstallOnInvolvedNodes: return "install-on-involved-nodes";
        case Mechanism::OffChainExecutionEngine: return "off-chain-execution-engine";
    }
    return "?";
}

enum class Support { Native, Possible, Rewrite, NotApplicable };

inline const char* support_name(Support s) {
    switch (s) {
        case Support::Native: return "native";
        case Support::Possible: return "possible";
        case Support::Rewrite: return "rewrite";
        case Support::NotApplicable: return "not-applicable";
    }
    return "?";
}

struct GroupDescriptor {
    std::string id;
    std::vector<netsim::ActorId> members;
    LedgerScope scope = LedgerScope::SharedChannel;
};

// Who received how much of one transaction's content.
struct DistributionRecord {
    Digest tx;
    std::map<std::string, netsim::ContentClass> classes;
};

enum class SubmitStatus { Committed, Rejected };

struct SubmitResult {
    SubmitStatus status = SubmitStatus::Committed;
    Digest tx_id;
    ledger::Rejection reason = ledger::Rejection::None;
    std::vector<ledger::Rejection> warnings;
};

enum class QueryStatus { Value, Undecryptable, Absent };

inline const char* query_status_name(QueryStatus s) {
    switch (s) {
        case QueryStatus::Value: return "value";
        case QueryStatus::Undecryptable: return "undecryptable";
        case QueryStatus::Absent: return "absent";
    }
    return "?";
}

struct QueryResult {
    QueryStatus status = QueryStatus::Absent;
    Bytes value;
};

enum class DoubleSpendOutcome { SecondRejected, BothCommitted };

inline const char* double_spend_outcome_name(DoubleSpendOutcome o) {
    return o == DoubleSpendOutcome::SecondRejected ? "SecondRejected" : "BothCommitted";
}

struct DoubleSpendResult {
    DoubleSpendOutcome outcome = DoubleSpendOutcome::SecondRejected;
    ledger::Rejection reason = ledger::Rejection::None;
    Digest first_tx;
    Digest second_tx;
};

struct PayloadSpec {
    enum class Kind { Inline, Encrypted, Anchor, TearOff };
    Kind kind = Kind::Inline;
    Bytes data;
};

struct SubmitOptions {
    std::string submitter;                 // default: owner of participants[0]
    std::vector<std::string> collection;   // Channelized anchor payloads: off-chain sub-group
    std::string collection_id;             // stable name for the collection (default: derived from tx id)
    std::string oracle;                    // PointToPoint tear-off payloads: attestor party
};

struct DeploymentRecord {
    std::string contract;
    std::uint32_t version = 0;
    std::vector<std::string> installers;
};

struct Attestation {
    std::string kind;  // "notary" | "oracle"
    Bytes signer_key;
    crypto::Signature signature;
};

struct PlatformConfig {
    netsim::SimConfig sim;
    std::string orderer_operator;  // MemberRun mode; default first registered party
};

namespace detail {

// Minimal reader matching Encoder's length-prefixed layout.
class Cursor {
public:
    explicit Cursor(const Bytes& data) : data_(data) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = (std::uint32_t(data_[pos_]) << 24) | (std::uint32_t(data_[pos_ + 1]) << 16) |
                          (std::uint32_t(data_[pos_ + 2]) << 8) | std::uint32_t(data_[pos_ + 3]);
        pos_ += 4;
        return v;
    }

    Bytes field() {
        std::uint32_t n = u32();
        need(n);
        Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    Bytes raw(std::size_t n) {
        need(n);
        Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > data_.size())
            throw LabError(ErrorCode::MalformedInput, "truncated encoded structure");
    }

    const Bytes& data_;
    std::size_t pos_ = 0;
};

inline Bytes make_nonce(std::uint64_t counter) {
    Bytes nonce(crypto::kNonceSize, 0);
    Bytes b = be64(counter);
    std::copy(b.begin(), b.end(), nonce.begin() + 4);
    return nonce;
}

// Content randomness (salts, data keys, long-term identities) is derived
// from labels, not from the simulation seed: the seed schedules message
// interleaving only, so runs under different seeds still commit
// byte-identical transactions and reach the same ledger heads.
inline std::uint64_t label_seed(const std::string& label) {
    auto digest = crypto::hash(label);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | digest.bytes[static_cast<std::size_t>(i)];
    return v;
}

inline crypto::DetRng label_rng(const std::string& label) { return crypto::DetRng(label_seed(label)); }

// Confidential section of a hash-anchored transaction: the payload plus
// the asset movements, which stay off the public chain.
struct PrivateSection {
    Bytes payload_data;
    std::vector<ledger::AssetRef> inputs;
    std::vector<ledger::Output> outputs;
};

inline Bytes encode_private_section(const PrivateSection& s) {
    Encoder enc("ledgerlab.private.v1");
    enc.field(s.payload_data);
    enc.u32(static_cast<std::uint32_t>(s.inputs.size()));
    for (const ledger::AssetRef& ref : s.inputs) {
        enc.raw(ref.tx.to_bytes());
        enc.u32(ref.index);
    }
    enc.u32(static_cast<std::uint32_t>(s.outputs.size()));
    for (const ledger::Output& out : s.outputs) {
        enc.field(out.owner);
        enc.field(out.value);
    }
    return enc.bytes();
}

inline PrivateSection decode_private_section(const Bytes& blob) {
    Cursor cur(blob);
    Bytes tag = cur.field();
    if (tag != to_bytes("ledgerlab.private.v1"))
        throw LabError(ErrorCode::MalformedInput, "bad private section tag");
    PrivateSection s;
    s.payload_data = cur.field();
    std::uint32_t nin = cur.u32();
    for (std::uint32_t i = 0; i < nin; ++i) {
        ledger::AssetRef ref;
        ref.tx = Digest::from_bytes(cur.raw(32));
        ref.index = cur.u32();
        s.inputs.push_back(ref);
    }
    std::uint32_t nout = cur.u32();
    for (std::uint32_t i = 0; i < nout; ++i) {
        ledger::Output out;
        out.owner = cur.field();
        out.value = cur.field();
        s.outputs.push_back(out);
    }
    return s;
}

}  // namespace detail

class Platform {
public:
    virtual ~Platform() = default;

    virtual TopologyKind kind() const = 0;
    virtual std::map<Mechanism, Support> capabilities() const = 0;

    // ---- party management -------------------------------------------

    void register_party(const std::string& name) {
        if (finalized_) throw LabError(ErrorCode::BadScenario, "registration already finalized");
        if (name.empty()) throw LabError(ErrorCode::MalformedInput, "empty party name");
        for (const char* reserved : {"orderer", "notary", "txmanager", "ca"})
            if (name == reserved) throw LabError(ErrorCode::DuplicateName, "reserved name: " + name);
        if (parties_.count(name)) throw LabError(ErrorCode::DuplicateName, "party exists: " + name);
        PartyInfo info;
        info.actor = netsim::ActorId{netsim::Role::Party, name};
        Encoder seed("ledgerlab.party.v1");
        seed.field(name);
        info.keys = crypto::keygen(crypto::hash(seed.bytes()).to_bytes());
        info.cert = ca_.issue(name, info.keys.public_key);
        sim_->add_actor(info.actor);
        key_owner_[info.keys.public_key] = name;
        party_order_.push_back(name);
        parties_.emplace(name, std::move(info));
        on_register(name);
    }

    // Onboarding ends with the membership service publishing the party
    // list: every actor learns every registered party's identity.
    void finalize_registration() {
        if (finalized_) return;
        finalized_ = true;
        on_finalize();
        for (const netsim::ActorId& actor : sim_->actors()) {
            for (const std::string& name : party_order_) {
                log_.record(actor.label(),
                            audit::PartyIdentity{parties_.at(name).keys.public_key, name},
                            sim_->delivery_index());
            }
        }
    }

    bool has_party(const std::string& name) const { return parties_.count(name) > 0; }

    const Bytes& party_public_key(const std::string& name) const {
        return party(name).keys.public_key;
    }

    const std::vector<std::string>& party_names() const { return party_order_; }

    // ---- groups and contracts ---------------------------------------

    virtual GroupDescriptor create_group(const std::string& id,
                                         const std::vector<std::string>& members) = 0;

    const GroupDescriptor& group(const std::string& id) const {
        auto it = groups_.find(id);
        if (it == groups_.end()) throw LabError(ErrorCode::UnknownGroup, "no group: " + id);
        return it->second;
    }

    virtual DeploymentRecord deploy_contract(const std::string& group_id,
                                             const ledger::Contract& contract,
                                             const std::vector<std::string>& install_set) {
        ensure_finalized();
        const GroupDescriptor& desc = group(group_id);
        for (const std::string& name : install_set) {
            bool member = false;
            for (const netsim::ActorId& m : desc.members)
                if (m.name == name) member = true;
            if (!member)
                throw LabError(ErrorCode::UnknownMember, "installer outside group: " + name);
        }
        contracts_[contract.id] = contract;
        install_sets_[contract.id] = std::set<std::string>(install_set.begin(), install_set.end());
        if (contract.mode == ledger::ExecutionMode::OnNode) {
            for (const std::string& name : install_set) {
                log_.record(name, audit::ContractLogic{contract.id, contract.version},
                            sim_->delivery_index());
            }
        }
        return DeploymentRecord{contract.id, contract.version, install_set};
    }

    const ledger::Contract& contract(const std::string& id) const {
        auto it = contracts_.find(id);
        if (it == contracts_.end()) throw LabError(ErrorCode::UnknownContract, "no contract: " + id);
        return it->second;
    }

    bool holds_code(const std::string& party_name, const std::string& contract_id) const {
        auto it = install_sets_.find(contract_id);
        if (it == install_sets_.end()) return false;
        auto cit = contracts_.find(contract_id);
        if (cit != contracts_.end() && cit->second.mode == ledger::ExecutionMode::OffChainEngine)
            return false;
        return it->second.count(party_name) > 0;
    }

    // ---- transaction construction -----------------------------------

    ledger::Transaction build_mint(const std::string& owner, const std::string& group_id,
                                   const std::string& contract_id, const Bytes& value,
                                   const PayloadSpec& spec = {}) {
        ensure_finalized();
        const PartyInfo& info = party(owner);
        std::vector<Bytes> participants{info.keys.public_key};
        std::vector<ledger::Output> outputs{{info.keys.public_key, value}};
        ledger::Payload payload =
            make_payload(spec, group_id, contract_id, participants, {}, outputs);
        ledger::Transaction tx = ledger::make_transaction(group_id, participants, payload, {},
                                                          outputs, contract_id);
        return ledger::sign_transaction(std::move(tx), info.keys);
    }

    // One-time recipient keys default on for point-to-point transfers of
    // assets that have already moved once (beyond the initiating pair).
    ledger::Transaction build_transfer(const std::string& from, const std::string& to,
                                       const ledger::AssetRef& ref, const PayloadSpec& spec = {},
                                       std::optional<bool> one_time = std::nullopt,
                                       bool allow_spent = false) {
        ensure_finalized();
        auto ctx_it = contexts_.find(ref);
        if (ctx_it == contexts_.end())
            throw LabError(ErrorCode::UnknownAsset, "no such asset output");
        const AssetContext& ctx = ctx_it->second;
        if (ctx.owner_party != from)
            throw LabError(ErrorCode::UnknownAsset, from + " does not hold this asset");
        if (ctx.spent && !allow_spent)
            throw LabError(ErrorCode::UnknownAsset, "asset already spent");
        const PartyInfo& sender = party(from);
        PartyInfo& receiver = party_mut(to);

        bool use_one_time =
            one_time.value_or(kind() == TopologyKind::PointToPoint && ctx.hops >= 1);
        if (use_one_time && capabilities().at(Mechanism::OneTimePublicKeys) == Support::Rewrite)
            throw LabError(ErrorCode::BadScenario,
                           "one-time keys need a platform rewrite on this topology");

        Bytes receiver_key = receiver.keys.public_key;
        if (use_one_time) {
            auto [otk, link] =
                identity::derive_one_time(receiver.keys, ++receiver.one_time_counter, ca_);
            receiver_key = otk.public_key;
            one_time_keys_[receiver_key] = otk;
            key_owner_[receiver_key] = to;
            links_.push_back(link);
            pending_links_[receiver_key] = link;
        }

        std::vector<Bytes> participants{sender.keys.public_key, receiver_key};
        std::vector<ledger::Output> outputs{{receiver_key, ctx.value}};
        std::vector<ledger::AssetRef> inputs{ref};
        ledger::Payload payload =
            make_payload(spec, ctx.group, ctx.contract, participants, inputs, outputs);
        ledger::Transaction tx = ledger::make_transaction(ctx.group, participants, payload, inputs,
                                                          outputs, ctx.contract);
        tx = ledger::sign_transaction(std::move(tx), sender.keys);
        tx = ledger::sign_transaction(std::move(tx),
                                      use_one_time ? one_time_keys_.at(receiver_key)
                                                   : receiver.keys);
        return tx;
    }

    virtual SubmitResult submit(const ledger::Transaction& tx, const SubmitOptions& opts = {}) = 0;

    // First spend must commit; the second reuses the consumed input with
    // a different receiver. Whether anyone can catch it depends on who
    // can see the input.
    DoubleSpendResult attempt_double_spend(const std::string& owner, const ledger::AssetRef& ref,
                                           const std::string& receiver1,
                                           const std::string& receiver2) {
        ledger::Transaction tx1 =
            build_transfer(owner, receiver1, ref, PayloadSpec{PayloadSpec::Kind::Inline, to_bytes("spend-1")},
                           false);
        SubmitResult s1 = submit(tx1);
        if (s1.status != SubmitStatus::Committed)
            throw LabError(ErrorCode::BadScenario, "first spend failed to commit");
        ledger::Transaction tx2 =
            build_transfer(owner, receiver2, ref, PayloadSpec{PayloadSpec::Kind::Inline, to_bytes("spend-2")},
                           false, /*allow_spent=*/true);
        SubmitResult s2 = submit(tx2);
        DoubleSpendResult out;
        out.first_tx = s1.tx_id;
        out.second_tx = s2.tx_id;
        out.outcome = s2.status == SubmitStatus::Committed ? DoubleSpendOutcome::BothCommitted
                                                           : DoubleSpendOutcome::SecondRejected;
        out.reason = s2.reason;
        return out;
    }

    // ---- inspection ---------------------------------------------------

    QueryResult query_state(const std::string& party_name, const Digest& tx_id) const {
        party(party_name);  // throws for unknown party
        auto pit = plaintext_.find(party_name);
        if (pit != plaintext_.end()) {
            auto it = pit->second.find(tx_id);
            if (it != pit->second.end()) return QueryResult{QueryStatus::Value, it->second};
        }
        auto sit = seen_.find(party_name);
        if (sit != seen_.end() && sit->second.count(tx_id))
            return QueryResult{QueryStatus::Undecryptable, {}};
        return QueryResult{QueryStatus::Absent, {}};
    }

    const DistributionRecord& distribution(const Digest& tx_id) const {
        auto it = distributions_.find(tx_id);
        if (it == distributions_.end())
            throw LabError(ErrorCode::MalformedInput, "no distribution record for tx");
        return it->second;
    }

    // Current unspent outputs resolved to holding parties (one-time keys
    // resolve through the platform's linkage records).
    virtual std::map<ledger::AssetRef, std::string> holdings() const = 0;

    virtual std::string dumps() const = 0;
    virtual Digest head() const = 0;

    virtual void purge_off_chain(const Digest&) {
        throw LabError(ErrorCode::BadScenario, "no off-chain store on this topology");
    }

    audit::AuditLog& log() { return log_; }
    const audit::AuditLog& log() const { return log_; }
    netsim::Simulation& sim() { return *sim_; }
    const identity::CertificateAuthority& authority() const { return ca_; }
    const std::vector<identity::LinkingCertificate>& linking_certificates() const { return links_; }

    const std::vector<Attestation>& attestations(const Digest& tx_id) const {
        static const std::vector<Attestation> kEmpty;
        auto it = attestations_.find(tx_id);
        return it == attestations_.end() ? kEmpty : it->second;
    }

    std::string owner_of_key(const Bytes& key) const {
        auto it = key_owner_.find(key);
        return it == key_owner_.end() ? std::string{} : it->second;
    }

protected:
    struct PartyInfo {
        netsim::ActorId actor;
        crypto::KeyPair keys;
        identity::Certificate cert;
        std::uint64_t one_time_counter = 0;
    };

    struct AssetContext {
        std::string group;
        std::string contract;
        Bytes value;
        std::string owner_party;
        int hops = 0;
        bool spent = false;
    };

    explicit Platform(const PlatformConfig& config)
        : config_(config),
          ca_(crypto::keygen(crypto::hash("ledgerlab.ca.v1").to_bytes())),
          ca_actor_{netsim::Role::Authority, "ca"} {
        sim_ = std::make_unique<netsim::Simulation>(config.sim, std::vector<netsim::ActorId>{},
                                                    log_);
        sim_->add_actor(ca_actor_);
    }

    virtual void on_register(const std::string&) {}
    virtual void on_finalize() {}

    // Payload construction hook; topologies opt into non-inline kinds.
    virtual ledger::Payload make_payload(const PayloadSpec& spec, const std::string& /*group*/,
                                         const std::string& /*contract*/,
                                         const std::vector<Bytes>& /*participants*/,
                                         const std::vector<ledger::AssetRef>& /*inputs*/,
                                         const std::vector<ledger::Output>& /*outputs*/) {
        if (spec.kind != PayloadSpec::Kind::Inline)
            throw LabError(ErrorCode::BadScenario, "payload kind not supported on this topology");
        return ledger::InlinePayload{spec.data};
    }

    void ensure_finalized() { finalize_registration(); }

    const PartyInfo& party(const std::string& name) const {
        auto it = parties_.find(name);
        if (it == parties_.end()) throw LabError(ErrorCode::UnknownMember, "no party: " + name);
        return it->second;
    }

    PartyInfo& party_mut(const std::string& name) {
        auto it = parties_.find(name);
        if (it == parties_.end()) throw LabError(ErrorCode::UnknownMember, "no party: " + name);
        return it->second;
    }

    std::string resolve_submitter(const ledger::Transaction& tx, const SubmitOptions& opts) const {
        if (!opts.submitter.empty()) {
            party(opts.submitter);
            return opts.submitter;
        }
        if (tx.participants.empty())
            throw LabError(ErrorCode::EmptyParticipants, "transaction has no participants");
        auto it = key_owner_.find(tx.participants[0]);
        if (it == key_owner_.end())
            throw LabError(ErrorCode::BadScenario, "cannot resolve submitting party");
        return it->second;
    }

    std::vector<std::string> participant_parties(const ledger::Transaction& tx) const {
        std::vector<std::string> out;
        for (const Bytes& key : tx.participants) {
            auto it = key_owner_.find(key);
            if (it == key_owner_.end())
                throw LabError(ErrorCode::BadScenario, "unknown participant key");
            bool dup = false;
            for (const std::string& n : out)
                if (n == it->second) dup = true;
            if (!dup) out.push_back(it->second);
        }
        return out;
    }

    // Post-commit bookkeeping shared by all topologies.
    void note_commit(const ledger::Transaction& committed_as, const std::string& group_id,
                     const std::string& contract_id, const std::vector<ledger::AssetRef>& inputs,
                     const std::vector<ledger::Output>& outputs) {
        int hops = 0;
        for (const ledger::AssetRef& ref : inputs) {
            auto it = contexts_.find(ref);
            if (it != contexts_.end()) {
                it->second.spent = true;
                hops = std::max(hops, it->second.hops + 1);
            }
        }
        for (std::uint32_t i = 0; i < outputs.size(); ++i) {
            AssetContext ctx;
            ctx.group = group_id;
            ctx.contract = contract_id;
            ctx.value = outputs[i].value;
            auto it = key_owner_.find(outputs[i].owner);
            ctx.owner_party = it == key_owner_.end() ? std::string{} : it->second;
            ctx.hops = hops;
            contexts_[ledger::AssetRef{committed_as.id, i}] = ctx;
        }
    }

    // Deliver the linking certificate for a fresh one-time key to the
    // parties involved in the transfer; only they can open the link.
    void distribute_pending_links(const ledger::Transaction& tx,
                                  const std::vector<std::string>& involved,
                                  const netsim::ActorId& sender) {
        for (const Bytes& key : tx.participants) {
            auto it = pending_links_.find(key);
            if (it == pending_links_.end()) continue;
            Bytes blob = identity::LinkingCertificate::message(it->second.one_time_public,
                                                             it->second.long_term_public) +
                         it->second.issuer_signature.bytes;
            for (const std::string& name : involved) {
                netsim::Envelope env;
                env.from = sender;
                env.to = party(name).actor;
                env.body = netsim::PrivatePayload{tx.id, "linkage", blob};
                env.facts = {audit::KeyLinkage{it->second.one_time_public, it->second.long_term_public}};
                sim_->send(std::move(env));
            }
            pending_links_.erase(it);
        }
    }

    void mark_seen(const std::string& party_name, const Digest& tx_id) {
        seen_[party_name].insert(tx_id);
    }

    void hold_plaintext(const std::string& party_name, const Digest& tx_id, const Bytes& data) {
        plaintext_[party_name][tx_id] = data;
        seen_[party_name].insert(tx_id);
    }

    std::map<ledger::AssetRef, std::string> resolve_owners(const ledger::AssetState& state) const {
        std::map<ledger::AssetRef, std::string> out;
        for (const auto& [ref, output] : state.unspent()) {
            auto it = key_owner_.find(output.owner);
            out[ref] = it == key_owner_.end() ? to_hex(output.owner).substr(0, 16) : it->second;
        }
        return out;
    }

    PlatformConfig config_;
    audit::AuditLog log_;  // must outlive sim_
    std::unique_ptr<netsim::Simulation> sim_;
    identity::CertificateAuthority ca_;
    netsim::ActorId ca_actor_;
    bool finalized_ = false;

    std::map<std::string, PartyInfo> parties_;
    std::vector<std::string> party_order_;
    std::map<Bytes, std::string> key_owner_;
    std::map<Bytes, crypto::KeyPair> one_time_keys_;
    std::map<Bytes, identity::LinkingCertificate> pending_links_;
    std::vector<identity::LinkingCertificate> links_;

    std::map<std::string, ledger::Contract> contracts_;
    std::map<std::string, std::set<std::string>> install_sets_;
    std::map<std::string, GroupDescriptor> groups_;

    std::map<Digest, DistributionRecord> distributions_;
    std::map<std::string, std::map<Digest, Bytes>> plaintext_;
    std::map<std::string, std::set<Digest>> seen_;
    std::map<ledger::AssetRef, AssetContext> contexts_;
    std::map<Digest, std::vector<Attestation>> attestations_;
};

// ---------------------------------------------------------------------
// Channelized: shared per-group ledgers, ordering service, collections.
// ---------------------------------------------------------------------

class ChannelizedPlatform : public Platform {
public:
    explicit ChannelizedPlatform(const PlatformConfig& config)
        : Platform(config), orderer_actor_{netsim::Role::Orderer, "orderer"} {
        sim_->add_actor(orderer_actor_);
    }

    TopologyKind kind() const override { return TopologyKind::Channelized; }

    std::map<Mechanism, Support> capabilities() const override {
        return {
            {Mechanism::SeparationOfLedgers, Support::Native},
            {Mechanism::OneTimePublicKeys, Support::Rewrite},
            {Mechanism::OffChainPeerData, Support::Native},
            {Mechanism::SymmetricKeys, Support::Native},
            {Mechanism::MerkleTearOffs, Support::Possible},
            {Mechanism::InstallOnInvolvedNodes, Support::Native},
            {Mechanism::OffChainExecutionEngine, Support::Possible},
        };
    }

    // A channel: its own ledger, its own symmetric key, its own
    // off-chain store. Membership is known to members and to whoever
    // operates ordering.
    GroupDescriptor create_group(const std::string& id,
                                 const std::vector<std::string>& members) override {
        ensure_finalized();
        if (groups_.count(id)) throw LabError(ErrorCode::DuplicateName, "group exists: " + id);
        if (members.empty()) throw LabError(ErrorCode::BadScenario, "group needs members");
        GroupDescriptor desc;
        desc.id = id;
        desc.scope = LedgerScope::SharedChannel;
        for (const std::string& name : members) desc.members.push_back(party(name).actor);
        groups_[id] = desc;

        Channel channel;
        crypto::DetRng key_rng = detail::label_rng("channel-key:" + id);
        channel.key = crypto::SymmetricKey::from_bytes(key_rng.next_bytes(32));
        channel.store = std::make_unique<ledger::PrivateDataStore>(detail::label_rng("store:" + id));
        channels_.emplace(id, std::move(channel));

        for (const std::string& member : members) {
            for (const std::string& other : members) {
                log_.record(member, audit::GroupMembership{id, other}, sim_->delivery_index());
                log_.record(orderer_scope(), audit::GroupMembership{id, other},
                            sim_->delivery_index());
            }
        }
        return desc;
    }

    SubmitResult submit(const ledger::Transaction& tx, const SubmitOptions& opts = {}) override {
        ensure_finalized();
        auto chan_it = channels_.find(tx.group);
        if (chan_it == channels_.end())
            throw LabError(ErrorCode::UnknownGroup, "no channel: " + tx.group);
        Channel& channel = chan_it->second;
        const GroupDescriptor& desc = groups_.at(tx.group);
        const ledger::Contract& con = contract(tx.contract);
        std::string submitter = resolve_submitter(tx, opts);

        // Confidential content the submitter holds for this payload.
        std::optional<Bytes> content = payload_content(channel, tx);

        record_author_facts(submitter, tx, content);
        if (content) hold_plaintext(submitter, tx.id, *content);
        else mark_seen(submitter, tx.id);

        // Ordering happens before validation, so the ordering operator
        // observes even transactions that later fail validation.
        orderer().order({tx}, log_, sim_->delivery_index());

        ledger::ValidationResult verdict;
        for (const netsim::ActorId& member : desc.members) {
            ledger::ValidationResult v =
                ledger::validate(tx, channel.ledger.state(), con,
                                 holds_code(member.name, tx.contract),
                                 [](const ledger::AssetRef&) { return true; });
            for (ledger::Rejection w : v.warnings) verdict.warnings.push_back(w);
            if (!v.ok) {
                verdict = v;
                break;
            }
        }
        if (!verdict.ok) {
            sim_->run_to_idle();
            return SubmitResult{SubmitStatus::Rejected, tx.id, verdict.reason, verdict.warnings};
        }

        channel.ledger.append({tx});
        note_commit(tx, tx.group, tx.contract, tx.inputs, tx.outputs);

        DistributionRecord dist;
        dist.tx = tx.id;
        dist.classes[orderer_scope()] = std::holds_alternative<ledger::InlinePayload>(tx.payload)
                                            ? netsim::ContentClass::Full
                                            : netsim::ContentClass::HashOnly;

        const auto* anchor = std::get_if<ledger::AnchorPayload>(&tx.payload);
        std::set<std::string> collection(opts.collection.begin(), opts.collection.end());
        if (anchor && collection.empty()) collection.insert(submitter);
        std::string collection_id = opts.collection_id.empty()
                                        ? "collection:" + tx.id.hex().substr(0, 16)
                                        : opts.collection_id;

        for (const netsim::ActorId& member : desc.members) {
            bool member_content = content.has_value() && !anchor;
            bool in_collection = anchor && collection.count(member.name) > 0;

            netsim::Envelope env;
            env.from = orderer_actor_;
            env.to = member;
            env.body = netsim::TxDistribution{tx, netsim::ContentClass::Full, std::nullopt};
            env.facts = {audit::TxExistence{tx.id}, audit::TxParticipants{tx.id, tx.participants}};
            if (!tx.inputs.empty()) env.facts.push_back(audit::InputRef{tx.id, tx.inputs});
            if (member_content && content)
                env.facts.push_back(audit::TxPayload{tx.id, crypto::hash(*content)});
            if (anchor) {
                // The collection list rides in the transaction: every
                // channel member learns who holds the off-chain data.
                for (const std::string& holder : collection)
                    env.facts.push_back(audit::GroupMembership{collection_id, holder});
            }
            sim_->send(std::move(env));

            if (member_content && content) {
                hold_plaintext(member.name, tx.id, *content);
                dist.classes[member.name] = netsim::ContentClass::Full;
            } else if (in_collection && content) {
                // Off-chain data travels peer-to-peer with its salt so
                // the holder can check it against the on-chain anchor.
                Bytes salt = channel.store->salt(anchor->digest).value_or(Bytes{});
                netsim::Envelope data_env;
                data_env.from = party(submitter).actor;
                data_env.to = member;
                data_env.body = netsim::PrivatePayload{tx.id, "anchored-data", salt + *content};
                data_env.facts = {audit::TxPayload{tx.id, crypto::hash(*content)}};
                sim_->send(std::move(data_env));
                hold_plaintext(member.name, tx.id, *content);
                dist.classes[member.name] = netsim::ContentClass::Full;
            } else {
                mark_seen(member.name, tx.id);
                dist.classes[member.name] =
                    std::holds_alternative<ledger::EncryptedPayload>(tx.payload)
                        ? netsim::ContentClass::EncryptedOnly
                        : netsim::ContentClass::HashOnly;
            }
        }
        distributions_[tx.id] = dist;
        sim_->run_to_idle();
        return SubmitResult{SubmitStatus::Committed, tx.id, ledger::Rejection::None,
                            verdict.warnings};
    }

    void purge_off_chain(const Digest& tx_id) override {
        for (auto& [id, channel] : channels_) {
            const ledger::Transaction* tx = channel.ledger.transaction(tx_id);
            if (!tx) continue;
            const auto* anchor = std::get_if<ledger::AnchorPayload>(&tx->payload);
            if (!anchor)
                throw LabError(ErrorCode::BadScenario, "transaction has no off-chain anchor");
            channel.store->purge(anchor->digest);
            return;
        }
        throw LabError(ErrorCode::BadScenario, "unknown transaction");
    }

    std::map<ledger::AssetRef, std::string> holdings() const override {
        std::map<ledger::AssetRef, std::string> out;
        for (const auto& [id, channel] : channels_) {
            auto part = resolve_owners(channel.ledger.state());
            out.insert(part.begin(), part.end());
        }
        return out;
    }

    Digest head() const override {
        Encoder enc("heads");
        for (const auto& [id, channel] : channels_) {
            enc.field(id);
            enc.raw(channel.ledger.head().to_bytes());
        }
        return crypto::hash(enc.bytes());
    }

    std::string dumps() const override {
        std::ostringstream out;
        for (const auto& [id, channel] : channels_) {
            out << "ledger channel=" << id << "\n" << channel.ledger.dump();
        }
        return out.str();
    }

    const ledger::Ledger& channel_ledger(const std::string& id) const {
        auto it = channels_.find(id);
        if (it == channels_.end()) throw LabError(ErrorCode::UnknownGroup, "no channel: " + id);
        return it->second.ledger;
    }

    ledger::PrivateDataStore& channel_store(const std::string& id) {
        auto it = channels_.find(id);
        if (it == channels_.end()) throw LabError(ErrorCode::UnknownGroup, "no channel: " + id);
        return *it->second.store;
    }

    netsim::OrderingService& orderer() {
        if (!orderer_) {
            std::string op = config_.orderer_operator;
            if (op.empty() && !party_order_.empty()) op = party_order_[0];
            orderer_ = std::make_unique<netsim::OrderingService>(orderer_actor_,
                                                                 config_.sim.orderer_mode, op);
        }
        return *orderer_;
    }

protected:
    ledger::Payload make_payload(const PayloadSpec& spec, const std::string& group_id,
                                 const std::string&, const std::vector<Bytes>&,
                                 const std::vector<ledger::AssetRef>&,
                                 const std::vector<ledger::Output>&) override {
        auto it = channels_.find(group_id);
        if (it == channels_.end())
            throw LabError(ErrorCode::UnknownGroup, "no channel: " + group_id);
        Channel& channel = it->second;
        switch (spec.kind) {
            case PayloadSpec::Kind::Inline:
                return ledger::InlinePayload{spec.data};
            case PayloadSpec::Kind::Encrypted: {
                auto nonce = detail::make_nonce(channel.nonce_counter++);
                Bytes ct = crypto::aead_seal(channel.key, nonce, spec.data, to_bytes(group_id));
                encrypted_bodies_[crypto::hash(ct)] = spec.data;
                return ledger::EncryptedPayload{ct, "channel:" + group_id};
            }
            case PayloadSpec::Kind::Anchor:
                return ledger::AnchorPayload{channel.store->anchor(spec.data)};
            case PayloadSpec::Kind::TearOff:
                throw LabError(ErrorCode::BadScenario,
                               "tear-off payloads not wired on this topology");
        }
        throw LabError(ErrorCode::BadScenario, "unhandled payload kind");
    }

private:
    struct Channel {
        ledger::Ledger ledger;
        crypto::SymmetricKey key;
        std::uint64_t nonce_counter = 0;
        std::unique_ptr<ledger::PrivateDataStore> store;
    };

    std::string orderer_scope() {
        return orderer().knowledge_scope();
    }

    // What content the submitting side can hand to authorized readers.
    // Encrypted payloads resolve through the seal-time record: members
    // hold the channel key, so anything sealed under it is theirs to read.
    std::optional<Bytes> payload_content(Channel& channel, const ledger::Transaction& tx) const {
        if (const auto* in = std::get_if<ledger::InlinePayload>(&tx.payload)) return in->data;
        if (const auto* enc = std::get_if<ledger::EncryptedPayload>(&tx.payload)) {
            auto it = encrypted_bodies_.find(crypto::hash(enc->ciphertext));
            if (it == encrypted_bodies_.end()) return std::nullopt;
            return it->second;
        }
        if (const auto* anchor = std::get_if<ledger::AnchorPayload>(&tx.payload))
            return channel.store->retrieve(anchor->digest);
        return std::nullopt;
    }

    void record_author_facts(const std::string& submitter, const ledger::Transaction& tx,
                             const std::optional<Bytes>& content) {
        log_.record(submitter, audit::TxExistence{tx.id}, sim_->delivery_index());
        log_.record(submitter, audit::TxParticipants{tx.id, tx.participants},
                    sim_->delivery_index());
        if (!tx.inputs.empty())
            log_.record(submitter, audit::InputRef{tx.id, tx.inputs}, sim_->delivery_index());
        if (content)
            log_.record(submitter, audit::TxPayload{tx.id, crypto::hash(*content)},
                        sim_->delivery_index());
    }

    netsim::ActorId orderer_actor_;
    std::unique_ptr<netsim::OrderingService> orderer_;
    std::map<std::string, Channel> channels_;
    std::map<Digest, Bytes> encrypted_bodies_;
};

// ---------------------------------------------------------------------
// PointToPoint: per-party vaults, uniqueness notary, tear-off oracles.
// ---------------------------------------------------------------------

class PointToPointPlatform : public Platform {
public:
    explicit PointToPointPlatform(const PlatformConfig& config)
        : Platform(config), notary_actor_{netsim::Role::Notary, "notary"} {
        sim_->add_actor(notary_actor_);
        notary_ = std::make_unique<netsim::NotaryService>(
            notary_actor_, config.sim.notary_mode,
            crypto::keygen(crypto::hash("ledgerlab.notary.v1").to_bytes()));
    }

    TopologyKind kind() const override { return TopologyKind::PointToPoint; }

    std::map<Mechanism, Support> capabilities() const override {
        return {
            {Mechanism::SeparationOfLedgers, Support::Native},
            {Mechanism::OneTimePublicKeys, Support::Native},
            {Mechanism::OffChainPeerData, Support::Possible},
            {Mechanism::SymmetricKeys, Support::Native},
            {Mechanism::MerkleTearOffs, Support::Native},
            {Mechanism::InstallOnInvolvedNodes, Support::NotApplicable},
            {Mechanism::OffChainExecutionEngine, Support::Native},
        };
    }

    // No shared artifact is created: a "group" is a business agreement
    // among the members, invisible to everyone else.
    GroupDescriptor create_group(const std::string& id,
                                 const std::vector<std::string>& members) override {
        ensure_finalized();
        if (groups_.count(id)) throw LabError(ErrorCode::DuplicateName, "group exists: " + id);
        GroupDescriptor desc;
        desc.id = id;
        desc.scope = LedgerScope::PairwisePerTx;
        for (const std::string& name : members) desc.members.push_back(party(name).actor);
        groups_[id] = desc;
        for (const std::string& member : members)
            for (const std::string& other : members)
                log_.record(member, audit::GroupMembership{id, other}, sim_->delivery_index());
        return desc;
    }

    SubmitResult submit(const ledger::Transaction& tx, const SubmitOptions& opts = {}) override {
        ensure_finalized();
        const ledger::Contract& con = contract(tx.contract);
        std::string submitter = resolve_submitter(tx, opts);
        std::vector<std::string> involved = participant_parties(tx);

        std::optional<Bytes> content;
        if (const auto* in = std::get_if<ledger::InlinePayload>(&tx.payload)) content = in->data;
        if (const auto* to = std::get_if<ledger::TearOffPayload>(&tx.payload)) {
            auto it = tear_off_bodies_.find(to->root);
            if (it != tear_off_bodies_.end()) content = it->second;
        }

        record_author_facts(submitter, tx, content);

        // Point-to-point distribution: only involved parties get bytes.
        for (const std::string& name : involved) {
            if (name == submitter) continue;
            netsim::Envelope env;
            env.from = party(submitter).actor;
            env.to = party(name).actor;
            env.body = netsim::TxDistribution{tx, netsim::ContentClass::Full, std::nullopt};
            env.facts = {audit::TxExistence{tx.id}, audit::TxParticipants{tx.id, tx.participants}};
            if (!tx.inputs.empty()) env.facts.push_back(audit::InputRef{tx.id, tx.inputs});
            if (content) env.facts.push_back(audit::TxPayload{tx.id, crypto::hash(*content)});
            sim_->send(std::move(env));
        }

        // Contract code rides with the transaction to involved nodes.
        if (con.mode == ledger::ExecutionMode::OnNode) {
            for (const std::string& name : involved)
                log_.record(name, audit::ContractLogic{con.id, con.version},
                            sim_->delivery_index());
        }

        // Oracle attestation over a tear-off view: the oracle recomputes
        // the root from what it was shown and signs that, learning only
        // that the transaction exists plus the revealed leaves.
        if (const auto* to = std::get_if<ledger::TearOffPayload>(&tx.payload)) {
            if (!opts.oracle.empty()) {
                auto vit = to->views.find("oracle");
                if (vit == to->views.end())
                    throw LabError(ErrorCode::BadScenario, "tear-off payload lacks oracle view");
                const PartyInfo& oracle = party(opts.oracle);

                ledger::Transaction redacted;
                redacted.id = tx.id;
                redacted.payload = ledger::TearOffPayload{to->root, {{"oracle", vit->second}}};
                netsim::Envelope env;
                env.from = party(submitter).actor;
                env.to = oracle.actor;
                env.body =
                    netsim::TxDistribution{redacted, netsim::ContentClass::TearOffView, vit->second};
                env.facts = {audit::TxExistence{tx.id}};
                sim_->send(std::move(env));

                Digest recomputed = merkle::recompute(vit->second);
                crypto::Signature sig = crypto::sign(
                    oracle.keys.secret, ledger::signing_message_for_digest(recomputed));
                attestations_[tx.id].push_back(
                    Attestation{"oracle", oracle.keys.public_key, sig});

                netsim::Envelope reply;
                reply.from = oracle.actor;
                reply.to = party(submitter).actor;
                reply.body = netsim::NotarySignature{tx.id, true, sig, ledger::Rejection::None};
                reply.facts = {audit::TxExistence{tx.id}};
                sim_->send(std::move(reply));
            }
        }

        // Uniqueness first: a cheating submitter skips its own checks,
        // so the notary is the only line of defense against reuse.
        netsim::NotarySignRequest req;
        req.tx_id = tx.id;
        req.inputs = tx.inputs;
        req.signing_message = ledger::signing_message(tx);
        if (notary_->mode() == netsim::NotaryMode::Validating) req.tx = tx;
        netsim::NotarySignature notary_sig =
            notary_->notarize(req, log_, sim_->delivery_index());
        if (!notary_sig.ok) {
            sim_->run_to_idle();
            return SubmitResult{SubmitStatus::Rejected, tx.id, notary_sig.reason, {}};
        }
        attestations_[tx.id].push_back(
            Attestation{"notary", notary_->public_key(), notary_sig.signature});

        // Receivers validate against their own vaults; inputs they have
        // never seen surface as NotVisible warnings covered by the notary.
        ledger::ValidationResult verdict;
        for (const std::string& name : involved) {
            if (name == submitter && involved.size() > 1) continue;
            const ledger::AssetState& state = vault(name).state();
            ledger::ValidationResult v = ledger::validate(
                tx, state, con, holds_code_p2p(name, con),
                [&state](const ledger::AssetRef& ref) { return state.exists(ref); });
            for (ledger::Rejection w : v.warnings) verdict.warnings.push_back(w);
            if (!v.ok) {
                verdict = v;
                break;
            }
        }
        if (!verdict.ok) {
            sim_->run_to_idle();
            return SubmitResult{SubmitStatus::Rejected, tx.id, verdict.reason, verdict.warnings};
        }

        DistributionRecord dist;
        dist.tx = tx.id;
        for (const std::string& name : involved) {
            vault(name).append({tx});
            if (content) hold_plaintext(name, tx.id, *content);
            else mark_seen(name, tx.id);
            dist.classes[name] = netsim::ContentClass::Full;
        }
        if (!opts.oracle.empty()) dist.classes[opts.oracle] = netsim::ContentClass::TearOffView;
        dist.classes["notary"] = notary_->mode() == netsim::NotaryMode::Validating
                                     ? netsim::ContentClass::Full
                                     : netsim::ContentClass::HashOnly;
        distributions_[tx.id] = dist;

        note_commit(tx, tx.group, tx.contract, tx.inputs, tx.outputs);
        distribute_pending_links(tx, involved, party(submitter).actor);
        sim_->run_to_idle();
        return SubmitResult{SubmitStatus::Committed, tx.id, ledger::Rejection::None,
                            verdict.warnings};
    }

    std::map<ledger::AssetRef, std::string> holdings() const override {
        std::map<ledger::AssetRef, std::string> out;
        for (const auto& [name, vault] : vaults_) {
            auto part = resolve_owners(vault.state());
            for (const auto& [ref, owner] : part) {
                // An output may appear in several vaults; the holding
                // party is the one that owns the key.
                if (owner == name || !out.count(ref)) out[ref] = owner;
            }
        }
        return out;
    }

    Digest head() const override {
        Encoder enc("heads");
        for (const auto& [name, vault] : vaults_) {
            enc.field(name);
            enc.raw(vault.head().to_bytes());
        }
        return crypto::hash(enc.bytes());
    }

    std::string dumps() const override {
        std::ostringstream out;
        for (const auto& [name, vault] : vaults_) {
            out << "ledger vault=" << name << "\n" << vault.dump();
        }
        return out.str();
    }

    const ledger::Ledger& party_vault(const std::string& name) const {
        auto it = vaults_.find(name);
        if (it == vaults_.end()) throw LabError(ErrorCode::UnknownMember, "no vault: " + name);
        return it->second;
    }

    const netsim::NotaryService& notary() const { return *notary_; }

protected:
    void on_register(const std::string& name) override { vaults_.emplace(name, ledger::Ledger{}); }

    ledger::Payload make_payload(const PayloadSpec& spec, const std::string& group_id,
                                 const std::string& contract_id,
                                 const std::vector<Bytes>& participants,
                                 const std::vector<ledger::AssetRef>& inputs,
                                 const std::vector<ledger::Output>& outputs) override {
        switch (spec.kind) {
            case PayloadSpec::Kind::Inline:
                return ledger::InlinePayload{spec.data};
            case PayloadSpec::Kind::TearOff: {
                std::vector<Bytes> leaves = ledger::transaction_leaves(
                    group_id, contract_id, participants, inputs, outputs, spec.data);
                merkle::MerkleTree tree = merkle::MerkleTree::build(leaves);
                // The oracle sees only the payload body (last leaf).
                std::set<std::size_t> hidden;
                for (std::size_t i = 0; i + 1 < leaves.size(); ++i) hidden.insert(i);
                merkle::TearOffView view = merkle::tear_off(tree, hidden);
                ledger::TearOffPayload payload;
                payload.root = tree.root();
                payload.views["oracle"] = view;
                tear_off_bodies_[tree.root()] = spec.data;
                return payload;
            }
            default:
                throw LabError(ErrorCode::BadScenario,
                               "payload kind not supported on this topology");
        }
    }

private:
    bool holds_code_p2p(const std::string&, const ledger::Contract& con) const {
        // Code travels with transactions: every involved party can run
        // the contract that governs a transaction it receives.
        return con.mode == ledger::ExecutionMode::OnNode && con.predicate != nullptr;
    }

    ledger::Ledger& vault(const std::string& name) {
        auto it = vaults_.find(name);
        if (it == vaults_.end()) throw LabError(ErrorCode::UnknownMember, "no vault: " + name);
        return it->second;
    }

    void record_author_facts(const std::string& submitter, const ledger::Transaction& tx,
                             const std::optional<Bytes>& content) {
        log_.record(submitter, audit::TxExistence{tx.id}, sim_->delivery_index());
        log_.record(submitter, audit::TxParticipants{tx.id, tx.participants},
                    sim_->delivery_index());
        if (!tx.inputs.empty())
            log_.record(submitter, audit::InputRef{tx.id, tx.inputs}, sim_->delivery_index());
        if (content)
            log_.record(submitter, audit::TxPayload{tx.id, crypto::hash(*content)},
                        sim_->delivery_index());
    }

    netsim::ActorId notary_actor_;
    std::unique_ptr<netsim::NotaryService> notary_;
    std::map<std::string, ledger::Ledger> vaults_;
    std::map<Digest, Bytes> tear_off_bodies_;
};

// ---------------------------------------------------------------------
// PublicAnchor: one global chain of content hashes, plaintext via the
// transaction manager, per-party private state.
// ---------------------------------------------------------------------

class PublicAnchorPlatform : public Platform {
public:
    explicit PublicAnchorPlatform(const PlatformConfig& config)
        : Platform(config), txmgr_actor_{netsim::Role::TxManager, "txmanager"} {
        sim_->add_actor(txmgr_actor_);
        txmgr_master_ = crypto::hash("ledgerlab.txmgr.v1").to_bytes();
    }

    TopologyKind kind() const override { return TopologyKind::PublicAnchor; }

    std::map<Mechanism, Support> capabilities() const override {
        return {
            {Mechanism::SeparationOfLedgers, Support::Native},
            {Mechanism::OneTimePublicKeys, Support::Possible},
            {Mechanism::OffChainPeerData, Support::Rewrite},
            {Mechanism::SymmetricKeys, Support::Native},
            {Mechanism::MerkleTearOffs, Support::Rewrite},
            {Mechanism::InstallOnInvolvedNodes, Support::Native},
            {Mechanism::OffChainExecutionEngine, Support::Rewrite},
        };
    }

    // Group definitions live on the public chain: everyone learns them.
    GroupDescriptor create_group(const std::string& id,
                                 const std::vector<std::string>& members) override {
        ensure_finalized();
        if (groups_.count(id)) throw LabError(ErrorCode::DuplicateName, "group exists: " + id);
        GroupDescriptor desc;
        desc.id = id;
        desc.scope = LedgerScope::GlobalWithPrivateState;
        for (const std::string& name : members) desc.members.push_back(party(name).actor);
        groups_[id] = desc;
        for (const netsim::ActorId& actor : sim_->actors())
            for (const std::string& member : members)
                log_.record(actor.label(), audit::GroupMembership{id, member},
                            sim_->delivery_index());
        return desc;
    }

    // The caller-built transaction (plaintext payload, real inputs and
    // outputs) never reaches the chain. The transaction manager encrypts
    // the private section under a fresh key; the public chain carries a
    // hash of the ciphertext and the participant list — which is public
    // by design, and so is the leak.
    SubmitResult submit(const ledger::Transaction& tx, const SubmitOptions& opts = {}) override {
        ensure_finalized();
        const ledger::Contract& con = contract(tx.contract);
        if (!groups_.count(tx.group))
            throw LabError(ErrorCode::UnknownGroup, "no group: " + tx.group);
        std::string submitter = resolve_submitter(tx, opts);
        std::vector<std::string> involved = participant_parties(tx);

        Bytes payload_data;
        if (const auto* in = std::get_if<ledger::InlinePayload>(&tx.payload))
            payload_data = in->data;
        else
            throw LabError(ErrorCode::BadScenario,
                           "this topology anchors inline payloads; other kinds not supported");

        detail::PrivateSection section{payload_data, tx.inputs, tx.outputs};
        Bytes blob = detail::encode_private_section(section);

        crypto::DetRng key_rng = detail::label_rng("txkey:" + std::to_string(tx_counter_));
        crypto::SymmetricKey tx_key = crypto::SymmetricKey::from_bytes(key_rng.next_bytes(32));
        Bytes ciphertext =
            crypto::aead_seal(tx_key, detail::make_nonce(tx_counter_), blob, to_bytes("private"));
        ++tx_counter_;

        ledger::Transaction pub = ledger::make_transaction(
            tx.group, tx.participants, ledger::AnchorPayload{crypto::hash(ciphertext)}, {}, {},
            tx.contract);
        for (const Bytes& key : tx.participants) pub = sign_with_owner(std::move(pub), key);
        ciphertexts_[pub.id] = ciphertext;

        // Transaction manager knowledge: it decrypts for a living.
        log_.record(txmgr_actor_.label(), audit::TxExistence{pub.id}, sim_->delivery_index());
        log_.record(txmgr_actor_.label(), audit::TxParticipants{pub.id, pub.participants},
                    sim_->delivery_index());
        log_.record(txmgr_actor_.label(), audit::TxPayload{pub.id, crypto::hash(payload_data)},
                    sim_->delivery_index());
        if (!tx.inputs.empty())
            log_.record(txmgr_actor_.label(), audit::InputRef{pub.id, tx.inputs},
                        sim_->delivery_index());

        record_author_facts(submitter, pub, tx, payload_data);

        // Receivers validate the private section against their own
        // private state. Inputs they never saw are NotVisible — warnings,
        // not rejections. That is the gap a double spender drives through.
        ledger::Transaction phantom;
        phantom.id = pub.id;
        phantom.group = tx.group;
        phantom.participants = tx.participants;
        phantom.payload = ledger::InlinePayload{payload_data};
        phantom.inputs = tx.inputs;
        phantom.outputs = tx.outputs;
        phantom.contract = tx.contract;
        phantom.signatures = pub.signatures;

        ledger::ValidationResult verdict;
        for (const std::string& name : involved) {
            if (name == submitter && involved.size() > 1) continue;
            const ledger::AssetState& state = private_state_[name];
            ledger::ValidationResult v = ledger::validate(
                phantom, state, con, holds_code(name, con.id),
                [&state](const ledger::AssetRef& ref) { return state.exists(ref); });
            for (ledger::Rejection w : v.warnings) verdict.warnings.push_back(w);
            if (!v.ok) {
                verdict = v;
                break;
            }
        }
        if (!verdict.ok) {
            sim_->run_to_idle();
            return SubmitResult{SubmitStatus::Rejected, pub.id, verdict.reason, verdict.warnings};
        }

        // Public broadcast: every actor sees the anchored transaction.
        global_.append({pub});
        DistributionRecord dist;
        dist.tx = pub.id;
        for (const netsim::ActorId& actor : sim_->actors()) {
            if (actor == txmgr_actor_ || actor == ca_actor_) continue;
            netsim::Envelope env;
            env.from = party(submitter).actor;
            env.to = actor;
            env.body = netsim::TxDistribution{pub, netsim::ContentClass::HashOnly, std::nullopt};
            env.facts = {audit::TxExistence{pub.id},
                         audit::TxParticipants{pub.id, pub.participants}};
            sim_->send(std::move(env));
            if (actor.role == netsim::Role::Party) {
                mark_seen(actor.name, pub.id);
                dist.classes[actor.name] = netsim::ContentClass::HashOnly;
            }
        }
        dist.classes[txmgr_actor_.label()] = netsim::ContentClass::Full;

        // Private delivery: wrapped key + ciphertext per participant.
        for (const std::string& name : involved) {
            const PartyInfo& info = party(name);
            crypto::SymmetricKey shared = pairwise_key(info.keys.public_key);
            Bytes wrapped = crypto::aead_seal(shared, detail::make_nonce(wrap_counter_++),
                                              tx_key.bytes, pub.id.to_bytes());
            Encoder payload_enc;
            payload_enc.field(wrapped);
            payload_enc.field(ciphertext);
            netsim::Envelope env;
            env.from = txmgr_actor_;
            env.to = info.actor;
            env.body = netsim::PrivatePayload{pub.id, "wrapped-key", payload_enc.bytes()};
            env.facts = {audit::TxPayload{pub.id, crypto::hash(payload_data)}};
            if (!tx.inputs.empty()) env.facts.push_back(audit::InputRef{pub.id, tx.inputs});
            sim_->send(std::move(env));

            hold_plaintext(name, pub.id, payload_data);
            private_state_[name].apply(phantom);
            dist.classes[name] = netsim::ContentClass::Full;
        }
        distributions_[pub.id] = dist;

        note_commit(pub, tx.group, tx.contract, tx.inputs, tx.outputs);
        distribute_pending_links(phantom, involved, txmgr_actor_);
        sim_->run_to_idle();
        return SubmitResult{SubmitStatus::Committed, pub.id, ledger::Rejection::None,
                            verdict.warnings};
    }

    std::map<ledger::AssetRef, std::string> holdings() const override {
        std::map<ledger::AssetRef, std::string> out;
        for (const auto& [name, state] : private_state_) {
            auto part = resolve_owners(state);
            for (const auto& [ref, owner] : part) {
                if (owner == name || !out.count(ref)) out[ref] = owner;
            }
        }
        return out;
    }

    Digest head() const override { return global_.head(); }

    std::string dumps() const override {
        std::ostringstream out;
        out << "ledger global\n" << global_.dump();
        for (const auto& [name, state] : private_state_) {
            for (const auto& [ref, output] : state.unspent()) {
                out << "private-state party=" << name << " ref=" << ref.tx.hex().substr(0, 16)
                    << ":" << ref.index << " owner=" << to_hex(output.owner).substr(0, 16)
                    << " value=" << to_hex(output.value) << "\n";
            }
        }
        return out.str();
    }

    const ledger::Ledger& global_ledger() const { return global_; }

    const ledger::AssetState& private_state(const std::string& name) const {
        auto it = private_state_.find(name);
        if (it == private_state_.end())
            throw LabError(ErrorCode::UnknownMember, "no private state: " + name);
        return it->second;
    }

protected:
    void on_register(const std::string& name) override { private_state_.emplace(name, ledger::AssetState{}); }

private:
    crypto::SymmetricKey pairwise_key(const Bytes& party_key) const {
        auto mac = hmac_sha256(txmgr_master_, party_key);
        return crypto::SymmetricKey::from_bytes(Bytes(mac.begin(), mac.end()));
    }

    ledger::Transaction sign_with_owner(ledger::Transaction tx, const Bytes& key) {
        auto ot = one_time_keys_.find(key);
        if (ot != one_time_keys_.end()) return ledger::sign_transaction(std::move(tx), ot->second);
        auto it = key_owner_.find(key);
        if (it == key_owner_.end())
            throw LabError(ErrorCode::BadScenario, "unknown participant key");
        return ledger::sign_transaction(std::move(tx), party(it->second).keys);
    }

    void record_author_facts(const std::string& submitter, const ledger::Transaction& pub,
                             const ledger::Transaction& orig, const Bytes& payload_data) {
        log_.record(submitter, audit::TxExistence{pub.id}, sim_->delivery_index());
        log_.record(submitter, audit::TxParticipants{pub.id, pub.participants},
                    sim_->delivery_index());
        if (!orig.inputs.empty())
            log_.record(submitter, audit::InputRef{pub.id, orig.inputs}, sim_->delivery_index());
        log_.record(submitter, audit::TxPayload{pub.id, crypto::hash(payload_data)},
                    sim_->delivery_index());
    }

    netsim::ActorId txmgr_actor_;
    Bytes txmgr_master_;
    ledger::Ledger global_;
    std::map<std::string, ledger::AssetState> private_state_;
    std::map<Digest, Bytes> ciphertexts_;
    std::uint64_t tx_counter_ = 0;
    std::uint64_t wrap_counter_ = 0;
};

inline std::unique_ptr<Platform> make_platform(TopologyKind kind, const PlatformConfig& config) {
    switch (kind) {
        case TopologyKind::Channelized: return std::make_unique<ChannelizedPlatform>(config);
        case TopologyKind::PointToPoint: return std::make_unique<PointToPointPlatform>(config);
        case TopologyKind::PublicAnchor: return std::make_unique<PublicAnchorPlatform>(config);
    }
    throw LabError(ErrorCode::BadScenario, "unknown topology");
}

}  // namespace ledgerlab::topo

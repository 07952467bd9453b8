#pragma once

// Transactions, blocks, hash-chained ledgers, UTXO-style asset state,
// and the hash-anchored off-chain data store with purge. Payloads come
// in four shapes: inline plaintext, AEAD ciphertext, an off-chain
// anchor digest, or a Merkle root with per-recipient tear-off views.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ledgerlab/bytes.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/merkle.hpp"

namespace ledgerlab::ledger {

using crypto::Digest;
using crypto::Signature;

struct AssetRef {
    Digest tx;
    std::uint32_t index = 0;

    bool operator<(const AssetRef& other) const {
        if (!(tx == other.tx)) return tx < other.tx;
        return index < other.index;
    }
    bool operator==(const AssetRef& other) const { return tx == other.tx && index == other.index; }
};

struct Output {
    Bytes owner;  // public key (long-term or one-time)
    Bytes value;

    bool operator==(const Output& other) const { return owner == other.owner && value == other.value; }
};

struct InlinePayload {
    Bytes data;
};

struct EncryptedPayload {
    Bytes ciphertext;
    std::string key_hint;  // identifies the wrapping envelope, never the key
};

struct AnchorPayload {
    Digest digest;  // commitment to off-chain data; carries no data bytes
};

struct TearOffPayload {
    Digest root;
    // Views keyed by recipient class ("participants", "oracle", ...).
    // Not part of the transaction id: every recipient must agree on the
    // id while receiving different views.
    std::map<std::string, merkle::TearOffView> views;
};

using Payload = std::variant<InlinePayload, EncryptedPayload, AnchorPayload, TearOffPayload>;

inline const char* payload_kind(const Payload& p) {
    switch (p.index()) {
        case 0: return "inline";
        case 1: return "encrypted";
        case 2: return "anchor";
        case 3: return "tear-off";
    }
    return "?";
}

// Canonical bytes committed by the transaction id.
inline Bytes payload_id_bytes(const Payload& p) {
    Encoder enc;
    if (const auto* in = std::get_if<InlinePayload>(&p)) {
        enc.u32(0);
        enc.field(in->data);
    } else if (const auto* ct = std::get_if<EncryptedPayload>(&p)) {
        enc.u32(1);
        enc.field(ct->ciphertext);
        enc.field(ct->key_hint);
    } else if (const auto* an = std::get_if<AnchorPayload>(&p)) {
        enc.u32(2);
        enc.raw(an->digest.to_bytes());
    } else if (const auto* to = std::get_if<TearOffPayload>(&p)) {
        enc.u32(3);
        enc.raw(to->root.to_bytes());
    }
    return enc.bytes();
}

// Digest of the confidential content, used for knowledge facts: never
// the content itself. Encrypted payloads have no content hash until
// decrypted (callers hash the recovered plaintext).
inline Digest payload_content_hash(const Payload& p) {
    if (const auto* in = std::get_if<InlinePayload>(&p)) return crypto::hash(in->data);
    if (const auto* ct = std::get_if<EncryptedPayload>(&p)) return crypto::hash(ct->ciphertext);
    if (const auto* an = std::get_if<AnchorPayload>(&p)) return an->digest;
    return std::get<TearOffPayload>(p).root;
}

struct Transaction {
    Digest id;
    std::string group;
    std::vector<Bytes> participants;
    Payload payload;
    std::vector<AssetRef> inputs;
    std::vector<Output> outputs;
    std::string contract;
    std::map<Bytes, Signature> signatures;

    Bytes canonical_bytes() const {
        Encoder enc("ledgerlab.tx.v1");
        enc.field(group);
        enc.u32(static_cast<std::uint32_t>(participants.size()));
        for (const Bytes& p : participants) enc.field(p);
        enc.field(payload_id_bytes(payload));
        enc.u32(static_cast<std::uint32_t>(inputs.size()));
        for (const AssetRef& ref : inputs) {
            enc.raw(ref.tx.to_bytes());
            enc.u32(ref.index);
        }
        enc.u32(static_cast<std::uint32_t>(outputs.size()));
        for (const Output& out : outputs) {
            enc.field(out.owner);
            enc.field(out.value);
        }
        enc.field(contract);
        return enc.bytes();
    }
};

inline Transaction make_transaction(const std::string& group, std::vector<Bytes> participants,
                                    Payload payload, std::vector<AssetRef> inputs,
                                    std::vector<Output> outputs, const std::string& contract) {
    if (participants.empty()) throw LabError(ErrorCode::EmptyParticipants, "transaction needs participants");
    Transaction tx;
    tx.group = group;
    tx.participants = std::move(participants);
    tx.payload = std::move(payload);
    tx.inputs = std::move(inputs);
    tx.outputs = std::move(outputs);
    tx.contract = contract;
    tx.id = crypto::hash(tx.canonical_bytes());
    return tx;
}

// Tear-off payloads are signed over the Merkle root so a signer holding
// only a view can produce the same signature as one holding the full
// transaction; everything else signs the transaction id.
inline Bytes signing_message_for_digest(const Digest& d) {
    Encoder enc("ledgerlab.txsig.v1");
    enc.raw(d.to_bytes());
    return enc.bytes();
}

inline Bytes signing_message(const Transaction& tx) {
    if (const auto* to = std::get_if<TearOffPayload>(&tx.payload))
        return signing_message_for_digest(to->root);
    return signing_message_for_digest(tx.id);
}

inline Transaction sign_transaction(Transaction tx, const crypto::KeyPair& signer,
                                    const std::vector<Bytes>& designated_signers = {}) {
    bool authorized = false;
    for (const Bytes& p : tx.participants) {
        if (p == signer.public_key) authorized = true;
    }
    for (const Bytes& d : designated_signers) {
        if (d == signer.public_key) authorized = true;
    }
    if (!authorized) throw LabError(ErrorCode::UnauthorizedSigner, "signer not participant or designee");
    tx.signatures[signer.public_key] = crypto::sign(signer.secret, signing_message(tx));
    return tx;
}

// Canonical transaction-to-leaf mapping used for tear-off payloads:
// [group, contract, participants..., inputs..., outputs..., body].
inline std::vector<Bytes> transaction_leaves(const std::string& group, const std::string& contract,
                                             const std::vector<Bytes>& participants,
                                             const std::vector<AssetRef>& inputs,
                                             const std::vector<Output>& outputs, const Bytes& body) {
    std::vector<Bytes> leaves;
    leaves.push_back(to_bytes(group));
    leaves.push_back(to_bytes(contract));
    for (const Bytes& p : participants) {
        Encoder enc("leaf.participant");
        enc.field(p);
        leaves.push_back(enc.bytes());
    }
    for (const AssetRef& ref : inputs) {
        Encoder enc("leaf.input");
        enc.raw(ref.tx.to_bytes());
        enc.u32(ref.index);
        leaves.push_back(enc.bytes());
    }
    for (const Output& out : outputs) {
        Encoder enc("leaf.output");
        enc.field(out.owner);
        enc.field(out.value);
        leaves.push_back(enc.bytes());
    }
    {
        Encoder enc("leaf.body");
        enc.field(body);
        leaves.push_back(enc.bytes());
    }
    return leaves;
}

enum class Rejection {
    None,
    MissingSignature,
    UnknownInput,
    DoubleSpend,
    ContractViolation,
    NotVisible,
    NotaryRejection,
};

inline const char* rejection_name(Rejection r) {
    switch (r) {
        case Rejection::None: return "None";
        case Rejection::MissingSignature: return "MissingSignature";
        case Rejection::UnknownInput: return "UnknownInput";
        case Rejection::DoubleSpend: return "DoubleSpend";
        case Rejection::ContractViolation: return "ContractViolation";
        case Rejection::NotVisible: return "NotVisible";
        case Rejection::NotaryRejection: return "NotaryRejection";
    }
    return "?";
}

enum class SignerRule { AllParticipants, AnyParticipant };
enum class ExecutionMode { OnNode, OffChainEngine };

struct Contract {
    std::string id;
    std::uint32_t version = 1;
    SignerRule signers = SignerRule::AllParticipants;
    std::string predicate_name = "accept-all";
    std::function<bool(const Transaction&)> predicate;  // deterministic
    ExecutionMode mode = ExecutionMode::OnNode;
};

inline bool signatures_complete(const Transaction& tx, const Contract& contract) {
    Bytes msg = signing_message(tx);
    std::size_t valid = 0;
    for (const Bytes& p : tx.participants) {
        auto it = tx.signatures.find(p);
        if (it != tx.signatures.end() && crypto::verify(p, msg, it->second)) ++valid;
    }
    if (contract.signers == SignerRule::AllParticipants) return valid == tx.participants.size();
    return valid >= 1;
}

class AssetState {
public:
    bool exists(const AssetRef& ref) const { return unspent_.count(ref) || spent_.count(ref); }
    bool is_spent(const AssetRef& ref) const { return spent_.count(ref) > 0; }

    std::optional<Output> lookup(const AssetRef& ref) const {
        auto it = unspent_.find(ref);
        if (it == unspent_.end()) return std::nullopt;
        return it->second;
    }

    void apply(const Transaction& tx) {
        for (const AssetRef& ref : tx.inputs) {
            unspent_.erase(ref);
            spent_.insert(ref);
        }
        for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) {
            unspent_[AssetRef{tx.id, i}] = tx.outputs[i];
        }
    }

    const std::map<AssetRef, Output>& unspent() const { return unspent_; }

private:
    std::map<AssetRef, Output> unspent_;
    std::set<AssetRef> spent_;
};

struct ValidationResult {
    bool ok = true;
    Rejection reason = Rejection::None;
    std::vector<Rejection> warnings;  // NotVisible entries, one per unseen input

    static ValidationResult reject(Rejection r) { return ValidationResult{false, r, {}}; }
};

// Checks run in order: signature completeness, then input existence and
// unspentness for the inputs this validator can see, then the contract
// predicate when the validator holds the code. Inputs outside the
// validator's visibility produce a NotVisible warning, not a rejection —
// that gap is exactly what lets a hash-only topology double spend.
inline ValidationResult validate(const Transaction& tx, const AssetState& state,
                                 const Contract& contract, bool holds_contract_code,
                                 const std::function<bool(const AssetRef&)>& visible) {
    if (!signatures_complete(tx, contract)) return ValidationResult::reject(Rejection::MissingSignature);
    ValidationResult result;
    for (const AssetRef& ref : tx.inputs) {
        if (!visible(ref)) {
            result.warnings.push_back(Rejection::NotVisible);
            continue;
        }
        if (!state.exists(ref)) return ValidationResult::reject(Rejection::UnknownInput);
        if (state.is_spent(ref)) return ValidationResult::reject(Rejection::DoubleSpend);
    }
    if (holds_contract_code && contract.predicate && !contract.predicate(tx))
        return ValidationResult::reject(Rejection::ContractViolation);
    return result;
}

struct Block {
    std::uint64_t height = 0;
    Digest prev;
    std::vector<Digest> tx_ids;
    Digest body_hash;
};

inline Digest block_body_hash(std::uint64_t height, const Digest& prev,
                              const std::vector<Digest>& tx_ids) {
    Encoder enc("ledgerlab.block.v1");
    enc.u64(height);
    enc.raw(prev.to_bytes());
    enc.u32(static_cast<std::uint32_t>(tx_ids.size()));
    for (const Digest& id : tx_ids) enc.raw(id.to_bytes());
    return crypto::hash(enc.bytes());
}

class Ledger {
public:
    Block append(const std::vector<Transaction>& txs) {
        Block block;
        block.height = blocks_.size();
        block.prev = blocks_.empty() ? Digest::zero() : blocks_.back().body_hash;
        for (const Transaction& tx : txs) {
            block.tx_ids.push_back(tx.id);
            txs_[tx.id] = tx;
            state_.apply(tx);
        }
        block.body_hash = block_body_hash(block.height, block.prev, block.tx_ids);
        blocks_.push_back(block);
        return block;
    }

    Digest head() const { return blocks_.empty() ? Digest::zero() : blocks_.back().body_hash; }

    const std::vector<Block>& blocks() const { return blocks_; }
    const AssetState& state() const { return state_; }
    AssetState& state() { return state_; }

    bool has_transaction(const Digest& id) const { return txs_.count(id) > 0; }

    const Transaction* transaction(const Digest& id) const {
        auto it = txs_.find(id);
        return it == txs_.end() ? nullptr : &it->second;
    }

    Transaction* transaction_mut(const Digest& id) {
        auto it = txs_.find(id);
        return it == txs_.end() ? nullptr : &it->second;
    }

    // Recomputes the chain head from stored transaction CONTENT:
    // transaction ids are rehashed from their canonical bytes, so any
    // mutation of committed content diverges from the stored head.
    Digest recompute_head() const {
        Digest prev = Digest::zero();
        for (const Block& block : blocks_) {
            std::vector<Digest> ids;
            for (const Digest& id : block.tx_ids) {
                auto it = txs_.find(id);
                if (it == txs_.end()) return Digest::zero();
                ids.push_back(crypto::hash(it->second.canonical_bytes()));
            }
            prev = block_body_hash(block.height, prev, ids);
        }
        return prev;
    }

    // Newline-delimited structured records, stable across runs.
    std::string dump() const {
        std::ostringstream out;
        for (const Block& block : blocks_) {
            out << "block height=" << block.height << " prev=" << block.prev.hex()
                << " body=" << block.body_hash.hex() << "\n";
            for (const Digest& id : block.tx_ids) {
                const Transaction& tx = txs_.at(id);
                out << "tx id=" << tx.id.hex() << " group=" << tx.group
                    << " contract=" << tx.contract << " payload=" << payload_kind(tx.payload)
                    << " participants=";
                for (std::size_t i = 0; i < tx.participants.size(); ++i) {
                    if (i) out << ",";
                    out << to_hex(tx.participants[i]).substr(0, 16);
                }
                out << " inputs=";
                for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
                    if (i) out << ",";
                    out << tx.inputs[i].tx.hex().substr(0, 16) << ":" << tx.inputs[i].index;
                }
                out << " outputs=";
                for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
                    if (i) out << ",";
                    out << to_hex(tx.outputs[i].owner).substr(0, 16) << ":"
                        << to_hex(tx.outputs[i].value);
                }
                out << " sigs=" << tx.signatures.size() << "\n";
            }
        }
        out << "head " << head().hex() << "\n";
        return out.str();
    }

private:
    std::vector<Block> blocks_;
    std::map<Digest, Transaction> txs_;
    AssetState state_;
};

// Off-chain store: anchors commit to hash(salt || data). The salt blocks
// dictionary probing of low-entropy data and survives purge so
// re-presented data can still be verified against an on-ledger anchor.
class PrivateDataStore {
public:
    explicit PrivateDataStore(crypto::DetRng rng) : rng_(std::move(rng)) {}

    static constexpr std::size_t kSaltSize = 16;

    Digest anchor(const Bytes& data) {
        Bytes salt = rng_.next_bytes(kSaltSize);
        Digest digest = crypto::hash(salt + data);
        entries_[digest] = Entry{salt, data};
        return digest;
    }

    std::optional<Bytes> retrieve(const Digest& digest) const {
        auto it = entries_.find(digest);
        if (it == entries_.end() || !it->second.data.has_value()) return std::nullopt;
        return it->second.data;
    }

    void purge(const Digest& digest) {
        auto it = entries_.find(digest);
        if (it == entries_.end()) return;  // idempotent
        it->second.data.reset();
    }

    bool has_anchor(const Digest& digest) const { return entries_.count(digest) > 0; }

    std::optional<Bytes> salt(const Digest& digest) const {
        auto it = entries_.find(digest);
        if (it == entries_.end()) return std::nullopt;
        return it->second.salt;
    }

    bool verify(const Digest& digest, const Bytes& data) const {
        auto it = entries_.find(digest);
        if (it == entries_.end()) return false;
        return crypto::hash(it->second.salt + data) == digest;
    }

    static bool verify_with_salt(const Digest& digest, const Bytes& salt, const Bytes& data) {
        return crypto::hash(salt + data) == digest;
    }

private:
    struct Entry {
        Bytes salt;
        std::optional<Bytes> data;
    };

    crypto::DetRng rng_;
    std::map<Digest, Entry> entries_;
};

}  // namespace ledgerlab::ledger

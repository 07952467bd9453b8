#pragma once

// Global auditor: records which actor learned which fact at which
// delivery, derives identity knowledge through key-linkage closure, and
// checks declarative "who may never learn what" policies. Facts carry
// digests of confidential content, never the content itself, so reports
// cannot re-leak what they audit.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ledgerlab/bytes.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/ledger.hpp"

namespace ledgerlab::audit {

using crypto::Digest;

enum class FactKind {
    PartyIdentity,
    GroupMembership,
    TxExistence,
    TxParticipants,
    TxPayload,
    ContractLogic,
    InputRef,
    KeyLinkage,
};

inline const char* fact_kind_name(FactKind k) {
    switch (k) {
        case FactKind::PartyIdentity: return "PartyIdentity";
        case FactKind::GroupMembership: return "GroupMembership";
        case FactKind::TxExistence: return "TxExistence";
        case FactKind::TxParticipants: return "TxParticipants";
        case FactKind::TxPayload: return "TxPayload";
        case FactKind::ContractLogic: return "ContractLogic";
        case FactKind::InputRef: return "InputRef";
        case FactKind::KeyLinkage: return "KeyLinkage";
    }
    return "?";
}

inline std::optional<FactKind> fact_kind_from_name(const std::string& name) {
    for (FactKind k : {FactKind::PartyIdentity, FactKind::GroupMembership, FactKind::TxExistence,
                       FactKind::TxParticipants, FactKind::TxPayload, FactKind::ContractLogic,
                       FactKind::InputRef, FactKind::KeyLinkage}) {
        if (name == fact_kind_name(k)) return k;
    }
    return std::nullopt;
}

struct PartyIdentity {
    Bytes public_key;
    std::string name;
};
struct GroupMembership {
    std::string group;
    std::string member;
};
struct TxExistence {
    Digest tx;
};
struct TxParticipants {
    Digest tx;
    std::vector<Bytes> participants;
};
struct TxPayload {
    Digest tx;
    Digest content_hash;
};
struct ContractLogic {
    std::string contract;
    std::uint32_t version = 1;
};
struct InputRef {
    Digest tx;
    std::vector<ledger::AssetRef> inputs;
};
struct KeyLinkage {
    Bytes one_time_key;
    Bytes long_term_key;
};

using Fact = std::variant<PartyIdentity, GroupMembership, TxExistence, TxParticipants, TxPayload,
                          ContractLogic, InputRef, KeyLinkage>;

inline FactKind fact_kind(const Fact& f) { return static_cast<FactKind>(f.index()); }

// One canonical byte encoding gives ordering, equality, and dedup.
inline Bytes fact_key(const Fact& f) {
    Encoder enc;
    enc.u32(static_cast<std::uint32_t>(f.index()));
    if (const auto* v = std::get_if<PartyIdentity>(&f)) {
        enc.field(v->public_key);
        enc.field(v->name);
    } else if (const auto* v = std::get_if<GroupMembership>(&f)) {
        enc.field(v->group);
        enc.field(v->member);
    } else if (const auto* v = std::get_if<TxExistence>(&f)) {
        enc.raw(v->tx.to_bytes());
    } else if (const auto* v = std::get_if<TxParticipants>(&f)) {
        enc.raw(v->tx.to_bytes());
        enc.u32(static_cast<std::uint32_t>(v->participants.size()));
        for (const Bytes& p : v->participants) enc.field(p);
    } else if (const auto* v = std::get_if<TxPayload>(&f)) {
        enc.raw(v->tx.to_bytes());
        enc.raw(v->content_hash.to_bytes());
    } else if (const auto* v = std::get_if<ContractLogic>(&f)) {
        enc.field(v->contract);
        enc.u32(v->version);
    } else if (const auto* v = std::get_if<InputRef>(&f)) {
        enc.raw(v->tx.to_bytes());
        enc.u32(static_cast<std::uint32_t>(v->inputs.size()));
        for (const ledger::AssetRef& ref : v->inputs) {
            enc.raw(ref.tx.to_bytes());
            enc.u32(ref.index);
        }
    } else if (const auto* v = std::get_if<KeyLinkage>(&f)) {
        enc.field(v->one_time_key);
        enc.field(v->long_term_key);
    }
    return enc.bytes();
}

struct FactLess {
    bool operator()(const Fact& a, const Fact& b) const { return fact_key(a) < fact_key(b); }
};

inline bool fact_equal(const Fact& a, const Fact& b) { return fact_key(a) == fact_key(b); }

using FactSet = std::set<Fact, FactLess>;

inline nlohmann::ordered_json fact_to_json(const Fact& f) {
    nlohmann::ordered_json j;
    j["kind"] = fact_kind_name(fact_kind(f));
    if (const auto* v = std::get_if<PartyIdentity>(&f)) {
        j["public_key"] = to_hex(v->public_key);
        j["name"] = v->name;
    } else if (const auto* v = std::get_if<GroupMembership>(&f)) {
        j["group"] = v->group;
        j["member"] = v->member;
    } else if (const auto* v = std::get_if<TxExistence>(&f)) {
        j["tx"] = v->tx.hex();
    } else if (const auto* v = std::get_if<TxParticipants>(&f)) {
        j["tx"] = v->tx.hex();
        auto arr = nlohmann::ordered_json::array();
        for (const Bytes& p : v->participants) arr.push_back(to_hex(p));
        j["participants"] = arr;
    } else if (const auto* v = std::get_if<TxPayload>(&f)) {
        j["tx"] = v->tx.hex();
        j["content_hash"] = v->content_hash.hex();
    } else if (const auto* v = std::get_if<ContractLogic>(&f)) {
        j["contract"] = v->contract;
        j["version"] = v->version;
    } else if (const auto* v = std::get_if<InputRef>(&f)) {
        j["tx"] = v->tx.hex();
        auto arr = nlohmann::ordered_json::array();
        for (const ledger::AssetRef& ref : v->inputs) {
            arr.push_back(ref.tx.hex() + ":" + std::to_string(ref.index));
        }
        j["inputs"] = arr;
    } else if (const auto* v = std::get_if<KeyLinkage>(&f)) {
        j["one_time_key"] = to_hex(v->one_time_key);
        j["long_term_key"] = to_hex(v->long_term_key);
    }
    return j;
}

// Pattern over facts; absent fields are wildcards. Field use per kind:
//   text_a: name | group | contract     text_b: member
//   tx: transaction id                  key: public key
// For TxParticipants, `key` matches membership in the participant list.
struct FactPattern {
    FactKind kind = FactKind::TxPayload;
    std::optional<std::string> text_a;
    std::optional<std::string> text_b;
    std::optional<Digest> tx;
    std::optional<Bytes> key;

    bool matches(const Fact& f) const {
        if (fact_kind(f) != kind) return false;
        if (const auto* v = std::get_if<PartyIdentity>(&f)) {
            if (text_a && *text_a != v->name) return false;
            if (key && *key != v->public_key) return false;
        } else if (const auto* v = std::get_if<GroupMembership>(&f)) {
            if (text_a && *text_a != v->group) return false;
            if (text_b && *text_b != v->member) return false;
        } else if (const auto* v = std::get_if<TxExistence>(&f)) {
            if (tx && !(*tx == v->tx)) return false;
        } else if (const auto* v = std::get_if<TxParticipants>(&f)) {
            if (tx && !(*tx == v->tx)) return false;
            if (key) {
                bool found = false;
                for (const Bytes& p : v->participants)
                    if (p == *key) found = true;
                if (!found) return false;
            }
        } else if (const auto* v = std::get_if<TxPayload>(&f)) {
            if (tx && !(*tx == v->tx)) return false;
        } else if (const auto* v = std::get_if<ContractLogic>(&f)) {
            if (text_a && *text_a != v->contract) return false;
        } else if (const auto* v = std::get_if<InputRef>(&f)) {
            if (tx && !(*tx == v->tx)) return false;
        } else if (const auto* v = std::get_if<KeyLinkage>(&f)) {
            if (key && *key != v->one_time_key) return false;
        }
        return true;
    }
};

// "Actors in scope must never learn a fact matching the pattern."
struct Policy {
    std::string name;
    bool all_actors = false;
    std::vector<std::string> actors;
    std::vector<std::string> exempt;
    FactPattern forbidden;

    bool applies_to(const std::string& actor) const {
        for (const std::string& e : exempt)
            if (e == actor) return false;
        if (all_actors) return true;
        for (const std::string& a : actors)
            if (a == actor) return true;
        return false;
    }
};

struct Violation {
    std::string policy;
    std::string actor;
    Fact fact;
    std::uint64_t delivery_index = 0;
};

struct DeadLetter {
    std::string from;
    std::string to;
    std::uint64_t delivery_index = 0;
};

class AuditLog {
public:
    struct Event {
        std::string actor;
        Fact fact;
        std::uint64_t delivery_index;
    };

    // Knowledge is monotone: facts are only ever added. Duplicate facts
    // for the same actor are absorbed; TxPayload implies TxExistence and
    // the implication is enforced by auto-insertion.
    void record(const std::string& actor, const Fact& fact, std::uint64_t delivery_index) {
        if (const auto* payload = std::get_if<TxPayload>(&fact)) {
            record_one(actor, TxExistence{payload->tx}, delivery_index);
        }
        record_one(actor, fact, delivery_index);
    }

    // Admin mirroring: operating staff of a node observe whatever the
    // node observes. One level deep; admins of admins do not chain.
    void register_mirror(const std::string& actor, const std::string& admin) {
        mirrors_[actor].push_back(admin);
    }

    void record_dead_letter(const std::string& from, const std::string& to,
                            std::uint64_t delivery_index) {
        dead_letters_.push_back(DeadLetter{from, to, delivery_index});
    }

    const FactSet& knowledge(const std::string& actor) const {
        static const FactSet kEmpty;
        auto it = knowledge_.find(actor);
        return it == knowledge_.end() ? kEmpty : it->second;
    }

    bool knows(const std::string& actor, const Fact& fact) const {
        return knowledge(actor).count(fact) > 0;
    }

    std::vector<std::string> actors() const {
        std::vector<std::string> out;
        for (const auto& [actor, _] : knowledge_) out.push_back(actor);
        return out;
    }

    const std::vector<Event>& events() const { return events_; }
    const std::vector<DeadLetter>& dead_letters() const { return dead_letters_; }

    // Derivation rule, run to fixpoint:
    //   KeyLinkage(otk, ltk) + PartyIdentity(ltk, name) |- PartyIdentity(otk, name)
    // Chains of linkages resolve transitively.
    FactSet linkage_closure(const std::string& actor) const {
        FactSet closure = knowledge(actor);
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<Fact> fresh;
            for (const Fact& lf : closure) {
                const auto* link = std::get_if<KeyLinkage>(&lf);
                if (!link) continue;
                for (const Fact& pf : closure) {
                    const auto* id = std::get_if<PartyIdentity>(&pf);
                    if (!id || id->public_key != link->long_term_key) continue;
                    Fact derived = PartyIdentity{link->one_time_key, id->name};
                    if (!closure.count(derived)) fresh.push_back(derived);
                }
            }
            for (const Fact& f : fresh) {
                closure.insert(f);
                grew = true;
            }
        }
        return closure;
    }

    // Violations in delivery order; empty result means every policy holds.
    std::vector<Violation> check(const std::vector<Policy>& policies) const {
        std::vector<Violation> out;
        for (const Event& ev : events_) {
            for (const Policy& policy : policies) {
                if (!policy.applies_to(ev.actor)) continue;
                if (!policy.forbidden.matches(ev.fact)) continue;
                out.push_back(Violation{policy.name, ev.actor, ev.fact, ev.delivery_index});
            }
        }
        return out;
    }

    std::map<FactKind, std::uint64_t> totals() const {
        std::map<FactKind, std::uint64_t> out;
        for (const Event& ev : events_) out[fact_kind(ev.fact)]++;
        return out;
    }

    nlohmann::ordered_json knowledge_json() const {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [actor, facts] : knowledge_) {
            auto arr = nlohmann::ordered_json::array();
            for (const Fact& f : facts) arr.push_back(fact_to_json(f));
            j[actor] = arr;
        }
        return j;
    }

private:
    void record_one(const std::string& actor, const Fact& fact, std::uint64_t delivery_index) {
        insert_fact(actor, fact, delivery_index);
        auto it = mirrors_.find(actor);
        if (it == mirrors_.end()) return;
        for (const std::string& admin : it->second) insert_fact(admin, fact, delivery_index);
    }

    void insert_fact(const std::string& actor, const Fact& fact, std::uint64_t delivery_index) {
        auto [_, inserted] = knowledge_[actor].insert(fact);
        if (inserted) events_.push_back(Event{actor, fact, delivery_index});
    }

    std::map<std::string, FactSet> knowledge_;
    std::vector<Event> events_;
    std::map<std::string, std::vector<std::string>> mirrors_;
    std::vector<DeadLetter> dead_letters_;
};

}  // namespace ledgerlab::audit

#pragma once

// Declarative scenario runner. A JSON file describes parties, groups,
// contracts, transaction steps, and privacy policies; the runner replays
// it on one of the three topologies and produces an audit report plus a
// ledger dump. Identical (scenario, topology, seed) tuples produce
// byte-identical output.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ledgerlab/audit.hpp"
#include "ledgerlab/bytes.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/ledger.hpp"
#include "ledgerlab/topology.hpp"

namespace ledgerlab::scenario {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct RunOptions {
    std::uint64_t seed = 0;
    std::optional<topo::TopologyKind> topology_override;
};

struct DoubleSpendRecord {
    std::string label;
    topo::DoubleSpendResult result;
};

struct Outcome {
    std::unique_ptr<topo::Platform> platform;
    ordered_json report;
    std::string report_text;  // report serialized with stable key order
    std::string ledger_dump;
    int exit_code = 0;  // 0 clean, 1 policy violations
    std::map<std::string, crypto::Digest> labels;
    std::vector<DoubleSpendRecord> double_spends;
};

namespace detail {

[[noreturn]] inline void bad(const std::string& why) {
    throw LabError(ErrorCode::BadScenario, why);
}

inline const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) bad(where + " missing \"" + key + "\"");
    return *it;
}

inline std::string need_string(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_string()) bad(where + " key \"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline std::string opt_string(const json& j, const char* key, const std::string& fallback,
                              const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) bad(where + " key \"" + key + "\" must be a string");
    return it->get<std::string>();
}

inline std::vector<std::string> string_list(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where + " must be a list of strings");
    std::vector<std::string> out;
    for (const json& v : j) {
        if (!v.is_string()) bad(where + " must be a list of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline std::function<bool(const ledger::Transaction&)> predicate_by_name(
    const std::string& name) {
    if (name == "accept-all") return [](const ledger::Transaction&) { return true; };
    if (name == "reject-all") return [](const ledger::Transaction&) { return false; };
    if (name == "mint-only")
        return [](const ledger::Transaction& tx) { return tx.inputs.empty(); };
    bad("unknown contract predicate: " + name);
}

// Step outputs are referenced as "label:index".
inline ledger::AssetRef resolve_ref(const std::string& text,
                                    const std::map<std::string, crypto::Digest>& labels,
                                    const std::string& where) {
    auto pos = text.rfind(':');
    if (pos == std::string::npos || pos + 1 == text.size())
        bad(where + ": input must be \"label:index\", got \"" + text + "\"");
    const std::string label = text.substr(0, pos);
    std::uint32_t index = 0;
    try {
        std::size_t used = 0;
        index = static_cast<std::uint32_t>(std::stoul(text.substr(pos + 1), &used));
        if (used != text.size() - pos - 1) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
        bad(where + ": bad output index in \"" + text + "\"");
    }
    auto it = labels.find(label);
    if (it == labels.end()) bad(where + ": unknown step label \"" + label + "\"");
    return ledger::AssetRef{it->second, index};
}

inline topo::PayloadSpec parse_payload(const json& step, const std::string& where) {
    topo::PayloadSpec spec;
    auto it = step.find("payload");
    if (it == step.end()) return spec;
    const json& p = *it;
    if (!p.is_object()) bad(where + ": payload must be an object");
    const std::string kind = opt_string(p, "kind", "inline", where + " payload");
    if (kind == "inline") spec.kind = topo::PayloadSpec::Kind::Inline;
    else if (kind == "encrypted") spec.kind = topo::PayloadSpec::Kind::Encrypted;
    else if (kind == "anchor") spec.kind = topo::PayloadSpec::Kind::Anchor;
    else if (kind == "tear-off") spec.kind = topo::PayloadSpec::Kind::TearOff;
    else bad(where + ": unknown payload kind \"" + kind + "\"");
    spec.data = to_bytes(opt_string(p, "data", "", where + " payload"));
    return spec;
}

}  // namespace detail

inline json parse_text(const std::string& text) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) detail::bad("scenario is not valid JSON");
    return doc;
}

inline json load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::bad("cannot open scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_text(text);
}

inline Outcome run_scenario(const json& doc, const RunOptions& opts) {
    using detail::bad;
    using detail::need;
    using detail::need_string;
    using detail::opt_string;
    using detail::string_list;

    if (!doc.is_object()) bad("scenario must be a JSON object");
    const json& format = need(doc, "format", "scenario");
    if (!format.is_number_integer() || format.get<int>() != 1)
        bad("unsupported scenario format (want 1)");
    const std::string name = need_string(doc, "name", "scenario");

    topo::TopologyKind kind = topo::TopologyKind::Channelized;
    if (opts.topology_override) {
        kind = *opts.topology_override;
    } else {
        const std::string topo_name = need_string(doc, "topology", "scenario");
        auto parsed = topo::topology_from_name(topo_name);
        if (!parsed) bad("unknown topology: " + topo_name);
        kind = *parsed;
    }

    topo::PlatformConfig config;
    config.sim.seed = opts.seed;
    const std::string orderer_mode = opt_string(doc, "orderer_mode", "shared", "scenario");
    if (orderer_mode == "shared") config.sim.orderer_mode = netsim::OrdererMode::SharedThirdParty;
    else if (orderer_mode == "member-run") config.sim.orderer_mode = netsim::OrdererMode::MemberRun;
    else bad("unknown orderer_mode: " + orderer_mode);
    const std::string notary_mode = opt_string(doc, "notary_mode", "validating", "scenario");
    if (notary_mode == "validating") config.sim.notary_mode = netsim::NotaryMode::Validating;
    else if (notary_mode == "non-validating")
        config.sim.notary_mode = netsim::NotaryMode::NonValidating;
    else bad("unknown notary_mode: " + notary_mode);
    config.orderer_operator = opt_string(doc, "orderer_operator", "", "scenario");

    Outcome out;
    out.platform = topo::make_platform(kind, config);
    topo::Platform& platform = *out.platform;

    for (const std::string& party : string_list(need(doc, "parties", "scenario"), "parties"))
        platform.register_party(party);
    platform.finalize_registration();

    if (auto it = doc.find("groups"); it != doc.end()) {
        if (!it->is_array()) bad("groups must be a list");
        for (const json& g : *it) {
            const std::string id = need_string(g, "id", "group");
            platform.create_group(id, string_list(need(g, "members", "group " + id),
                                                  "group " + id + " members"));
        }
    }

    if (auto it = doc.find("contracts"); it != doc.end()) {
        if (!it->is_array()) bad("contracts must be a list");
        for (const json& c : *it) {
            const std::string id = need_string(c, "id", "contract");
            const std::string where = "contract " + id;
            ledger::Contract contract;
            contract.id = id;
            if (auto v = c.find("version"); v != c.end()) {
                if (!v->is_number_unsigned()) bad(where + ": version must be a number");
                contract.version = v->get<std::uint32_t>();
            }
            const std::string signers = opt_string(c, "signers", "all", where);
            if (signers == "all") contract.signers = ledger::SignerRule::AllParticipants;
            else if (signers == "any") contract.signers = ledger::SignerRule::AnyParticipant;
            else bad(where + ": unknown signers rule \"" + signers + "\"");
            contract.predicate_name = opt_string(c, "predicate", "accept-all", where);
            contract.predicate = detail::predicate_by_name(contract.predicate_name);
            const std::string mode = opt_string(c, "mode", "on-node", where);
            if (mode == "on-node") contract.mode = ledger::ExecutionMode::OnNode;
            else if (mode == "off-chain-engine")
                contract.mode = ledger::ExecutionMode::OffChainEngine;
            else bad(where + ": unknown mode \"" + mode + "\"");

            const std::string group = need_string(c, "group", where);
            std::vector<std::string> install;
            if (auto inst = c.find("install"); inst != c.end())
                install = string_list(*inst, where + " install");
            else
                for (const netsim::ActorId& m : platform.group(group).members)
                    install.push_back(m.name);
            platform.deploy_contract(group, contract, install);
        }
    }

    if (auto it = doc.find("steps"); it != doc.end()) {
        if (!it->is_array()) bad("steps must be a list");
        for (const json& step : *it) {
            const std::string op = need_string(step, "op", "step");
            const std::string label = opt_string(step, "label", "", "step");
            const std::string where = "step \"" + (label.empty() ? op : label) + "\"";

            if (op == "purge") {
                const std::string target = need_string(step, "target", where);
                auto found = out.labels.find(target);
                if (found == out.labels.end()) bad(where + ": unknown step label \"" + target + "\"");
                platform.purge_off_chain(found->second);
                continue;
            }

            if (op == "double_spend") {
                if (label.empty()) bad("double_spend step needs a label");
                const std::string owner = need_string(step, "owner", where);
                auto ref = detail::resolve_ref(need_string(step, "input", where), out.labels, where);
                const std::string first_to = need_string(step, "to", where);
                const std::string second_to = need_string(step, "second_to", where);
                topo::DoubleSpendResult result =
                    platform.attempt_double_spend(owner, ref, first_to, second_to);
                out.labels[label + ".first"] = result.first_tx;
                out.labels[label + ".second"] = result.second_tx;
                out.double_spends.push_back(DoubleSpendRecord{label, result});
                continue;
            }

            if (op != "mint" && op != "transfer") bad("unknown step op: " + op);
            if (label.empty()) bad(op + " step needs a label");
            if (out.labels.count(label)) bad("duplicate step label: " + label);

            topo::PayloadSpec spec = detail::parse_payload(step, where);
            ledger::Transaction tx;
            if (op == "mint") {
                tx = platform.build_mint(need_string(step, "owner", where),
                                         need_string(step, "group", where),
                                         need_string(step, "contract", where),
                                         to_bytes(opt_string(step, "value", "1", where)), spec);
            } else {
                auto ref = detail::resolve_ref(need_string(step, "input", where), out.labels, where);
                std::optional<bool> one_time;
                if (auto ot = step.find("one_time"); ot != step.end()) {
                    if (!ot->is_boolean()) bad(where + ": one_time must be a boolean");
                    one_time = ot->get<bool>();
                }
                tx = platform.build_transfer(need_string(step, "from", where),
                                             need_string(step, "to", where), ref, spec, one_time);
            }

            topo::SubmitOptions sopts;
            sopts.collection_id = "collection:" + label;
            if (auto coll = step.find("collection"); coll != step.end())
                sopts.collection = string_list(*coll, where + " collection");
            sopts.oracle = opt_string(step, "oracle", "", where);
            topo::SubmitResult result = platform.submit(tx, sopts);
            if (result.status != topo::SubmitStatus::Committed)
                bad(where + " rejected: " + ledger::rejection_name(result.reason));
            out.labels[label] = result.tx_id;
        }
    }

    // Policies are parsed after the steps so transaction labels resolve.
    std::vector<audit::Policy> fact_policies;
    std::vector<std::string> no_double_commit;
    if (auto it = doc.find("policies"); it != doc.end()) {
        if (!it->is_array()) bad("policies must be a list");
        for (const json& pj : *it) {
            const std::string pname = need_string(pj, "name", "policy");
            const std::string where = "policy \"" + pname + "\"";
            const std::string pkind = opt_string(pj, "kind", "forbid-fact", where);
            if (pkind == "no-double-commit") {
                no_double_commit.push_back(pname);
                continue;
            }
            if (pkind != "forbid-fact") bad(where + ": unknown policy kind \"" + pkind + "\"");

            audit::Policy p;
            p.name = pname;
            const json& actors = need(pj, "actors", where);
            if (actors.is_string() && actors.get<std::string>() == "all") p.all_actors = true;
            else p.actors = string_list(actors, where + " actors");
            if (auto ex = pj.find("exempt"); ex != pj.end())
                p.exempt = string_list(*ex, where + " exempt");

            const json& fj = need(pj, "forbidden", where);
            const std::string kind_name = need_string(fj, "kind", where + " forbidden");
            auto fact_kind = audit::fact_kind_from_name(kind_name);
            if (!fact_kind) bad(where + ": unknown fact kind \"" + kind_name + "\"");
            p.forbidden.kind = *fact_kind;
            if (fj.contains("tx")) {
                const std::string ref = need_string(fj, "tx", where + " forbidden");
                auto found = out.labels.find(ref);
                if (found == out.labels.end())
                    bad(where + ": unknown step label \"" + ref + "\"");
                p.forbidden.tx = found->second;
            }
            if (fj.contains("group"))
                p.forbidden.text_a = need_string(fj, "group", where + " forbidden");
            if (fj.contains("contract"))
                p.forbidden.text_a = need_string(fj, "contract", where + " forbidden");
            if (fj.contains("name"))
                p.forbidden.text_a = need_string(fj, "name", where + " forbidden");
            if (fj.contains("member"))
                p.forbidden.text_b = need_string(fj, "member", where + " forbidden");
            if (fj.contains("key"))
                p.forbidden.key =
                    platform.party_public_key(need_string(fj, "key", where + " forbidden"));
            fact_policies.push_back(std::move(p));
        }
    }

    std::vector<audit::Violation> violations = platform.log().check(fact_policies);

    ordered_json report;
    report["format"] = 1;
    report["scenario"] = name;
    report["topology"] = topo::topology_name(kind);
    report["seed"] = opts.seed;
    report["orderer_mode"] = orderer_mode;
    report["notary_mode"] = notary_mode;

    auto parties = ordered_json::array();
    for (const std::string& p : platform.party_names()) parties.push_back(p);
    report["parties"] = parties;

    auto labels_json = ordered_json::object();
    for (const auto& [label, id] : out.labels) labels_json[label] = id.hex();
    report["labels"] = labels_json;

    auto spends_json = ordered_json::array();
    for (const DoubleSpendRecord& ds : out.double_spends) {
        ordered_json row;
        row["label"] = ds.label;
        row["outcome"] = topo::double_spend_outcome_name(ds.result.outcome);
        row["reason"] = ledger::rejection_name(ds.result.reason);
        row["first_tx"] = ds.result.first_tx.hex();
        row["second_tx"] = ds.result.second_tx.hex();
        spends_json.push_back(row);
    }
    report["double_spends"] = spends_json;

    auto violations_json = ordered_json::array();
    for (const audit::Violation& v : violations) {
        ordered_json row;
        row["policy"] = v.policy;
        row["actor"] = v.actor;
        row["fact"] = audit::fact_to_json(v.fact);
        row["delivery_index"] = v.delivery_index;
        violations_json.push_back(row);
    }
    for (const std::string& pname : no_double_commit) {
        for (const DoubleSpendRecord& ds : out.double_spends) {
            if (ds.result.outcome != topo::DoubleSpendOutcome::BothCommitted) continue;
            ordered_json row;
            row["policy"] = pname;
            row["double_commit"] = ds.label;
            row["first_tx"] = ds.result.first_tx.hex();
            row["second_tx"] = ds.result.second_tx.hex();
            violations_json.push_back(row);
        }
    }
    report["violations"] = violations_json;

    auto dead_json = ordered_json::array();
    for (const audit::DeadLetter& d : platform.log().dead_letters()) {
        ordered_json row;
        row["from"] = d.from;
        row["to"] = d.to;
        row["delivery_index"] = d.delivery_index;
        dead_json.push_back(row);
    }
    report["dead_letters"] = dead_json;

    auto totals_json = ordered_json::object();
    for (const auto& [fk, count] : platform.log().totals())
        totals_json[audit::fact_kind_name(fk)] = count;
    report["totals"] = totals_json;

    auto events_json = ordered_json::array();
    for (const audit::AuditLog::Event& ev : platform.log().events()) {
        ordered_json row;
        row["actor"] = ev.actor;
        row["fact"] = audit::fact_to_json(ev.fact);
        row["delivery_index"] = ev.delivery_index;
        events_json.push_back(row);
    }
    report["events"] = events_json;

    report["knowledge"] = platform.log().knowledge_json();

    auto holdings_json = ordered_json::array();
    for (const auto& [ref, owner] : platform.holdings()) {
        ordered_json row;
        row["ref"] = ref.tx.hex() + ":" + std::to_string(ref.index);
        row["owner"] = owner;
        holdings_json.push_back(row);
    }
    report["holdings"] = holdings_json;

    out.ledger_dump = platform.dumps();
    report["ledger_dump"] = out.ledger_dump;

    out.report = report;
    out.report_text = report.dump(2) + "\n";
    out.exit_code = violations_json.empty() ? 0 : 1;
    return out;
}

inline Outcome run_file(const std::string& path, const RunOptions& opts) {
    return run_scenario(load_file(path), opts);
}

}  // namespace ledgerlab::scenario

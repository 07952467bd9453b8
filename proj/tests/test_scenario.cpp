#include <catch2/catch_amalgamated.hpp>

#include "ledgerlab/scenario.hpp"
#include "matchers.hpp"

using namespace ledgerlab;
namespace sc = ledgerlab::scenario;
using sc::json;

namespace {

// Minimal two-party flow reused across cases: mint to alice, pass to bob.
const char* kBasicScenario = R"({
  "format": 1,
  "name": "basic",
  "topology": "channelized",
  "parties": ["alice", "bob", "carol"],
  "groups": [{"id": "deal", "members": ["alice", "bob"]}],
  "contracts": [{"id": "pay", "group": "deal", "predicate": "accept-all"}],
  "steps": [
    {"op": "mint", "label": "t1", "owner": "alice", "group": "deal", "contract": "pay",
     "value": "100", "payload": {"kind": "inline", "data": "terms"}},
    {"op": "transfer", "label": "t2", "from": "alice", "to": "bob", "input": "t1:0"}
  ]
})";

sc::Outcome run_text(const std::string& text, std::uint64_t seed = 7,
                     std::optional<topo::TopologyKind> override = {}) {
    sc::RunOptions opts;
    opts.seed = seed;
    opts.topology_override = override;
    return sc::run_scenario(sc::parse_text(text), opts);
}

void expect_bad(const std::string& text, const std::string& why_contains) {
    try {
        run_text(text);
        FAIL("expected BadScenario for: " << why_contains);
    } catch (const LabError& e) {
        CHECK(e.code() == ErrorCode::BadScenario);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(why_contains));
    }
}

}  // namespace

TEST_CASE("a clean scenario produces a structured report and exit code 0", "[scenario]") {
    sc::Outcome out = run_text(kBasicScenario);
    CHECK(out.exit_code == 0);
    REQUIRE(out.labels.count("t1") == 1);
    REQUIRE(out.labels.count("t2") == 1);

    const auto& r = out.report;
    CHECK(r.at("format") == 1);
    CHECK(r.at("scenario") == "basic");
    CHECK(r.at("topology") == "channelized");
    CHECK(r.at("seed") == 7);
    CHECK(r.at("orderer_mode") == "shared");
    CHECK(r.at("notary_mode") == "validating");
    CHECK(r.at("parties") == json::array({"alice", "bob", "carol"}));
    CHECK(r.at("labels").at("t1") == out.labels.at("t1").hex());
    CHECK(r.at("violations").empty());
    CHECK(r.at("double_spends").empty());
    CHECK(r.at("dead_letters").empty());

    // Report keys come out in a fixed order so diffs stay readable.
    std::vector<std::string> keys;
    for (auto it = r.begin(); it != r.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{
                      "format", "scenario", "topology", "seed", "orderer_mode", "notary_mode",
                      "parties", "labels", "double_spends", "violations", "dead_letters",
                      "totals", "events", "knowledge", "holdings", "ledger_dump"});

    // The asset ends with bob, and the dump mirrors the report's copy.
    bool bob_holds = false;
    for (const auto& row : r.at("holdings"))
        if (row.at("ref") == out.labels.at("t2").hex() + ":0" && row.at("owner") == "bob")
            bob_holds = true;
    CHECK(bob_holds);
    CHECK(r.at("ledger_dump") == out.ledger_dump);
    CHECK(out.report_text.back() == '\n');
    CHECK(out.report_text == r.dump(2) + "\n");
}

TEST_CASE("same seed means byte-identical output, and content ignores the seed",
          "[scenario]") {
    sc::Outcome a = run_text(kBasicScenario, 42);
    sc::Outcome b = run_text(kBasicScenario, 42);
    CHECK(a.report_text == b.report_text);
    CHECK(a.ledger_dump == b.ledger_dump);

    // A different seed reshuffles delivery interleaving but must not change
    // any committed bytes: transaction content is derived from labels.
    sc::Outcome c = run_text(kBasicScenario, 1234);
    CHECK(c.ledger_dump == a.ledger_dump);
    CHECK(c.labels.at("t2") == a.labels.at("t2"));
}

TEST_CASE("policies turn leaked facts into violations and exit code 1", "[scenario]") {
    std::string text = R"({
      "format": 1,
      "name": "leak-check",
      "topology": "public-anchor",
      "parties": ["alice", "bob", "carol"],
      "groups": [{"id": "deal", "members": ["alice", "bob"]}],
      "contracts": [{"id": "pay", "group": "deal"}],
      "steps": [
        {"op": "mint", "label": "t1", "owner": "alice", "group": "deal", "contract": "pay"}
      ],
      "policies": [
        {"name": "outsiders-see-nothing", "actors": ["carol"],
         "forbidden": {"kind": "TxExistence", "tx": "t1"}}
      ]
    })";

    // On a public chain carol inevitably sees the anchor: violation.
    sc::Outcome pub = run_text(text);
    CHECK(pub.exit_code == 1);
    REQUIRE_FALSE(pub.report.at("violations").empty());
    const auto& v = pub.report.at("violations").at(0);
    CHECK(v.at("policy") == "outsiders-see-nothing");
    CHECK(v.at("actor") == "carol");
    CHECK(v.at("fact").at("kind") == "TxExistence");

    // The same scenario on a channelized platform keeps carol blind.
    sc::Outcome chan = run_text(text, 7, topo::TopologyKind::Channelized);
    CHECK(chan.exit_code == 0);
    CHECK(chan.report.at("topology") == "channelized");
    CHECK(chan.report.at("violations").empty());
}

TEST_CASE("double-spend steps record the dichotomy in the report", "[scenario]") {
    std::string text = R"({
      "format": 1,
      "name": "ds",
      "topology": "public-anchor",
      "parties": ["alice", "bob", "carol"],
      "groups": [{"id": "deal", "members": ["alice", "bob", "carol"]}],
      "contracts": [{"id": "pay", "group": "deal"}],
      "steps": [
        {"op": "mint", "label": "m", "owner": "alice", "group": "deal", "contract": "pay"},
        {"op": "double_spend", "label": "ds", "owner": "alice", "input": "m:0",
         "to": "bob", "second_to": "carol"}
      ],
      "policies": [{"name": "no-forks", "kind": "no-double-commit"}]
    })";

    sc::Outcome pub = run_text(text);
    REQUIRE(pub.double_spends.size() == 1);
    CHECK(pub.double_spends[0].result.outcome == topo::DoubleSpendOutcome::BothCommitted);
    CHECK(pub.exit_code == 1);
    CHECK(pub.report.at("double_spends").at(0).at("outcome") == "BothCommitted");
    CHECK(pub.report.at("violations").at(0).at("double_commit") == "ds");
    CHECK(pub.labels.count("ds.first") == 1);
    CHECK(pub.labels.count("ds.second") == 1);
    CHECK(!(pub.labels.at("ds.first") == pub.labels.at("ds.second")));

    for (topo::TopologyKind kind :
         {topo::TopologyKind::Channelized, topo::TopologyKind::PointToPoint}) {
        sc::Outcome priv = run_text(text, 7, kind);
        INFO(topo::topology_name(kind));
        CHECK(priv.exit_code == 0);
        CHECK(priv.report.at("double_spends").at(0).at("outcome") == "SecondRejected");
        CHECK(priv.report.at("double_spends").at(0).at("reason") == "DoubleSpend");
        CHECK(priv.report.at("violations").empty());
    }
}

TEST_CASE("purge steps leave the chain bytes untouched", "[scenario]") {
    std::string with_purge = R"({
      "format": 1,
      "name": "purge-demo",
      "topology": "channelized",
      "parties": ["alice", "bob"],
      "groups": [{"id": "deal", "members": ["alice", "bob"]}],
      "contracts": [{"id": "pay", "group": "deal"}],
      "steps": [
        {"op": "mint", "label": "t1", "owner": "alice", "group": "deal", "contract": "pay",
         "payload": {"kind": "anchor", "data": "customer record"},
         "collection": ["alice", "bob"]},
        {"op": "purge", "target": "t1"}
      ]
    })";
    std::string without_purge = with_purge;
    auto pos = without_purge.find(R"(,
        {"op": "purge", "target": "t1"})");
    REQUIRE(pos != std::string::npos);
    without_purge.erase(pos, std::string(R"(,
        {"op": "purge", "target": "t1"})").size());

    sc::Outcome purged = run_text(with_purge);
    sc::Outcome kept = run_text(without_purge);
    CHECK(purged.exit_code == 0);
    // Purging only clears the off-chain store; the committed chain, the
    // audit trail, and hence the whole report stay byte-identical.
    CHECK(purged.ledger_dump == kept.ledger_dump);
    CHECK(purged.report_text == kept.report_text);

    // The off-chain data really is gone after the run.
    auto* chan = dynamic_cast<topo::ChannelizedPlatform*>(purged.platform.get());
    REQUIRE(chan != nullptr);
    const ledger::Transaction* tx =
        chan->channel_ledger("deal").transaction(purged.labels.at("t1"));
    REQUIRE(tx != nullptr);
    const auto* anchor = std::get_if<ledger::AnchorPayload>(&tx->payload);
    REQUIRE(anchor != nullptr);
    CHECK_FALSE(chan->channel_store("deal").retrieve(anchor->digest).has_value());
    auto* kept_chan = dynamic_cast<topo::ChannelizedPlatform*>(kept.platform.get());
    CHECK(kept_chan->channel_store("deal").retrieve(anchor->digest).has_value());
}

TEST_CASE("scenario validation rejects malformed documents", "[scenario]") {
    CHECK_THROWS_MATCHES(sc::parse_text("not json"), LabError,
                         ErrorCodeIs(ErrorCode::BadScenario));
    CHECK_THROWS_MATCHES(sc::load_file("/nonexistent/path.json"), LabError,
                         ErrorCodeIs(ErrorCode::BadScenario));

    expect_bad(R"(["array"])", "must be a JSON object");
    expect_bad(R"({"name": "x"})", "missing \"format\"");
    expect_bad(R"({"format": 2, "name": "x"})", "unsupported scenario format");
    expect_bad(R"({"format": 1})", "missing \"name\"");
    expect_bad(R"({"format": 1, "name": "x"})", "missing \"topology\"");
    expect_bad(R"({"format": 1, "name": "x", "topology": "mesh"})", "unknown topology");
    expect_bad(R"({"format": 1, "name": "x", "topology": "p2p"})", "missing \"parties\"");
    expect_bad(R"({"format": 1, "name": "x", "topology": "p2p", "orderer_mode": "solo",
                   "parties": ["a"]})",
               "unknown orderer_mode");
    expect_bad(R"({"format": 1, "name": "x", "topology": "p2p", "notary_mode": "fast",
                   "parties": ["a"]})",
               "unknown notary_mode");
    expect_bad(R"({"format": 1, "name": "x", "topology": "p2p", "parties": "alice"})",
               "must be a list of strings");

    const std::string prologue = R"({"format": 1, "name": "x", "topology": "channelized",
        "parties": ["alice", "bob"],
        "groups": [{"id": "deal", "members": ["alice", "bob"]}],
        "contracts": [{"id": "pay", "group": "deal"}],)";

    expect_bad(prologue + R"("steps": [{"op": "conjure", "label": "t"}]})", "unknown step op");
    expect_bad(prologue + R"("steps": [{"op": "mint", "owner": "alice",
                "group": "deal", "contract": "pay"}]})",
               "needs a label");
    expect_bad(prologue + R"("steps": [
                {"op": "mint", "label": "t", "owner": "alice", "group": "deal", "contract": "pay"},
                {"op": "mint", "label": "t", "owner": "alice", "group": "deal", "contract": "pay"}]})",
               "duplicate step label");
    expect_bad(prologue + R"("steps": [{"op": "transfer", "label": "t", "from": "alice",
                "to": "bob", "input": "ghost:0"}]})",
               "unknown step label");
    expect_bad(prologue + R"("steps": [{"op": "transfer", "label": "t", "from": "alice",
                "to": "bob", "input": "noindex"}]})",
               "must be \"label:index\"");
    expect_bad(prologue + R"("steps": [{"op": "transfer", "label": "t", "from": "alice",
                "to": "bob", "input": "m:zero"}]})",
               "bad output index");
    expect_bad(prologue + R"("steps": [{"op": "mint", "label": "t", "owner": "alice",
                "group": "deal", "contract": "pay", "payload": {"kind": "steganographic"}}]})",
               "unknown payload kind");
    expect_bad(prologue + R"("steps": [{"op": "purge", "target": "ghost"}]})",
               "unknown step label");
    expect_bad(prologue + R"("steps": [{"op": "mint", "label": "t", "owner": "alice",
                "group": "deal", "contract": "pay",
                "payload": {"kind": "tear-off", "data": "x"}}]})",
               "tear-off");

    expect_bad(R"({"format": 1, "name": "x", "topology": "channelized",
        "parties": ["alice"],
        "groups": [{"id": "deal", "members": ["alice"]}],
        "contracts": [{"id": "pay", "group": "deal", "predicate": "coin-flip"}]})",
               "unknown contract predicate");

    expect_bad(prologue + R"("policies": [{"name": "p", "actors": "all",
                "forbidden": {"kind": "Telepathy"}}]})",
               "unknown fact kind");
    expect_bad(prologue + R"("policies": [{"name": "p", "actors": "all",
                "forbidden": {"kind": "TxPayload", "tx": "ghost"}}]})",
               "unknown step label");
    expect_bad(prologue + R"("policies": [{"name": "p", "kind": "quarantine",
                "actors": "all", "forbidden": {"kind": "TxPayload"}}]})",
               "unknown policy kind");
}

TEST_CASE("contract wiring flows from the document into validation", "[scenario]") {
    // A mint-only contract lets the mint through and rejects the transfer;
    // the runner reports rejected steps as scenario errors.
    std::string text = R"({
      "format": 1,
      "name": "mint-only",
      "topology": "channelized",
      "parties": ["alice", "bob"],
      "groups": [{"id": "deal", "members": ["alice", "bob"]}],
      "contracts": [{"id": "issue", "group": "deal", "predicate": "mint-only"}],
      "steps": [
        {"op": "mint", "label": "t1", "owner": "alice", "group": "deal", "contract": "issue"},
        {"op": "transfer", "label": "t2", "from": "alice", "to": "bob", "input": "t1:0"}
      ]
    })";
    try {
        run_text(text);
        FAIL("expected the transfer to violate the mint-only contract");
    } catch (const LabError& e) {
        CHECK(e.code() == ErrorCode::BadScenario);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("ContractViolation"));
    }

    // Off-chain-engine mode skips on-node evaluation, so the same scenario
    // commits cleanly and nobody holds the contract logic.
    std::string engine = text;
    auto pos = engine.find("\"predicate\": \"mint-only\"");
    REQUIRE(pos != std::string::npos);
    engine.replace(pos, std::string("\"predicate\": \"mint-only\"").size(),
                   "\"predicate\": \"mint-only\", \"mode\": \"off-chain-engine\"");
    sc::Outcome out = run_text(engine);
    CHECK(out.exit_code == 0);
    CHECK_FALSE(out.platform->holds_code("alice", "issue"));
}

TEST_CASE("member-run ordering keeps scenario facts off the third party", "[scenario]") {
    std::string text = R"({
      "format": 1,
      "name": "member-run",
      "topology": "channelized",
      "orderer_mode": "member-run",
      "orderer_operator": "alice",
      "parties": ["alice", "bob"],
      "groups": [{"id": "deal", "members": ["alice", "bob"]}],
      "contracts": [{"id": "pay", "group": "deal"}],
      "steps": [
        {"op": "mint", "label": "t1", "owner": "alice", "group": "deal", "contract": "pay"}
      ]
    })";
    sc::Outcome out = run_text(text);
    CHECK(out.report.at("orderer_mode") == "member-run");
    CHECK_FALSE(out.platform->log().knows("orderer", audit::TxExistence{out.labels.at("t1")}));
    CHECK(out.platform->log().knows("alice", audit::TxExistence{out.labels.at("t1")}));
}

#include <catch2/catch_amalgamated.hpp>

#include "ledgerlab/netsim.hpp"
#include "matchers.hpp"

using namespace ledgerlab;
using namespace ledgerlab::netsim;
using crypto::Digest;

namespace {

ActorId party(const std::string& name) { return ActorId{Role::Party, name}; }

Digest tx_id(const std::string& label) { return crypto::hash("tx:" + label); }

Envelope note(const ActorId& from, const ActorId& to, const std::string& label) {
    Envelope env;
    env.from = from;
    env.to = to;
    env.body = TxProposal{};
    env.facts = {audit::TxExistence{tx_id(label)}};
    return env;
}

ledger::Transaction make_tx(const ledger::Payload& payload, bool with_input = false) {
    auto owner = crypto::keygen(crypto::hash("owner").to_bytes());
    std::vector<ledger::AssetRef> inputs;
    if (with_input) inputs.push_back(ledger::AssetRef{tx_id("funding"), 0});
    return ledger::make_transaction("deal", {owner.public_key}, payload, inputs,
                                    {ledger::Output{owner.public_key, to_bytes("1")}}, "pay");
}

}  // namespace

TEST_CASE("actors are unique and unknown recipients dead-letter", "[netsim]") {
    audit::AuditLog log;
    Simulation sim(SimConfig{}, {party("alice"), party("bob")}, log);
    CHECK(sim.has_actor(party("alice")));
    CHECK_THROWS_MATCHES(sim.add_actor(party("alice")), LabError,
                         ErrorCodeIs(ErrorCode::DuplicateActor));

    sim.send(note(party("alice"), party("ghost"), "lost"));
    CHECK_FALSE(sim.idle());
    auto delivered = sim.step();
    CHECK_FALSE(delivered.has_value());
    CHECK(sim.idle());
    REQUIRE(log.dead_letters().size() == 1);
    CHECK(log.dead_letters()[0].from == "alice");
    CHECK(log.dead_letters()[0].to == "ghost");
    CHECK(log.dead_letters()[0].delivery_index == 1);
    // The lost message taught nobody anything.
    CHECK(log.events().empty());
}

TEST_CASE("deliveries stay FIFO per pair and record facts on arrival", "[netsim]") {
    audit::AuditLog log;
    Simulation sim(SimConfig{.seed = 17}, {party("alice"), party("bob"), party("carol")}, log);

    for (int i = 0; i < 3; ++i)
        sim.send(note(party("alice"), party("bob"), "ab" + std::to_string(i)));
    for (int i = 0; i < 3; ++i)
        sim.send(note(party("carol"), party("bob"), "cb" + std::to_string(i)));

    std::vector<std::string> from_alice, from_carol;
    std::size_t delivered = sim.run_to_idle([&](const Envelope& env) {
        const auto* fact = std::get_if<audit::TxExistence>(&env.facts.at(0));
        REQUIRE(fact != nullptr);
        for (int i = 0; i < 3; ++i) {
            if (fact->tx == tx_id("ab" + std::to_string(i)))
                from_alice.push_back("ab" + std::to_string(i));
            if (fact->tx == tx_id("cb" + std::to_string(i)))
                from_carol.push_back("cb" + std::to_string(i));
        }
    });

    CHECK(delivered == 6);
    CHECK(sim.delivery_index() == 6);
    CHECK(from_alice == std::vector<std::string>{"ab0", "ab1", "ab2"});
    CHECK(from_carol == std::vector<std::string>{"cb0", "cb1", "cb2"});
    for (int i = 0; i < 3; ++i) {
        CHECK(log.knows("bob", audit::TxExistence{tx_id("ab" + std::to_string(i))}));
        CHECK(log.knows("bob", audit::TxExistence{tx_id("cb" + std::to_string(i))}));
    }
    CHECK(log.knowledge("alice").empty());  // senders learn nothing by sending
}

TEST_CASE("interleaving is a pure function of the seed", "[netsim]") {
    auto trace = [](std::uint64_t seed) {
        audit::AuditLog log;
        Simulation sim(SimConfig{.seed = seed}, {party("a"), party("b"), party("c")}, log);
        for (int i = 0; i < 4; ++i) {
            sim.send(note(party("a"), party("b"), "x" + std::to_string(i)));
            sim.send(note(party("b"), party("c"), "y" + std::to_string(i)));
            sim.send(note(party("c"), party("a"), "z" + std::to_string(i)));
        }
        std::vector<std::string> order;
        sim.run_to_idle([&](const Envelope& env) { order.push_back(env.from.name + env.to.name); });
        return order;
    };

    CHECK(trace(1) == trace(1));
    CHECK(trace(42) == trace(42));
    bool any_difference = false;
    for (std::uint64_t seed = 2; seed <= 6; ++seed) {
        if (trace(seed) != trace(1)) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("a dispatcher may keep the simulation busy", "[netsim]") {
    audit::AuditLog log;
    Simulation sim(SimConfig{.seed = 3}, {party("a"), party("b")}, log);
    sim.send(note(party("a"), party("b"), "ping0"));
    int hops = 0;
    std::size_t delivered = sim.run_to_idle([&](const Envelope& env) {
        if (++hops < 5) sim.send(note(env.to, env.from, "ping" + std::to_string(hops)));
    });
    CHECK(delivered == 5);
    CHECK(sim.idle());
}

TEST_CASE("ordering preserves arrival order and knowledge follows the operator", "[netsim]") {
    auto inline_tx = make_tx(ledger::InlinePayload{to_bytes("visible body")}, true);
    auto sealed_tx = make_tx(ledger::EncryptedPayload{to_bytes("ciphertext"), "hint"});

    SECTION("a shared third-party orderer accrues its own knowledge") {
        audit::AuditLog log;
        OrderingService orderer(ActorId{Role::Orderer, "orderer"}, OrdererMode::SharedThirdParty);
        CHECK(orderer.knowledge_scope() == "orderer");

        auto out = orderer.order({inline_tx, sealed_tx}, log, 1);
        REQUIRE(out.size() == 2);
        CHECK(out[0].id == inline_tx.id);
        CHECK(out[1].id == sealed_tx.id);
        CHECK(orderer.sequence() == 1);

        CHECK(log.knows("orderer", audit::TxExistence{inline_tx.id}));
        CHECK(log.knows("orderer", audit::TxParticipants{inline_tx.id, inline_tx.participants}));
        CHECK(log.knows("orderer", audit::InputRef{inline_tx.id, inline_tx.inputs}));
        // Plaintext on the wire is the only way the orderer sees content.
        CHECK(log.knows("orderer",
                        audit::TxPayload{inline_tx.id, crypto::hash(to_bytes("visible body"))}));
        bool sealed_payload_known = false;
        for (const audit::Fact& f : log.knowledge("orderer")) {
            if (const auto* p = std::get_if<audit::TxPayload>(&f))
                if (p->tx == sealed_tx.id) sealed_payload_known = true;
        }
        CHECK_FALSE(sealed_payload_known);
    }

    SECTION("a member-run orderer scopes observations to the member") {
        audit::AuditLog log;
        OrderingService orderer(ActorId{Role::Orderer, "orderer"}, OrdererMode::MemberRun, "alice");
        CHECK(orderer.knowledge_scope() == "alice");
        orderer.order({inline_tx}, log, 1);
        CHECK(log.knowledge("orderer").empty());
        CHECK(log.knows("alice", audit::TxExistence{inline_tx.id}));
    }
}

TEST_CASE("the notary consumes inputs exactly once", "[netsim]") {
    audit::AuditLog log;
    auto keys = crypto::keygen(crypto::hash("notary").to_bytes());
    NotaryService notary(ActorId{Role::Notary, "notary"}, NotaryMode::NonValidating, keys);

    ledger::AssetRef ref{tx_id("mint"), 0};
    ledger::AssetRef other{tx_id("mint"), 1};
    Bytes msg = ledger::signing_message_for_digest(tx_id("spend1"));

    NotarySignRequest first{tx_id("spend1"), {ref}, msg, std::nullopt};
    auto sig1 = notary.notarize(first, log, 1);
    CHECK(sig1.ok);
    CHECK(crypto::verify(notary.public_key(), msg, sig1.signature));
    CHECK(notary.is_consumed(ref));

    // Same input again: refused, and the fresh input in the same request
    // is not burned by the failed attempt.
    NotarySignRequest second{tx_id("spend2"), {ref, other},
                             ledger::signing_message_for_digest(tx_id("spend2")), std::nullopt};
    auto sig2 = notary.notarize(second, log, 2);
    CHECK_FALSE(sig2.ok);
    CHECK(sig2.reason == ledger::Rejection::DoubleSpend);
    CHECK_FALSE(notary.is_consumed(other));

    NotarySignRequest third{tx_id("spend3"), {other},
                            ledger::signing_message_for_digest(tx_id("spend3")), std::nullopt};
    CHECK(notary.notarize(third, log, 3).ok);
}

TEST_CASE("notary knowledge depends on the validation mode", "[netsim]") {
    auto tx = make_tx(ledger::InlinePayload{to_bytes("secret body")}, true);
    NotarySignRequest req{tx.id, tx.inputs, ledger::signing_message(tx), tx};

    SECTION("validating notaries read the whole transaction") {
        audit::AuditLog log;
        NotaryService notary(ActorId{Role::Notary, "notary"}, NotaryMode::Validating,
                             crypto::keygen(crypto::hash("n1").to_bytes()));
        notary.notarize(req, log, 1);
        CHECK(log.knows("notary", audit::TxExistence{tx.id}));
        CHECK(log.knows("notary", audit::InputRef{tx.id, tx.inputs}));
        CHECK(log.knows("notary", audit::TxParticipants{tx.id, tx.participants}));
        CHECK(log.knows("notary", audit::TxPayload{tx.id, crypto::hash(to_bytes("secret body"))}));
    }

    SECTION("non-validating notaries see only ids and input refs") {
        audit::AuditLog log;
        NotaryService notary(ActorId{Role::Notary, "notary"}, NotaryMode::NonValidating,
                             crypto::keygen(crypto::hash("n2").to_bytes()));
        notary.notarize(req, log, 1);  // tx attached, but the mode ignores it
        CHECK(log.knows("notary", audit::TxExistence{tx.id}));
        CHECK(log.knows("notary", audit::InputRef{tx.id, tx.inputs}));
        auto totals = log.totals();
        CHECK(totals.count(audit::FactKind::TxParticipants) == 0);
        CHECK(totals.count(audit::FactKind::TxPayload) == 0);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include "ledgerlab/ledger.hpp"
#include "matchers.hpp"

using namespace ledgerlab;
using crypto::Digest;
using crypto::KeyPair;
using ledger::AssetRef;
using ledger::AssetState;
using ledger::Contract;
using ledger::Output;
using ledger::Rejection;
using ledger::Transaction;

namespace {

KeyPair key_from(const std::string& label) { return crypto::keygen(crypto::hash(label).to_bytes()); }

Contract accept_all() {
    Contract c;
    c.id = "pay";
    c.predicate = [](const Transaction&) { return true; };
    return c;
}

Transaction make_mint(const KeyPair& owner, const std::string& value = "100") {
    return ledger::make_transaction("deal", {owner.public_key},
                                    ledger::InlinePayload{to_bytes("mint " + value)}, {},
                                    {Output{owner.public_key, to_bytes(value)}}, "pay");
}

}  // namespace

TEST_CASE("transaction ids commit to every field except tear-off views", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    auto base = [&] {
        return ledger::make_transaction("deal", {alice.public_key, bob.public_key},
                                        ledger::InlinePayload{to_bytes("hello")}, {},
                                        {Output{bob.public_key, to_bytes("5")}}, "pay");
    };
    Transaction tx = base();
    CHECK(base().id == tx.id);
    CHECK(tx.id == crypto::hash(tx.canonical_bytes()));

    auto other_group = base();
    other_group.group = "other";
    CHECK(!(crypto::hash(other_group.canonical_bytes()) == tx.id));

    auto other_payload = ledger::make_transaction("deal", {alice.public_key, bob.public_key},
                                                  ledger::InlinePayload{to_bytes("hellp")}, {},
                                                  {Output{bob.public_key, to_bytes("5")}}, "pay");
    CHECK(!(other_payload.id == tx.id));

    auto other_outputs = ledger::make_transaction("deal", {alice.public_key, bob.public_key},
                                                  ledger::InlinePayload{to_bytes("hello")}, {},
                                                  {Output{bob.public_key, to_bytes("6")}}, "pay");
    CHECK(!(other_outputs.id == tx.id));

    auto other_contract = ledger::make_transaction("deal", {alice.public_key, bob.public_key},
                                                   ledger::InlinePayload{to_bytes("hello")}, {},
                                                   {Output{bob.public_key, to_bytes("5")}}, "sell");
    CHECK(!(other_contract.id == tx.id));

    auto other_inputs = ledger::make_transaction(
        "deal", {alice.public_key, bob.public_key}, ledger::InlinePayload{to_bytes("hello")},
        {AssetRef{tx.id, 0}}, {Output{bob.public_key, to_bytes("5")}}, "pay");
    CHECK(!(other_inputs.id == tx.id));

    // Same Merkle root, different view sets: identical id, so recipients
    // holding different redactions agree on which transaction this is.
    auto leaves = ledger::transaction_leaves("deal", "pay", {alice.public_key}, {},
                                             {Output{alice.public_key, to_bytes("1")}},
                                             to_bytes("body"));
    auto tree = merkle::MerkleTree::build(leaves);
    ledger::TearOffPayload full{tree.root(), {{"participants", merkle::tear_off(tree, {})}}};
    ledger::TearOffPayload redacted{tree.root(), {{"oracle", merkle::tear_off(tree, {0, 2})}}};
    auto t1 = ledger::make_transaction("deal", {alice.public_key}, full, {}, {}, "pay");
    auto t2 = ledger::make_transaction("deal", {alice.public_key}, redacted, {}, {}, "pay");
    CHECK(t1.id == t2.id);

    CHECK_THROWS_MATCHES(
        ledger::make_transaction("deal", {}, ledger::InlinePayload{to_bytes("x")}, {}, {}, "pay"),
        LabError, ErrorCodeIs(ErrorCode::EmptyParticipants));
}

TEST_CASE("payload kinds and content hashes", "[ledger]") {
    Bytes data = to_bytes("payload data");
    ledger::Payload in = ledger::InlinePayload{data};
    ledger::Payload enc = ledger::EncryptedPayload{to_bytes("ciphertext"), "hint"};
    ledger::Payload anc = ledger::AnchorPayload{crypto::hash("anchored")};
    auto tree = merkle::MerkleTree::build({data});
    ledger::Payload tear = ledger::TearOffPayload{tree.root(), {}};

    CHECK(std::string(ledger::payload_kind(in)) == "inline");
    CHECK(std::string(ledger::payload_kind(enc)) == "encrypted");
    CHECK(std::string(ledger::payload_kind(anc)) == "anchor");
    CHECK(std::string(ledger::payload_kind(tear)) == "tear-off");

    CHECK(ledger::payload_content_hash(in) == crypto::hash(data));
    CHECK(ledger::payload_content_hash(enc) == crypto::hash(to_bytes("ciphertext")));
    CHECK(ledger::payload_content_hash(anc) == crypto::hash("anchored"));
    CHECK(ledger::payload_content_hash(tear) == tree.root());

    // The id bytes of different kinds never collide even on equal content.
    ledger::Payload anc2 = ledger::AnchorPayload{crypto::hash(data)};
    CHECK(!(ledger::payload_id_bytes(in) == ledger::payload_id_bytes(anc2)));
}

TEST_CASE("signing requires authorization and binds the message", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    auto notary = key_from("notary");
    auto outsider = key_from("outsider");

    auto tx = ledger::make_transaction("deal", {alice.public_key, bob.public_key},
                                       ledger::InlinePayload{to_bytes("pay bob")}, {},
                                       {Output{bob.public_key, to_bytes("5")}}, "pay");

    tx = ledger::sign_transaction(tx, alice);
    CHECK(tx.signatures.count(alice.public_key) == 1);
    CHECK(crypto::verify(alice.public_key, ledger::signing_message(tx),
                         tx.signatures.at(alice.public_key)));

    // Designees may sign without being participants; strangers may not.
    tx = ledger::sign_transaction(tx, notary, {notary.public_key});
    CHECK(tx.signatures.count(notary.public_key) == 1);
    CHECK_THROWS_MATCHES(ledger::sign_transaction(tx, outsider), LabError,
                         ErrorCodeIs(ErrorCode::UnauthorizedSigner));
}

TEST_CASE("signature completeness follows the contract's signer rule", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    auto tx = ledger::make_transaction("deal", {alice.public_key, bob.public_key},
                                       ledger::InlinePayload{to_bytes("x")}, {},
                                       {Output{bob.public_key, to_bytes("1")}}, "pay");
    Contract all = accept_all();
    Contract any = accept_all();
    any.signers = ledger::SignerRule::AnyParticipant;

    CHECK_FALSE(ledger::signatures_complete(tx, all));
    CHECK_FALSE(ledger::signatures_complete(tx, any));

    auto one = ledger::sign_transaction(tx, alice);
    CHECK_FALSE(ledger::signatures_complete(one, all));
    CHECK(ledger::signatures_complete(one, any));

    auto both = ledger::sign_transaction(one, bob);
    CHECK(ledger::signatures_complete(both, all));

    // A signature copied under the wrong key does not count.
    auto forged = one;
    forged.signatures[bob.public_key] = forged.signatures[alice.public_key];
    CHECK_FALSE(ledger::signatures_complete(forged, all));
}

TEST_CASE("tear-off holders produce the same signature as full holders", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    std::vector<Bytes> participants{alice.public_key, bob.public_key};
    std::vector<Output> outputs{Output{bob.public_key, to_bytes("7")}};
    Bytes body = to_bytes("price per unit: 31");

    auto leaves = ledger::transaction_leaves("deal", "pay", participants, {}, outputs, body);
    auto tree = merkle::MerkleTree::build(leaves);
    // Hide the body and the output from one recipient class.
    std::set<std::size_t> hidden{leaves.size() - 1, leaves.size() - 2};
    ledger::TearOffPayload payload{
        tree.root(),
        {{"participants", merkle::tear_off(tree, {})}, {"oracle", merkle::tear_off(tree, hidden)}}};

    auto tx = ledger::make_transaction("deal", participants, payload, {}, outputs, "pay");
    CHECK(ledger::signing_message(tx) == ledger::signing_message_for_digest(tree.root()));

    // A recipient holding only the redacted view recomputes the root and
    // arrives at the exact same message, hence the same signature.
    const auto& view = std::get<ledger::TearOffPayload>(tx.payload).views.at("oracle");
    Digest recomputed = merkle::recompute(view);
    CHECK(recomputed == tree.root());
    auto sig_from_view = crypto::sign(alice.secret, ledger::signing_message_for_digest(recomputed));
    auto signed_tx = ledger::sign_transaction(tx, alice);
    CHECK(sig_from_view == signed_tx.signatures.at(alice.public_key));
}

TEST_CASE("validation checks signatures, inputs, then the contract", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    Contract contract = accept_all();
    auto all_visible = [](const AssetRef&) { return true; };

    auto mint = ledger::sign_transaction(make_mint(alice), alice);
    AssetState state;
    state.apply(mint);

    auto spend = ledger::make_transaction("deal", {alice.public_key},
                                          ledger::InlinePayload{to_bytes("spend")},
                                          {AssetRef{mint.id, 0}},
                                          {Output{bob.public_key, to_bytes("100")}}, "pay");

    SECTION("unsigned transactions are rejected before anything else") {
        auto r = ledger::validate(spend, state, contract, true, all_visible);
        CHECK_FALSE(r.ok);
        CHECK(r.reason == Rejection::MissingSignature);
    }

    auto signed_spend = ledger::sign_transaction(spend, alice);

    SECTION("a well-formed spend validates") {
        auto r = ledger::validate(signed_spend, state, contract, true, all_visible);
        CHECK(r.ok);
        CHECK(r.reason == Rejection::None);
        CHECK(r.warnings.empty());
    }

    SECTION("unknown inputs are rejected") {
        AssetState empty;
        auto r = ledger::validate(signed_spend, empty, contract, true, all_visible);
        CHECK_FALSE(r.ok);
        CHECK(r.reason == Rejection::UnknownInput);
    }

    SECTION("spent inputs are rejected") {
        state.apply(signed_spend);
        auto r = ledger::validate(signed_spend, state, contract, true, all_visible);
        CHECK_FALSE(r.ok);
        CHECK(r.reason == Rejection::DoubleSpend);
    }

    SECTION("contract predicates only fire for validators holding the code") {
        Contract mint_only = accept_all();
        mint_only.predicate = [](const Transaction& t) { return t.inputs.empty(); };
        auto r = ledger::validate(signed_spend, state, mint_only, true, all_visible);
        CHECK_FALSE(r.ok);
        CHECK(r.reason == Rejection::ContractViolation);

        auto blind = ledger::validate(signed_spend, state, mint_only, false, all_visible);
        CHECK(blind.ok);
    }

    SECTION("invisible inputs warn instead of rejecting") {
        AssetState empty;  // validator has never seen the mint
        auto invisible = [](const AssetRef&) { return false; };
        auto r = ledger::validate(signed_spend, empty, contract, true, invisible);
        CHECK(r.ok);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0] == Rejection::NotVisible);
    }
}

TEST_CASE("asset state tracks unspent and spent references", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    auto mint = make_mint(alice);
    AssetState state;
    CHECK_FALSE(state.exists(AssetRef{mint.id, 0}));

    state.apply(mint);
    AssetRef ref{mint.id, 0};
    CHECK(state.exists(ref));
    CHECK_FALSE(state.is_spent(ref));
    REQUIRE(state.lookup(ref).has_value());
    CHECK(state.lookup(ref)->owner == alice.public_key);
    CHECK(state.lookup(ref)->value == to_bytes("100"));

    auto spend = ledger::make_transaction("deal", {alice.public_key},
                                          ledger::InlinePayload{to_bytes("s")}, {ref},
                                          {Output{bob.public_key, to_bytes("100")}}, "pay");
    state.apply(spend);
    CHECK(state.exists(ref));
    CHECK(state.is_spent(ref));
    CHECK_FALSE(state.lookup(ref).has_value());
    CHECK(state.lookup(AssetRef{spend.id, 0}).has_value());
    CHECK(state.unspent().size() == 1);
}

TEST_CASE("ledger blocks chain and the head re-derives from content", "[ledger]") {
    auto alice = key_from("alice");
    auto bob = key_from("bob");
    ledger::Ledger chain;
    CHECK(chain.head() == Digest::zero());

    auto mint = ledger::sign_transaction(make_mint(alice), alice);
    auto spend = ledger::sign_transaction(
        ledger::make_transaction("deal", {alice.public_key},
                                 ledger::InlinePayload{to_bytes("spend")}, {AssetRef{mint.id, 0}},
                                 {Output{bob.public_key, to_bytes("100")}}, "pay"),
        alice);

    auto b0 = chain.append({mint});
    auto b1 = chain.append({spend});
    CHECK(b0.height == 0);
    CHECK(b1.height == 1);
    CHECK(b0.prev == Digest::zero());
    CHECK(b1.prev == b0.body_hash);
    CHECK(chain.head() == b1.body_hash);
    CHECK(chain.has_transaction(mint.id));
    REQUIRE(chain.transaction(spend.id) != nullptr);
    CHECK(chain.transaction(spend.id)->contract == "pay");
    CHECK(chain.recompute_head() == chain.head());

    // Rewriting committed content is detectable: the stored head no
    // longer matches a recomputation from the transactions themselves.
    auto* mut = chain.transaction_mut(mint.id);
    REQUIRE(mut != nullptr);
    mut->outputs[0].value = to_bytes("100000");
    CHECK(!(chain.recompute_head() == chain.head()));
}

TEST_CASE("ledger dumps are deterministic and carry the head", "[ledger]") {
    auto alice = key_from("alice");
    auto build = [&] {
        ledger::Ledger chain;
        auto mint = ledger::sign_transaction(make_mint(alice), alice);
        chain.append({mint});
        return chain;
    };
    auto a = build();
    auto b = build();
    CHECK(a.dump() == b.dump());
    CHECK(a.dump().find("head " + a.head().hex() + "\n") != std::string::npos);
    CHECK(a.dump().find("payload=inline") != std::string::npos);
}

TEST_CASE("block body hashes bind height, predecessor, and contents", "[ledger]") {
    Digest prev = crypto::hash("prev");
    std::vector<Digest> ids{crypto::hash("t1"), crypto::hash("t2")};
    Digest base = ledger::block_body_hash(3, prev, ids);
    CHECK(!(ledger::block_body_hash(4, prev, ids) == base));
    CHECK(!(ledger::block_body_hash(3, crypto::hash("other"), ids) == base));
    CHECK(!(ledger::block_body_hash(3, prev, {ids[1], ids[0]}) == base));
    CHECK(!(ledger::block_body_hash(3, prev, {ids[0]}) == base));
}

TEST_CASE("off-chain anchors are salted, purgeable, and re-verifiable", "[ledger]") {
    ledger::PrivateDataStore store{crypto::DetRng(7)};
    Bytes data = to_bytes("attachment: msds sheet rev 3");

    Digest a1 = store.anchor(data);
    Digest a2 = store.anchor(data);
    CHECK(!(a1 == a2));                      // fresh salt per anchor
    CHECK(!(a1 == crypto::hash(data)));      // never the bare hash
    REQUIRE(store.retrieve(a1).has_value());
    CHECK(*store.retrieve(a1) == data);
    CHECK(store.verify(a1, data));
    CHECK_FALSE(store.verify(a1, to_bytes("attachment: msds sheet rev 4")));
    CHECK_FALSE(store.verify(crypto::hash("unknown"), data));

    store.purge(a1);
    CHECK_FALSE(store.retrieve(a1).has_value());
    CHECK(store.has_anchor(a1));
    REQUIRE(store.salt(a1).has_value());

    // Someone re-presenting the original data can still be checked
    // against the anchor because the salt outlives the purge.
    CHECK(store.verify(a1, data));
    CHECK(ledger::PrivateDataStore::verify_with_salt(a1, *store.salt(a1), data));
    CHECK_FALSE(ledger::PrivateDataStore::verify_with_salt(a1, *store.salt(a1), data + data));

    store.purge(a1);  // idempotent
    CHECK(store.has_anchor(a1));
    store.purge(crypto::hash("never-anchored"));  // no-op

    // The other copy is untouched.
    CHECK(store.retrieve(a2).has_value());

    // Same seed, same salts: the store is as deterministic as the rest.
    ledger::PrivateDataStore replay{crypto::DetRng(7)};
    CHECK(replay.anchor(data) == a1);
}

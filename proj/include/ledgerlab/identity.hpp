#pragma once

// Membership service and pseudonymity tools: a certificate authority
// mapping names to public keys, one-time keys bound to long-term keys
// through CA-signed linking certificates, and Schnorr OR membership
// proofs that show control of some ring key without revealing which.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ledgerlab/bytes.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"

namespace ledgerlab::identity {

using crypto::KeyPair;
using crypto::Signature;

struct Certificate {
    std::string subject_name;
    Bytes subject_public;
    Bytes issuer_public;
    Signature issuer_signature;

    static Bytes message(const std::string& name, const Bytes& subject_public) {
        Encoder enc("ledgerlab.cert.v1");
        enc.field(name).field(subject_public);
        return enc.bytes();
    }

    bool verify() const {
        return crypto::verify(issuer_public, message(subject_name, subject_public), issuer_signature);
    }
};

struct LinkingCertificate {
    Bytes one_time_public;
    Bytes long_term_public;
    Signature issuer_signature;

    static Bytes message(const Bytes& one_time_public, const Bytes& long_term_public) {
        Encoder enc("ledgerlab.link.v1");
        enc.field(one_time_public).field(long_term_public);
        return enc.bytes();
    }
};

class CertificateAuthority {
public:
    explicit CertificateAuthority(KeyPair keys) : keys_(std::move(keys)) {}

    const Bytes& public_key() const { return keys_.public_key; }

    Certificate issue(const std::string& name, const Bytes& subject_public) {
        if (name.empty()) throw LabError(ErrorCode::MalformedInput, "empty subject name");
        if (registry_.count(name)) throw LabError(ErrorCode::DuplicateName, name);
        for (const auto& [existing, pub] : registry_) {
            if (pub == subject_public)
                throw LabError(ErrorCode::KeyCollision, "public key already registered to " + existing);
        }
        registry_[name] = subject_public;
        Signature sig = crypto::sign(keys_.secret, Certificate::message(name, subject_public));
        return Certificate{name, subject_public, keys_.public_key, sig};
    }

    LinkingCertificate link(const Bytes& one_time_public, const Bytes& long_term_public) {
        Signature sig =
            crypto::sign(keys_.secret, LinkingCertificate::message(one_time_public, long_term_public));
        return LinkingCertificate{one_time_public, long_term_public, sig};
    }

    const std::map<std::string, Bytes>& registry() const { return registry_; }

private:
    KeyPair keys_;
    std::map<std::string, Bytes> registry_;
};

// One-time secret is keygen(H(long_term.secret || index)); the CA signs
// the linkage so holders of the certificate — and only they — can undo
// the pseudonym.
inline std::pair<KeyPair, LinkingCertificate> derive_one_time(const KeyPair& long_term,
                                                              std::uint64_t index,
                                                              CertificateAuthority& ca) {
    Bytes seed_input = long_term.secret + be64(index);
    Bytes seed = crypto::hash(seed_input).to_bytes();
    KeyPair one_time = crypto::keygen(seed);
    if (one_time.public_key == long_term.public_key)
        throw LabError(ErrorCode::KeyCollision, "one-time key equals long-term key");
    LinkingCertificate cert = ca.link(one_time.public_key, long_term.public_key);
    return {one_time, cert};
}

inline Bytes open_link(const LinkingCertificate& link, const Bytes& ca_public) {
    Bytes msg = LinkingCertificate::message(link.one_time_public, link.long_term_public);
    if (!crypto::verify(ca_public, msg, link.issuer_signature))
        throw LabError(ErrorCode::LinkRejected, "linking certificate signature invalid");
    return link.long_term_public;
}

struct MembershipProof {
    std::vector<Bytes> ring;  // canonical (lexicographic) order
    Bytes context;
    std::vector<Bytes> commitments;  // per-member group elements
    std::vector<Bytes> challenges;   // per-member scalars
    std::vector<Bytes> responses;    // per-member scalars

    Bytes serialize() const {
        Encoder enc("ledgerlab.orproof.v1");
        enc.u32(static_cast<std::uint32_t>(ring.size()));
        for (const Bytes& k : ring) enc.field(k);
        enc.field(context);
        for (const Bytes& c : commitments) enc.field(c);
        for (const Bytes& c : challenges) enc.field(c);
        for (const Bytes& r : responses) enc.field(r);
        return enc.bytes();
    }
};

namespace detail {

inline std::vector<Bytes> canonical_ring(std::vector<Bytes> ring) {
    if (ring.empty()) throw LabError(ErrorCode::MalformedInput, "empty ring");
    std::sort(ring.begin(), ring.end());
    for (std::size_t i = 1; i < ring.size(); ++i) {
        if (ring[i] == ring[i - 1]) throw LabError(ErrorCode::MalformedInput, "duplicate ring member");
    }
    return ring;
}

inline group::Int fiat_shamir(const std::vector<Bytes>& ring, const Bytes& context,
                              const std::vector<Bytes>& commitments) {
    Encoder enc("ledgerlab.orproof.fs.v1");
    enc.u32(static_cast<std::uint32_t>(ring.size()));
    for (const Bytes& k : ring) enc.field(k);
    enc.field(context);
    for (const Bytes& c : commitments) enc.field(c);
    return group::hash_to_scalar("ledgerlab.orproof.e.v1", enc.bytes());
}

}  // namespace detail

// Schnorr OR composition: one real branch, simulated branches for the
// rest, challenge split fixed by the Fiat-Shamir hash. The ring is
// canonicalized here, so callers may pass it in any order.
inline MembershipProof prove_membership(const Bytes& secret, const std::vector<Bytes>& ring_in,
                                        const Bytes& context, crypto::DetRng& rng) {
    std::vector<Bytes> ring = detail::canonical_ring(ring_in);

    group::Int x;
    if (!group::decode_scalar(secret, x)) throw LabError(ErrorCode::MalformedInput, "bad secret scalar");
    Bytes prover_public = group::exp_base(x).encode();

    std::size_t real_index = ring.size();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (ring[i] == prover_public) {
            real_index = i;
            break;
        }
    }
    if (real_index == ring.size())
        throw LabError(ErrorCode::CannotProve, "prover key not in ring");

    const std::size_t n = ring.size();
    std::vector<group::Int> challenges(n), responses(n);
    std::vector<group::Element> commitments(n);

    group::Int nonce = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == real_index) {
            nonce = rng.next_scalar();
            commitments[i] = group::exp_base(nonce);
        } else {
            challenges[i] = rng.next_scalar();
            responses[i] = rng.next_scalar();
            group::Element pk;
            if (!group::decode_element(ring[i], pk))
                throw LabError(ErrorCode::MalformedInput, "ring member not a group element");
            // A_i = g^z_i * pk_i^(-c_i) so the branch equation holds.
            commitments[i] = group::exp_base(responses[i]).mul(pk.pow(challenges[i]).inverse());
        }
    }

    std::vector<Bytes> commitment_bytes(n);
    for (std::size_t i = 0; i < n; ++i) commitment_bytes[i] = commitments[i].encode();
    group::Int e = detail::fiat_shamir(ring, context, commitment_bytes);

    group::Int others = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != real_index) others = group::add_scalars(others, challenges[i]);
    }
    challenges[real_index] = group::sub_scalars(e, others);
    responses[real_index] =
        group::add_scalars(nonce, group::mul_scalars(challenges[real_index], x));

    MembershipProof proof;
    proof.ring = ring;
    proof.context = context;
    proof.commitments = commitment_bytes;
    for (std::size_t i = 0; i < n; ++i) {
        proof.challenges.push_back(group::scalar_to_bytes(challenges[i]));
        proof.responses.push_back(group::scalar_to_bytes(responses[i]));
    }
    return proof;
}

inline bool verify_membership(const MembershipProof& proof, const std::vector<Bytes>& ring_in,
                              const Bytes& context) {
    std::vector<Bytes> ring;
    try {
        ring = detail::canonical_ring(ring_in);
    } catch (const LabError&) {
        return false;
    }
    if (proof.ring != ring) return false;
    if (proof.context != context) return false;
    const std::size_t n = ring.size();
    if (proof.commitments.size() != n || proof.challenges.size() != n || proof.responses.size() != n)
        return false;

    group::Int challenge_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        group::Element pk, commitment;
        group::Int c, z;
        if (!group::decode_element(ring[i], pk)) return false;
        if (!group::decode_element(proof.commitments[i], commitment)) return false;
        if (!group::decode_scalar(proof.challenges[i], c)) return false;
        if (!group::decode_scalar(proof.responses[i], z)) return false;
        // g^z == A * pk^c
        if (!(group::exp_base(z) == commitment.mul(pk.pow(c)))) return false;
        challenge_sum = group::add_scalars(challenge_sum, c);
    }
    group::Int e = detail::fiat_shamir(proof.ring, proof.context, proof.commitments);
    return challenge_sum == e;
}

}  // namespace ledgerlab::identity

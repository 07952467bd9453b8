#pragma once

// Deterministic primitives shared by every module: SHA-256 digests,
// Schnorr signatures with derandomized nonces, and an
// encrypt-then-MAC AEAD keyed by HMAC-SHA256. Nonces are caller-supplied
// counters; key generation is seeded. Everything here is a pure
// function of its inputs.

#include <array>
#include <cstdint>
#include <optional>
#include <random>

#include "ledgerlab/bytes.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/group.hpp"
#include "ledgerlab/sha256.hpp"

namespace ledgerlab::crypto {

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    bool operator==(const Digest& other) const { return bytes == other.bytes; }
    bool operator!=(const Digest& other) const { return bytes != other.bytes; }
    bool operator<(const Digest& other) const { return bytes < other.bytes; }

    Bytes to_bytes() const { return Bytes(bytes.begin(), bytes.end()); }
    std::string hex() const { return to_hex(to_bytes()); }

    static Digest zero() { return Digest{}; }

    static Digest from_bytes(const Bytes& b) {
        if (b.size() != 32) throw LabError(ErrorCode::MalformedInput, "digest must be 32 bytes");
        Digest d;
        std::copy(b.begin(), b.end(), d.bytes.begin());
        return d;
    }

    static Digest from_hex(std::string_view h) { return from_bytes(ledgerlab::from_hex(h)); }
};

inline Digest hash(const Bytes& data) {
    Digest d;
    d.bytes = sha256(data);
    return d;
}

inline Digest hash(std::string_view data) { return hash(to_bytes(data)); }

struct Signature {
    Bytes bytes;  // enc32(R) || enc32(s), 64 bytes

    bool operator==(const Signature& other) const { return bytes == other.bytes; }
    bool operator<(const Signature& other) const { return bytes < other.bytes; }
};

struct KeyPair {
    Bytes secret;  // 32-byte scalar encoding; never serialized into messages
    Bytes public_key;
};

struct SymmetricKey {
    Bytes bytes;  // exactly 32

    static SymmetricKey from_bytes(const Bytes& b) {
        if (b.size() != 32) throw LabError(ErrorCode::MalformedInput, "symmetric key must be 32 bytes");
        return SymmetricKey{b};
    }
};

inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kAeadTagSize = 32;
inline constexpr std::size_t kSignatureSize = 64;

inline KeyPair keygen(const Bytes& seed) {
    if (seed.size() != 32) throw LabError(ErrorCode::MalformedInput, "seed must be 32 bytes");
    group::Int x = group::hash_to_scalar("ledgerlab.keygen.v1", seed);
    if (x == 0) x = 1;
    group::Element pub = group::exp_base(x);
    return KeyPair{group::scalar_to_bytes(x), pub.encode()};
}

// Schnorr over the fixed group; nonce derived from (secret, message) so
// signing is deterministic.
inline Signature sign(const Bytes& secret, const Bytes& message) {
    group::Int x;
    if (!group::decode_scalar(secret, x)) throw LabError(ErrorCode::MalformedInput, "bad secret scalar");
    group::Element pub = group::exp_base(x);

    Encoder nonce_input("ledgerlab.sign.nonce.v1");
    nonce_input.field(secret).field(message);
    group::Int k = group::hash_to_scalar("ledgerlab.sign.k.v1", nonce_input.bytes());
    if (k == 0) k = 1;
    group::Element commitment = group::exp_base(k);

    Encoder chal("ledgerlab.sign.challenge.v1");
    chal.field(commitment.encode()).field(pub.encode()).field(message);
    group::Int e = group::hash_to_scalar("ledgerlab.sign.e.v1", chal.bytes());

    group::Int s = group::add_scalars(k, group::mul_scalars(e, x));
    Bytes sig = commitment.encode() + group::scalar_to_bytes(s);
    return Signature{sig};
}

inline bool verify(const Bytes& public_key, const Bytes& message, const Signature& sig) {
    if (sig.bytes.size() != kSignatureSize) return false;
    group::Element pub;
    if (!group::decode_element(public_key, pub)) return false;
    Bytes r_bytes(sig.bytes.begin(), sig.bytes.begin() + 32);
    Bytes s_bytes(sig.bytes.begin() + 32, sig.bytes.end());
    group::Element commitment;
    if (!group::decode_element(r_bytes, commitment)) return false;
    group::Int s;
    if (!group::decode_scalar(s_bytes, s)) return false;

    Encoder chal("ledgerlab.sign.challenge.v1");
    chal.field(commitment.encode()).field(public_key).field(message);
    group::Int e = group::hash_to_scalar("ledgerlab.sign.e.v1", chal.bytes());

    group::Element lhs = group::exp_base(s);
    group::Element rhs = commitment.mul(pub.pow(e));
    return lhs == rhs;
}

namespace detail {

inline Bytes aead_subkey(const SymmetricKey& key, std::string_view label) {
    auto sk = hmac_sha256(key.bytes, to_bytes(label));
    return Bytes(sk.begin(), sk.end());
}

inline Bytes aead_keystream(const Bytes& enc_key, const Bytes& nonce, std::size_t len) {
    Bytes stream;
    stream.reserve(len + 32);
    std::uint64_t counter = 0;
    while (stream.size() < len) {
        Bytes block_input = nonce + be64(counter);
        auto block = hmac_sha256(enc_key, block_input);
        stream.insert(stream.end(), block.begin(), block.end());
        ++counter;
    }
    stream.resize(len);
    return stream;
}

inline Bytes aead_tag(const Bytes& mac_key, const Bytes& nonce, const Bytes& ciphertext,
                      const Bytes& associated_data) {
    Encoder mac_input;
    mac_input.raw(nonce);
    mac_input.u64(associated_data.size());
    mac_input.raw(associated_data);
    mac_input.u64(ciphertext.size());
    mac_input.raw(ciphertext);
    auto tag = hmac_sha256(mac_key, mac_input.bytes());
    return Bytes(tag.begin(), tag.end());
}

}  // namespace detail

// ciphertext = CTR(plaintext) || tag; fixed 32-byte overhead.
inline Bytes aead_seal(const SymmetricKey& key, const Bytes& nonce, const Bytes& plaintext,
                       const Bytes& associated_data) {
    if (key.bytes.size() != 32) throw LabError(ErrorCode::MalformedInput, "key must be 32 bytes");
    if (nonce.size() != kNonceSize) throw LabError(ErrorCode::MalformedInput, "nonce must be 12 bytes");
    Bytes enc_key = detail::aead_subkey(key, "ledgerlab.aead.enc.v1");
    Bytes mac_key = detail::aead_subkey(key, "ledgerlab.aead.mac.v1");

    Bytes stream = detail::aead_keystream(enc_key, nonce, plaintext.size());
    Bytes body(plaintext.size());
    for (std::size_t i = 0; i < plaintext.size(); ++i) body[i] = plaintext[i] ^ stream[i];

    Bytes tag = detail::aead_tag(mac_key, nonce, body, associated_data);
    return body + tag;
}

// Throws DecryptionFailure on authentication failure, MalformedInput on
// structurally invalid arguments; the two are distinguishable by code().
inline Bytes aead_open(const SymmetricKey& key, const Bytes& nonce, const Bytes& ciphertext,
                       const Bytes& associated_data) {
    if (key.bytes.size() != 32) throw LabError(ErrorCode::MalformedInput, "key must be 32 bytes");
    if (nonce.size() != kNonceSize) throw LabError(ErrorCode::MalformedInput, "nonce must be 12 bytes");
    if (ciphertext.size() < kAeadTagSize)
        throw LabError(ErrorCode::MalformedInput, "ciphertext shorter than tag");

    Bytes enc_key = detail::aead_subkey(key, "ledgerlab.aead.enc.v1");
    Bytes mac_key = detail::aead_subkey(key, "ledgerlab.aead.mac.v1");

    Bytes body(ciphertext.begin(), ciphertext.end() - static_cast<std::ptrdiff_t>(kAeadTagSize));
    Bytes tag(ciphertext.end() - static_cast<std::ptrdiff_t>(kAeadTagSize), ciphertext.end());
    Bytes expected = detail::aead_tag(mac_key, nonce, body, associated_data);
    if (tag != expected) throw LabError(ErrorCode::DecryptionFailure, "authentication failed");

    Bytes stream = detail::aead_keystream(enc_key, nonce, body.size());
    Bytes plaintext(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) plaintext[i] = body[i] ^ stream[i];
    return plaintext;
}

// Deterministic byte/scalar stream for anything that needs "fresh"
// randomness inside a run (proof blinding, salts, per-tx keys).
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    Bytes next_bytes(std::size_t n) {
        Bytes out;
        out.reserve(n + 8);
        while (out.size() < n) {
            Bytes chunk = be64(engine_());
            out.insert(out.end(), chunk.begin(), chunk.end());
        }
        out.resize(n);
        return out;
    }

    group::Int next_scalar() {
        Bytes raw = next_bytes(32);
        group::Int v = group::bytes_to_int(raw) % group::order();
        if (v == 0) v = 1;
        return v;
    }

    // Derives an independent stream; used to give each consumer its own
    // sequence from one run seed.
    DetRng fork(std::string_view label) {
        Encoder enc("ledgerlab.rng.fork.v1");
        enc.field(label);
        enc.u64(engine_());
        auto digest = sha256(enc.bytes());
        std::uint64_t s = 0;
        for (int i = 0; i < 8; ++i) s = (s << 8) | digest[static_cast<std::size_t>(i)];
        return DetRng(s);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ledgerlab::crypto

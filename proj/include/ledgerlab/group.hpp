#pragma once

// Fixed Schnorr group used for all signatures and membership proofs:
// the quadratic-residue subgroup of Z_p^* for a 256-bit safe prime
// p = 2q + 1, generator g = 4. Scalars live in Z_q, elements are
// residues encoded as 32 big-endian bytes. Sized for deterministic
// simulation, not production hardness.

#include <boost/multiprecision/cpp_int.hpp>

#include "ledgerlab/bytes.hpp"
#include "ledgerlab/sha256.hpp"

namespace ledgerlab::group {

using Int = boost::multiprecision::cpp_int;

inline const Int& modulus() {
    static const Int p("0x800000000000000000000000000000000000000000000000000000000002ff7f");
    return p;
}

inline const Int& order() {
    static const Int q("0x4000000000000000000000000000000000000000000000000000000000017fbf");
    return q;
}

inline const Int& generator() {
    static const Int g(4);
    return g;
}

inline Bytes int_to_bytes32(const Int& v) {
    Bytes out(32, 0);
    Int x = v;
    for (int i = 31; i >= 0 && x > 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x & 0xff);
        x >>= 8;
    }
    return out;
}

inline Int bytes_to_int(const Bytes& b) {
    Int x = 0;
    for (std::uint8_t byte : b) {
        x <<= 8;
        x += byte;
    }
    return x;
}

inline Int powmod(const Int& base, const Int& exp, const Int& mod) {
    return boost::multiprecision::powm(base, exp, mod);
}

// Group element: value in [1, p), member of the order-q subgroup.
struct Element {
    Int value;

    bool operator==(const Element& other) const { return value == other.value; }

    Bytes encode() const { return int_to_bytes32(value); }

    Element mul(const Element& other) const { return Element{(value * other.value) % modulus()}; }

    Element pow(const Int& e) const { return Element{powmod(value, e, modulus())}; }

    Element inverse() const {
        // Fermat: a^(p-2) mod p.
        return Element{powmod(value, modulus() - 2, modulus())};
    }

    bool in_subgroup() const {
        if (value <= 0 || value >= modulus()) return false;
        return powmod(value, order(), modulus()) == 1;
    }
};

inline Element base_point() { return Element{generator()}; }

inline Element exp_base(const Int& e) { return base_point().pow(e); }

// Strict decode: exactly 32 bytes, canonical range, subgroup member.
inline bool decode_element(const Bytes& b, Element& out) {
    if (b.size() != 32) return false;
    Int v = bytes_to_int(b);
    Element e{v};
    if (!e.in_subgroup()) return false;
    out = e;
    return true;
}

inline Bytes scalar_to_bytes(const Int& s) { return int_to_bytes32(s); }

inline bool decode_scalar(const Bytes& b, Int& out) {
    if (b.size() != 32) return false;
    Int v = bytes_to_int(b);
    if (v < 0 || v >= order()) return false;
    out = v;
    return true;
}

inline Int add_scalars(const Int& a, const Int& b) { return (a + b) % order(); }

inline Int sub_scalars(const Int& a, const Int& b) {
    Int r = (a - b) % order();
    if (r < 0) r += order();
    return r;
}

inline Int mul_scalars(const Int& a, const Int& b) { return (a * b) % order(); }

// Maps arbitrary bytes to a scalar via SHA-256 under a domain tag.
inline Int hash_to_scalar(std::string_view tag, const Bytes& data) {
    Encoder enc(tag);
    enc.field(data);
    auto digest = sha256(enc.bytes());
    Bytes db(digest.begin(), digest.end());
    return bytes_to_int(db) % order();
}

}  // namespace ledgerlab::group

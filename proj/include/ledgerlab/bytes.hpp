#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "ledgerlab/errors.hpp"

namespace ledgerlab {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

inline Bytes operator+(Bytes lhs, const Bytes& rhs) {
    lhs.insert(lhs.end(), rhs.begin(), rhs.end());
    return lhs;
}

inline Bytes be32(std::uint32_t v) {
    return Bytes{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                 static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

inline Bytes be64(std::uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

inline std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (std::uint8_t byte : b) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0x0f]);
    }
    return out;
}

inline Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw LabError(ErrorCode::MalformedInput, "odd hex length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw LabError(ErrorCode::MalformedInput, "bad hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

// Length-prefixed field concatenation. Every canonical encoding in the
// library (certificates, proofs, transactions, tear-off views) is built
// from these two primitives so hash inputs are unambiguous.
class Encoder {
public:
    explicit Encoder(std::string_view tag) { field(to_bytes(tag)); }
    Encoder() = default;

    Encoder& field(const Bytes& b) {
        Bytes len = be32(static_cast<std::uint32_t>(b.size()));
        buf_.insert(buf_.end(), len.begin(), len.end());
        buf_.insert(buf_.end(), b.begin(), b.end());
        return *this;
    }

    Encoder& field(std::string_view s) { return field(to_bytes(s)); }

    Encoder& u32(std::uint32_t v) {
        Bytes b = be32(v);
        buf_.insert(buf_.end(), b.begin(), b.end());
        return *this;
    }

    Encoder& u64(std::uint64_t v) {
        Bytes b = be64(v);
        buf_.insert(buf_.end(), b.begin(), b.end());
        return *this;
    }

    Encoder& raw(const Bytes& b) {
        buf_.insert(buf_.end(), b.begin(), b.end());
        return *this;
    }

    const Bytes& bytes() const { return buf_; }

private:
    Bytes buf_;
};

inline bool contains_subsequence(const Bytes& haystack, const Bytes& needle) {
    if (needle.empty()) return true;
    if (haystack.size() < needle.size()) return false;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
    return it != haystack.end();
}

}  // namespace ledgerlab

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bkh {

// Error taxonomy. The CLI maps these to exit codes:
//   domain_error -> 2, capacity_error -> 3, property_violation -> 4.
// Error messages name the violated precondition or the binding budget.
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A construction precondition failed (window empty, set empty, ...).
class construction_error : public domain_error {
public:
    using domain_error::domain_error;
};

class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An invariant that should hold by theorem failed; this falsifies the
// implementation, not the input.
class property_violation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 128-bit counting integers. Wide enough for r^|A|-scale counts at desk
// scale; anything that can exceed them is computed with cpp_int instead.
using u128 = unsigned __int128;
using i128 = __int128;
using u64 = std::uint64_t;
using i64 = std::int64_t;

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    char buf[48];
    int pos = 48;
    while (v > 0) {
        buf[--pos] = char('0' + int(v % 10));
        v /= 10;
    }
    return std::string(buf + pos, buf + 48);
}

inline std::string to_string(i128 v) {
    if (v < 0) return "-" + to_string(u128(-(v + 1)) + 1);
    return to_string(u128(v));
}

constexpr u128 u128_max() { return ~u128(0); }

inline u128 checked_add(u128 a, u128 b, const char* what) {
    if (a > u128_max() - b)
        throw capacity_error(std::string(what) + ": 128-bit counting overflow in addition");
    return a + b;
}

inline u128 checked_mul(u128 a, u128 b, const char* what) {
    if (a != 0 && b > u128_max() / a)
        throw capacity_error(std::string(what) + ": 128-bit counting overflow in multiplication");
    return a * b;
}

inline u128 checked_pow(u128 base, unsigned exp, const char* what) {
    u128 out = 1;
    while (exp > 0) {
        if (exp & 1) out = checked_mul(out, base, what);
        exp >>= 1;
        if (exp) base = checked_mul(base, base, what);
    }
    return out;
}

// C(n, k) clipped to zero outside range; throws on 64-bit overflow.
inline u64 binom_u64(u64 n, u64 k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    u128 acc = 1;
    for (u64 i = 1; i <= k; ++i) {
        acc = checked_mul(acc, n - k + i, "binom_u64");
        acc /= i;
        if (acc > u128(std::numeric_limits<u64>::max()))
            throw capacity_error("binom_u64: value exceeds 64 bits");
    }
    return u64(acc);
}

// FNV-1a, used for cache digests and hash-set keys (keying, not security).
inline u64 fnv1a(const void* data, std::size_t len, u64 seed = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    u64 h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
inline u64 fnv1a_pod(const T& v, u64 seed = 0xcbf29ce484222325ULL) {
    return fnv1a(&v, sizeof(T), seed);
}

} // namespace bkh

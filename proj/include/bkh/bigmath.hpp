#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <string>
#include <utility>

#include "bkh/common.hpp"

namespace bkh {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int to_int(u128 v) {
    Int hi = u64(v >> 64);
    return (hi << 64) | Int(u64(v));
}

inline Int int_pow(Int base, u64 e) {
    Int out = 1;
    while (e > 0) {
        if (e & 1) out *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return out;
}

inline Int factorial(u64 n) {
    Int out = 1;
    for (u64 i = 2; i <= n; ++i) out *= i;
    return out;
}

inline Int binom(const Int& n, u64 k) {
    if (n < 0) throw domain_error("binom: negative n");
    if (Int(k) > n) return 0;
    Int acc = 1;
    for (u64 i = 1; i <= k; ++i) {
        acc *= n - Int(k) + Int(i);
        acc /= Int(i);
    }
    return acc;
}

// Convex extension of the binomial to the rationals:
// x(x-1)...(x-k+1)/k! for x >= k-1, and 0 below.
inline Rat binom_convex(const Rat& x, u64 k) {
    if (x < Rat(Int(k) - 1)) return Rat(0);
    Rat acc = 1;
    for (u64 i = 0; i < k; ++i) acc *= x - Rat(Int(i));
    return acc / Rat(factorial(k));
}

inline Int kth_root_floor(const Int& value, unsigned k) {
    if (value < 0) throw domain_error("kth_root_floor: negative radicand");
    if (k == 0) throw domain_error("kth_root_floor: zero index");
    if (value == 0 || value == 1 || k == 1) return value;
    unsigned bits = unsigned(boost::multiprecision::msb(value));
    Int x = Int(1) << (bits / k + 1);
    while (true) {
        Int y = ((k - 1) * x + value / int_pow(x, k - 1)) / k;
        if (y >= x) break;
        x = y;
    }
    while (int_pow(x, k) > value) --x;
    while (int_pow(x + 1, k) <= value) ++x;
    return x;
}

inline std::string rat_string(const Rat& q) {
    Int num = boost::multiprecision::numerator(q);
    Int den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Deterministic decimal rendering, round-half-away-from-zero at `sig`
// significant digits. Used only for human-readable "approx" fields.
inline std::string decimal_string(const Rat& x, int sig = 12) {
    if (x == 0) return "0";
    bool neg = x < 0;
    Int num = boost::multiprecision::abs(boost::multiprecision::numerator(x));
    Int den = boost::multiprecision::denominator(x);
    // e = floor(log10 |x|)
    long e = 0;
    Int ip = num / den;
    if (ip > 0) {
        e = long(ip.str().size()) - 1;
    } else {
        Int scaled = num;
        e = -1;
        while (scaled * 10 < den) {
            scaled *= 10;
            --e;
        }
    }
    // t = round(|x| * 10^(sig-1-e))
    long shift = sig - 1 - e;
    Int sn = num, sd = den;
    if (shift >= 0) sn *= int_pow(10, u64(shift));
    else sd *= int_pow(10, u64(-shift));
    Int t = (2 * sn + sd) / (2 * sd);
    std::string digits = t.str();
    if (long(digits.size()) > sig) { // rounding carried into a new digit
        digits.pop_back();
        ++e;
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    std::string out = neg ? "-" : "";
    if (e >= -4 && e <= 15) {
        if (e >= 0) {
            if (long(digits.size()) <= e)
                digits.append(std::size_t(e + 1 - long(digits.size())), '0');
            out += digits.substr(0, std::size_t(e + 1));
            if (digits.size() > std::size_t(e + 1)) out += "." + digits.substr(std::size_t(e + 1));
        } else {
            out += "0.";
            out.append(std::size_t(-e - 1), '0');
            out += digits;
        }
    } else {
        out += digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        out += "e" + std::to_string(e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Interval arithmetic over exact rationals.
//
// Quantities such as log2(n) or n^{p/q} are irrational in general; every
// verdict that depends on them is computed from certified enclosures, never
// from floating point. An enclosure can be refined on demand (higher level),
// so comparisons either resolve exactly or escalate until they do.
// ---------------------------------------------------------------------------

struct RatInterval {
    Rat lo, hi;
    bool exact() const { return lo == hi; }
};

inline RatInterval iv_exact(const Rat& v) { return {v, v}; }

inline RatInterval iv_add(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

inline RatInterval iv_sub(const RatInterval& a, const RatInterval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}

inline RatInterval iv_mul(const RatInterval& a, const RatInterval& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Rat lo = p1, hi = p1;
    for (const Rat& p : {p2, p3, p4}) {
        if (p < lo) lo = p;
        if (p > hi) hi = p;
    }
    return {lo, hi};
}

inline RatInterval iv_recip(const RatInterval& a) {
    if (a.lo <= 0 && a.hi >= 0)
        throw domain_error("interval reciprocal: interval straddles zero");
    return {Rat(1) / a.hi, Rat(1) / a.lo};
}

inline RatInterval iv_div(const RatInterval& a, const RatInterval& b) {
    return iv_mul(a, iv_recip(b));
}

inline RatInterval iv_pow(const RatInterval& a, unsigned e) {
    RatInterval out = iv_exact(Rat(1));
    for (unsigned i = 0; i < e; ++i) out = iv_mul(out, a);
    return out;
}

// Enclosure of log2(x) for a positive integer x with denominator m:
// msb(x^m) = floor(m*log2 x), so log2 x lies in [q/m, (q+1)/m], and the
// enclosure degenerates to a point when x is a power of two.
inline RatInterval log2_bounds(const Int& x, u64 m) {
    if (x <= 0) throw domain_error("log2_bounds: argument must be positive");
    if (x == 1) return iv_exact(Rat(0));
    unsigned p = unsigned(boost::multiprecision::msb(x));
    if ((Int(1) << p) == x) return iv_exact(Rat(p));
    Int y = int_pow(x, m);
    u64 q = boost::multiprecision::msb(y);
    return {Rat(Int(q), Int(m)), Rat(Int(q) + 1, Int(m))};
}

// Enclosure of n^(p/q) (p, q > 0) with absolute precision 2^-bits.
inline RatInterval npow_bounds(const Int& n, const Int& p, const Int& q, u64 bits) {
    if (n <= 0 || p <= 0 || q <= 0) throw domain_error("npow_bounds: positive arguments required");
    u64 pu = p.convert_to<u64>(), qu = q.convert_to<u64>();
    Int radicand = int_pow(n, pu) << unsigned(qu * bits);
    Int y = kth_root_floor(radicand, unsigned(qu));
    Rat lo(y, Int(1) << unsigned(bits));
    if (int_pow(y, qu) == radicand) return iv_exact(lo);
    return {lo, Rat(y + 1, Int(1) << unsigned(bits))};
}

// A lazily refinable enclosure: eval(level) returns an interval that
// tightens as level grows (0..3).
struct BVal {
    std::function<RatInterval(int)> eval;
};

inline u64 log_denominator(int level) { return u64(64) << (4 * level); }
inline u64 root_bits(int level) { return u64(48) << (4 * level); }

inline BVal bv_exact(const Rat& v) {
    return {[v](int) { return iv_exact(v); }};
}

inline BVal bv_log2(const Int& x) {
    return {[x](int level) { return log2_bounds(x, log_denominator(level)); }};
}

// n^e for rational e > 0
inline BVal bv_npow(const Int& n, const Rat& e) {
    Int p = boost::multiprecision::numerator(e);
    Int q = boost::multiprecision::denominator(e);
    return {[n, p, q](int level) { return npow_bounds(n, p, q, root_bits(level)); }};
}

inline BVal bv_add(const BVal& a, const BVal& b) {
    auto fa = a.eval, fb = b.eval;
    return {[fa, fb](int l) { return iv_add(fa(l), fb(l)); }};
}

inline BVal bv_sub(const BVal& a, const BVal& b) {
    auto fa = a.eval, fb = b.eval;
    return {[fa, fb](int l) { return iv_sub(fa(l), fb(l)); }};
}

inline BVal bv_mul(const BVal& a, const BVal& b) {
    auto fa = a.eval, fb = b.eval;
    return {[fa, fb](int l) { return iv_mul(fa(l), fb(l)); }};
}

inline BVal bv_div(const BVal& a, const BVal& b) {
    auto fa = a.eval, fb = b.eval;
    return {[fa, fb](int l) { return iv_div(fa(l), fb(l)); }};
}

inline BVal bv_recip(const BVal& a) {
    auto fa = a.eval;
    return {[fa](int l) { return iv_recip(fa(l)); }};
}

inline BVal bv_pow(const BVal& a, unsigned e) {
    auto fa = a.eval;
    return {[fa, e](int l) { return iv_pow(fa(l), e); }};
}

enum class Verdict { True, False, Undecided };

inline const char* verdict_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        default: return "undecided";
    }
}

constexpr int kMaxLevel = 3;

// a <= b with escalation. Resolves exactly unless the two sides are equal
// irrational values, which the quantities we compare cannot be.
inline Verdict bv_le(const BVal& a, const BVal& b) {
    for (int level = 0; level <= kMaxLevel; ++level) {
        RatInterval ia = a.eval(level), ib = b.eval(level);
        if (ia.hi <= ib.lo) return Verdict::True;
        if (ia.lo > ib.hi) return Verdict::False;
        if (ia.exact() && ib.exact()) return ia.lo <= ib.lo ? Verdict::True : Verdict::False;
    }
    return Verdict::Undecided;
}

inline Verdict bv_lt(const BVal& a, const BVal& b) {
    for (int level = 0; level <= kMaxLevel; ++level) {
        RatInterval ia = a.eval(level), ib = b.eval(level);
        if (ia.hi < ib.lo) return Verdict::True;
        if (ia.lo >= ib.hi) return Verdict::False;
        if (ia.exact() && ib.exact()) return ia.lo < ib.lo ? Verdict::True : Verdict::False;
    }
    return Verdict::Undecided;
}

} // namespace bkh

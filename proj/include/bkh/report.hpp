#pragma once

#include <json.hpp>

#include <string>

#include "bkh/bigmath.hpp"
#include "bkh/common.hpp"
#include "bkh/grid.hpp"

namespace bkh {

using Json = nlohmann::ordered_json;

// Counts render as JSON integers while they fit 64 bits and as exact decimal
// strings beyond; rationals render as "p/q" strings. Nothing in a report is
// ever a float unless labeled approx.
inline Json json_count(u128 v) {
    if (v <= u128(std::numeric_limits<i64>::max())) return Json(i64(v));
    return Json(to_string(v));
}

inline Json json_count(const Int& v) {
    if (v >= std::numeric_limits<i64>::min() && v <= std::numeric_limits<i64>::max())
        return Json(v.convert_to<i64>());
    return Json(v.str());
}

inline Json json_rat(const Rat& q) { return Json(rat_string(q)); }

inline Json json_rat_with_approx(const Rat& q) {
    Json j;
    j["exact"] = rat_string(q);
    j["approx"] = decimal_string(q);
    return j;
}

inline Json json_interval(const RatInterval& iv) {
    Json j;
    if (iv.exact()) {
        j["exact"] = rat_string(iv.lo);
    } else {
        j["lo"] = rat_string(iv.lo);
        j["hi"] = rat_string(iv.hi);
    }
    j["approx"] = decimal_string((iv.lo + iv.hi) / 2);
    return j;
}

inline Json json_verdict(Verdict v) {
    switch (v) {
        case Verdict::True: return Json(true);
        case Verdict::False: return Json(false);
        default: return Json("undecided");
    }
}

inline Json json_spec(const EquationSpec& spec) {
    Json j;
    j["ambient"] = ambient_name(spec.ambient);
    j["d"] = spec.d;
    j["n"] = spec.n;
    j["groups"] = spec.groups;
    j["r"] = spec.r;
    return j;
}

} // namespace bkh

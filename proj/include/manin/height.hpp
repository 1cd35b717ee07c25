#pragma once

#include <array>
#include <sstream>
#include <string>

#include "manin/qfield.hpp"

namespace manin {

// Point of P^4(K).  Coordinates may be non-integral; heights and keys are
// computed after clearing denominators, so everything stays exact.
struct ProjPoint {
    std::array<KElem, 5> x;

    bool all_zero() const {
        for (const auto& c : x)
            if (!c.is_zero()) return false;
        return true;
    }
};

inline std::array<Elem, 5> cleared_coords(const ProjPoint& p) {
    if (p.all_zero()) throw std::domain_error("projective point: all coordinates zero");
    Int L(1);
    for (const auto& c : p.x) {
        L = lcm(L, c.x.get_den());
        L = lcm(L, c.y.get_den());
    }
    std::array<Elem, 5> out;
    for (int i = 0; i < 5; ++i) {
        Rat sx = p.x[i].x * L, sy = p.x[i].y * L;
        out[i] = Elem(sx.get_num(), sy.get_num());
    }
    return out;
}

// ideal generated by the five coordinates (after clearing denominators)
inline Ideal content_ideal(const FieldCtx& K, const ProjPoint& p) {
    auto e = cleared_coords(p);
    return K.ideal_from_generators({e.begin(), e.end()});
}

inline Rat weil_height(const FieldCtx& K, const ProjPoint& p) {
    auto e = cleared_coords(p);
    Ideal content = K.ideal_from_generators({e.begin(), e.end()});
    Int mx(0);
    for (const auto& c : e) mx = std::max(mx, K.norm(c));
    return make_rat(mx, K.norm(content));
}

// Equal for p, q iff the points are projectively equal over K: after clearing
// denominators, each coordinate is divided by the leading one and the reduced
// fractions are serialized.
inline std::string canonical_key_elems(const FieldCtx& K, const std::array<Elem, 5>& e) {
    int lead = -1;
    for (int i = 0; i < 5; ++i) {
        if (!e[i].is_zero()) {
            lead = i;
            break;
        }
    }
    if (lead < 0) throw std::domain_error("canonical_key: all coordinates zero");
    Elem cl = K.conj(e[lead]);
    Int n = K.norm(e[lead]);
    std::string out;
    out.reserve(64);
    out += static_cast<char>('0' + lead);
    char buf[48];
    auto put = [&](const Int& v) {
        if (mpz_sizeinbase(v.get_mpz_t(), 10) + 2 <= sizeof(buf)) {
            mpz_get_str(buf, 10, v.get_mpz_t());
            out += buf;
        } else {
            out += v.get_str();
        }
        out += ',';
    };
    for (int i = 0; i < 5; ++i) {
        if (i == lead) continue;
        Elem w = K.mul(e[i], cl);  // x_i / x_lead = w / n
        Int g = gcd(gcd(w.x, w.y), n);
        put(w.x / g);
        put(w.y / g);
        put(n / g);
        out += ';';
    }
    return out;
}

inline std::string canonical_key(const FieldCtx& K, const ProjPoint& p) {
    return canonical_key_elems(K, cleared_coords(p));
}

}  // namespace manin

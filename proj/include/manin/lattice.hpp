#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "manin/qfield.hpp"

namespace manin {

// Rank-2 lattice view of a nonzero fractional ideal, with the norm as an
// explicit integer quadratic form: N(s*v1 + t*v2) = (q11 s^2 + q12 st + q22 t^2)/qden.
struct Lat {
    Int e1x;        // v1 = e1x / den
    Int e2x, e2y;   // v2 = (e2x + e2y*omega) / den
    Int den;
    Int q11, q12, q22, qden;

    KElem point(const Int& s, const Int& t) const {
        return {make_rat(s * e1x + t * e2x, den), make_rat(t * e2y, den)};
    }

    Int form(const Int& s, const Int& t) const { return q11 * s * s + q12 * s * t + q22 * t * t; }

    Rat norm_at(const Int& s, const Int& t) const { return make_rat(form(s, t), qden); }
};

inline Lat make_lat(const FieldCtx& K, const FracIdeal& F) {
    if (F.is_zero()) throw std::domain_error("make_lat: zero ideal");
    Lat L;
    L.e1x = F.num.a;
    L.e2x = F.num.b;
    L.e2y = F.num.c;
    L.den = F.den;
    const Int &a = F.num.a, &b = F.num.b, &c = F.num.c;
    L.q11 = a * a;
    L.q12 = 2 * a * b + K.omega_trace() * a * c;
    L.q22 = b * b + K.omega_trace() * b * c + K.omega_norm() * c * c;
    L.qden = F.den * F.den;
    return L;
}

// Rows (fixed t) of the disk { (s,t) : form(s,t) <= m }, m integer.
// Calls fn(t, slo, shi) for every t whose row is nonempty.
template <typename RowFn>
inline void disk_rows(const Lat& L, const Int& m, RowFn&& fn) {
    if (m < 0) return;
    Int disc = 4 * L.q11 * L.q22 - L.q12 * L.q12;  // > 0, definite form
    Int tmax = isqrt_floor(floor_div(4 * L.q11 * m, disc));
    while (disc * (tmax + 1) * (tmax + 1) <= 4 * L.q11 * m) ++tmax;
    for (Int t = -tmax; t <= tmax; ++t) {
        Int D = 4 * L.q11 * m - disc * t * t;
        if (D < 0) continue;
        // isqrt_floor(D) is within 1 of sqrt(D), so one conditional step
        // lands each endpoint exactly.
        Int r = isqrt_floor(D);
        Int ctr = -L.q12 * t;
        Int shi = floor_div(ctr + r, 2 * L.q11);
        if (L.form(shi + 1, t) <= m) ++shi;
        Int slo = ceil_div(ctr - r, 2 * L.q11);
        if (L.form(slo - 1, t) <= m) --slo;
        if (slo <= shi) fn(t, slo, shi);
    }
}

// All lattice points with norm <= X (includes 0, closed under negation).
template <typename PointFn>
inline void points_in_disk(const Lat& L, const Rat& X, PointFn&& fn) {
    if (X < 0) return;
    Int m = floor_div(X.get_num() * L.qden, X.get_den());
    disk_rows(L, m, [&](const Int& t, const Int& slo, const Int& shi) {
        for (Int s = slo; s <= shi; ++s) fn(s, t);
    });
}

inline std::vector<KElem> lattice_points_in_disk(const FieldCtx& K, const FracIdeal& F, const Rat& X) {
    Lat L = make_lat(K, F);
    std::vector<KElem> out;
    points_in_disk(L, X, [&](const Int& s, const Int& t) { out.push_back(L.point(s, t)); });
    return out;
}

}  // namespace manin

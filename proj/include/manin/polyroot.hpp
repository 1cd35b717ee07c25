#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "manin/arith.hpp"

namespace manin {

// Exact isolation of { s in [lo,hi] : p(s) <= 0 } for an integer polynomial of
// low degree, returned as maximal integer intervals.  Used to clip enumeration
// rows against non-monomial height conditions.

inline Int poly_eval(const std::vector<Int>& p, const Int& s) {
    Int v(0);
    for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
    return v;
}

inline std::vector<Int> poly_derive(const std::vector<Int>& p) {
    std::vector<Int> d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(Int(static_cast<long>(i)) * p[i]);
    return d;
}

namespace detail {

inline std::vector<Int> strip(std::vector<Int> p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

// Floors of the real roots of p inside [lo, hi], sorted and deduplicated.
// Recursion invariant: between consecutive returned breakpoints (after adding
// f and f+1 per root) the polynomial is strictly monotone on the reals, so an
// integer binary search cannot miss a crossing.
inline std::vector<Int> real_root_floors(const std::vector<Int>& poly, const Int& lo, const Int& hi) {
    std::vector<Int> p = strip(poly);
    std::vector<Int> out;
    if (lo > hi || p.size() <= 1) return out;
    if (p.size() == 2) {
        Rat root = make_rat(-p[0], p[1]);
        if (root >= Rat(lo) && root <= Rat(hi)) out.push_back(floor_rat(root));
        return out;
    }
    std::vector<Int> dfloors = real_root_floors(poly_derive(p), lo, hi);
    std::vector<Int> brk{lo, hi};
    for (const Int& f : dfloors) {
        if (f >= lo && f <= hi) brk.push_back(f);
        if (f + 1 >= lo && f + 1 <= hi) brk.push_back(f + 1);
    }
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
    for (std::size_t i = 0; i + 1 < brk.size() || (brk.size() == 1 && i == 0); ++i) {
        Int A = brk[i], B = (i + 1 < brk.size()) ? brk[i + 1] : brk[i];
        Int va = poly_eval(p, A), vb = poly_eval(p, B);
        if (va == 0) out.push_back(A);
        if (vb == 0 && B != A) out.push_back(B);
        if ((va < 0 && vb > 0) || (va > 0 && vb < 0)) {
            Int x = A, y = B;  // sign(p(x)) == sign(va), sign flips before y
            while (y - x > 1) {
                Int mid = floor_div(x + y, Int(2));
                Int vm = poly_eval(p, mid);
                if (vm == 0) {
                    x = mid;
                    break;
                }
                ((vm > 0) == (va > 0) ? x : y) = mid;
            }
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// p strictly monotone on the reals of [a,b] (or the piece has no interior
// integers); append the maximal integer subinterval with p <= 0.
inline void monotone_nonpos(const std::vector<Int>& p, const Int& a, const Int& b,
                            std::vector<std::pair<Int, Int>>& out) {
    Int va = poly_eval(p, a), vb = poly_eval(p, b);
    if (va > 0 && vb > 0) return;
    if (va <= 0 && vb <= 0) {
        out.push_back({a, b});
        return;
    }
    if (va <= 0) {
        Int x = a, y = b;  // p(x) <= 0 < p(y)
        while (y - x > 1) {
            Int mid = floor_div(x + y, Int(2));
            (poly_eval(p, mid) <= 0 ? x : y) = mid;
        }
        out.push_back({a, x});
    } else {
        Int x = b, y = a;  // p(x) <= 0 < p(y)
        while (x - y > 1) {
            Int mid = floor_div(x + y, Int(2));
            (poly_eval(p, mid) <= 0 ? x : y) = mid;
        }
        out.push_back({x, b});
    }
}

}  // namespace detail

inline std::vector<std::pair<Int, Int>> poly_nonpos_intervals(const std::vector<Int>& poly, const Int& lo,
                                                              const Int& hi) {
    std::vector<std::pair<Int, Int>> out;
    if (lo > hi) return out;
    std::vector<Int> p = detail::strip(poly);
    if (p.empty()) {
        out.push_back({lo, hi});
        return out;
    }
    if (p.size() == 1) {
        if (p[0] <= 0) out.push_back({lo, hi});
        return out;
    }
    std::vector<Int> dfloors = detail::real_root_floors(poly_derive(p), lo, hi);
    std::vector<Int> brk{lo, hi};
    for (const Int& f : dfloors) {
        if (f >= lo && f <= hi) brk.push_back(f);
        if (f + 1 >= lo && f + 1 <= hi) brk.push_back(f + 1);
    }
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
    std::vector<std::pair<Int, Int>> raw;
    if (brk.size() == 1) {
        detail::monotone_nonpos(p, brk[0], brk[0], raw);
    } else {
        for (std::size_t i = 0; i + 1 < brk.size(); ++i) detail::monotone_nonpos(p, brk[i], brk[i + 1], raw);
    }
    std::sort(raw.begin(), raw.end(), [](auto& u, auto& v) { return u.first < v.first; });
    for (auto& iv : raw) {
        if (!out.empty() && iv.first <= out.back().second + 1)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

}  // namespace manin

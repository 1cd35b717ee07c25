#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "manin/height.hpp"
#include "manin/lattice.hpp"
#include "manin/polyroot.hpp"
#include "manin/qfield.hpp"
#include "manin/rng.hpp"
#include "manin/surfaces.hpp"

namespace manin {

// monomial in eta_1..eta_9 (index 0 = eta_1)
struct Mono9 {
    std::array<int, 9> e{};
};

// |outer * (t1 + t2)| / |den| <= mult * B.  Pure-monomial conditions carry the
// whole monomial in `outer` and have nterms == 0.
struct HeightCond {
    Mono9 outer;
    int nterms{0};
    Mono9 t1, t2;
    Mono9 den;
    int mult{1};
    bool prune_only{false};  // implied by the printed conditions, used for radii only

    bool uses(int var) const {  // var is 0-based
        if (outer.e[var] > 0 || den.e[var] > 0) return true;
        if (nterms >= 1 && t1.e[var] > 0) return true;
        if (nterms >= 2 && t2.e[var] > 0) return true;
        return false;
    }
};

struct TorsorSpec {
    SurfaceId id;
    std::array<std::array<int, 6>, 9> oj_exponents;  // O_j = prod C_k^{e_jk}
    std::array<int, 6> u_exponents{{3, -1, -1, -1, -1, -1}};
    std::vector<HeightCond> conds;                  // the five printed conditions, then prunes
    std::array<Mono9, 3> torsor_terms;              // sum of the three == 0
    std::set<int> zero_allowed;                     // 1-based indices
    std::vector<std::pair<int, int>> adjacency;     // 1-based vertex pairs
    std::array<Mono9, 5> psi;
    std::array<int, 5> psi_sign{{1, 1, 1, 1, 1}};   // calibrated at construction
    // Free unit actions on M_C(B): eta_v -> u eta_v compensated by
    // eta_c -> u^-m eta_c inside the torsor term containing both, which fixes
    // every height condition, membership and coprimality.  The joint action
    // of omega_K^|actions| unit tuples is free (the v are mandatory nonzero
    // and pairwise distinct), so enumerating v in a fundamental domain and
    // rescaling counts by omega_K per action is exact.
    struct UnitAction {
        int v, c, m;  // 1-based variables, compensation exponent
    };
    std::vector<UnitAction> unit_actions;

    bool adjacent(int j, int k) const {  // 1-based
        for (auto& e : adjacency)
            if ((e.first == j && e.second == k) || (e.first == k && e.second == j)) return true;
        return false;
    }
    bool may_vanish(int j) const { return zero_allowed.count(j) > 0; }
};

namespace torsor_detail {

inline Mono9 mono(std::array<int, 9> e) {
    Mono9 m;
    m.e = e;
    return m;
}

inline HeightCond pure(std::array<int, 9> e, int mult = 1, bool prune = false) {
    HeightCond c;
    c.outer = mono(e);
    c.mult = mult;
    c.prune_only = prune;
    return c;
}

inline HeightCond two_term(std::array<int, 9> outer, std::array<int, 9> a, std::array<int, 9> b,
                           std::array<int, 9> den) {
    HeightCond c;
    c.outer = mono(outer);
    c.nterms = 2;
    c.t1 = mono(a);
    c.t2 = mono(b);
    c.den = mono(den);
    return c;
}

inline Rat eval_mono_rat(const Mono9& m, const std::array<Rat, 9>& v) {
    Rat r(1);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < m.e[i]; ++k) r *= v[i];
    return r;
}

// calibrate psi signs: require both quadrics to vanish on psi(eta) for random
// rational solutions of the torsor equation
inline void calibrate_psi_signs(TorsorSpec& T) {
    const SurfaceSpec& S = get_surface(T.id);
    int t9 = -1;
    for (int i = 0; i < 3; ++i)
        if (T.torsor_terms[i].e[8] == 1) t9 = i;
    if (t9 < 0) throw std::logic_error("torsor equation: eta_9 term missing");
    CounterRng rng(20130411);
    std::uint64_t ctr = 0;
    std::vector<std::array<Rat, 9>> samples;
    while (samples.size() < 100) {
        std::array<Rat, 9> v;
        for (int i = 0; i < 8; ++i) {
            long a = 1 + static_cast<long>(rng.uniform(ctr++) * 7);
            if (rng.uniform(ctr++) < 0.5) a = -a;
            v[i] = Rat(a);
        }
        v[8] = 0;
        Rat others(0);
        for (int i = 0; i < 3; ++i)
            if (i != t9) others += eval_mono_rat(T.torsor_terms[i], v);
        Mono9 coeff = T.torsor_terms[t9];
        coeff.e[8] = 0;
        Rat cval = eval_mono_rat(coeff, v);
        v[8] = -others / cval;
        samples.push_back(v);
    }
    auto quad_at = [&](const Quadric& q, const std::array<Rat, 5>& x) {
        Rat r(0);
        for (const auto& mn : q) r += Rat(mn.coeff) * x[mn.i] * x[mn.j];
        return r;
    };
    // Winners may differ by a sign automorphism of the quadric pair (for S1,
    // (x2,x4) -> (-x2,-x4) preserves both forms), so the vanishing test pins
    // the signs only up to that symmetry; any winner gives an image bijection
    // preserving heights and lines.  Pick the one with the fewest minus signs.
    std::vector<std::array<int, 5>> winners;
    for (int mask = 0; mask < 16; ++mask) {  // first sign fixed +1 (global flip irrelevant)
        std::array<int, 5> sign{1, 1, 1, 1, 1};
        for (int i = 1; i < 5; ++i) sign[i] = (mask >> (i - 1)) & 1 ? -1 : 1;
        bool ok = true;
        for (const auto& v : samples) {
            std::array<Rat, 5> x;
            for (int i = 0; i < 5; ++i) x[i] = Rat(sign[i]) * eval_mono_rat(T.psi[i], v);
            if (quad_at(S.q1, x) != 0 || quad_at(S.q2, x) != 0) {
                ok = false;
                break;
            }
        }
        if (ok) winners.push_back(sign);
    }
    if (winners.empty()) throw std::logic_error("psi sign calibration failed");
    auto minus_count = [](const std::array<int, 5>& s) {
        int n = 0;
        for (int v : s) n += v < 0;
        return n;
    };
    std::sort(winners.begin(), winners.end(),
              [&](const auto& u, const auto& v) { return minus_count(u) < minus_count(v); });
    T.psi_sign = winners[0];
}

inline TorsorSpec make_spec(SurfaceId id) {
    TorsorSpec T;
    T.id = id;
    switch (id) {
        case SurfaceId::S1:
            T.oj_exponents = {{{0, 0, 0, 0, 0, 1},
                               {0, 0, 0, 0, 1, 0},
                               {1, -1, 0, 0, -1, -1},
                               {0, 1, -1, 0, 0, 0},
                               {0, 0, 0, 1, 0, 0},
                               {0, 0, 1, -1, 0, 0},
                               {1, -1, -1, -1, 0, 0},
                               {1, 0, 0, 0, -1, 0},
                               {1, 0, 0, 0, 0, -1}}};
            T.conds = {pure({0, 1, 1, 1, 1, 1, 1, 1, 0}),
                       pure({2, 2, 3, 2, 0, 1, 0, 0, 0}),
                       pure({1, 1, 2, 2, 2, 2, 1, 0, 0}),
                       two_term({0, 0, 1, 1, 1, 1, 1, 0, 0}, {0, 0, 0, 1, 3, 2, 1, 0, 0},
                                {0, 1, 0, 0, 0, 0, 0, 1, 0}, {}),
                       two_term({}, {0, 1, 0, 0, 0, 0, 1, 2, 0}, {0, 0, 0, 1, 3, 2, 2, 1, 0},
                                {1, 0, 0, 0, 0, 0, 0, 0, 0}),
                       pure({0, 0, 1, 2, 4, 3, 2, 0, 0}, 4, true)};
            T.torsor_terms = {mono({0, 0, 0, 1, 3, 2, 1, 0, 0}), mono({0, 1, 0, 0, 0, 0, 0, 1, 0}),
                              mono({1, 0, 0, 0, 0, 0, 0, 0, 1})};
            T.zero_allowed = {8, 9};
            T.adjacency = {{1, 3}, {1, 9}, {2, 3}, {2, 8}, {3, 4}, {4, 6},
                           {5, 6}, {5, 7}, {7, 8}, {7, 9}, {8, 9}};
            T.psi = {mono({0, 1, 1, 1, 1, 1, 1, 1, 0}), mono({2, 2, 3, 2, 0, 1, 0, 0, 0}),
                     mono({1, 1, 2, 2, 2, 2, 1, 0, 0}), mono({1, 0, 1, 1, 1, 1, 1, 0, 1}),
                     mono({0, 0, 0, 0, 0, 0, 1, 1, 1})};
            T.unit_actions = {{1, 9, 1}, {2, 8, 1}, {4, 7, 1}};
            break;
        case SurfaceId::S2:
            T.oj_exponents = {{{0, 0, 0, 1, -1, 0},
                               {0, 0, 0, 0, 1, -1},
                               {1, -1, 0, -1, -1, 0},
                               {0, 1, -1, 0, 0, 0},
                               {0, 0, 0, 0, 0, 1},
                               {0, 0, 1, 0, 0, 0},
                               {1, -1, -1, 0, 0, 0},
                               {1, 0, 0, -1, 0, 0},
                               {2, 0, 0, -1, -1, -1}}};
            T.conds = {pure({2, 4, 3, 2, 3, 1, 0, 0, 0}), pure({1, 1, 1, 1, 0, 1, 1, 1, 0}),
                       pure({2, 3, 2, 1, 2, 0, 0, 1, 0}), pure({1, 2, 2, 2, 1, 2, 1, 0, 0}),
                       two_term({}, {1, 0, 0, 0, 0, 0, 1, 2, 0}, {0, 0, 1, 2, 0, 3, 2, 0, 0},
                                {0, 0, 0, 0, 1, 0, 0, 0, 0})};
            T.torsor_terms = {mono({0, 0, 1, 2, 0, 3, 1, 0, 0}), mono({1, 0, 0, 0, 0, 0, 0, 2, 0}),
                              mono({0, 0, 0, 0, 1, 0, 0, 0, 1})};
            T.zero_allowed = {8, 9};
            T.adjacency = {{1, 2}, {1, 8}, {2, 3}, {2, 5}, {3, 4}, {4, 6},
                           {5, 9}, {6, 7}, {7, 8}, {7, 9}, {8, 9}};
            T.psi = {mono({2, 4, 3, 2, 3, 1, 0, 0, 0}), mono({1, 1, 1, 1, 0, 1, 1, 1, 0}),
                     mono({2, 3, 2, 1, 2, 0, 0, 1, 0}), mono({1, 2, 2, 2, 1, 2, 1, 0, 0}),
                     mono({0, 0, 0, 0, 0, 0, 1, 0, 1})};
            T.unit_actions = {{5, 9, 1}, {3, 7, 1}};
            break;
        case SurfaceId::S3:
            T.oj_exponents = {{{0, 0, 1, -1, 0, 0},
                               {0, 1, -1, 0, 0, 0},
                               {1, -1, -1, 0, 0, -1},
                               {0, 0, 0, 1, -1, 0},
                               {0, 0, 0, 0, 0, 1},
                               {0, 0, 0, 0, 1, 0},
                               {1, -1, 0, 0, 0, 0},
                               {1, 0, 0, 0, 0, -1},
                               {2, -1, -1, -1, -1, 0}}};
            T.conds = {pure({2, 1, 2, 1, 2, 0, 0, 1, 0}), pure({4, 2, 3, 3, 2, 2, 0, 0, 0}),
                       pure({3, 2, 2, 2, 1, 1, 1, 0, 0}),
                       two_term({}, {2, 1, 2, 1, 2, 0, 0, 1, 0}, {2, 2, 1, 1, 0, 0, 2, 0, 0}, {}),
                       two_term({}, {0, 0, 1, 0, 2, 0, 0, 2, 0}, {0, 1, 0, 0, 0, 0, 2, 1, 0},
                                {0, 0, 0, 1, 0, 2, 0, 0, 0})};
            T.torsor_terms = {mono({0, 1, 0, 0, 0, 0, 2, 0, 0}), mono({0, 0, 1, 0, 2, 0, 0, 1, 0}),
                              mono({0, 0, 0, 1, 0, 2, 0, 0, 1})};
            T.zero_allowed = {7, 8, 9};
            T.adjacency = {{1, 2}, {1, 3}, {1, 4}, {2, 7}, {3, 5}, {4, 6},
                           {5, 8}, {6, 9}, {7, 8}, {7, 9}, {8, 9}};
            T.psi = {mono({2, 1, 2, 1, 2, 0, 0, 1, 0}), mono({4, 2, 3, 3, 2, 2, 0, 0, 0}),
                     mono({3, 2, 2, 2, 1, 1, 1, 0, 0}), mono({2, 1, 1, 2, 0, 2, 0, 0, 1}),
                     mono({0, 0, 0, 0, 0, 0, 0, 1, 1})};
            T.unit_actions = {{4, 9, 1}, {3, 8, 1}, {5, 8, 2}};
            break;
        case SurfaceId::S4:
            T.oj_exponents = {{{0, 0, 0, 1, -1, 0},
                               {0, 0, 0, 0, 1, -1},
                               {1, -1, -1, -1, 0, 0},
                               {0, 0, 1, -1, 0, 0},
                               {0, 1, -1, 0, 0, 0},
                               {0, 0, 0, 0, 0, 1},
                               {1, -1, 0, 0, 0, 0},
                               {1, 0, 0, 0, 0, 0},
                               {3, -1, -1, -1, -1, -1}}};
            T.conds = {pure({6, 5, 3, 4, 2, 4, 0, 0, 0}), pure({2, 1, 1, 2, 2, 0, 2, 0, 0}),
                       pure({4, 3, 2, 3, 2, 2, 1, 0, 0}), pure({3, 2, 2, 2, 1, 1, 0, 1, 0}),
                       two_term({}, {0, 0, 1, 0, 0, 0, 0, 2, 0}, {0, 0, 0, 1, 2, 0, 3, 0, 0},
                                {0, 1, 0, 0, 0, 2, 0, 0, 0})};
            T.torsor_terms = {mono({0, 0, 1, 0, 0, 0, 0, 2, 0}), mono({0, 1, 0, 0, 0, 2, 0, 0, 1}),
                              mono({0, 0, 0, 1, 2, 0, 3, 0, 0})};
            T.zero_allowed = {7, 8, 9};
            T.adjacency = {{1, 2}, {1, 3}, {1, 4}, {2, 6}, {3, 8}, {4, 5},
                           {5, 7}, {6, 9}, {7, 8}, {7, 9}, {8, 9}};
            T.psi = {mono({6, 5, 3, 4, 2, 4, 0, 0, 0}), mono({2, 1, 1, 2, 2, 0, 2, 0, 0}),
                     mono({4, 3, 2, 3, 2, 2, 1, 0, 0}), mono({3, 2, 2, 2, 1, 1, 0, 1, 0}),
                     mono({0, 0, 0, 0, 0, 0, 0, 0, 1})};
            T.unit_actions = {{2, 9, 1}, {5, 4, 2}};
            break;
        default:
            throw std::domain_error("build_torsor_spec: no torsor data for this surface");
    }
    calibrate_psi_signs(T);
    return T;
}

}  // namespace torsor_detail

inline const TorsorSpec& build_torsor_spec(SurfaceId id) {
    static const TorsorSpec s1 = torsor_detail::make_spec(SurfaceId::S1);
    static const TorsorSpec s2 = torsor_detail::make_spec(SurfaceId::S2);
    static const TorsorSpec s3 = torsor_detail::make_spec(SurfaceId::S3);
    static const TorsorSpec s4 = torsor_detail::make_spec(SurfaceId::S4);
    switch (id) {
        case SurfaceId::S1: return s1;
        case SurfaceId::S2: return s2;
        case SurfaceId::S3: return s3;
        case SurfaceId::S4: return s4;
        default: throw std::domain_error("build_torsor_spec: no torsor data for this surface");
    }
}

struct TorsorPoint {
    std::array<KElem, 9> eta;
};

inline KElem eval_mono(const FieldCtx& K, const Mono9& m, const std::array<KElem, 9>& eta) {
    KElem r(1);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < m.e[i]; ++k) r = K.kmul(r, eta[i]);
    return r;
}

inline Rat norm_mono(const Mono9& m, const std::array<Rat, 9>& norms) {
    Rat r(1);
    for (int i = 0; i < 9; ++i)
        if (m.e[i] > 0) r *= pow_rat(norms[i], m.e[i]);
    return r;
}

// exact check of one height condition against bound Bt
inline bool cond_holds(const FieldCtx& K, const HeightCond& c, const std::array<KElem, 9>& eta,
                       const std::array<Rat, 9>& norms, const Rat& Bt) {
    Rat lhs = norm_mono(c.outer, norms);
    if (c.nterms == 2) {
        KElem s = K.kadd(eval_mono(K, c.t1, eta), eval_mono(K, c.t2, eta));
        lhs *= K.knorm(s);
    }
    return lhs <= c.mult * Bt * norm_mono(c.den, norms);
}

// per-surface, per-class-tuple instantiation
struct TorsorCtx {
    const FieldCtx* K;
    const TorsorSpec* T;
    std::array<FracIdeal, 9> Oj;
    std::array<FracIdeal, 9> OjInv;
    std::array<Lat, 9> lat;
    std::array<Rat, 9> minnorm;
    Rat uC;
};

inline TorsorCtx make_torsor_ctx(const FieldCtx& K, const TorsorSpec& T,
                                 const std::array<Ideal, 6>& C) {
    TorsorCtx ctx;
    ctx.K = &K;
    ctx.T = &T;
    std::array<FracIdeal, 6> reps;
    std::array<FracIdeal, 6> reps_inv;
    for (int k = 0; k < 6; ++k) {
        reps[k] = K.to_frac(C[k]);
        reps_inv[k] = K.finv(reps[k]);
    }
    for (int j = 0; j < 9; ++j) {
        FracIdeal F = K.to_frac(Ideal(Int(1), Int(0), Int(1)));
        for (int k = 0; k < 6; ++k) {
            int e = T.oj_exponents[j][k];
            for (int i = 0; i < (e > 0 ? e : -e); ++i) F = K.fmul(F, e > 0 ? reps[k] : reps_inv[k]);
        }
        ctx.Oj[j] = F;
        ctx.OjInv[j] = K.finv(F);
        ctx.lat[j] = make_lat(K, F);
        ctx.minnorm[j] = K.min_norm(F);
    }
    Rat u(1);
    for (int k = 0; k < 6; ++k) {
        Rat n = K.norm(reps[k]);
        u *= (T.u_exponents[k] > 0) ? pow_rat(n, T.u_exponents[k]) : 1 / pow_rat(n, -T.u_exponents[k]);
    }
    ctx.uC = u;
    return ctx;
}

namespace torsor_detail {

// bivariate polynomial over Q of degree <= 4, used to compile the stage-8
// conditions into integer row polynomials
struct BivarPoly {
    std::array<std::array<Rat, 5>, 5> c{};

    static BivarPoly constant(const Rat& v) {
        BivarPoly p;
        p.c[0][0] = v;
        return p;
    }
    BivarPoly add(const BivarPoly& o) const {
        BivarPoly r;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) r.c[i][j] = c[i][j] + o.c[i][j];
        return r;
    }
    BivarPoly scale(const Rat& v) const {
        BivarPoly r;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) r.c[i][j] = c[i][j] * v;
        return r;
    }
    BivarPoly mul(const BivarPoly& o) const {
        BivarPoly r;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (c[i][j] == 0) continue;
                for (int k = 0; k + i < 5; ++k)
                    for (int l = 0; l + j < 5; ++l) {
                        if (o.c[k][l] == 0) continue;
                        r.c[i + k][j + l] += c[i][j] * o.c[k][l];
                    }
            }
        return r;
    }
    bool is_zero() const {
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (c[i][j] != 0) return false;
        return true;
    }
};

// K-element whose coordinates are bivariate polynomials in (s,t)
struct KPoly {
    BivarPoly x, y;

    KPoly add(const KPoly& o) const { return {x.add(o.x), y.add(o.y)}; }
    KPoly mul_scalar(const FieldCtx& K, const KElem& a) const {
        // (a_x + a_y w)(x + y w) = (a_x x - N a_y y) + (a_x y + a_y x + T a_y y) w
        BivarPoly nx = x.scale(a.x).add(y.scale(-Rat(K.omega_norm()) * a.y));
        BivarPoly ny = y.scale(a.x).add(x.scale(a.y)).add(y.scale(Rat(K.omega_trace()) * a.y));
        return {nx, ny};
    }
    KPoly mul(const FieldCtx& K, const KPoly& o) const {
        BivarPoly yy = y.mul(o.y);
        BivarPoly nx = x.mul(o.x).add(yy.scale(-Rat(K.omega_norm())));
        BivarPoly ny = x.mul(o.y).add(y.mul(o.x)).add(yy.scale(Rat(K.omega_trace())));
        return {nx, ny};
    }
    BivarPoly norm(const FieldCtx& K) const {
        return x.mul(x).add(x.mul(y).scale(Rat(K.omega_trace()))).add(y.mul(y).scale(Rat(K.omega_norm())));
    }
};

// compiled stage-8 constraint: integer bivariate Q with Q(s,t) <= 0 required
struct RowConstraint {
    std::array<std::array<Int, 5>, 5> q;
    int deg_s{0};

    std::vector<Int> row_poly(const Int& t) const {
        std::vector<Int> p(static_cast<std::size_t>(deg_s) + 1, Int(0));
        for (int i = 0; i <= deg_s; ++i) {
            Int v(0);
            for (int j = 4; j >= 0; --j) v = v * t + q[i][j];
            p[static_cast<std::size_t>(i)] = v;
        }
        return p;
    }
};

}  // namespace torsor_detail

// Exact enumeration of M_C(B).  Nested lattice-disk enumeration of
// eta_1..eta_7 with monomial radii, a row-clipped disk for eta_8, and eta_9
// solved from the torsor equation; all comparisons exact.
//
// Every eta_j is carried as an integral element over the fixed denominator of
// its lattice, so the inner loops run on integer arithmetic.  Pure height
// conditions are enforced incrementally via running scaled-norm products
// (with lattice minima standing in for unassigned mandatory variables) and
// are therefore exact at their last variable.  Coprimality is checked
// incrementally with a norm-gcd prefilter; ideal HNFs are materialized only
// when norms share a factor.
class TorsorEnumerator {
  public:
    using Callback = std::function<void(const TorsorPoint&)>;

    // approximate eta_8 disk size above which rows are clipped by the
    // compiled integer constraints instead of scanned pointwise
    inline static long row_compile_threshold = 64;

    // enumerate one representative per unit orbit; counts must be multiplied
    // by omega_K^(number of unit-scaled variables)
    bool quotient = false;

    TorsorEnumerator(const TorsorCtx& ctx, const Rat& B) : ctx_(ctx), Bt_(ctx.uC * B) {
        const TorsorSpec& T = *ctx_.T;
        const FieldCtx& K = *ctx_.K;
        bn_ = Bt_.get_num();
        bd_ = Bt_.get_den();
        for (int i = 0; i < 3; ++i)
            if (T.torsor_terms[i].e[8] == 1) t9_ = i;
        coeff9_ = T.torsor_terms[t9_];
        coeff9_.e[8] = 0;
        for (std::size_t ci = 0; ci < T.conds.size(); ++ci) {
            if (T.conds[ci].nterms == 0)
                pure_.push_back(static_cast<int>(ci));
            else
                twoterm_.push_back(static_cast<int>(ci));
        }
        for (int j = 0; j < 9; ++j) {
            den_[j] = ctx_.lat[j].den;
            qden_[j] = ctx_.lat[j].qden;
            Rat mn = ctx_.minnorm[j] * qden_[j];
            if (mn.get_den() != 1) throw std::logic_error("lattice minimum not integral");
            mn_[j] = mn.get_num();
            Rat no = K.norm(ctx_.Oj[j]);
            NI_num_[j] = no.get_den();
            NI_div_[j] = qden_[j] * no.get_num();
        }
        // integer data per pure condition: scaled right-hand side and the
        // minima products for each level
        for (int ci : pure_) {
            const Mono9& mo = T.conds[ci].outer;
            Int qall(1);
            for (int k = 0; k < 9; ++k)
                if (mo.e[k] > 0) qall *= pow_int(qden_[k], mo.e[k]);
            rhs_[ci] = T.conds[ci].mult * bn_ * qall;
            for (int j = 0; j < 8; ++j) {
                Int mp(1);
                bool usable = true;
                for (int k = j + 1; k < 9; ++k) {
                    if (mo.e[k] == 0) continue;
                    if (T.may_vanish(k + 1)) {
                        usable = false;
                        break;
                    }
                    mp *= pow_int(mn_[k], mo.e[k]);
                }
                usable_[ci][j] = usable;
                minprod_[ci][j] = usable ? mp : Int(0);
            }
        }
        // constant denominator data per two-term condition
        for (int ci : twoterm_) {
            const HeightCond& c = T.conds[ci];
            auto dprod = [&](const Mono9& m) {
                Int r(1);
                for (int k = 0; k < 9; ++k)
                    if (m.e[k] > 0) r *= pow_int(den_[k], m.e[k]);
                return r;
            };
            tt_do_[ci] = dprod(c.outer);
            tt_ad_[ci] = dprod(c.t1);
            tt_bd_[ci] = dprod(c.t2);
            tt_dd_[ci] = dprod(c.den);
            Int lhs_den = tt_do_[ci] * tt_ad_[ci] * tt_bd_[ci];
            tt_lhs_den2_[ci] = lhs_den * lhs_den;
            tt_dd2_[ci] = tt_dd_[ci] * tt_dd_[ci];
        }
        // torsor equation denominators
        for (int i = 0; i < 3; ++i) {
            Int r(1);
            for (int k = 0; k < 9; ++k)
                if (T.torsor_terms[i].e[k] > 0 && k != 8) r *= pow_int(den_[k], T.torsor_terms[i].e[k]);
            term_den_[i] = r;
        }
        // nonadjacent earlier partners per level
        for (int j = 0; j < 9; ++j)
            for (int k = 0; k < j; ++k)
                if (!T.adjacent(j + 1, k + 1)) partners_[j].push_back(k);
        for (auto& r : running_[0]) r = Int(1);
        // stage-8 monomials, eta_8 stripped, tracked incrementally over the
        // prefix levels
        auto track = [&](Mono9 m) {
            m.e[7] = 0;
            m.e[8] = 0;
            for (std::size_t i = 0; i < monos_.size(); ++i)
                if (monos_[i].e == m.e) return static_cast<int>(i);
            monos_.push_back(m);
            return static_cast<int>(monos_.size() - 1);
        };
        for (int ci : twoterm_) {
            const HeightCond& c = T.conds[ci];
            if (!c.uses(7)) continue;
            mi_outer_[ci] = track(c.outer);
            mi_t1_[ci] = track(c.t1);
            mi_t2_[ci] = track(c.t2);
            mi_den_[ci] = track(c.den);
        }
        {
            int ia = -1, ib = -1;
            for (int i = 0; i < 3; ++i) {
                if (i == t9_) continue;
                (ia < 0 ? ia : ib) = i;
            }
            mi_ta_ = track(T.torsor_terms[ia]);
            mi_tb_ = track(T.torsor_terms[ib]);
            mi_cn_ = track(coeff9_);
            ia9_ = ia;
            ib9_ = ib;
        }
        for (auto& e : runelem_[0]) e = Elem(Int(1), Int(0));
        // unit action on lattice coordinates, for the orbit-representative test
        std::vector<Elem> units;
        {
            FracIdeal one = K.to_frac(Ideal(Int(1), Int(0), Int(1)));
            for (const KElem& u : lattice_points_in_disk(K, one, Rat(1)))
                if (!u.is_zero()) units.push_back(Elem(u.x.get_num(), u.y.get_num()));
        }
        scaled_.assign(9, false);
        for (const auto& a : T.unit_actions) scaled_[a.v - 1] = true;
        n_actions_ = static_cast<int>(T.unit_actions.size());
        for (int j = 0; j < 9; ++j) {
            if (!scaled_[j]) continue;
            const Lat& L = ctx_.lat[j];
            for (const Elem& u : units) {
                if (u.x == 1 && u.y == 0) continue;
                Elem uv1 = K.mul(u, Elem(L.e1x, Int(0)));
                Elem uv2 = K.mul(u, Elem(L.e2x, L.e2y));
                auto coords = [&](const Elem& w) {
                    Int q = w.y / L.e2y;
                    Int p = (w.x - q * L.e2x) / L.e1x;
                    if (q * L.e2y != w.y || p * L.e1x + q * L.e2x != w.x)
                        throw std::logic_error("unit does not preserve the lattice");
                    return std::pair<Int, Int>(p, q);
                };
                auto [p1, q1] = coords(uv1);
                auto [p2, q2] = coords(uv2);
                umats_[j].push_back({p1, p2, q1, q2});
            }
        }
    }

    int quotient_actions() const { return n_actions_; }

    void run(const Callback& cb) {
        if (Bt_ < 0) return;
        cb_ = &cb;
        counter_ = nullptr;
        level(0);
    }

    long long run_count() {
        if (Bt_ < 0) return 0;
        long long n = 0;
        cb_ = nullptr;
        counter_ = &n;
        level(0);
        return n;
    }

    // restrict the top-level variable to a single candidate (for work splitting)
    long long run_count_level1(const Int& s, const Int& t) {
        if (Bt_ < 0) return 0;
        long long n = 0;
        cb_ = nullptr;
        counter_ = &n;
        if (place(0, s, t)) level(1);
        return n;
    }

    void run_level1(const Callback& cb, const Int& s, const Int& t) {
        if (Bt_ < 0) return;
        cb_ = &cb;
        counter_ = nullptr;
        if (place(0, s, t)) level(1);
    }

    // candidate (s,t) pairs for eta_1
    std::vector<std::pair<Int, Int>> level1_candidates() {
        std::vector<std::pair<Int, Int>> out;
        if (Bt_ < 0) return out;
        disk_rows(ctx_.lat[0], radius_int(0), [&](const Int& t, const Int& slo, const Int& shi) {
            for (Int s = slo; s <= shi; ++s) {
                if (s == 0 && t == 0 && !ctx_.T->may_vanish(1)) continue;
                out.push_back({s, t});
            }
        });
        return out;
    }

  private:
    static constexpr int kMaxConds = 8;

    const TorsorCtx& ctx_;
    Rat Bt_;
    Int bn_, bd_;
    int t9_{0};
    Mono9 coeff9_;
    std::vector<int> pure_, twoterm_;
    Int rhs_[kMaxConds];
    bool usable_[kMaxConds][8] = {};
    Int minprod_[kMaxConds][8];
    Int tt_do_[kMaxConds], tt_ad_[kMaxConds], tt_bd_[kMaxConds], tt_dd_[kMaxConds];
    Int tt_lhs_den2_[kMaxConds], tt_dd2_[kMaxConds];
    Int term_den_[3];
    std::vector<int> partners_[9];
    Int den_[9], qden_[9], mn_[9];
    Int NI_num_[9], NI_div_[9];
    // running assigned scaled-norm products and kill flags, per level
    Int running_[10][kMaxConds];
    bool killed_[10][kMaxConds] = {};
    // stage-8 monomials (eta_8 stripped) and their running numerator products
    static constexpr int kMaxMonos = 16;
    std::vector<Mono9> monos_;
    int mi_outer_[kMaxConds] = {}, mi_t1_[kMaxConds] = {}, mi_t2_[kMaxConds] = {},
        mi_den_[kMaxConds] = {};
    int mi_ta_{0}, mi_tb_{0}, mi_cn_{0}, ia9_{0}, ib9_{0};
    Elem runelem_[10][kMaxMonos];
    std::map<long, std::vector<PrimeIdeal>> pcache_;
    struct UMat {
        Int a, b, c, d;
    };
    std::vector<bool> scaled_;
    int n_actions_{0};
    std::vector<UMat> umats_[9];
    // assigned variables: numerator element over den_[j], scaled norm n_[j]
    std::array<Elem, 9> num_;
    Int n_[9];
    Int e9den_{1};
    std::array<Int, 9> NI_;
    std::array<bool, 9> have_Ij_{};
    std::array<Ideal, 9> Ij_;
    const Callback* cb_{nullptr};
    long long* counter_{nullptr};

    KElem eta_k(int j) const {
        const Int& d = (j == 8) ? e9den_ : den_[j];
        return KElem(make_rat(num_[j].x, d), make_rat(num_[j].y, d));
    }

    // largest allowed integer form value of eta_j
    Int radius_int(int j) const {
        const TorsorSpec& T = *ctx_.T;
        Int best(-1);
        for (int ci : pure_) {
            const HeightCond& c = T.conds[ci];
            int a = c.outer.e[j];
            if (a == 0 || killed_[j][ci] || !usable_[ci][j]) continue;
            // rhs_ already carries qden_k^e for every variable of the
            // condition, so the bound applies to the scaled form value n_j
            Int denom = running_[j][ci] * minprod_[ci][j] * bd_;
            Int t = floor_div(rhs_[ci], denom);
            Int r;
            if (t < 0) return Int(-1);
            if (a == 1) {
                r = t;
            } else {
                mpz_root(r.get_mpz_t(), t.get_mpz_t(), a);
                while (pow_int(r + 1, a) <= t) ++r;
            }
            if (best < 0 || r < best) best = r;
        }
        if (best < 0) throw std::logic_error("torsor enumeration: unbounded variable");
        return best;
    }

    bool coprime_with_earlier(int j) {
        if (num_[j].is_zero()) {
            for (int k : partners_[j]) {
                if (num_[k].is_zero() || NI_[k] != 1) return false;
            }
            return true;
        }
        for (int k : partners_[j]) {
            if (num_[k].is_zero()) {
                if (NI_[j] != 1) return false;
                continue;
            }
            Int g = gcd(NI_[j], NI_[k]);
            if (g == 1) continue;
            if (share_prime(j, k, g)) return false;
        }
        return true;
    }

    // whether some prime ideal divides both I_j and I_k, given g = gcd of norms
    bool share_prime(int j, int k, Int g) {
        for (Int p = 2; g > 1; mpz_nextprime(p.get_mpz_t(), p.get_mpz_t())) {
            if (p * p > g) p = g;  // remaining cofactor is prime
            if (!mpz_divisible_p(g.get_mpz_t(), p.get_mpz_t())) continue;
            while (mpz_divisible_p(g.get_mpz_t(), p.get_mpz_t())) g /= p;
            for (const auto& pi : primes_above_cached(p)) {
                if (divides_I(pi.id, j) && divides_I(pi.id, k)) return true;
            }
        }
        return false;
    }

    const std::vector<PrimeIdeal>& primes_above_cached(const Int& p) {
        long key = p.get_si();
        auto it = pcache_.find(key);
        if (it == pcache_.end()) it = pcache_.emplace(key, ctx_.K->primes_above(p)).first;
        return it->second;
    }

    // p | I_j, i.e. eta_j in p * O_j
    bool divides_I(const Ideal& p, int j) {
        const FieldCtx& K = *ctx_.K;
        const Int& dj = (j == 8) ? e9den_ : den_[j];
        if (ctx_.Oj[j].num.is_unit() && ctx_.Oj[j].den == 1 && dj == 1)
            return K.contains(p, num_[j]);
        const Ideal& I = ideal_I(j);
        return K.contains(p, Elem(I.a, Int(0))) && K.contains(p, Elem(I.b, I.c));
    }

    const Ideal& ideal_I(int j) {
        if (!have_Ij_[j]) {
            const FieldCtx& K = *ctx_.K;
            const Int& dj = (j == 8) ? e9den_ : den_[j];
            if (ctx_.Oj[j].num.is_unit() && ctx_.Oj[j].den == 1 && dj == 1) {
                Ij_[j] = K.principal_ideal(num_[j]);
            } else {
                FracIdeal f = K.fmul(K.principal_frac(eta_k(j)), ctx_.OjInv[j]);
                if (!K.integral(f)) throw std::logic_error("I_j not integral");
                Ij_[j] = f.num;
            }
            have_Ij_[j] = true;
        }
        return Ij_[j];
    }

    bool place(int j, const Int& s, const Int& t) {
        const TorsorSpec& T = *ctx_.T;
        have_Ij_[j] = false;
        if (s == 0 && t == 0) {
            if (!T.may_vanish(j + 1)) return false;
            num_[j] = Elem();
            n_[j] = 0;
            if (j < 7) {
                for (std::size_t mi = 0; mi < monos_.size(); ++mi) {
                    if (monos_[mi].e[j] == 0)
                        runelem_[j + 1][mi] = runelem_[j][mi];
                    else
                        runelem_[j + 1][mi] = Elem();  // vanishing factor
                }
            }
            for (int ci : pure_) {
                killed_[j + 1][ci] = killed_[j][ci] || T.conds[ci].outer.e[j] > 0;
                running_[j + 1][ci] = running_[j][ci];
            }
            return coprime_with_earlier(j);
        }
        const Lat& L = ctx_.lat[j];
        if (quotient && scaled_[j]) {
            // keep only the lexicographically largest point of the unit orbit
            for (const UMat& U : umats_[j]) {
                Int us = U.a * s + U.b * t;
                if (us > s || (us == s && U.c * s + U.d * t > t)) return false;
            }
        }
        num_[j] = Elem(s * L.e1x + t * L.e2x, t * L.e2y);
        n_[j] = L.form(s, t);
        if (j < 7) {
            const FieldCtx& K = *ctx_.K;
            for (std::size_t mi = 0; mi < monos_.size(); ++mi) {
                int e = monos_[mi].e[j];
                if (e == 0) {
                    runelem_[j + 1][mi] = runelem_[j][mi];
                } else {
                    Elem v = K.mul(runelem_[j][mi], num_[j]);
                    for (int i = 1; i < e; ++i) v = K.mul(v, num_[j]);
                    runelem_[j + 1][mi] = std::move(v);
                }
            }
        }
        for (int ci : pure_) {
            const HeightCond& c = T.conds[ci];
            killed_[j + 1][ci] = killed_[j][ci];
            if (c.outer.e[j] > 0 && !killed_[j][ci]) {
                running_[j + 1][ci] = running_[j][ci] * pow_int(n_[j], c.outer.e[j]);
                if (usable_[ci][j] &&
                    running_[j + 1][ci] * minprod_[ci][j] * bd_ > rhs_[ci])
                    return false;
            } else {
                running_[j + 1][ci] = running_[j][ci];
            }
        }
        Int nij = n_[j] * NI_num_[j];
        if (!mpz_divisible_p(nij.get_mpz_t(), NI_div_[j].get_mpz_t()))
            throw std::logic_error("N(I_j) not an integer");
        NI_[j] = nij / NI_div_[j];
        return coprime_with_earlier(j);
    }

    void level(int j) {
        if (j == 7) {
            stage8();
            return;
        }
        Int m = radius_int(j);
        disk_rows(ctx_.lat[j], m, [&](const Int& t, const Int& slo, const Int& shi) {
            for (Int s = slo; s <= shi; ++s) {
                if (s == 0 && t == 0 && !ctx_.T->may_vanish(j + 1)) continue;
                if (!place(j, s, t)) continue;
                level(j + 1);
            }
        });
        // a vanishing eta_j is allowed outside every disk only at radius >= 0,
        // and (0,0) always lies in the disk, so the zero branch is covered
    }

    // exact integer check of one two-term condition at the current assignment
    bool twoterm_holds(int ci) {
        const TorsorSpec& T = *ctx_.T;
        const FieldCtx& K = *ctx_.K;
        const HeightCond& c = T.conds[ci];
        auto nprod = [&](const Mono9& m) {
            Elem r(Int(1), Int(0));
            for (int k = 0; k < 9; ++k)
                for (int i = 0; i < m.e[k]; ++i) r = K.mul(r, num_[k]);
            return r;
        };
        Elem on = nprod(c.outer), an = nprod(c.t1), bnm = nprod(c.t2), dn = nprod(c.den);
        Elem s = K.add(scale_elem(an, tt_bd_[ci]), scale_elem(bnm, tt_ad_[ci]));
        Int lhs = K.norm(K.mul(on, s)) * tt_dd2_[ci] * bd_;
        Int rhs = c.mult * bn_ * K.norm(dn) * tt_lhs_den2_[ci];
        return lhs <= rhs;
    }

    static Elem scale_elem(const Elem& e, const Int& m) { return Elem(e.x * m, e.y * m); }

    // the eta_8-free two-term conditions reject the whole prefix
    bool twoterm_prefix_ok() {
        for (int ci : twoterm_)
            if (!ctx_.T->conds[ci].uses(7) && !twoterm_holds(ci)) return false;
        return true;
    }

    // per-prefix data for the innermost loop: everything free of eta_8 is
    // evaluated once, so each candidate costs a handful of integer products
    struct S8Cond {
        int du, da, db;
        Elem o_pre, a_pre, b_pre;
        Int lhs_scale;  // tt_dd2 * bd
        Int rhs;        // mult * bn * N(dn) * tt_lhs_den2
    };
    struct S8Pure {
        int e8;
        Int run;  // running_[7] value
        Int rhs;
    };
    struct S8 {
        std::vector<S8Cond> conds;
        std::vector<S8Pure> pure;
        // torsor equation: eta_9 = -(pa*X^ea + pb*X^eb) * cden * conj(cn) / (nden * N(cn))
        Elem pa, pb, cn;
        int ea, eb;
        Int cden, nden, ncn;
    };
    S8 s8_;

    void build_s8() {
        const TorsorSpec& T = *ctx_.T;
        const FieldCtx& K = *ctx_.K;
        const Elem* re = runelem_[7];
        s8_.conds.clear();
        s8_.pure.clear();
        for (int ci : twoterm_) {
            const HeightCond& c = T.conds[ci];
            if (!c.uses(7)) continue;
            S8Cond sc;
            sc.du = c.outer.e[7];
            sc.da = c.t1.e[7];
            sc.db = c.t2.e[7];
            sc.o_pre = re[mi_outer_[ci]];
            sc.a_pre = scale_elem(re[mi_t1_[ci]], tt_bd_[ci]);
            sc.b_pre = scale_elem(re[mi_t2_[ci]], tt_ad_[ci]);
            sc.lhs_scale = tt_dd2_[ci] * bd_;
            sc.rhs = c.mult * bn_ * K.norm(re[mi_den_[ci]]) * tt_lhs_den2_[ci];
            s8_.conds.push_back(std::move(sc));
        }
        for (int ci : pure_) {
            const HeightCond& c = T.conds[ci];
            if (c.outer.e[7] == 0 || killed_[7][ci]) continue;
            S8Pure sp;
            sp.e8 = c.outer.e[7];
            sp.run = running_[7][ci];
            sp.rhs = rhs_[ci];
            s8_.pure.push_back(std::move(sp));
        }
        s8_.ea = T.torsor_terms[ia9_].e[7];
        s8_.eb = T.torsor_terms[ib9_].e[7];
        // common denominators: term_i / term_den_i with eta_8 carried as X/den_8
        s8_.pa = scale_elem(re[mi_ta_], term_den_[ib9_] * pow_int(den_[7], s8_.eb));
        s8_.pb = scale_elem(re[mi_tb_], term_den_[ia9_] * pow_int(den_[7], s8_.ea));
        s8_.cn = re[mi_cn_];
        s8_.ncn = K.norm(s8_.cn);
        s8_.cden = term_den_[t9_];
        s8_.nden = term_den_[ia9_] * term_den_[ib9_] * pow_int(den_[7], s8_.ea + s8_.eb);
    }

    void stage8() {
        using torsor_detail::RowConstraint;
        const Lat& L = ctx_.lat[7];
        if (!twoterm_prefix_ok()) return;
        Int m = radius_int(7);
        if (m < 0) return;
        build_s8();

        // small disks: scan directly, the exact per-candidate checks suffice;
        // larger ones are clipped row-by-row against the compiled conditions
        Int disc = 4 * L.q11 * L.q22 - L.q12 * L.q12;
        bool small = 6 * m <= row_compile_threshold * isqrt_floor(disc);
        if (!small) {
            std::vector<RowConstraint> rcs = compile_row_constraints();
            disk_rows(L, m, [&](const Int& t, const Int& slo, const Int& shi) {
                std::vector<std::pair<Int, Int>> segs{{slo, shi}};
                for (const auto& rc : rcs) {
                    std::vector<Int> p = rc.row_poly(t);
                    std::vector<std::pair<Int, Int>> next;
                    for (auto& seg : segs)
                        for (auto& iv : poly_nonpos_intervals(p, seg.first, seg.second))
                            next.push_back(iv);
                    segs = std::move(next);
                    if (segs.empty()) break;
                }
                for (auto& seg : segs)
                    for (Int s = seg.first; s <= seg.second; ++s) finish(s, t);
            });
        } else {
            disk_rows(L, m, [&](const Int& t, const Int& slo, const Int& shi) {
                for (Int s = slo; s <= shi; ++s) finish(s, t);
            });
        }
    }

    std::vector<torsor_detail::RowConstraint> compile_row_constraints() {
        using torsor_detail::BivarPoly;
        using torsor_detail::KPoly;
        using torsor_detail::RowConstraint;
        const TorsorSpec& T = *ctx_.T;
        const FieldCtx& K = *ctx_.K;
        const Lat& L = ctx_.lat[7];
        KPoly X8;
        X8.x.c[1][0] = make_rat(L.e1x, L.den);
        X8.x.c[0][1] = make_rat(L.e2x, L.den);
        X8.y.c[0][1] = make_rat(L.e2y, L.den);
        std::vector<RowConstraint> rcs;
        for (int ci : twoterm_) {
            const HeightCond& c = T.conds[ci];
            if (!c.uses(7)) continue;  // already checked for the prefix
            int du = c.outer.e[7], da = c.t1.e[7], db = c.t2.e[7];
            auto prefix = [&](const Mono9& mo) {
                KElem r(1);
                for (int i = 0; i < 7; ++i)
                    for (int k = 0; k < mo.e[i]; ++k) r = K.kmul(r, eta_k(i));
                return r;
            };
            KElem o0 = prefix(c.outer), a0 = prefix(c.t1), b0 = prefix(c.t2);
            Rat rhs = c.mult * Bt_ * K.knorm(prefix(c.den));
            // W(X) = o0 X^du (a0 X^da + b0 X^db)
            auto xpow = [&](int e) {
                KPoly r;
                r.x = BivarPoly::constant(Rat(1));
                for (int k = 0; k < e; ++k) r = r.mul(K, X8);
                return r;
            };
            KPoly W = xpow(da).mul_scalar(K, a0).add(xpow(db).mul_scalar(K, b0));
            if (du > 0) W = W.mul(K, xpow(du));
            W = W.mul_scalar(K, o0);
            BivarPoly n = W.norm(K);
            Int den(1);
            for (int i = 0; i < 5; ++i)
                for (int j2 = 0; j2 < 5; ++j2) den = lcm(den, n.c[i][j2].get_den());
            den = lcm(den, rhs.get_den());
            RowConstraint rc;
            for (int i = 0; i < 5; ++i)
                for (int j2 = 0; j2 < 5; ++j2) {
                    Rat v = n.c[i][j2] * den;
                    rc.q[i][j2] = v.get_num();
                    if (rc.q[i][j2] != 0 && i > rc.deg_s) rc.deg_s = i;
                }
            Rat r0 = rhs * den;
            rc.q[0][0] -= r0.get_num();
            if (rc.deg_s == 0) {
                bool any = false;
                for (int j2 = 0; j2 < 5; ++j2) any = any || rc.q[0][j2] != 0;
                if (!any) continue;  // condition holds identically on the row space
            }
            rcs.push_back(std::move(rc));
        }
        return rcs;
    }

    void finish(const Int& s, const Int& t) {
        const TorsorSpec& T = *ctx_.T;
        const FieldCtx& K = *ctx_.K;
        const Lat& L = ctx_.lat[7];
        have_Ij_[7] = false;
        bool zero8 = (s == 0 && t == 0);
        if (zero8) {
            if (!T.may_vanish(8)) return;
            num_[7] = Elem();
            n_[7] = 0;
        } else {
            num_[7] = Elem(s * L.e1x + t * L.e2x, t * L.e2y);
            n_[7] = L.form(s, t);
            for (const auto& sp : s8_.pure) {
                if (sp.run * pow_int(n_[7], sp.e8) * bd_ > sp.rhs) return;
            }
            Int nij = n_[7] * NI_num_[7];
            NI_[7] = nij / NI_div_[7];
        }
        if (!coprime_with_earlier(7)) return;
        // two-term conditions, exactly
        Elem X2;
        if (!zero8) X2 = K.mul(num_[7], num_[7]);
        auto xpow_num = [&](const Elem& base, int e) -> Elem {
            if (e == 0) return base;
            if (zero8) return Elem();
            if (e == 1) return K.mul(base, num_[7]);
            return K.mul(base, X2);
        };
        for (const auto& sc : s8_.conds) {
            Elem on = xpow_num(sc.o_pre, sc.du);
            Elem sum = K.add(xpow_num(sc.a_pre, sc.da), xpow_num(sc.b_pre, sc.db));
            if (K.norm(K.mul(on, sum)) * sc.lhs_scale > sc.rhs) return;
        }
        // solve eta_9 from the torsor equation
        Elem snum = K.add(xpow_num(s8_.pa, s8_.ea), xpow_num(s8_.pb, s8_.eb));
        Elem e9num = K.mul(snum, K.conj(s8_.cn));
        e9num = Elem(-e9num.x * s8_.cden, -e9num.y * s8_.cden);
        Int e9d = s8_.nden * s8_.ncn;
        Int g = gcd(gcd(e9num.x, e9num.y), e9d);
        if (g > 1) {
            e9num.x /= g;
            e9num.y /= g;
            e9d /= g;
        }
        if (e9num.is_zero()) {
            if (!T.may_vanish(9)) return;
            num_[8] = Elem();
            e9den_ = 1;
            n_[8] = 0;
        } else {
            // membership eta_9 in O_9 = I_9 / d_9
            Int px = e9num.x * den_[8], py = e9num.y * den_[8];
            if (!mpz_divisible_p(px.get_mpz_t(), e9d.get_mpz_t())) return;
            if (!mpz_divisible_p(py.get_mpz_t(), e9d.get_mpz_t())) return;
            if (!K.contains(ctx_.Oj[8].num, Elem(px / e9d, py / e9d))) return;
            num_[8] = e9num;
            e9den_ = e9d;
            n_[8] = K.norm(e9num);  // scaled by e9d^2
            // N(I_9) = N(eta_9)/N(O_9) = n * od / (e9d^2 * on)
            Int num9 = n_[8] * NI_num_[8];
            Int div9 = e9d * e9d * (NI_div_[8] / qden_[8]);
            if (!mpz_divisible_p(num9.get_mpz_t(), div9.get_mpz_t()))
                throw std::logic_error("N(I_9) not an integer");
            NI_[8] = num9 / div9;
        }
        have_Ij_[8] = false;
        if (!coprime_with_earlier(8)) return;
        if (counter_) {
            ++*counter_;
            return;
        }
        TorsorPoint pt;
        for (int j = 0; j < 9; ++j) pt.eta[j] = eta_k(j);
        (*cb_)(pt);
    }
};


inline ProjPoint psi_torsor(const TorsorSpec& T, const FieldCtx& K, const TorsorPoint& e) {
    ProjPoint p;
    for (int i = 0; i < 5; ++i)
        p.x[i] = K.kscale(eval_mono(K, T.psi[i], e.eta), Rat(T.psi_sign[i]));
    if (p.all_zero()) throw std::domain_error("psi_torsor: degenerate image");
    return p;
}

inline std::vector<std::array<Ideal, 6>> class_tuples(const FieldCtx& K) {
    const auto& reps = K.class_reps();
    std::vector<std::array<Ideal, 6>> out;
    std::array<std::size_t, 6> idx{};
    while (true) {
        std::array<Ideal, 6> C;
        for (int k = 0; k < 6; ++k) C[k] = reps[idx[k]];
        out.push_back(C);
        int pos = 5;
        while (pos >= 0) {
            if (++idx[pos] < reps.size()) break;
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

inline std::vector<TorsorPoint> enumerate_M(SurfaceId S, const FieldCtx& K,
                                            const std::array<Ideal, 6>& C, const Rat& B) {
    const TorsorSpec& T = build_torsor_spec(S);
    TorsorCtx ctx = make_torsor_ctx(K, T, C);
    std::vector<TorsorPoint> out;
    TorsorEnumerator en(ctx, B);
    en.run([&](const TorsorPoint& p) { out.push_back(p); });
    return out;
}

struct TorsorCountResult {
    long long total{0};           // sum over class tuples of |M_C(B)|
    long long count{0};           // total / omega_K^6
    std::vector<long long> per_tuple;
};

inline TorsorCountResult torsor_count_detail(SurfaceId S, const FieldCtx& K, const Rat& B,
                                             int threads = 1, bool use_quotient = true) {
    const TorsorSpec& T = build_torsor_spec(S);
    auto tuples = class_tuples(K);
    TorsorCountResult res;
    res.per_tuple.assign(tuples.size(), 0);
    long long mult = 1;
    if (use_quotient)
        for (std::size_t i = 0; i < T.unit_actions.size(); ++i) mult *= K.unit_count();

    auto count_tuple = [&](const TorsorCtx& ctx) {
        TorsorEnumerator en(ctx, B);
        en.quotient = use_quotient;
        return mult * en.run_count();
    };

    if (threads <= 1 || tuples.size() == 1) {
        for (std::size_t i = 0; i < tuples.size(); ++i) {
            TorsorCtx ctx = make_torsor_ctx(K, T, tuples[i]);
            if (tuples.size() == 1 && threads > 1) {
                // split the single tuple across eta_1 candidates
                TorsorEnumerator probe(ctx, B);
                probe.quotient = use_quotient;
                auto cands = probe.level1_candidates();
                std::vector<long long> partial(cands.size(), 0);
                std::atomic<std::size_t> next{0};
                auto worker = [&]() {
                    TorsorEnumerator en(ctx, B);
                    en.quotient = use_quotient;
                    while (true) {
                        std::size_t w = next.fetch_add(1);
                        if (w >= cands.size()) break;
                        partial[w] = en.run_count_level1(cands[w].first, cands[w].second);
                    }
                };
                std::vector<std::thread> pool;
                for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
                long long c = 0;
                for (long long v : partial) c += v;
                res.per_tuple[i] = mult * c;
            } else {
                res.per_tuple[i] = count_tuple(ctx);
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= tuples.size()) break;
                TorsorCtx ctx = make_torsor_ctx(K, T, tuples[i]);
                res.per_tuple[i] = count_tuple(ctx);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (long long v : res.per_tuple) res.total += v;
    long long w6 = 1;
    for (int i = 0; i < 6; ++i) w6 *= K.unit_count();
    if (res.total % w6 != 0)
        throw std::logic_error("torsor count not divisible by omega_K^6");
    res.count = res.total / w6;
    return res;
}

inline long long torsor_count(SurfaceId S, const FieldCtx& K, const Rat& B, int threads = 1) {
    return torsor_count_detail(S, K, B, threads).count;
}

// multiset of canonical keys of the Psi images over all class tuples,
// enumerated in full (no unit quotient); for tests and small bounds
inline std::map<std::string, long long> torsor_image_multiset_full(SurfaceId S, const FieldCtx& K,
                                                                   const Rat& B) {
    const TorsorSpec& T = build_torsor_spec(S);
    std::map<std::string, long long> out;
    for (const auto& C : class_tuples(K)) {
        TorsorCtx ctx = make_torsor_ctx(K, T, C);
        TorsorEnumerator en(ctx, B);
        en.run([&](const TorsorPoint& p) { ++out[canonical_key(K, psi_torsor(T, K, p))]; });
    }
    return out;
}

// The same multiset through the unit quotient: each orbit representative
// contributes the keys of its omega_K^k unit twists, where twist (u_1..u_k)
// scales Psi coordinate i by prod_a u_a^(e_i[v_a] - m_a e_i[c_a]).
inline std::map<std::string, long long> torsor_image_multiset(SurfaceId S, const FieldCtx& K,
                                                              const Rat& B, int threads = 1) {
    const TorsorSpec& T = build_torsor_spec(S);
    const int k = static_cast<int>(T.unit_actions.size());

    // unit powers per (twist, psi coordinate)
    std::vector<Elem> units;
    {
        FracIdeal one = K.to_frac(Ideal(Int(1), Int(0), Int(1)));
        for (const KElem& u : lattice_points_in_disk(K, one, Rat(1)))
            if (!u.is_zero()) units.push_back(Elem(u.x.get_num(), u.y.get_num()));
    }
    auto unit_pow = [&](const Elem& u, long e) {
        Elem r(Int(1), Int(0));
        Elem base = e < 0 ? K.conj(u) : u;  // u^-1 = conj(u) for units
        for (long i = 0; i < (e < 0 ? -e : e); ++i) r = K.mul(r, base);
        return r;
    };
    std::vector<std::array<Elem, 5>> twists;
    {
        std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
        while (true) {
            std::array<Elem, 5> tw;
            for (int i = 0; i < 5; ++i) {
                Elem f(Int(1), Int(0));
                for (int a = 0; a < k; ++a) {
                    const auto& act = T.unit_actions[static_cast<std::size_t>(a)];
                    long w = T.psi[i].e[act.v - 1] - static_cast<long>(act.m) * T.psi[i].e[act.c - 1];
                    f = K.mul(f, unit_pow(units[idx[static_cast<std::size_t>(a)]], w));
                }
                tw[i] = f;
            }
            twists.push_back(tw);
            int pos = k - 1;
            while (pos >= 0) {
                if (++idx[static_cast<std::size_t>(pos)] < units.size()) break;
                idx[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0 || k == 0) break;
        }
    }

    auto emit = [&](const TorsorPoint& p, std::map<std::string, long long>& sink) {
        auto base = cleared_coords(psi_torsor(T, K, p));
        for (const auto& tw : twists) {
            std::array<Elem, 5> coords;
            for (int i = 0; i < 5; ++i) coords[i] = K.mul(base[i], tw[i]);
            ++sink[canonical_key_elems(K, coords)];
        }
    };

    std::map<std::string, long long> out;
    auto tuples = class_tuples(K);
    for (const auto& C : tuples) {
        TorsorCtx ctx = make_torsor_ctx(K, T, C);
        if (threads > 1 && tuples.size() == 1) {
            TorsorEnumerator probe(ctx, B);
            probe.quotient = true;
            auto cands = probe.level1_candidates();
            std::vector<std::map<std::string, long long>> sinks(
                static_cast<std::size_t>(threads));
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&, w]() {
                    TorsorEnumerator en(ctx, B);
                    en.quotient = true;
                    while (true) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= cands.size()) break;
                        en.run_level1(
                            [&](const TorsorPoint& p) { emit(p, sinks[static_cast<std::size_t>(w)]); },
                            cands[i].first, cands[i].second);
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& sink : sinks)
                for (auto& [key, nkey] : sink) out[key] += nkey;
        } else {
            TorsorEnumerator en(ctx, B);
            en.quotient = true;
            en.run([&](const TorsorPoint& p) { emit(p, out); });
        }
    }
    return out;
}

}  // namespace manin

#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "manin/height.hpp"
#include "manin/qfield.hpp"

namespace manin {

enum class SurfaceId { S0, S1, S2, S3, S4 };

inline const char* surface_name(SurfaceId id) {
    switch (id) {
        case SurfaceId::S0: return "s0";
        case SurfaceId::S1: return "s1";
        case SurfaceId::S2: return "s2";
        case SurfaceId::S3: return "s3";
        case SurfaceId::S4: return "s4";
    }
    return "?";
}

// x_i * x_j with an integer coefficient; i == j gives a square term
struct QuadMono {
    int i, j;
    int coeff;
};

using Quadric = std::vector<QuadMono>;

// monomial y0^e0 y1^e1 y2^e2 with integer coefficient
struct PsiMono {
    int e0, e1, e2;
    int coeff;
};

struct SurfaceSpec {
    SurfaceId id;
    const char* singularity;
    Quadric q1, q2;
    std::array<std::vector<PsiMono>, 5> psi;  // empty for S0 (stored as data only)
};

inline const SurfaceSpec& get_surface(SurfaceId id) {
    static const SurfaceSpec s0{
        SurfaceId::S0,
        "A3",
        {{0, 1, 1}, {2, 3, -1}},
        {{0, 3, 1}, {1, 3, 1}, {2, 4, 1}},
        {},
    };
    static const SurfaceSpec s1{
        SurfaceId::S1,
        "A3+A1",
        {{0, 3, 1}, {2, 4, -1}},
        {{0, 1, 1}, {1, 3, 1}, {2, 2, 1}},
        {{
            // (y0 y1 (y0+y2) : -y1^3 : y1^2 (y0+y2) : y1 y2 (y0+y2) : y0 y2 (y0+y2))
            {{2, 1, 0, 1}, {1, 1, 1, 1}},
            {{0, 3, 0, -1}},
            {{1, 2, 0, 1}, {0, 2, 1, 1}},
            {{1, 1, 1, 1}, {0, 1, 2, 1}},
            {{2, 0, 1, 1}, {1, 0, 2, 1}},
        }},
    };
    static const SurfaceSpec s2{
        SurfaceId::S2,
        "A4",
        {{0, 1, 1}, {2, 3, -1}},
        {{0, 4, 1}, {1, 2, 1}, {3, 3, 1}},
        {{
            // (y0^3 : y0 y1 y2 : y0^2 y1 : y0^2 y2 : -y2 (y1^2 + y0 y2))
            {{3, 0, 0, 1}},
            {{1, 1, 1, 1}},
            {{2, 1, 0, 1}},
            {{2, 0, 1, 1}},
            {{0, 2, 1, -1}, {1, 0, 2, -1}},
        }},
    };
    static const SurfaceSpec s3{
        SurfaceId::S3,
        "D4",
        {{0, 3, 1}, {1, 4, -1}},
        {{0, 1, 1}, {1, 3, 1}, {2, 2, 1}},
        {{
            // (y0 y1^2 : y1^3 : y1^2 y2 : -y1 (y0 y1 + y2^2) : -y0 (y0 y1 + y2^2))
            {{1, 2, 0, 1}},
            {{0, 3, 0, 1}},
            {{0, 2, 1, 1}},
            {{1, 2, 0, -1}, {0, 1, 2, -1}},
            {{2, 1, 0, -1}, {1, 0, 2, -1}},
        }},
    };
    static const SurfaceSpec s4{
        SurfaceId::S4,
        "D5",
        {{0, 1, 1}, {2, 2, -1}},
        {{3, 3, 1}, {0, 4, 1}, {1, 2, 1}},
        {{
            // (y0^3 : y0 y1^2 : y0^2 y1 : y0^2 y2 : -(y0 y2^2 + y1^3))
            {{3, 0, 0, 1}},
            {{1, 2, 0, 1}},
            {{2, 1, 0, 1}},
            {{2, 0, 1, 1}},
            {{1, 0, 2, -1}, {0, 3, 0, -1}},
        }},
    };
    switch (id) {
        case SurfaceId::S0: return s0;
        case SurfaceId::S1: return s1;
        case SurfaceId::S2: return s2;
        case SurfaceId::S3: return s3;
        case SurfaceId::S4: return s4;
    }
    throw std::logic_error("get_surface");
}

inline std::optional<SurfaceId> surface_from_name(const std::string& name) {
    for (SurfaceId id : {SurfaceId::S0, SurfaceId::S1, SurfaceId::S2, SurfaceId::S3, SurfaceId::S4})
        if (name == surface_name(id)) return id;
    return std::nullopt;
}

inline KElem eval_quadric(const FieldCtx& K, const Quadric& q, const std::array<KElem, 5>& x) {
    KElem v;
    for (const auto& m : q) {
        KElem term = K.kmul(x[m.i], x[m.j]);
        v = K.kadd(v, K.kscale(term, Rat(m.coeff)));
    }
    return v;
}

// polar form B(u,v) = Q(u+v) - Q(u) - Q(v)
inline KElem eval_polar(const FieldCtx& K, const Quadric& q, const std::array<KElem, 5>& u,
                        const std::array<KElem, 5>& v) {
    KElem r;
    for (const auto& m : q) {
        KElem t = K.kadd(K.kmul(u[m.i], v[m.j]), K.kmul(u[m.j], v[m.i]));
        r = K.kadd(r, K.kscale(t, Rat(m.coeff)));
    }
    return r;
}

inline bool on_surface(const FieldCtx& K, const SurfaceSpec& S, const ProjPoint& p) {
    return eval_quadric(K, S.q1, p.x).is_zero() && eval_quadric(K, S.q2, p.x).is_zero();
}

// Image of (y0:y1:y2); nullopt when all five coordinates vanish (base locus).
inline std::optional<ProjPoint> psi_eval(const FieldCtx& K, const SurfaceSpec& S,
                                         const std::array<KElem, 3>& y) {
    if (S.psi[0].empty()) throw std::domain_error("psi_eval: no parameterization for this surface");
    if (y[0].is_zero() && y[1].is_zero() && y[2].is_zero())
        throw std::domain_error("psi_eval: zero input");
    ProjPoint p;
    for (int i = 0; i < 5; ++i) {
        KElem v;
        for (const auto& m : S.psi[i]) {
            KElem t(Rat(m.coeff), Rat(0));
            for (int k = 0; k < m.e0; ++k) t = K.kmul(t, y[0]);
            for (int k = 0; k < m.e1; ++k) t = K.kmul(t, y[1]);
            for (int k = 0; k < m.e2; ++k) t = K.kmul(t, y[2]);
            v = K.kadd(v, t);
        }
        p.x[i] = v;
    }
    if (p.all_zero()) return std::nullopt;
    return p;
}

// A line in P^4 as the common zero set of three linear forms, stored in
// canonical reduced row echelon form over K, together with two spanning
// points (the RREF rows of the point matrix, equally canonical).
struct Line {
    std::array<std::array<KElem, 5>, 3> cut;
    std::array<ProjPoint, 2> span;

    std::string key() const {
        std::ostringstream os;
        for (const auto& row : cut)
            for (const auto& c : row) os << c.x.get_str() << ',' << c.y.get_str() << ';';
        return os.str();
    }

    ProjPoint point_at(const FieldCtx& K, const KElem& s, const KElem& t) const {
        ProjPoint p;
        for (int i = 0; i < 5; ++i) p.x[i] = K.kadd(K.kmul(s, span[0].x[i]), K.kmul(t, span[1].x[i]));
        return p;
    }
};

inline bool line_contains(const FieldCtx& K, const Line& L, const ProjPoint& p) {
    for (const auto& row : L.cut) {
        KElem v;
        for (int i = 0; i < 5; ++i) v = K.kadd(v, K.kmul(row[i], p.x[i]));
        if (!v.is_zero()) return false;
    }
    return true;
}

// The three cutting forms of the line through two distinct points: the kernel
// of the 2x5 coordinate matrix, in canonical RREF.
inline std::optional<Line> line_through(const FieldCtx& K, const ProjPoint& p, const ProjPoint& q) {
    // RREF the 2x5 matrix [p; q]
    std::array<std::array<KElem, 5>, 2> m{p.x, q.x};
    int row = 0;
    std::array<int, 2> pivot{-1, -1};
    for (int col = 0; col < 5 && row < 2; ++col) {
        int sel = -1;
        for (int r = row; r < 2; ++r)
            if (!m[r][col].is_zero()) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        std::swap(m[row], m[sel]);
        KElem inv = K.kinv(m[row][col]);
        for (int c2 = 0; c2 < 5; ++c2) m[row][c2] = K.kmul(m[row][c2], inv);
        for (int r = 0; r < 2; ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            KElem f = m[r][col];
            for (int c2 = 0; c2 < 5; ++c2) m[r][c2] = K.ksub(m[r][c2], K.kmul(f, m[row][c2]));
        }
        pivot[row] = col;
        ++row;
    }
    if (row < 2) return std::nullopt;  // points projectively equal
    // kernel basis: for each non-pivot column c, the form x_c - sum_r m[r][c] x_{pivot r}
    Line L;
    int k = 0;
    for (int c = 0; c < 5; ++c) {
        if (c == pivot[0] || c == pivot[1]) continue;
        std::array<KElem, 5> form{};
        form[c] = KElem(1);
        form[pivot[0]] = K.kneg(m[0][c]);
        form[pivot[1]] = K.kneg(m[1][c]);
        L.cut[k++] = form;
    }
    L.span[0].x = m[0];
    L.span[1].x = m[1];
    return L;
}

}  // namespace manin

#pragma once

#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "manin/height.hpp"
#include "manin/lattice.hpp"
#include "manin/qfield.hpp"
#include "manin/surfaces.hpp"

namespace manin {

namespace enum_detail {

// Candidate surface points with a designated coordinate triple enumerated over
// a lattice disk and the remaining coordinates solved from the two quadrics.
// Branches were derived once per surface from the defining equations; the
// union over branches covers every point of S(K) of height <= B.
//
//   S1: triple (x2,x3,x4), x3 != 0: x0 = x2 x4/x3, x1 = -x2^2/(x0+x3).
//       x3 = 0 forces x2 x4 = 0; x2 = 0 gives the loci {x0=x2=x3=0},
//       {x1=x2=x3=0}; x4 = 0 gives the conic x0 x1 + x2^2 = 0 in {x3=x4=0}.
//   S2: triple (x0,x2,x3), x0 != 0: x1 = x2 x3/x0, x4 = -(x1 x2 + x3^2)/x0.
//       x0 = 0 gives {x0=x2=x3=0} and {x0=x1=x3=0}.
//   S3: triple (x1,x2,x3), x1 != 0: x0 = -(x1 x3 + x2^2)/x1, x4 = x0 x3/x1.
//       x1 = 0 gives {x0=x1=x2=0} and {x1=x2=x3=0}.
//   S4: triple (x0,x2,x3), x0 != 0: x1 = x2^2/x0, x4 = -(x3^2 + x1 x2)/x0.
//       x0 = 0 gives {x0=x2=x3=0}.

template <typename Fn>
void scan_candidates(const FieldCtx& K, const SurfaceSpec& S, const Rat& B, Fn&& fn) {
    for (const Ideal& rep : K.class_reps()) {
        Rat bound = B * K.norm(rep);
        std::vector<Elem> disk;
        {
            Lat L = make_lat(K, K.to_frac(rep));
            points_in_disk(L, bound, [&](const Int& s, const Int& t) {
                disk.push_back(Elem(s * rep.a + t * rep.b, t * rep.c));
            });
        }

        // The solved coordinates are cleared to an integral representative of
        // the same projective point before the candidate is emitted; a point
        // survives only if max|x_i| <= B * min|x_i| over the nonzero
        // coordinates, a necessary condition since the content divides each
        // coordinate ideal.
        auto emit = [&](const std::array<Elem, 5>& x) {
            Int mx(0), mn(-1);
            for (const auto& c : x) {
                if (c.is_zero()) continue;
                Int n = K.norm(c);
                if (n > mx) mx = n;
                if (mn < 0 || n < mn) mn = n;
            }
            if (mn < 0) return;  // degenerate clearing, not a projective point
            if (mx > B * Rat(mn)) return;
            ProjPoint p;
            for (int i = 0; i < 5; ++i) p.x[i] = KElem(x[i]);
            fn(p);
        };

        auto pair_scan = [&](int i, int j) {
            // points supported on coordinates i and j
            for (const Elem& s : disk) {
                for (const Elem& t : disk) {
                    if (s.is_zero() && t.is_zero()) continue;
                    std::array<Elem, 5> x{};
                    x[i] = s;
                    x[j] = t;
                    emit(x);
                }
            }
        };

        switch (S.id) {
            case SurfaceId::S1: {
                // x0 = x2 x4 / x3 and x1 = -x2^2/(x0 + x3), scaled by x3 u
                // with u = x2 x4 + x3^2; u = 0 admits no surface point here
                for (const Elem& x2 : disk)
                    for (const Elem& x3 : disk) {
                        if (x3.is_zero()) continue;
                        Elem x2x2 = K.mul(x2, x2), x3x3 = K.mul(x3, x3);
                        for (const Elem& x4 : disk) {
                            Elem x2x4 = K.mul(x2, x4);
                            Elem u = K.add(x2x4, x3x3);
                            if (u.is_zero()) continue;
                            emit({K.mul(x2x4, u), K.neg(K.mul(x2x2, x3x3)), K.mul(K.mul(x2, x3), u),
                                  K.mul(x3x3, u), K.mul(K.mul(x3, x4), u)});
                        }
                    }
                // conic branch {x3 = x4 = 0, x0 x1 = -x2^2}, scaled by x0
                for (const Elem& x0 : disk) {
                    if (x0.is_zero()) continue;
                    for (const Elem& x2 : disk)
                        emit({K.mul(x0, x0), K.neg(K.mul(x2, x2)), K.mul(x0, x2), Elem(), Elem()});
                }
                pair_scan(1, 4);
                pair_scan(0, 4);
                break;
            }
            case SurfaceId::S2: {
                // scaled by x0^2
                for (const Elem& x0 : disk) {
                    if (x0.is_zero()) continue;
                    Elem x00 = K.mul(x0, x0);
                    for (const Elem& x2 : disk)
                        for (const Elem& x3 : disk) {
                            Elem x23 = K.mul(x2, x3);
                            emit({K.mul(x00, x0), K.mul(x0, x23), K.mul(x00, x2), K.mul(x00, x3),
                                  K.neg(K.add(K.mul(x2, x23), K.mul(x0, K.mul(x3, x3))))});
                        }
                }
                pair_scan(1, 4);
                pair_scan(2, 4);
                break;
            }
            case SurfaceId::S3: {
                // scaled by x1^2
                for (const Elem& x1 : disk) {
                    if (x1.is_zero()) continue;
                    Elem x11 = K.mul(x1, x1);
                    for (const Elem& x2 : disk) {
                        Elem x22 = K.mul(x2, x2);
                        for (const Elem& x3 : disk) {
                            Elem v = K.add(K.mul(x1, x3), x22);  // x1 x3 + x2^2
                            emit({K.neg(K.mul(x1, v)), K.mul(x11, x1), K.mul(x11, x2),
                                  K.mul(x11, x3), K.neg(K.mul(x3, v))});
                        }
                    }
                }
                pair_scan(3, 4);
                pair_scan(0, 4);
                break;
            }
            case SurfaceId::S4: {
                // scaled by x0^2
                for (const Elem& x0 : disk) {
                    if (x0.is_zero()) continue;
                    Elem x00 = K.mul(x0, x0);
                    for (const Elem& x2 : disk) {
                        Elem x22 = K.mul(x2, x2);
                        for (const Elem& x3 : disk) {
                            emit({K.mul(x00, x0), K.mul(x0, x22), K.mul(x00, x2), K.mul(x00, x3),
                                  K.neg(K.add(K.mul(x0, K.mul(x3, x3)), K.mul(x2, x22)))});
                        }
                    }
                }
                pair_scan(1, 4);
                break;
            }
            default:
                throw std::domain_error("scan_candidates: unsupported surface");
        }
    }
}

}  // namespace enum_detail

// all points of S(K) with H <= B (lines included), deduplicated
inline std::map<std::string, ProjPoint> surface_points(const FieldCtx& K, const SurfaceSpec& S,
                                                       const Rat& B) {
    std::map<std::string, ProjPoint> out;
    enum_detail::scan_candidates(K, S, B, [&](const ProjPoint& p) {
        if (!on_surface(K, S, p)) throw std::logic_error("solver produced an off-surface point");
        if (weil_height(K, p) > B) return;
        out.emplace(canonical_key(K, p), p);
    });
    return out;
}

// All lines of P^4 defined over K contained in S: collect points of height
// <= H0, join pairs whose polar forms both vanish, deduplicate by cutting
// forms.  Stable under increasing H0 once every line carries enough points.
inline std::vector<Line> find_lines(const FieldCtx& K, const SurfaceSpec& S, const Rat& H0 = Rat(20)) {
    auto pts = surface_points(K, S, H0);
    std::vector<ProjPoint> P;
    std::vector<std::array<Elem, 5>> E;  // denominator-cleared coordinates
    P.reserve(pts.size());
    for (auto& [key, p] : pts) {
        P.push_back(p);
        E.push_back(cleared_coords(p));
    }
    auto polar_int = [&](const Quadric& q, const std::array<Elem, 5>& u,
                         const std::array<Elem, 5>& v) {
        Elem r;
        for (const auto& m : q) {
            Elem t = K.add(K.mul(u[m.i], v[m.j]), K.mul(u[m.j], v[m.i]));
            t.x *= m.coeff;
            t.y *= m.coeff;
            r = K.add(r, t);
        }
        return r;
    };
    std::map<std::string, Line> lines;
    std::vector<Line> found;
    // Every polar-passing pair spans a contained line; when both points
    // already lie on one known line, that joining line is the known one, so
    // the pair can be skipped without recomputing the cutting forms.
    auto on_known = [&](const ProjPoint& p, const ProjPoint& q) {
        for (const Line& L : found)
            if (line_contains(K, L, p) && line_contains(K, L, q)) return true;
        return false;
    };
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (std::size_t j = i + 1; j < P.size(); ++j) {
            if (!polar_int(S.q1, E[i], E[j]).is_zero()) continue;
            if (!polar_int(S.q2, E[i], E[j]).is_zero()) continue;
            if (on_known(P[i], P[j])) continue;
            auto L = line_through(K, P[i], P[j]);
            if (!L) continue;
            // exact containment at three parameter values settles a quadric
            ProjPoint mid = L->point_at(K, KElem(1), KElem(1));
            if (!on_surface(K, S, L->span[0]) || !on_surface(K, S, L->span[1]) ||
                !on_surface(K, S, mid))
                continue;
            if (lines.emplace(L->key(), *L).second) found.push_back(*L);
        }
    }
    std::vector<Line> out;
    for (auto& [key, L] : lines) out.push_back(L);
    return out;
}

// memoized line lists per (surface, field discriminant)
inline const std::vector<Line>& cached_lines(const FieldCtx& K, const SurfaceSpec& S) {
    static std::map<std::pair<int, long>, std::vector<Line>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(static_cast<int>(S.id), K.d().get_si());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, find_lines(K, S)).first;
    return it->second;
}

inline bool in_U(const FieldCtx& K, const SurfaceSpec& S, const ProjPoint& p) {
    if (!on_surface(K, S, p)) throw std::domain_error("in_U: point not on surface");
    for (const Line& L : cached_lines(K, S))
        if (line_contains(K, L, p)) return false;
    return true;
}

enum class DirectMethod { exhaustive, parameterization };

// points of {x in U(K) : H(x) <= B} keyed canonically
inline std::map<std::string, ProjPoint> direct_points(const FieldCtx& K, const SurfaceSpec& S,
                                                      const Rat& B) {
    std::map<std::string, ProjPoint> out;
    const auto& lines = cached_lines(K, S);
    enum_detail::scan_candidates(K, S, B, [&](const ProjPoint& p) {
        if (!on_surface(K, S, p)) throw std::logic_error("solver produced an off-surface point");
        if (weil_height(K, p) > B) return;
        for (const Line& L : lines)
            if (line_contains(K, L, p)) return;
        out.emplace(canonical_key(K, p), p);
    });
    return out;
}

// generator-style cross check; enumerates (y0:y1:y2) through psi with no
// completeness guarantee
inline std::set<std::string> parameterization_keys(const FieldCtx& K, const SurfaceSpec& S,
                                                   const Rat& B, const Rat& yradius) {
    std::set<std::string> out;
    const auto& lines = cached_lines(K, S);
    FracIdeal OK = K.to_frac(Ideal(Int(1), Int(0), Int(1)));
    std::vector<KElem> disk = lattice_points_in_disk(K, OK, yradius);
    for (const KElem& y0 : disk)
        for (const KElem& y1 : disk)
            for (const KElem& y2 : disk) {
                if (y0.is_zero() && y1.is_zero() && y2.is_zero()) continue;
                auto p = psi_eval(K, S, {y0, y1, y2});
                if (!p) continue;
                if (!on_surface(K, S, *p)) throw std::logic_error("psi image off surface");
                if (weil_height(K, *p) > B) continue;
                bool on_line = false;
                for (const Line& L : lines)
                    if (line_contains(K, L, *p)) {
                        on_line = true;
                        break;
                    }
                if (!on_line) out.insert(canonical_key(K, *p));
            }
    return out;
}

inline long long direct_count(const FieldCtx& K, const SurfaceSpec& S, const Rat& B,
                              DirectMethod method = DirectMethod::exhaustive) {
    if (method == DirectMethod::parameterization)
        return static_cast<long long>(parameterization_keys(K, S, B, B).size());
    return static_cast<long long>(direct_points(K, S, B).size());
}

}  // namespace manin

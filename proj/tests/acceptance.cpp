// Acceptance suite: one pass/fail line per criterion, nonzero exit when a
// gating criterion fails.  Criterion 8 is diagnostic and reported only.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "manin/constants.hpp"
#include "manin/enumeration.hpp"
#include "manin/torsor.hpp"

using namespace manin;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail, bool gating = true) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail << "\n";
    std::cout.flush();
    if (!pass && gating) ++failures;
}

struct GridCase {
    SurfaceId id;
    long d;
    long B;
    long long torsor = -1;
    long long direct = -1;
    long long tuple_sum = 0;
    bool covering_ok = false;
};

}  // namespace

int main(int argc, char** argv) {
    int threads = 2;
    for (int i = 1; i < argc; ++i)
        if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) threads = std::atoi(argv[i + 1]);

    const std::vector<SurfaceId> surfaces{SurfaceId::S1, SurfaceId::S2, SurfaceId::S3,
                                          SurfaceId::S4};
    const std::vector<long> fields{-1, -3, -5};
    const std::vector<long> bounds{1, 2, 5, 10, 20};

    // ---- criteria 1-3: exact bijection, divisibility, covering ----
    std::vector<GridCase> grid;
    bool eq_ok = true, div_ok = true, cov_ok = true;
    std::ostringstream eq_detail;
    auto t0 = std::chrono::steady_clock::now();
    for (SurfaceId id : surfaces) {
        for (long d : fields) {
            FieldCtx K((Int(d)));
            const SurfaceSpec& S = get_surface(id);
            long long w6 = 1;
            for (int i = 0; i < 6; ++i) w6 *= K.unit_count();
            for (long B : bounds) {
                GridCase gc{id, d, B};
                auto detail = torsor_count_detail(id, K, Rat(B), threads);
                gc.torsor = detail.count;
                gc.tuple_sum = detail.total;
                auto direct = direct_points(K, S, Rat(B));
                gc.direct = static_cast<long long>(direct.size());
                if (gc.torsor != gc.direct) {
                    eq_ok = false;
                    eq_detail << " [" << surface_name(id) << ",d=" << d << ",B=" << B
                              << ": torsor=" << gc.torsor << " direct=" << gc.direct << "]";
                }
                div_ok = div_ok && (gc.tuple_sum % w6 == 0);
                auto ms = torsor_image_multiset(id, K, Rat(B));
                bool cov = static_cast<long long>(ms.size()) == gc.direct;
                for (auto& [key, mult] : ms) cov = cov && (mult == w6);
                for (auto& [key, p] : direct) cov = cov && (ms.count(key) == 1);
                cov_ok = cov_ok && cov;
                gc.covering_ok = cov;
                grid.push_back(gc);
            }
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    {
        std::ostringstream os;
        os << "torsor_count == direct_count on all " << grid.size() << " grid cases ("
           << std::chrono::duration<double>(t1 - t0).count() << " s)" << eq_detail.str();
        report(1, eq_ok, os.str());
    }
    report(2, div_ok, "sum over class tuples of |M_C(B)| divisible by omega_K^6 in every case");
    report(3, cov_ok, "Psi images cover each U(K) point of height <= B exactly omega_K^6 times");

    // ---- criterion 4: alpha anchors ----
    {
        bool ok = alpha_exact(SurfaceId::S3) == make_rat(Int(1), Int(34560)) &&
                  alpha_exact(SurfaceId::S4) == make_rat(Int(1), Int(345600));
        auto a1 = alpha_monte_carlo(SurfaceId::S1, 10000000, 424242);
        auto a2 = alpha_monte_carlo(SurfaceId::S2, 10000000, 424243);
        double r1 = std::abs(a1.value - 1.0 / 8640) * 8640;
        double r2 = std::abs(a2.value - 1.0 / 21600) * 21600;
        ok = ok && r1 < 0.02 && r2 < 0.02;
        ok = ok && std::abs(a1.value - 1.0 / 8640) < 5 * a1.stderr_;
        ok = ok && std::abs(a2.value - 1.0 / 21600) < 5 * a2.stderr_;
        std::ostringstream os;
        os << "alpha: exact 1/34560, 1/345600; MC rel.err S1=" << r1 << " S2=" << r2
           << " at 1e7 samples";
        report(4, ok, os.str());
    }

    // ---- criterion 5: theta0 convergence and tail bounds ----
    {
        bool ok = true;
        std::ostringstream os;
        os << "theta0 drift |P=1e5 vs 2e5|:";
        for (long d : {-1L, -2L, -3L, -7L, -11L}) {
            FieldCtx K((Int(d)));
            auto a = theta0(K, Int(100000));
            auto b = theta0(K, Int(200000));
            double drift = std::abs(a.value - b.value);
            ok = ok && drift < 1e-5 && a.tail_bound > drift;
            os << " d=" << d << ":" << drift;
        }
        report(5, ok, os.str());
    }

    // ---- criterion 6: omega_infinity self-consistency ----
    {
        bool ok = true;
        std::ostringstream os;
        os << "omega_inf two-seed/3sigma and error-halving:";
        for (SurfaceId id : surfaces) {
            auto a = omega_infinity(id, 10000000, 1001, threads);
            auto b = omega_infinity(id, 10000000, 2002, threads);
            double sig = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
            bool agree = std::abs(a.value - b.value) < 3 * sig;
            auto c4 = omega_infinity(id, 40000000, 1001, threads);
            double halving = c4.stderr_ / a.stderr_;
            bool halves = std::abs(halving - 0.5) < 0.5 * 0.2;
            ok = ok && agree && halves && a.value > 0;
            os << " " << surface_name(id) << "=(" << a.value << "+-" << a.stderr_
               << ",halve=" << halving << (agree ? "" : ",DISAGREE") << (halves ? "" : ",NOHALVE")
               << ")";
        }
        report(6, ok, os.str());
    }

    // ---- criterion 7: height properties ----
    {
        std::mt19937 g(777);
        std::uniform_int_distribution<long> dist(-9, 9);
        bool ok = true;
        long done = 0;
        for (long d : {-1L, -3L, -5L}) {
            FieldCtx K((Int(d)));
            while (done < (d == -5L ? 10000L : (d == -1L ? 3333L : 6666L))) {
                ProjPoint p;
                bool nz = false;
                for (int i = 0; i < 5; ++i) {
                    p.x[i] = KElem(make_rat(Int(dist(g)), Int(1 + std::abs(dist(g)))), Rat(dist(g)));
                    nz = nz || !p.x[i].is_zero();
                }
                KElem lam(make_rat(Int(dist(g)), Int(1 + std::abs(dist(g)))), Rat(dist(g)));
                if (!nz || lam.is_zero()) continue;
                ProjPoint q;
                for (int i = 0; i < 5; ++i) q.x[i] = K.kmul(lam, p.x[i]);
                ok = ok && weil_height(K, p) == weil_height(K, q) && weil_height(K, p) >= 1;
                ++done;
            }
        }
        // H >= 1 on enumerated points, checked on a sample of the grid
        FieldCtx K(Int(-1));
        for (auto& [key, p] : direct_points(K, get_surface(SurfaceId::S2), Rat(10)))
            ok = ok && weil_height(K, p) >= 1;
        report(7, ok, "10^4 randomized scaling-invariance checks, H >= 1 throughout");
    }

    // ---- criterion 8 (non-gating): growth diagnostic for S4 over Q(i) ----
    {
        FieldCtx K(Int(-1));
        auto rep = constant_report(SurfaceId::S4, K, Int(100000), 10000000, 31337, threads);
        std::ostringstream os;
        os << "S4/Q(i) growth: c=" << rep.c;
        bool ok = true;
        for (long B : {1000L, 10000L, 100000L}) {
            auto t0c = std::chrono::steady_clock::now();
            long long n = torsor_count(SurfaceId::S4, K, Rat(B), threads);
            auto t1c = std::chrono::steady_clock::now();
            double Bd = static_cast<double>(B);
            double ratio = n / (Bd * std::pow(std::log(Bd), 5));
            os << " [B=1e" << static_cast<int>(std::log10(Bd)) << " N=" << n << " ratio=" << ratio
               << " (" << std::chrono::duration<double>(t1c - t0c).count() << " s)]";
            bool sane = std::isfinite(ratio) && ratio > 0;
            if (B == 100000) sane = sane && ratio < 10 * rep.c && ratio > rep.c / 10;
            ok = ok && sane;
        }
        report(8, ok, os.str(), /*gating=*/false);
    }

    // ---- criterion 9: line oracle saturation ----
    {
        bool ok = true;
        std::ostringstream os;
        os << "line counts at H0=20 vs 40:";
        FieldCtx K(Int(-1));
        for (SurfaceId id : surfaces) {
            const SurfaceSpec& S = get_surface(id);
            auto l20 = find_lines(K, S, Rat(20));
            auto l40 = find_lines(K, S, Rat(40));
            bool same = l20.size() == l40.size();
            if (same)
                for (std::size_t i = 0; i < l20.size(); ++i)
                    same = same && l20[i].key() == l40[i].key();
            for (const Line& L : l20) {
                same = same && on_surface(K, S, L.span[0]) && on_surface(K, S, L.span[1]) &&
                       on_surface(K, S, L.point_at(K, KElem(1), KElem(1)));
            }
            ok = ok && same;
            os << " " << surface_name(id) << "=" << l20.size();
        }
        report(9, ok, os.str());
    }

    std::cout << (failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " (" << failures
              << " gating failures)\n";
    return failures == 0 ? 0 : 1;
}

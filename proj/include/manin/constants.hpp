#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

#include "manin/qfield.hpp"
#include "manin/rng.hpp"
#include "manin/surfaces.hpp"

namespace manin {

// ---- alpha: volume of the log-substituted height-condition polytope ----
//
// Substituting |eta_j| = B^{t_j} in the alpha integral turns it into the
// volume of { t >= 0 : A t <= 1 } in the five coordinates (t1,t2,t4,t5,t6),
// divided by 3.  For a single row the volume is 1/(5! * prod coeffs).

struct AlphaPolytope {
    std::vector<std::array<int, 5>> rows;  // each row: <coeffs, t> <= 1
};

inline const AlphaPolytope& alpha_polytope_data(SurfaceId id) {
    static const AlphaPolytope s1{{{2, 2, 2, 0, 1}, {-1, -1, 2, 6, 4}}};
    static const AlphaPolytope s2{{{2, 4, 2, 3, 1}, {-1, -2, 2, -3, 4}}};
    static const AlphaPolytope s3{{{4, 2, 3, 2, 2}}};
    static const AlphaPolytope s4{{{6, 5, 4, 2, 4}}};
    switch (id) {
        case SurfaceId::S1: return s1;
        case SurfaceId::S2: return s2;
        case SurfaceId::S3: return s3;
        case SurfaceId::S4: return s4;
        default: throw std::domain_error("alpha_polytope: unsupported surface");
    }
}

inline Rat alpha_exact(SurfaceId id) {
    const AlphaPolytope& P = alpha_polytope_data(id);
    if (P.rows.size() != 1)
        throw std::domain_error("alpha_exact: only single-inequality polytopes (S3, S4)");
    Int denom(120);  // 5!
    for (int c : P.rows[0]) denom *= c;
    return make_rat(Int(1), denom * 3);
}

struct McEstimate {
    double value{0};
    double stderr_{0};
    std::uint64_t samples{0};
    std::uint64_t seed{0};
};

// per-coordinate caps on t_j implied by the rows (using earlier caps for
// rows with negative coefficients)
inline std::array<double, 5> alpha_box(const AlphaPolytope& P) {
    std::array<double, 5> cap;
    cap.fill(-1);
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& row : P.rows) {
            for (int i = 0; i < 5; ++i) {
                if (row[i] <= 0) continue;
                double slack = 1;
                bool ok = true;
                for (int k = 0; k < 5; ++k) {
                    if (k == i || row[k] >= 0) continue;
                    if (cap[k] < 0) {
                        ok = false;
                        break;
                    }
                    slack += -row[k] * cap[k];
                }
                if (!ok) continue;
                double c = slack / row[i];
                if (cap[i] < 0 || c < cap[i]) cap[i] = c;
            }
        }
    }
    for (double c : cap)
        if (c < 0) throw std::logic_error("alpha_box: polytope not boxable");
    return cap;
}

inline McEstimate alpha_monte_carlo(SurfaceId id, std::uint64_t samples, std::uint64_t seed) {
    if (samples < 10000) throw std::domain_error("alpha_monte_carlo: too few samples");
    const AlphaPolytope& P = alpha_polytope_data(id);
    auto cap = alpha_box(P);
    double boxvol = 1;
    for (double c : cap) boxvol *= c;
    CounterRng rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double t[5];
        for (int k = 0; k < 5; ++k) t[k] = rng.uniform(i * 5 + k) * cap[k];
        bool in = true;
        for (const auto& row : P.rows) {
            double v = 0;
            for (int k = 0; k < 5; ++k) v += row[k] * t[k];
            if (v > 1) {
                in = false;
                break;
            }
        }
        if (in) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    McEstimate est;
    est.value = boxvol * p / 3.0;
    est.stderr_ = boxvol * std::sqrt(p * (1 - p) / static_cast<double>(samples)) / 3.0;
    est.samples = samples;
    est.seed = seed;
    return est;
}

// ---- theta0: Euler product over prime ideals ----

struct Theta0Result {
    double value{0};
    double tail_bound{0};  // bound on |theta0(P) - theta0(infinity)|
    Int prime_bound;
};

// theta0 = prod_p (1 - 1/Np)^6 (1 + 6/Np + 1/Np^2) over prime ideals of norm <= P.
// The local factor is 1 - 20/Np^2 + O(Np^-3); |log factor| <= 21/Np^2 for
// Np >= 60, which gives the reported truncation bound.
inline Theta0Result theta0(const FieldCtx& K, const Int& P) {
    if (P < 2) throw std::domain_error("theta0: P >= 2 required");
    long double prod = 1.0L;
    unsigned long pl = 2;
    long double Pd = static_cast<long double>(P.get_d());
    for (Int p = 2; p <= P; mpz_nextprime(p.get_mpz_t(), p.get_mpz_t())) {
        pl = p.get_ui();
        int chi = mpz_kronecker(K.disc().get_mpz_t(), p.get_mpz_t());
        long double np = static_cast<long double>(pl);
        auto factor = [](long double n) {
            long double x = 1.0L / n;
            long double f = 1.0L - x;
            f = f * f * f;
            f = f * f;  // (1-x)^6
            return f * (1.0L + 6.0L * x + x * x);
        };
        if (chi == 1) {
            long double f = factor(np);
            prod *= f * f;
        } else if (chi == 0) {
            prod *= factor(np);
        } else {
            long double n2 = np * np;
            if (n2 <= Pd) prod *= factor(n2);
        }
    }
    // |log f(1/n)| <= 21/n^2 once n >= 60; below that the product is explicit.
    // Sum over the tail, overcounting every rational prime p as two ideals of
    // norm p and one of norm p^2:
    //   sum_{Np > P} Np^-2  <=  2 * sum_{n > P} n^-2 + sum_{n > sqrt(P)} n^-4
    //                       <=  2/P + 1/(3 (floor(sqrt(P)) - 1)^3).
    double Pdd = P.get_d();
    double sq = std::floor(std::sqrt(Pdd));
    double logtail = 21.0 * (2.0 / Pdd + 1.0 / (3.0 * std::pow(std::max(sq - 1.0, 1.0), 3)));
    Theta0Result r;
    r.value = static_cast<double>(prod);
    r.tail_bound = r.value * std::expm1(logtail);
    r.prime_bound = P;
    return r;
}

// ---- omega_infinity: archimedean density ----

// (12/pi) * vol{ z in C^3 : all five squared-modulus psi forms <= 1 }, by
// Monte Carlo over the unit polydisk through the per-coordinate map
// w -> w/(1-|w|), whose area Jacobian is (1-|w|)^-3.
inline McEstimate omega_infinity(SurfaceId id, std::uint64_t samples, std::uint64_t seed,
                                 int threads = 1) {
    if (samples < 100000) throw std::domain_error("omega_infinity: too few samples");
    const SurfaceSpec& S = get_surface(id);
    if (S.psi[0].empty()) throw std::domain_error("omega_infinity: unsupported surface");
    CounterRng rng(seed);
    const double pi = 3.14159265358979323846;

    auto region = [&](const std::complex<double> z[3]) {
        for (int i = 0; i < 5; ++i) {
            std::complex<double> v(0, 0);
            for (const auto& m : S.psi[i]) {
                std::complex<double> t(static_cast<double>(m.coeff), 0);
                for (int k = 0; k < m.e0; ++k) t *= z[0];
                for (int k = 0; k < m.e1; ++k) t *= z[1];
                for (int k = 0; k < m.e2; ++k) t *= z[2];
                v += t;
            }
            if (std::norm(v) > 1.0) return false;
        }
        return true;
    };

    // fixed-size chunks keep the summation order independent of thread count
    const std::uint64_t chunk = 1 << 18;
    std::uint64_t nchunks = (samples + chunk - 1) / chunk;
    std::vector<long double> sums(nchunks, 0.0L), sqs(nchunks, 0.0L);
    auto do_chunk = [&](std::uint64_t ci) {
        std::uint64_t lo = ci * chunk, hi = std::min(samples, lo + chunk);
        long double s = 0.0L, s2 = 0.0L;
        for (std::uint64_t i = lo; i < hi; ++i) {
            std::complex<double> z[3];
            double jac = 1;
            for (int k = 0; k < 3; ++k) {
                double u = rng.uniform(i * 6 + 2 * k);
                double th = rng.uniform(i * 6 + 2 * k + 1);
                double r = std::sqrt(u);  // uniform on the unit disk
                double inv = 1.0 / (1.0 - r);
                double rho = r * inv;
                z[k] = std::polar(rho, 2 * pi * th);
                jac *= inv * inv * inv;
            }
            if (region(z)) {
                s += static_cast<long double>(jac);
                s2 += static_cast<long double>(jac) * jac;
            }
        }
        sums[ci] = s;
        sqs[ci] = s2;
    };
    if (threads <= 1) {
        for (std::uint64_t ci = 0; ci < nchunks; ++ci) do_chunk(ci);
    } else {
        std::atomic<std::uint64_t> next{0};
        auto worker = [&]() {
            while (true) {
                std::uint64_t ci = next.fetch_add(1);
                if (ci >= nchunks) break;
                do_chunk(ci);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    long double sum = 0.0L, sq = 0.0L;
    for (std::uint64_t ci = 0; ci < nchunks; ++ci) {
        sum += sums[ci];
        sq += sqs[ci];
    }
    long double n = static_cast<long double>(samples);
    long double box = pi * pi * pi;  // volume of the unit polydisk
    long double mean = sum / n;
    long double var = sq / n - mean * mean;
    McEstimate est;
    double scale = static_cast<double>(box) * 12.0 / pi;
    est.value = static_cast<double>(mean) * scale;
    est.stderr_ = std::sqrt(std::max(0.0, static_cast<double>(var / n))) * scale;
    est.samples = samples;
    est.seed = seed;
    return est;
}

// ---- Peyre constant ----

struct ConstantReport {
    double alpha{0};
    double alpha_stderr{0};
    Theta0Result theta0;
    McEstimate omega_inf;
    double c{0};
};

inline double peyre_constant(const FieldCtx& K, double alpha, double theta0_value,
                             double omega_inf) {
    if (alpha <= 0 || theta0_value <= 0 || omega_inf <= 0)
        throw std::domain_error("peyre_constant: inputs must be positive");
    const double pi = 3.14159265358979323846;
    double h = static_cast<double>(K.class_number());
    double disc = std::abs(K.disc().get_d());
    double w = K.unit_count();
    return alpha * std::pow(2 * pi, 6) * std::pow(h, 6) / (std::pow(disc, 4) * std::pow(w, 6)) *
           theta0_value * omega_inf;
}

inline double predicted_N(double c, double B) { return c * B * std::pow(std::log(B), 5); }

inline ConstantReport constant_report(SurfaceId id, const FieldCtx& K, const Int& prime_bound,
                                      std::uint64_t samples, std::uint64_t seed, int threads = 1) {
    ConstantReport r;
    const AlphaPolytope& P = alpha_polytope_data(id);
    if (P.rows.size() == 1) {
        r.alpha = Rat(alpha_exact(id)).get_d();
        r.alpha_stderr = 0;
    } else {
        auto est = alpha_monte_carlo(id, std::max<std::uint64_t>(samples, 10000), seed);
        r.alpha = est.value;
        r.alpha_stderr = est.stderr_;
    }
    r.theta0 = theta0(K, prime_bound);
    r.omega_inf = omega_infinity(id, samples, seed, threads);
    r.c = peyre_constant(K, r.alpha, r.theta0.value, r.omega_inf.value);
    return r;
}

}  // namespace manin

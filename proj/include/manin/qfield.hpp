#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "manin/arith.hpp"

namespace manin {

// Integral element x + y*omega, where omega = sqrt(d) for d != 1 mod 4 and
// omega = (1+sqrt(d))/2 for d = 1 mod 4.
struct Elem {
    Int x{0}, y{0};

    Elem() = default;
    Elem(Int xx, Int yy) : x(std::move(xx)), y(std::move(yy)) {}
    explicit Elem(long v) : x(v), y(0) {}

    bool is_zero() const { return x == 0 && y == 0; }
    bool operator==(const Elem& o) const { return x == o.x && y == o.y; }
};

// Field element with rational coordinates in the same omega basis.
struct KElem {
    Rat x{0}, y{0};

    KElem() = default;
    KElem(Rat xx, Rat yy) : x(std::move(xx)), y(std::move(yy)) {}
    explicit KElem(const Elem& e) : x(e.x), y(e.y) {}
    explicit KElem(long v) : x(v), y(0) {}

    bool is_zero() const { return x == 0 && y == 0; }
    bool operator==(const KElem& o) const { return x == o.x && y == o.y; }
};

// Nonzero integral ideal in Hermite normal form: the lattice a*Z + (b+c*omega)*Z
// with c | a, c | b, 0 <= b < a.  Two ideals are equal iff their triples are.
// The zero ideal is flagged.
struct Ideal {
    bool zero{true};
    Int a{0}, b{0}, c{0};

    Ideal() = default;
    Ideal(Int aa, Int bb, Int cc) : zero(false), a(std::move(aa)), b(std::move(bb)), c(std::move(cc)) {}

    static Ideal zero_ideal() { return Ideal(); }
    bool is_unit() const { return !zero && a == 1 && b == 0 && c == 1; }
    bool operator==(const Ideal& o) const {
        if (zero || o.zero) return zero == o.zero;
        return a == o.a && b == o.b && c == o.c;
    }
    bool operator<(const Ideal& o) const {
        return std::tie(zero, a, b, c) < std::tie(o.zero, o.a, o.b, o.c);
    }
};

// num/den in lowest terms (den minimal positive).
struct FracIdeal {
    Ideal num;
    Int den{1};

    FracIdeal() = default;
    FracIdeal(Ideal n, Int d) : num(std::move(n)), den(std::move(d)) {}

    bool is_zero() const { return num.zero; }
    bool operator==(const FracIdeal& o) const { return num == o.num && den == o.den; }
};

enum class SplitType { split, inert, ramified };

struct PrimeIdeal {
    Ideal id;
    Int p;
    Int norm;
    SplitType type;
};

// Arithmetic context for an imaginary quadratic field K = Q(sqrt(d)),
// d < 0 squarefree, |disc| <= 1000.  Immutable after construction; all
// operations are pure functions of their arguments.
class FieldCtx {
  public:
    explicit FieldCtx(const Int& d) : d_(d) {
        if (d >= 0) throw std::domain_error("FieldCtx: d must be negative");
        if (!is_squarefree(d)) throw std::domain_error("FieldCtx: d must be squarefree");
        one_mod4_ = ((d_ % 4) + 4) % 4 == 1;
        disc_ = one_mod4_ ? d_ : 4 * d_;
        if (disc_ < -1000) throw std::domain_error("FieldCtx: |disc| > 1000 unsupported");
        omega_trace_ = one_mod4_ ? 1 : 0;
        omega_norm_ = one_mod4_ ? Int((1 - d_) / 4) : Int(-d_);
        omega_ = (d_ == -1) ? 4 : (d_ == -3) ? 6 : 2;
        build_class_reps();
    }

    const Int& d() const { return d_; }
    const Int& disc() const { return disc_; }
    int unit_count() const { return omega_; }
    const std::vector<Ideal>& class_reps() const { return class_reps_; }
    std::size_t class_number() const { return class_reps_.size(); }
    // omega satisfies x^2 - t*x + n = 0
    const Int& omega_trace() const { return omega_trace_; }
    const Int& omega_norm() const { return omega_norm_; }

    // ---- element arithmetic ----

    Elem add(const Elem& u, const Elem& v) const { return {u.x + v.x, u.y + v.y}; }
    Elem sub(const Elem& u, const Elem& v) const { return {u.x - v.x, u.y - v.y}; }
    Elem neg(const Elem& u) const { return {-u.x, -u.y}; }
    Elem mul(const Elem& u, const Elem& v) const {
        // omega^2 = t*omega - n
        Int yy = u.y * v.y;
        return {u.x * v.x - omega_norm_ * yy, u.x * v.y + u.y * v.x + omega_trace_ * yy};
    }
    Elem conj(const Elem& u) const { return {u.x + omega_trace_ * u.y, -u.y}; }
    // squared complex modulus, a nonnegative integer
    Int norm(const Elem& u) const { return u.x * u.x + omega_trace_ * u.x * u.y + omega_norm_ * u.y * u.y; }

    KElem kadd(const KElem& u, const KElem& v) const { return {u.x + v.x, u.y + v.y}; }
    KElem ksub(const KElem& u, const KElem& v) const { return {u.x - v.x, u.y - v.y}; }
    KElem kneg(const KElem& u) const { return {-u.x, -u.y}; }
    KElem kmul(const KElem& u, const KElem& v) const {
        Rat yy = u.y * v.y;
        return {u.x * v.x - omega_norm_ * yy, u.x * v.y + u.y * v.x + omega_trace_ * yy};
    }
    KElem kconj(const KElem& u) const { return {u.x + omega_trace_ * u.y, -u.y}; }
    Rat knorm(const KElem& u) const { return u.x * u.x + omega_trace_ * u.x * u.y + omega_norm_ * u.y * u.y; }
    KElem kinv(const KElem& u) const {
        Rat n = knorm(u);
        if (n == 0) throw std::domain_error("kinv: zero element");
        KElem c = kconj(u);
        return {c.x / n, c.y / n};
    }
    KElem kdiv(const KElem& u, const KElem& v) const { return kmul(u, kinv(v)); }
    KElem kscale(const KElem& u, const Rat& s) const { return {u.x * s, u.y * s}; }

    // ---- integral ideals ----

    Int norm(const Ideal& I) const {
        if (I.zero) return Int(0);
        return I.a * I.c;
    }

    bool contains(const Ideal& I, const Elem& e) const {
        if (I.zero) return e.is_zero();
        if (!mpz_divisible_p(e.y.get_mpz_t(), I.c.get_mpz_t())) return false;
        Int t = e.x - (e.y / I.c) * I.b;
        return mpz_divisible_p(t.get_mpz_t(), I.a.get_mpz_t());
    }

    // HNF of the O_K-module spanned by the given elements; order-independent.
    Ideal ideal_from_generators(const std::vector<Elem>& gens) const {
        std::vector<Elem> zgens;
        zgens.reserve(gens.size() * 2);
        Elem om(Int(0), Int(1));
        for (const Elem& g : gens) {
            if (g.is_zero()) continue;
            zgens.push_back(g);
            zgens.push_back(mul(g, om));
        }
        return hnf_from_zgens(zgens);
    }

    Ideal principal_ideal(const Elem& e) const { return ideal_from_generators({e}); }

    Ideal mul(const Ideal& I, const Ideal& J) const {
        if (I.zero || J.zero) return Ideal::zero_ideal();
        Elem g1(I.a, Int(0)), g2(I.b, I.c), h1(J.a, Int(0)), h2(J.b, J.c);
        return ideal_from_generators({mul(g1, h1), mul(g1, h2), mul(g2, h1), mul(g2, h2)});
    }

    Ideal conj(const Ideal& I) const {
        if (I.zero) return I;
        return ideal_from_generators({Elem(I.a, Int(0)), conj(Elem(I.b, I.c))});
    }

    Ideal add(const Ideal& I, const Ideal& J) const {
        if (I.zero) return J;
        if (J.zero) return I;
        std::vector<Elem> z{Elem(I.a, Int(0)), Elem(I.b, I.c), Elem(J.a, Int(0)), Elem(J.b, J.c)};
        return hnf_from_zgens(z);
    }

    Ideal scale(const Ideal& I, const Int& m) const {
        if (I.zero || m == 0) return Ideal::zero_ideal();
        Int am = abs(m);
        return Ideal(I.a * am, I.b * am, I.c * am);
    }

    // ---- fractional ideals ----

    FracIdeal to_frac(const Ideal& I) const { return canonical_frac(I, Int(1)); }

    FracIdeal canonical_frac(Ideal I, Int den) const {
        if (I.zero) return FracIdeal(Ideal::zero_ideal(), Int(1));
        if (den < 0) den = -den;
        if (den == 0) throw std::domain_error("canonical_frac: zero denominator");
        Int content = gcd(gcd(I.a, I.b), I.c);
        Int g = gcd(content, den);
        if (g > 1) {
            I.a /= g;
            I.b /= g;
            I.c /= g;
            den /= g;
        }
        return FracIdeal(std::move(I), std::move(den));
    }

    FracIdeal principal_frac(const KElem& v) const {
        Int den = lcm(v.x.get_den(), v.y.get_den());
        Elem e(v.x.get_num() * (den / v.x.get_den()), v.y.get_num() * (den / v.y.get_den()));
        return canonical_frac(principal_ideal(e), den);
    }

    Rat norm(const FracIdeal& F) const { return make_rat(norm(F.num), F.den * F.den); }

    FracIdeal fmul(const FracIdeal& F, const FracIdeal& G) const {
        return canonical_frac(mul(F.num, G.num), F.den * G.den);
    }

    FracIdeal finv(const FracIdeal& F) const {
        if (F.is_zero()) throw std::domain_error("finv: zero ideal");
        // I * conj(I) = N(I) O_K
        return canonical_frac(scale(conj(F.num), F.den), norm(F.num));
    }

    FracIdeal fadd(const FracIdeal& F, const FracIdeal& G) const {
        if (F.is_zero()) return G;
        if (G.is_zero()) return F;
        Int den = lcm(F.den, G.den);
        Int mf = den / F.den, mg = den / G.den;
        Ideal A = scale(F.num, mf), B = scale(G.num, mg);
        std::vector<Elem> z{Elem(A.a, Int(0)), Elem(A.b, A.c), Elem(B.a, Int(0)), Elem(B.b, B.c)};
        return canonical_frac(hnf_from_zgens(z), den);
    }

    FracIdeal fpow(const FracIdeal& F, long e) const {
        FracIdeal r = to_frac(Ideal(Int(1), Int(0), Int(1)));
        FracIdeal base = e < 0 ? finv(F) : F;
        for (long k = 0; k < (e < 0 ? -e : e); ++k) r = fmul(r, base);
        return r;
    }

    bool fcontains(const FracIdeal& F, const KElem& v) const {
        if (F.is_zero()) return v.is_zero();
        Rat sx = v.x * F.den, sy = v.y * F.den;
        if (sx.get_den() != 1 || sy.get_den() != 1) return false;
        return contains(F.num, Elem(sx.get_num(), sy.get_num()));
    }

    bool integral(const FracIdeal& F) const { return F.is_zero() || F.den == 1; }

    // ---- short vectors, principality, classes ----

    // Gauss-reduced shortest nonzero vector; returns (element, its norm).
    std::pair<KElem, Rat> min_element(const FracIdeal& F) const {
        if (F.is_zero()) throw std::domain_error("min_element: zero ideal");
        // basis u = (a,0), v = (b,c) in coordinates; form N(s*u + t*v)
        Int q11 = F.num.a * F.num.a;
        Int q12 = 2 * F.num.a * F.num.b + omega_trace_ * F.num.a * F.num.c;
        Int q22 = F.num.b * F.num.b + omega_trace_ * F.num.b * F.num.c + omega_norm_ * F.num.c * F.num.c;
        // integer vectors in basis coords
        Int us = 1, ut = 0, vs = 0, vt = 1;
        auto Q = [&](const Int& s, const Int& t) -> Int { return q11 * s * s + q12 * s * t + q22 * t * t; };
        Int qu = Q(us, ut), qv = Q(vs, vt);
        if (qu > qv) {
            std::swap(us, vs);
            std::swap(ut, vt);
            std::swap(qu, qv);
        }
        while (true) {
            // 2*B(u,v) = Q(u+v) - Q(u) - Q(v)
            Int tb = Q(us + vs, ut + vt) - qu - qv;
            // nearest integer to tb / (2*qu)
            Int m = floor_div(tb + qu, 2 * qu);
            vs -= m * us;
            vt -= m * ut;
            qv = Q(vs, vt);
            if (qv < qu) {
                std::swap(us, vs);
                std::swap(ut, vt);
                std::swap(qu, qv);
            } else {
                break;
            }
        }
        Elem e(us * F.num.a + vs * F.num.b, vs * F.num.c);
        KElem k(make_rat(e.x, F.den), make_rat(e.y, F.den));
        return {k, make_rat(qu, F.den * F.den)};
    }

    Rat min_norm(const FracIdeal& F) const { return min_element(F).second; }

    // I principal iff its shortest vector mu has N(mu) = N(I).
    bool is_principal(const Ideal& I) const {
        if (I.zero) throw std::domain_error("is_principal: zero ideal");
        return min_norm(to_frac(I)) == Rat(norm(I));
    }

    bool is_principal(const FracIdeal& F) const {
        if (F.is_zero()) throw std::domain_error("is_principal: zero ideal");
        return is_principal(F.num);
    }

    // index of the unique class representative equivalent to F
    std::size_t class_index(const FracIdeal& F) const {
        if (F.is_zero()) throw std::domain_error("class_index: zero ideal");
        for (std::size_t i = 0; i < class_reps_.size(); ++i) {
            if (is_principal(mul(F.num, conj(class_reps_[i])))) return i;
        }
        throw std::logic_error("class_index: no representative matched");
    }

    // ---- prime ideals ----

    std::vector<PrimeIdeal> primes_above(const Int& p) const {
        std::vector<PrimeIdeal> out;
        // roots of x^2 - t*x + n mod p
        std::vector<Int> roots = minpoly_roots_mod_p(p);
        bool ramified = mpz_divisible_p(disc_.get_mpz_t(), p.get_mpz_t());
        if (roots.empty()) {
            out.push_back({Ideal(p, Int(0), p), p, p * p, SplitType::inert});
        } else if (ramified) {
            Int b = ((-roots[0]) % p + p) % p;
            out.push_back({Ideal(p, b, Int(1)), p, p, SplitType::ramified});
        } else {
            for (const Int& r : roots) {
                Int b = ((-r) % p + p) % p;
                out.push_back({Ideal(p, b, Int(1)), p, p, SplitType::split});
            }
        }
        return out;
    }

    // all prime ideals of norm <= P, sorted by (norm, HNF)
    std::vector<PrimeIdeal> primes_up_to(const Int& P) const {
        std::vector<PrimeIdeal> out;
        if (P < 2) return out;
        for (Int p = 2; p <= P; mpz_nextprime(p.get_mpz_t(), p.get_mpz_t())) {
            for (auto& pi : primes_above(p)) {
                if (pi.norm <= P) out.push_back(pi);
            }
        }
        std::sort(out.begin(), out.end(), [](const PrimeIdeal& u, const PrimeIdeal& v) {
            if (u.norm != v.norm) return u.norm < v.norm;
            return u.id < v.id;
        });
        return out;
    }

    std::vector<std::pair<PrimeIdeal, int>> factor_ideal(const Ideal& I) const {
        if (I.zero) throw std::domain_error("factor_ideal: zero ideal");
        std::vector<std::pair<PrimeIdeal, int>> out;
        Int n = norm(I);
        for (Int p = 2; n > 1; mpz_nextprime(p.get_mpz_t(), p.get_mpz_t())) {
            if (!mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) continue;
            for (auto& pi : primes_above(p)) {
                FracIdeal pinv = finv(to_frac(pi.id));
                int v = 0;
                FracIdeal cur = to_frac(I);
                while (true) {
                    FracIdeal next = fmul(cur, pinv);
                    if (!integral(next)) break;
                    cur = next;
                    ++v;
                }
                if (v > 0) {
                    out.push_back({pi, v});
                    for (int k = 0; k < v; ++k) n /= pi.norm;
                }
            }
        }
        return out;
    }

  private:
    Int d_, disc_;
    bool one_mod4_{false};
    int omega_{2};
    Int omega_trace_, omega_norm_;
    std::vector<Ideal> class_reps_;

    static bool is_squarefree(const Int& d) {
        Int n = -d;
        for (Int f = 2; f * f <= n; ++f) {
            if (mpz_divisible_p(n.get_mpz_t(), f.get_mpz_t())) {
                Int m = n / f;
                if (mpz_divisible_p(m.get_mpz_t(), f.get_mpz_t())) return false;
            }
        }
        return true;
    }

    // HNF of the lattice spanned by arbitrary Z-generators (x_i, y_i); the
    // span must be an O_K-module (callers include omega-multiples).
    Ideal hnf_from_zgens(const std::vector<Elem>& zgens) const {
        Int a(0), bx(0), c(0);
        for (const Elem& g : zgens) {
            if (g.is_zero()) continue;
            if (g.y == 0) {
                a = gcd(a, g.x);
                continue;
            }
            if (c == 0) {
                bx = g.x;
                c = g.y;
                continue;
            }
            Int gg, s, t;
            mpz_gcdext(gg.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), c.get_mpz_t(), g.y.get_mpz_t());
            Int nbx = s * bx + t * g.x;
            // eliminated combination has zero omega-part
            Int leftover = (c / gg) * g.x - (g.y / gg) * bx;
            a = gcd(a, leftover);
            bx = nbx;
            c = gg;
        }
        if (c == 0) {
            return Ideal::zero_ideal();
        }
        if (c < 0) {
            c = -c;
            bx = -bx;
        }
        if (a == 0) throw std::logic_error("hnf: rank-1 lattice is not an ideal");
        if (a < 0) a = -a;
        Int b = ((bx % a) + a) % a;
        return Ideal(a, b, c);
    }

    std::vector<Int> minpoly_roots_mod_p(const Int& p) const {
        // x^2 - t*x + n mod p
        std::vector<Int> roots;
        if (p == 2) {
            for (Int r = 0; r <= 1; ++r) {
                Int v = ((r * r - omega_trace_ * r + omega_norm_) % 2 + 2) % 2;
                if (v == 0) roots.push_back(r);
            }
            return roots;
        }
        Int dm = ((disc_ % p) + p) % p;
        if (dm == 0) {
            // double root t/2 mod p
            Int inv2;
            Int two(2);
            mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t());
            roots.push_back((omega_trace_ * inv2) % p);
            return roots;
        }
        if (mpz_legendre(dm.get_mpz_t(), p.get_mpz_t()) != 1) return roots;
        Int s = sqrt_mod_p(dm, p);
        Int inv2;
        Int two(2);
        mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t());
        Int r1 = ((omega_trace_ + s) * inv2) % p;
        Int r2 = ((omega_trace_ - s) * inv2 % p + p) % p;
        roots.push_back(r1);
        roots.push_back(r2);
        return roots;
    }

    // Tonelli-Shanks; p odd prime, a a quadratic residue
    static Int sqrt_mod_p(const Int& a, const Int& p) {
        auto powm = [&](Int b, Int e) {
            Int r;
            mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
            return r;
        };
        if (p % 4 == 3) return powm(a, (p + 1) / 4);
        Int q = p - 1;
        unsigned long s = 0;
        while (q % 2 == 0) {
            q /= 2;
            ++s;
        }
        Int z = 2;
        while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
        Int m(s), cc = powm(z, q), t = powm(a, q), r = powm(a, (q + 1) / 2);
        while (t != 1) {
            Int tt = t;
            unsigned long i = 0;
            while (tt != 1) {
                tt = tt * tt % p;
                ++i;
            }
            Int b = cc;
            for (Int k = 0; k < m - Int(i) - 1; ++k) b = b * b % p;
            m = Int(i);
            cc = b * b % p;
            t = t * cc % p;
            r = r * b % p;
        }
        return r;
    }

    // class representatives via reduced primitive forms of discriminant disc_
    void build_class_reps() {
        std::vector<Ideal> reps;
        Int D = disc_;
        for (Int a = 1; 3 * a * a <= -D; ++a) {
            for (Int b = -a + 1; b <= a; ++b) {
                if (((b - D) % 2 + 2) % 2 != 0) continue;
                Int num = b * b - D;
                if (!mpz_divisible_p(num.get_mpz_t(), Int(4 * a).get_mpz_t())) continue;
                Int cq = num / (4 * a);
                if (cq < a) continue;
                if (cq == a && b < 0) continue;
                if (gcd(gcd(a, abs(b)), cq) != 1) continue;
                // form (a,b,c) <-> ideal a*Z + ((-b+sqrt(D))/2)*Z
                Int xcoord = one_mod4_ ? Int((-b - 1) / 2) : Int(-b / 2);
                Int bb = ((xcoord % a) + a) % a;
                reps.push_back(Ideal(a, bb, Int(1)));
            }
        }
        std::sort(reps.begin(), reps.end(), [this](const Ideal& u, const Ideal& v) {
            bool uu = u.is_unit(), vv = v.is_unit();
            if (uu != vv) return uu;
            Int nu = norm(u), nv = norm(v);
            if (nu != nv) return nu < nv;
            return u < v;
        });
        class_reps_ = std::move(reps);
        if (class_reps_.empty() || !class_reps_[0].is_unit())
            throw std::logic_error("class group: unit ideal missing");
    }
};

}  // namespace manin

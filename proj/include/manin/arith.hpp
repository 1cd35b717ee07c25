#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace manin {

using Int = mpz_class;
using Rat = mpq_class;

// num/den with canonicalization (mpq_class leaves raw ctor args unreduced).
inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::domain_error("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

inline Int isqrt_floor(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt_floor: negative");
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int floor_rat(const Rat& r) { return floor_div(r.get_num(), r.get_den()); }

inline Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline Rat pow_rat(const Rat& b, unsigned long e) {
    return make_rat(pow_int(b.get_num(), e), pow_int(b.get_den(), e));
}

// A rational upper bound for r^(1/k); exact filtering happens downstream.
inline Rat root_upper(const Rat& r, unsigned long k) {
    if (r < 0) throw std::domain_error("root_upper: negative");
    if (k == 1) return r;
    Int rn, rd;
    mpz_root(rn.get_mpz_t(), r.get_num().get_mpz_t(), k);
    mpz_root(rd.get_mpz_t(), r.get_den().get_mpz_t(), k);
    if (rd == 0) rd = 1;
    return make_rat(rn + 1, rd);
}

}  // namespace manin

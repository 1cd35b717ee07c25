#include <doctest.h>

#include <map>
#include <random>

#include "manin/qfield.hpp"

using namespace manin;

namespace {

Elem rand_elem(std::mt19937& g, long range = 20) {
    std::uniform_int_distribution<long> d(-range, range);
    return Elem(Int(d(g)), Int(d(g)));
}

}  // namespace

TEST_CASE("element norms") {
    FieldCtx Ki(Int(-1));
    CHECK(Ki.norm(Elem(Int(1), Int(1))) == 2);  // 1+i
    FieldCtx K3(Int(-3));
    CHECK(K3.norm(Elem(Int(0), Int(1))) == 1);  // omega is a unit
    FieldCtx K5(Int(-5));
    CHECK(K5.norm(Elem(Int(1), Int(1))) == 6);  // 1+sqrt(-5)
}

TEST_CASE("norm multiplicativity") {
    std::mt19937 g(42);
    for (long d : {-1L, -2L, -3L, -5L, -7L, -11L, -15L}) {
        FieldCtx K((Int(d)));
        for (int i = 0; i < 200; ++i) {
            Elem a = rand_elem(g), b = rand_elem(g);
            CHECK(K.norm(K.mul(a, b)) == K.norm(a) * K.norm(b));
            CHECK(K.norm(a) == K.norm(K.conj(a)));
        }
    }
}

TEST_CASE("field context validation") {
    CHECK_THROWS_AS(FieldCtx(Int(4)), std::domain_error);    // positive
    CHECK_THROWS_AS(FieldCtx(Int(-4)), std::domain_error);   // not squarefree
    CHECK_THROWS_AS(FieldCtx(Int(-1001)), std::domain_error);
    CHECK(FieldCtx(Int(-1)).unit_count() == 4);
    CHECK(FieldCtx(Int(-3)).unit_count() == 6);
    CHECK(FieldCtx(Int(-7)).unit_count() == 2);
    CHECK(FieldCtx(Int(-1)).disc() == -4);
    CHECK(FieldCtx(Int(-3)).disc() == -3);
    CHECK(FieldCtx(Int(-5)).disc() == -20);
}

TEST_CASE("ideal from generators") {
    FieldCtx Ki(Int(-1));
    // 2 = -i (1+i)^2, so (2, 1+i) = (1+i) with norm 2
    Ideal I = Ki.ideal_from_generators({Elem(Int(2), Int(0)), Elem(Int(1), Int(1))});
    CHECK(Ki.norm(I) == 2);
    CHECK(I == Ki.principal_ideal(Elem(Int(1), Int(1))));
    CHECK(Ki.is_principal(I));

    Ideal Z = Ki.ideal_from_generators({Elem(Int(0), Int(0))});
    CHECK(Z.zero);

    FieldCtx K5(Int(-5));
    Ideal J = K5.ideal_from_generators({Elem(Int(2), Int(0)), Elem(Int(1), Int(1))});
    CHECK(K5.norm(J) == 2);
    CHECK_FALSE(K5.is_principal(J));
}

TEST_CASE("ideal generator invariance") {
    std::mt19937 g(7);
    for (long d : {-1L, -3L, -5L, -7L}) {
        FieldCtx K((Int(d)));
        for (int trial = 0; trial < 50; ++trial) {
            Elem a = rand_elem(g), b = rand_elem(g), c = rand_elem(g);
            Ideal I = K.ideal_from_generators({a, b, c});
            Ideal Iperm = K.ideal_from_generators({c, a, b});
            CHECK(I == Iperm);
            // multiplying a generator by a unit leaves the module unchanged
            Elem unit = (d == -1) ? Elem(Int(0), Int(1)) : Elem(Int(-1), Int(0));
            Ideal Iunit = K.ideal_from_generators({K.mul(a, unit), b, c});
            CHECK(I == Iunit);
        }
    }
}

TEST_CASE("ideal norm multiplicativity") {
    std::mt19937 g(11);
    for (long d : {-1L, -5L, -6L, -23L}) {
        FieldCtx K((Int(d)));
        for (int trial = 0; trial < 40; ++trial) {
            Elem a = rand_elem(g), b = rand_elem(g);
            if (a.is_zero() || b.is_zero()) continue;
            Ideal I = K.ideal_from_generators({a, rand_elem(g)});
            Ideal J = K.ideal_from_generators({b, rand_elem(g)});
            if (I.zero || J.zero) continue;
            CHECK(K.norm(K.mul(I, J)) == K.norm(I) * K.norm(J));
        }
    }
}

TEST_CASE("fractional ideal operations") {
    FieldCtx Ki(Int(-1));
    FracIdeal OK = Ki.to_frac(Ideal(Int(1), Int(0), Int(1)));
    FracIdeal I = Ki.to_frac(Ki.principal_ideal(Elem(Int(1), Int(1))));
    CHECK(Ki.fmul(I, OK) == I);

    // (1-i)/2 is a member of (1+i)^{-1}: (1+i)(1-i)/2 = 1
    FracIdeal Iinv = Ki.finv(I);
    CHECK(Ki.fcontains(Iinv, KElem(make_rat(Int(1), Int(2)), make_rat(Int(-1), Int(2)))));
    CHECK(Ki.fmul(I, Iinv) == OK);

    FieldCtx K5(Int(-5));
    Ideal P2 = K5.ideal_from_generators({Elem(Int(2), Int(0)), Elem(Int(1), Int(1))});
    CHECK(K5.mul(P2, P2) == K5.principal_ideal(Elem(Int(2), Int(0))));

    CHECK_THROWS_AS(K5.finv(K5.to_frac(Ideal::zero_ideal())), std::domain_error);
    CHECK_THROWS_AS(K5.min_element(K5.to_frac(Ideal::zero_ideal())), std::domain_error);
}

TEST_CASE("prime ideal splitting") {
    FieldCtx Ki(Int(-1));
    auto primes = Ki.primes_up_to(Int(10));
    REQUIRE(primes.size() == 4);
    CHECK(primes[0].norm == 2);
    CHECK(primes[0].type == SplitType::ramified);
    CHECK(primes[1].norm == 5);
    CHECK(primes[2].norm == 5);
    CHECK(primes[1].type == SplitType::split);
    CHECK_FALSE(primes[1].id == primes[2].id);  // conjugates, not equal
    CHECK(primes[3].norm == 9);
    CHECK(primes[3].type == SplitType::inert);

    FieldCtx K5(Int(-5));
    auto p5 = K5.primes_up_to(Int(5));
    REQUIRE(p5.size() == 4);
    CHECK(p5[0].norm == 2);
    CHECK(p5[0].type == SplitType::ramified);
    CHECK(p5[1].norm == 3);
    CHECK(p5[2].norm == 3);
    CHECK(p5[1].type == SplitType::split);
    CHECK(p5[3].norm == 5);
    CHECK(p5[3].type == SplitType::ramified);

    CHECK(Ki.primes_up_to(Int(1)).empty());
}

TEST_CASE("primes above p multiply to (p)") {
    for (long d : {-1L, -3L, -5L, -7L, -11L, -15L, -23L}) {
        FieldCtx K((Int(d)));
        for (Int p = 2; p <= 50; mpz_nextprime(p.get_mpz_t(), p.get_mpz_t())) {
            auto above = K.primes_above(p);
            // the splitting tag fixes the multiplicity; the product with
            // multiplicity is exactly (p)
            Ideal prod(Int(1), Int(0), Int(1));
            Int norm_prod(1);
            for (auto& pi : above) {
                int e = (pi.type == SplitType::ramified) ? 2 : 1;
                for (int k = 0; k < e; ++k) {
                    prod = K.mul(prod, pi.id);
                    norm_prod *= pi.norm;
                }
                CHECK(K.contains(pi.id, Elem(p, Int(0))));
            }
            CHECK(norm_prod == p * p);
            CHECK(prod == K.principal_ideal(Elem(p, Int(0))));
        }
    }
}

TEST_CASE("class group representatives") {
    FieldCtx Ki(Int(-1));
    CHECK(Ki.class_number() == 1);
    CHECK(Ki.class_reps()[0].is_unit());

    FieldCtx K3(Int(-3));
    CHECK(K3.class_number() == 1);

    FieldCtx K5(Int(-5));
    REQUIRE(K5.class_number() == 2);
    CHECK(K5.class_reps()[0].is_unit());
    CHECK(K5.norm(K5.class_reps()[1]) == 2);
    CHECK(K5.class_reps()[1] ==
          K5.ideal_from_generators({Elem(Int(2), Int(0)), Elem(Int(1), Int(1))}));

    // classical class numbers
    CHECK(FieldCtx(Int(-23)).class_number() == 3);
    CHECK(FieldCtx(Int(-14)).class_number() == 4);
    CHECK(FieldCtx(Int(-47)).class_number() == 5);
}

TEST_CASE("every small prime ideal lands in exactly one class") {
    for (long d : {-5L, -6L, -23L}) {
        FieldCtx K((Int(d)));
        for (auto& pi : K.primes_up_to(Int(50))) {
            std::size_t idx = K.class_index(K.to_frac(pi.id));
            CHECK(idx < K.class_number());
            // principal iff equivalent to the unit ideal
            CHECK((idx == 0) == K.is_principal(pi.id));
        }
    }
}

TEST_CASE("ideal factorization reassembles") {
    std::mt19937 g(3);
    for (long d : {-1L, -5L, -23L}) {
        FieldCtx K((Int(d)));
        int done = 0;
        for (int trial = 0; trial < 200 && done < 25; ++trial) {
            Elem a = rand_elem(g, 6), b = rand_elem(g, 6);
            Ideal I = K.ideal_from_generators({a, b});
            if (I.zero || K.norm(I) > 100) continue;
            ++done;
            Ideal prod(Int(1), Int(0), Int(1));
            for (auto& [pi, e] : K.factor_ideal(I))
                for (int k = 0; k < e; ++k) prod = K.mul(prod, pi.id);
            CHECK(prod == I);
        }
        CHECK(done > 0);
    }
}

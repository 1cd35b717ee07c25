#include <doctest.h>

#include <random>

#include "manin/height.hpp"

using namespace manin;

namespace {

ProjPoint pt(std::initializer_list<std::pair<long, long>> coords) {
    ProjPoint p;
    int i = 0;
    for (auto& [a, b] : coords) p.x[i++] = KElem(Rat(a), Rat(b));
    return p;
}

}  // namespace

TEST_CASE("content ideal") {
    FieldCtx Ki(Int(-1));
    // (1+i : 1 : 0 : 0 : 0) contains 1
    CHECK(content_ideal(Ki, pt({{1, 1}, {1, 0}, {0, 0}, {0, 0}, {0, 0}})).is_unit());
    // (2 : 2i : 0 : 0 : 0) -> (2), norm 4
    Ideal c = content_ideal(Ki, pt({{2, 0}, {0, 2}, {0, 0}, {0, 0}, {0, 0}}));
    CHECK(Ki.norm(c) == 4);
    CHECK(c == Ki.principal_ideal(Elem(Int(2), Int(0))));

    FieldCtx K5(Int(-5));
    CHECK(K5.norm(content_ideal(K5, pt({{2, 0}, {1, 1}, {0, 0}, {0, 0}, {0, 0}}))) == 2);

    CHECK_THROWS_AS(content_ideal(Ki, pt({{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}})),
                    std::domain_error);
}

TEST_CASE("weil height examples") {
    FieldCtx Ki(Int(-1));
    CHECK(weil_height(Ki, pt({{1, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}})) == 1);
    CHECK(weil_height(Ki, pt({{1, 1}, {1, 0}, {0, 0}, {0, 0}, {0, 0}})) == 2);
    FieldCtx K5(Int(-5));
    // max norm 6, content norm 2
    CHECK(weil_height(K5, pt({{2, 0}, {1, 1}, {0, 0}, {0, 0}, {0, 0}})) == 3);
}

TEST_CASE("canonical keys") {
    FieldCtx Ki(Int(-1));
    CHECK(canonical_key(Ki, pt({{2, 0}, {0, 0}, {0, 0}, {0, 0}, {2, 0}})) ==
          canonical_key(Ki, pt({{1, 0}, {0, 0}, {0, 0}, {0, 0}, {1, 0}})));
    // unit scalar i
    CHECK(canonical_key(Ki, pt({{0, 1}, {1, 0}, {0, 0}, {0, 0}, {0, 0}})) ==
          canonical_key(Ki, pt({{1, 0}, {0, -1}, {0, 0}, {0, 0}, {0, 0}})));
    CHECK(canonical_key(Ki, pt({{1, 0}, {1, 0}, {1, 0}, {-2, 0}, {-2, 0}})) !=
          canonical_key(Ki, pt({{1, 0}, {1, 0}, {1, 0}, {2, 0}, {2, 0}})));
}

TEST_CASE("height scaling invariance") {
    std::mt19937 g(17);
    std::uniform_int_distribution<long> d(-6, 6);
    for (long dd : {-1L, -3L, -5L}) {
        FieldCtx K((Int(dd)));
        int done = 0;
        for (int trial = 0; trial < 2000 && done < 500; ++trial) {
            ProjPoint p;
            bool nonzero = false;
            for (int i = 0; i < 5; ++i) {
                p.x[i] = KElem(make_rat(Int(d(g)), Int(1 + std::abs(d(g)))), Rat(d(g)));
                nonzero = nonzero || !p.x[i].is_zero();
            }
            if (!nonzero) continue;
            KElem lam(make_rat(Int(d(g)), Int(1 + std::abs(d(g)))), Rat(d(g)));
            if (lam.is_zero()) continue;
            ++done;
            ProjPoint q;
            for (int i = 0; i < 5; ++i) q.x[i] = K.kmul(lam, p.x[i]);
            CHECK(weil_height(K, p) == weil_height(K, q));
            CHECK(canonical_key(K, p) == canonical_key(K, q));
            CHECK(weil_height(K, p) >= 1);
        }
        CHECK(done == 500);
    }
}

TEST_CASE("canonical key separates non-proportional points") {
    std::mt19937 g(23);
    std::uniform_int_distribution<long> d(-4, 4);
    FieldCtx K(Int(-5));
    for (int trial = 0; trial < 300; ++trial) {
        ProjPoint p, q;
        bool pz = true, qz = true;
        for (int i = 0; i < 5; ++i) {
            p.x[i] = KElem(Rat(d(g)), Rat(d(g)));
            q.x[i] = KElem(Rat(d(g)), Rat(d(g)));
            pz = pz && p.x[i].is_zero();
            qz = qz && q.x[i].is_zero();
        }
        if (pz || qz) continue;
        // proportional iff all 2x2 minors vanish
        bool prop = true;
        for (int i = 0; i < 5 && prop; ++i)
            for (int j = i + 1; j < 5 && prop; ++j) {
                KElem m = K.ksub(K.kmul(p.x[i], q.x[j]), K.kmul(p.x[j], q.x[i]));
                if (!m.is_zero()) prop = false;
            }
        CHECK((canonical_key(K, p) == canonical_key(K, q)) == prop);
    }
}

#include <doctest.h>

#include <random>

#include "manin/enumeration.hpp"
#include "manin/surfaces.hpp"

using namespace manin;

namespace {

ProjPoint ipt(std::initializer_list<long> coords) {
    ProjPoint p;
    int i = 0;
    for (long a : coords) p.x[i++] = KElem(Rat(a), Rat(0));
    return p;
}

}  // namespace

TEST_CASE("surface membership") {
    FieldCtx K(Int(-1));
    CHECK(on_surface(K, get_surface(SurfaceId::S2), ipt({1, 0, 0, 0, 0})));
    CHECK(on_surface(K, get_surface(SurfaceId::S1), ipt({1, 1, 1, -2, -2})));
    CHECK_FALSE(on_surface(K, get_surface(SurfaceId::S1), ipt({1, 1, 1, 1, 1})));
}

TEST_CASE("psi examples") {
    FieldCtx K(Int(-1));
    auto at = [&](SurfaceId id, long y0, long y1, long y2) {
        auto p = psi_eval(K, get_surface(id), {KElem(y0), KElem(y1), KElem(y2)});
        REQUIRE(p.has_value());
        return *p;
    };
    ProjPoint p1 = at(SurfaceId::S1, 1, 1, 1);
    CHECK(canonical_key(K, p1) == canonical_key(K, ipt({2, -1, 2, 2, 2})));
    CHECK(on_surface(K, get_surface(SurfaceId::S1), p1));

    ProjPoint p2 = at(SurfaceId::S2, 1, 1, 1);
    CHECK(canonical_key(K, p2) == canonical_key(K, ipt({1, 1, 1, 1, -2})));

    ProjPoint p4 = at(SurfaceId::S4, 1, 0, 1);
    CHECK(canonical_key(K, p4) == canonical_key(K, ipt({1, 0, 0, 1, -1})));

    CHECK_THROWS_AS(psi_eval(K, get_surface(SurfaceId::S1), {KElem(), KElem(), KElem()}),
                    std::domain_error);
}

TEST_CASE("psi lands on the surface identically") {
    std::mt19937 g(31);
    std::uniform_int_distribution<long> d(-7, 7);
    FieldCtx K(Int(-5));
    for (SurfaceId id : {SurfaceId::S1, SurfaceId::S2, SurfaceId::S3, SurfaceId::S4}) {
        const SurfaceSpec& S = get_surface(id);
        int checked = 0;
        for (int trial = 0; trial < 200 && checked < 50; ++trial) {
            std::array<KElem, 3> y{KElem(Rat(d(g)), Rat(d(g))), KElem(Rat(d(g)), Rat(d(g))),
                                   KElem(Rat(d(g)), Rat(d(g)))};
            if (y[0].is_zero() && y[1].is_zero() && y[2].is_zero()) continue;
            auto p = psi_eval(K, S, y);
            if (!p) continue;
            ++checked;
            CHECK(on_surface(K, S, *p));
        }
        CHECK(checked == 50);
    }
}

TEST_CASE("line discovery") {
    FieldCtx K(Int(-1));
    auto count_lines = [&](SurfaceId id) {
        return find_lines(K, get_surface(id)).size();
    };
    CHECK(count_lines(SurfaceId::S1) == 3);
    CHECK(count_lines(SurfaceId::S2) == 3);
    CHECK(count_lines(SurfaceId::S3) == 2);
    CHECK(count_lines(SurfaceId::S4) == 1);

    // S4 and S1 contain {x0 = x2 = x3 = 0}
    for (SurfaceId id : {SurfaceId::S1, SurfaceId::S4}) {
        bool found = false;
        for (const Line& L : find_lines(K, get_surface(id))) {
            if (line_contains(K, L, ipt({0, 1, 0, 0, 0})) &&
                line_contains(K, L, ipt({0, 0, 0, 0, 1})))
                found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("lines pass exact three-point containment") {
    FieldCtx K(Int(-1));
    for (SurfaceId id : {SurfaceId::S1, SurfaceId::S2, SurfaceId::S3, SurfaceId::S4}) {
        const SurfaceSpec& S = get_surface(id);
        for (const Line& L : find_lines(K, S)) {
            CHECK(on_surface(K, S, L.span[0]));
            CHECK(on_surface(K, S, L.span[1]));
            CHECK(on_surface(K, S, L.point_at(K, KElem(1), KElem(1))));
            CHECK(on_surface(K, S, L.point_at(K, KElem(2), KElem(-3))));
        }
    }
}

TEST_CASE("in_U") {
    FieldCtx K(Int(-1));
    CHECK_FALSE(in_U(K, get_surface(SurfaceId::S4), ipt({0, 1, 0, 0, 0})));
    CHECK(in_U(K, get_surface(SurfaceId::S2), ipt({1, 1, 1, 1, -2})));
    CHECK(in_U(K, get_surface(SurfaceId::S1), ipt({1, 1, 1, -2, -2})));
    CHECK_THROWS_AS(in_U(K, get_surface(SurfaceId::S1), ipt({1, 1, 1, 1, 1})), std::domain_error);
}

TEST_CASE("excluded parameter curves of psi land on lines or degenerate") {
    FieldCtx K(Int(-1));
    const SurfaceSpec& S1 = get_surface(SurfaceId::S1);
    std::mt19937 g(37);
    std::uniform_int_distribution<long> d(-5, 5);
    for (int trial = 0; trial < 60; ++trial) {
        long a = d(g), b = d(g);
        if (a == 0 && b == 0) continue;
        // y1 = 0
        auto p = psi_eval(K, S1, {KElem(a), KElem(), KElem(b)});
        if (p) CHECK_FALSE(in_U(K, S1, *p));
        // y0 + y2 = 0
        auto q = psi_eval(K, S1, {KElem(a), KElem(b), KElem(-a)});
        if (q) CHECK_FALSE(in_U(K, S1, *q));
    }
}

TEST_CASE("line saturation under doubled search height") {
    FieldCtx K(Int(-1));
    for (SurfaceId id : {SurfaceId::S3, SurfaceId::S4}) {
        const SurfaceSpec& S = get_surface(id);
        auto a = find_lines(K, S, Rat(10));
        auto b = find_lines(K, S, Rat(20));
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].key() == b[i].key());
    }
}

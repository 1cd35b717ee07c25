#include <doctest.h>

#include "manin/enumeration.hpp"

using namespace manin;

namespace {

ProjPoint ipt(std::initializer_list<long> coords) {
    ProjPoint p;
    int i = 0;
    for (long a : coords) p.x[i++] = KElem(Rat(a), Rat(0));
    return p;
}

}  // namespace

TEST_CASE("trivial bounds") {
    FieldCtx K(Int(-1));
    for (SurfaceId id : {SurfaceId::S1, SurfaceId::S2, SurfaceId::S3, SurfaceId::S4})
        CHECK(direct_count(K, get_surface(id), make_rat(Int(1), Int(2))) == 0);
}

TEST_CASE("direct count picks up the expected points") {
    FieldCtx K(Int(-1));
    auto pts = direct_points(K, get_surface(SurfaceId::S2), Rat(4));
    CHECK(pts.count(canonical_key(K, ipt({1, 1, 1, 1, -2}))) == 1);
    CHECK(pts.count(canonical_key(K, ipt({1, 0, 0, 1, -1}))) == 1);
    CHECK(weil_height(K, ipt({1, 1, 1, 1, -2})) == 4);
    CHECK(weil_height(K, ipt({1, 0, 0, 1, -1})) == 1);
}

TEST_CASE("counts nondecreasing in the bound") {
    FieldCtx K(Int(-3));
    long long prev = -1;
    for (long b : {1L, 2L, 4L, 8L}) {
        long long n = direct_count(K, get_surface(SurfaceId::S3), Rat(b));
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("parameterization method is a subset of the exhaustive one") {
    FieldCtx K(Int(-1));
    const SurfaceSpec& S = get_surface(SurfaceId::S1);
    auto exhaustive = direct_points(K, S, Rat(20));
    auto param = parameterization_keys(K, S, Rat(20), Rat(6));
    CHECK(!param.empty());
    for (const auto& key : param) CHECK(exhaustive.count(key) == 1);
}

TEST_CASE("degenerate solver loci stay on the lines") {
    // points where the designated solve denominators vanish must lie on lines
    // (the S1 conic branch is enumerated separately and is not a line)
    FieldCtx K(Int(-1));
    struct Case {
        SurfaceId id;
        int coord;
    };
    for (auto [id, coord] : {Case{SurfaceId::S2, 0}, Case{SurfaceId::S3, 1}, Case{SurfaceId::S4, 0}}) {
        const SurfaceSpec& S = get_surface(id);
        for (auto& [key, p] : surface_points(K, S, Rat(6))) {
            if (!p.x[coord].is_zero()) continue;
            CHECK_FALSE(in_U(K, S, p));
        }
    }
    // S1: x3 = 0 points are on lines or on the conic {x3=x4=0, x0 x1 + x2^2 = 0}
    const SurfaceSpec& S1 = get_surface(SurfaceId::S1);
    for (auto& [key, p] : surface_points(K, S1, Rat(6))) {
        if (!p.x[3].is_zero()) continue;
        bool on_conic = p.x[4].is_zero() &&
                        K.kadd(K.kmul(p.x[0], p.x[1]), K.kmul(p.x[2], p.x[2])).is_zero();
        CHECK((on_conic || !in_U(K, S1, p)));
    }
}

TEST_CASE("conic points on S1 are reachable") {
    FieldCtx K(Int(-1));
    auto pts = direct_points(K, get_surface(SurfaceId::S1), Rat(1));
    CHECK(pts.count(canonical_key(K, ipt({1, -1, 1, 0, 0}))) == 1);
}

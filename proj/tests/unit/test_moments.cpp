#include <doctest.h>

#include <cmath>
#include <random>

#include "rangebound/errors.hpp"
#include "rangebound/moments.hpp"
#include "support.hpp"

using namespace rangebound;
using testing_support::uniform;

TEST_CASE("moment spec validation") {
    CHECK_THROWS_AS(MomentSpec({0.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(MomentSpec({0.0, 1.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(MomentSpec({0.0, 1.0}, {1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(MomentSpec({0.0, NAN}, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(MomentSpec({0.0, 1.0}, {1.0, -2.0}), DomainError);
    const MomentSpec s({-1.0, 0.0, 4.0}, {1.0, 2.0, 3.0});
    CHECK(s.size() == 3);
    CHECK(s.mean_of_means() == doctest::Approx(1.0));
    CHECK(s.mean_spread() == 5.0);
    CHECK_FALSE(s.has_equal_means());
    CHECK(MomentSpec({2.0, 2.0, 2.0}, {1.0, 1.0, 1.0}).has_equal_means());
}

TEST_CASE("U closed form at hand-computed points") {
    CHECK(u_value(0.0, 2.0) == doctest::Approx(4.0));           // outer: 2 sqrt(4)
    CHECK(u_value(3.0, 4.0) == doctest::Approx(10.0));          // outer: 2 * 5
    CHECK(u_value(0.0, 1.0) == doctest::Approx(2.5));           // middle: 2 + 1/2
    CHECK(u_value(1.5, 0.5) == doctest::Approx(2.5 + std::sqrt(0.5)));  // inner: 1.5 + 1 + sqrt(0.25 + 0.25)
    CHECK(u_value(-1.5, 0.5) == doctest::Approx(u_value(1.5, 0.5)));
    CHECK_THROWS_AS(u_value(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(u_gradient(0.0, -1.0), DomainError);
}

TEST_CASE("U matches a brute-force search over three-point laws") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 24; ++t) {
        const double x = uniform(rng, -3.0, 3.0);
        const double y = uniform(rng, 0.2, 2.5);
        const double exact = u_value(x, y);
        const double brute = testing_support::brute_force_u(x, y);
        CAPTURE(x);
        CAPTURE(y);
        CHECK(brute <= exact + 1e-9);
        CHECK(brute >= exact - 2e-2);
    }
}

TEST_CASE("U gradient agrees with central differences") {
    std::mt19937_64 rng(12);
    const double h = 1e-6;
    for (int t = 0; t < 2000; ++t) {
        const double x = uniform(rng, -4.0, 4.0);
        const double y = uniform(rng, 0.05, 4.0);
        const auto g = u_gradient(x, y);
        const double gx = (u_value(x + h, y) - u_value(x - h, y)) / (2 * h);
        const double gy = (u_value(x, y + h) - u_value(x, y - h)) / (2 * h);
        CHECK(g[0] == doctest::Approx(gx).epsilon(1e-5).scale(1.0));
        CHECK(g[1] == doctest::Approx(gy).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("U is continuous across branch boundaries") {
    // s = 4 circle and s = 2|x| circles.
    for (double t = 0.05; t < 3.1; t += 0.1) {
        const double x = 2.0 * std::cos(t), y = 2.0 * std::sin(t);
        CHECK(u_value(x, y * (1 + 1e-12)) == doctest::Approx(u_value(x, y * (1 - 1e-12))).epsilon(1e-10));
        const double xi = 1.0 + std::cos(t), yi = std::sin(t);
        if (yi > 1e-3)
            CHECK(u_value(xi, yi * (1 + 1e-12)) == doctest::Approx(u_value(xi, yi * (1 - 1e-12))).epsilon(1e-10));
    }
}

TEST_CASE("U and phi are convex along random chords") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10000; ++t) {
        const double x1 = uniform(rng, -4, 4), y1 = uniform(rng, 0.01, 4);
        const double x2 = uniform(rng, -4, 4), y2 = uniform(rng, 0.01, 4);
        const double mid = u_value(0.5 * (x1 + x2), 0.5 * (y1 + y2));
        REQUIRE(mid <= 0.5 * (u_value(x1, y1) + u_value(x2, y2)) + 1e-12);
    }
    const MomentSpec spec({-2.0, 0.5, 1.0, 3.0}, {1.0, 0.3, 2.0, 0.7});
    for (int t = 0; t < 10000; ++t) {
        const DualPoint a{uniform(rng, -5, 5), uniform(rng, 0.01, 6)};
        const DualPoint b{uniform(rng, -5, 5), uniform(rng, 0.01, 6)};
        const double mid = phi({0.5 * (a.c + b.c), 0.5 * (a.lambda + b.lambda)}, spec);
        REQUIRE(mid <= 0.5 * (phi(a, spec) + phi(b, spec)) + 1e-12 * (1 + std::abs(mid)));
    }
}

TEST_CASE("phi gradient agrees with central differences") {
    std::mt19937_64 rng(14);
    const double h = 1e-6;
    for (int t = 0; t < 500; ++t) {
        const MomentSpec spec = testing_support::random_spec(rng, 3 + t % 5);
        const DualPoint p{uniform(rng, -3, 3), uniform(rng, 0.2, 4)};
        const auto g = phi_gradient(p, spec);
        const double gc = (phi({p.c + h, p.lambda}, spec) - phi({p.c - h, p.lambda}, spec)) / (2 * h);
        const double gl = (phi({p.c, p.lambda + h}, spec) - phi({p.c, p.lambda - h}, spec)) / (2 * h);
        CHECK(g[0] == doctest::Approx(gc).epsilon(1e-5).scale(1.0));
        CHECK(g[1] == doctest::Approx(gl).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("region tie-breaking prefers Outer, then Upper/Lower") {
    // theta^2 = 4 lambda^2 exactly: Outer.
    CHECK(classify_coordinate(0.0, 2.0, {0.0, 1.0}) == Region::Outer);
    // theta^2 = 2 lambda |xi|: xi = 1, sigma = 1, lambda = 1.
    CHECK(classify_coordinate(1.0, 1.0, {0.0, 1.0}) == Region::Upper);
    CHECK(classify_coordinate(-1.0, 1.0, {0.0, 1.0}) == Region::Lower);
    CHECK(classify_coordinate(0.0, 1.0, {0.0, 1.0}) == Region::Middle);

    const MomentSpec spec({-1.0, 0.0, 1.0}, {1.0, std::sqrt(3.0), std::sqrt(2.0)});
    const RegionPartition part = classify_regions({0.0, 1.0}, spec);
    CHECK(part.i4 == std::vector<std::size_t>{0});
    CHECK(part.i2 == std::vector<std::size_t>{1, 2});
    CHECK(part.boundary_degenerate);
    CHECK_THROWS_AS(classify_regions({0.0, 0.0}, spec), DomainError);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "rangebound/bounds.hpp"
#include "rangebound/errors.hpp"
#include "rangebound/extremal.hpp"
#include "rangebound/verify.hpp"
#include "support.hpp"

using namespace rangebound;

namespace {

const MomentSpec& r31() {
    static const MomentSpec s({-1, 0, 1}, {1, std::sqrt(3.0), std::sqrt(2.0)});
    return s;
}

JointDiscreteDistribution r31_joint() {
    return {{{-2, 2, 0}, {-2, 0, 2}, {0, -2, 2}, {0, 2, -2}}, {0.25, 0.25, 0.375, 0.125}};
}

}  // namespace

TEST_CASE("moment checks") {
    const MomentCheckReport a = check_moments(r31_joint(), r31(), 1e-12);
    CHECK(a.pass);
    CHECK(a.expected_range == doctest::Approx(4.0));
    CHECK(a.mean_errors.size() == 3);

    const JointDiscreteDistribution point({{-1, 0, 1}}, {1.0});
    const MomentCheckReport b = check_moments(point, r31(), 1e-6);
    CHECK_FALSE(b.pass);
    CHECK(b.var_errors[1] == doctest::Approx(3.0));
    CHECK(b.mean_errors[1] == 0.0);

    const MomentSpec s({0.2, -1, 0.7, 2}, {1, 0.5, 2, 1.5});
    CHECK(check_moments(bnt_extremal_max(s), s, 1e-10).pass);

    CHECK_THROWS_AS(check_moments(JointDiscreteDistribution({{0, 1}}, {1.0}), r31(), 1e-6), DomainError);
}

TEST_CASE("expected range") {
    CHECK(expected_range(r31_joint()) == doctest::Approx(4.0));
    CHECK(expected_range(JointDiscreteDistribution({{3, 3, 3}}, {1.0})) == 0.0);
    CHECK(expected_range(rho2_extremal_pair(MomentSpec({0, 3}, {1, 3}))) == doctest::Approx(5.0));

    // The closed sum over the marginals gives the same value.
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        const MomentSpec s = testing_support::random_spec(rng, 3 + t % 6);
        const ExtremalConstruction e = build_extremal(s);
        const double c = e.report.optimum.c;
        double closed = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            closed += (e.marginals.laws[i].x_plus - c) * e.marginals.p_plus[i] +
                      (c - e.marginals.laws[i].x_minus) * e.marginals.p_minus[i];
        CHECK(closed == doctest::Approx(expected_range(e.joint)).epsilon(1e-9));
    }
}

TEST_CASE("Monte Carlo estimates") {
    const McEstimate a = mc_expected_range(r31_joint(), 1000000, 7);
    CHECK(std::abs(a.estimate - 4.0) <= 4 * a.std_error);
    // Every support point of this joint has range 4.
    CHECK(a.estimate == doctest::Approx(4.0).epsilon(1e-14));
    const JointDiscreteDistribution spread = build_extremal_joint(MomentSpec({-2, 0, 2}, {1, 3, 1}));
    const McEstimate a2 = mc_expected_range(spread, 1000000, 7);
    CHECK(a2.std_error > 0);
    CHECK(std::abs(a2.estimate - expected_range(spread)) <= 4 * a2.std_error);

    const McEstimate b = mc_expected_range(JointDiscreteDistribution({{1, 1}}, {1.0}), 1000, 7);
    CHECK(b.estimate == 0.0);
    CHECK(b.std_error == 0.0);

    const PairSampler p = extremal_pair_given_correlation(0, 0, 1, 1, -1, 0);
    const McEstimate c = mc_expected_range(p, 1000000, 8);
    CHECK(std::abs(c.estimate - 2.0) <= 4 * c.std_error + 1e-12);

    const McEstimate d1 = mc_expected_range(r31_joint(), 12345, 99), d2 = mc_expected_range(r31_joint(), 12345, 99);
    CHECK(d1.estimate == d2.estimate);
    CHECK(d1.std_error == d2.std_error);
    CHECK(mc_expected_range(r31_joint(), 5, 3).estimate == mc_expected_range(r31_joint(), 5, 3).estimate);
    CHECK_THROWS_AS(mc_expected_range(r31_joint(), 0, 1), DomainError);
}

TEST_CASE("feasible probe stays between the mean spread and the tight bound") {
    const MomentSpec h({0, 0, 0}, {1, 1, 1});
    const double v = feasible_probe(h, 10000, 5);
    CHECK(v > 0.0);
    CHECK(v <= std::sqrt(6.0) + 1e-9);
    CHECK(v >= 2.0);
    CHECK(feasible_probe(h, 1, 17) == feasible_probe(h, 1, 17));

    std::mt19937_64 rng(42);
    for (int t = 0; t < 40; ++t) {
        const MomentSpec s = testing_support::random_spec(rng, 2 + t % 7);
        const ProbeResult p = feasible_probe_detailed(s, 200, t);
        const double rho = rho_bound(s).rho;
        CHECK(p.trials == 200);
        CHECK(p.max_range <= rho + 1e-9);
        CHECK(p.min_range >= s.mean_spread() - 1e-9);
    }
    CHECK_THROWS_AS(feasible_probe(h, 0, 1), DomainError);
}

TEST_CASE("dual grid bounds the optimum from above") {
    const GridResult a = dual_grid_search(MomentSpec({0, 0, 0}, {1, 1, 1}), 200);
    CHECK(a.min_phi >= std::sqrt(6.0) - 1e-9);
    CHECK(a.min_phi <= std::sqrt(6.0) + 1e-3);
    CHECK(std::abs(a.argmin.c) < 0.05);
    CHECK(std::abs(a.argmin.lambda - std::sqrt(6.0) / 4) < 0.05);

    const MomentSpec r62({-2, 0, 2}, {1, 3, 1});
    const double g = dual_grid_check(r62, 400);
    CHECK(g >= rho_bound(r62).rho - 1e-9);
    CHECK(std::abs(g - 6.066) < 1e-3);

    // n = 2: phi is flat at rho_2 for small lambda, so only the c spacing matters.
    const double two = dual_grid_check(MomentSpec({0, 0}, {1, 2}), 200);
    CHECK(two >= 3.0 - 1e-9);
    CHECK(two <= 3.0 + 1e-3);
    CHECK(dual_grid_check(MomentSpec({0, 0}, {1, 2}), 801) <= two);
}

TEST_CASE("infimum witness") {
    const MomentSpec s({0, 1, 3}, {1, 1, 1});
    const McEstimate w = infimum_witness(s, std::nullopt, 1e-4, 1000000, 3);
    CHECK(std::abs(w.estimate - 3.0) < 0.1);
    CHECK(w.estimate >= 3.0);
    const double exact = infimum_witness_exact(s, std::nullopt, 1e-4);
    CHECK(exact >= 3.0);
    CHECK(exact < 3.1);
    CHECK(std::abs(w.estimate - exact) <= 4 * w.std_error + 1e-12);

    const MomentSpec eq({2, 2, 2}, {1, 2, 3});
    CHECK(infimum_witness_exact(eq, std::nullopt, 1e-4) < 0.1);
    CHECK(infimum_witness(eq, std::nullopt, 1e-4, 100000, 1).estimate < 0.2);

    CHECK_THROWS_AS(infimum_witness(s, std::nullopt, 1.0, 10, 0), DomainError);
    CHECK_THROWS_AS(infimum_witness(s, std::nullopt, 0.0, 10, 0), DomainError);
    const std::vector<std::vector<double>> wrong = {{1, 0, 0}, {0, 2, 0}, {0, 0, 1}};
    CHECK_THROWS_AS(infimum_witness(s, wrong, 0.1, 10, 0), DomainError);
    const std::vector<std::vector<double>> corr = {{1, 0.5, 0}, {0.5, 1, 0}, {0, 0, 1}};
    CHECK(infimum_witness_exact(s, corr, 0.01) >= 3.0);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "rangebound/bounds.hpp"
#include "rangebound/errors.hpp"
#include "support.hpp"

using namespace rangebound;
using testing_support::golden_min;
using testing_support::uniform;

namespace {

// Independent of the solver: nested golden-section search on phi alone.
double nested_oracle(const MomentSpec& spec) {
    double lam_hi = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        lam_hi += std::hypot(spec.max_mean() - spec.min_mean(), spec.sigma(i));
    auto inner = [&](double c) {
        return golden_min([&](double l) { return phi({c, l}, spec); }, 1e-9, lam_hi, 300);
    };
    return golden_min(inner, spec.min_mean() - 1e-9, spec.max_mean() + 1e-9, 300);
}

}  // namespace

TEST_CASE("closed forms at hand-checked points") {
    CHECK(ag_bound(MomentSpec({-1, 0, 1}, {1, std::sqrt(3.0), std::sqrt(2.0)})) == doctest::Approx(4.0));
    CHECK(ag_bound(MomentSpec({-2, 0, 2}, {1, 3, 1})) == doctest::Approx(std::sqrt(38.0)));
    CHECK(equal_means_bound(MomentSpec({0, 0, 0}, {1, 1, 1})) == doctest::Approx(std::sqrt(6.0)));
    CHECK(equal_means_bound(MomentSpec({0, 0, 0}, {1, 1, 3})) == doctest::Approx(3.0 + std::sqrt(2.0)));
    CHECK_THROWS_AS(equal_means_bound(MomentSpec({0, 1, 0}, {1, 1, 1})), DomainError);
    // E range of two i.i.d. variables is at most 2 sigma / sqrt(3).
    CHECK(plackett_iid_bound(2, 1.0) == doctest::Approx(2.0 / std::sqrt(3.0)));
    CHECK(plackett_iid_bound(3, 2.0) == doctest::Approx(3.0 * 2.0 * std::sqrt(0.4 * (1 - 1.0 / 6))));
    CHECK(plackett_iid_bound(600, 1.0) == doctest::Approx(600.0 * std::sqrt(2.0 / 1199.0)));
    CHECK_THROWS_AS(plackett_iid_bound(1, 1.0), DomainError);

    const double coeffs[] = {-1.0, 0.0, 1.0};
    const MomentSpec s({-1, 0, 1}, {1, std::sqrt(3.0), std::sqrt(2.0)});
    CHECK(ag_general_bound(s, coeffs) == doctest::Approx(ag_bound(s)));
    const double bad[] = {1.0};
    CHECK_THROWS_AS(ag_general_bound(s, bad), DomainError);
}

TEST_CASE("BNT bound: n = 2 closed form and homogeneous values") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const MomentSpec s = testing_support::random_spec(rng, 2);
        const double rho2 = std::hypot(s.mu(0) - s.mu(1), s.sigma(0) + s.sigma(1));
        CHECK(bnt_max_bound(s).bound == doctest::Approx(0.5 * (s.mu(0) + s.mu(1) + rho2)).epsilon(1e-12));
    }
    // n i.i.d.-moment coordinates: y0 solves n y / sqrt(y^2+1) = n - 2.
    const BntResult r = bnt_max_bound(MomentSpec({0, 0, 0, 0}, {1, 1, 1, 1}));
    CHECK(r.bound == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(bnt_range_bound(MomentSpec({0, 0, 0, 0}, {1, 1, 1, 1})) == doctest::Approx(2 * std::sqrt(3.0)));
}

TEST_CASE("n = 2 closed form") {
    const BoundReport r = rho_bound(MomentSpec({0, 3}, {1, 3}));
    CHECK(r.method == Method::N2ClosedForm);
    CHECK(r.rho == doctest::Approx(5.0));
    CHECK(r.optimum.c == doctest::Approx(0.75));
    CHECK(r.optimum.lambda == doctest::Approx(5.0 / 8));
    CHECK(r.residual < 1e-12);
    CHECK(phi(r.optimum, MomentSpec({0, 3}, {1, 3})) == doctest::Approx(5.0));
    CHECK_THROWS_AS(minimize_phi(MomentSpec({0, 3}, {1, 3})), DomainError);
}

TEST_CASE("inner lambda lies in its bracket and zeroes the lambda-derivative") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 300; ++t) {
        const MomentSpec s = testing_support::random_spec(rng, 3 + t % 6);
        const double c = uniform(rng, s.min_mean(), s.max_mean());
        const auto [lo, hi] = inner_lambda_bracket(s, c);
        const double l = inner_lambda(s, c);
        CHECK(l >= lo);
        CHECK(l <= hi);
        CHECK(std::abs(phi_gradient({c, l}, s)[1]) < 1e-12);
    }
}

TEST_CASE("solver matches the nested golden-section oracle") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 40; ++t) {
        const MomentSpec s = testing_support::random_spec(rng, 3 + t % 6);
        const BoundReport r = minimize_phi(s);
        CHECK(r.residual <= 1e-10);
        CHECK(r.rho == doctest::Approx(nested_oracle(s)).epsilon(1e-8));
        CHECK(r.rho >= s.mean_spread());
        CHECK(r.rho <= r.ag + 1e-12);
    }
}

TEST_CASE("reference instances") {
    const BoundReport a = rho_bound(MomentSpec({-2, 0, 2}, {1, 3, 1}));
    CHECK(a.rho == doctest::Approx(6.0663431).epsilon(1e-7));
    CHECK(a.optimum.lambda == doctest::Approx(1.7370469).epsilon(1e-7));
    CHECK(std::abs(a.optimum.c) < 1e-7);

    const BoundReport b = rho_bound(MomentSpec({0, 0, 0}, {1, 1, 3}));
    CHECK(b.method == Method::EqualMeansClosedForm);
    CHECK(b.rho == doctest::Approx(3 + std::sqrt(2.0)));
    CHECK(b.optimum.lambda == doctest::Approx(std::sqrt(0.5)));
    CHECK(b.regions.i1 == std::vector<std::size_t>{2});

    const BoundReport c = rho_bound(MomentSpec({-1, 0, 1}, {1, std::sqrt(3.0), std::sqrt(2.0)}));
    CHECK(c.rho == doctest::Approx(4.0));
    CHECK(c.method_tag() == "general-solver/boundary-degenerate");
}

TEST_CASE("convergence failure is reported with the best iterate") {
    SolverOptions opts;
    opts.inner_max_iter = 3;
    opts.outer_max_iter = 2;
    try {
        minimize_phi(MomentSpec({-2, 0.3, 2}, {1, 3, 1}), opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > 1e-10);
        CHECK(std::isfinite(e.best_c()));
        CHECK(e.best_lambda() > 0);
    }
}

TEST_CASE("random restarts reach the same optimum") {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 30; ++t) {
        const MomentSpec s = testing_support::random_spec(rng, 3 + t % 6);
        const BoundReport base = minimize_phi(s);
        for (int k = 0; k < 5; ++k) {
            SolverOptions o;
            o.initial_c = uniform(rng, s.min_mean(), s.max_mean());
            const BoundReport r = minimize_phi(s, o);
            CHECK(std::abs(r.optimum.c - base.optimum.c) < 1e-7);
            CHECK(std::abs(r.optimum.lambda - base.optimum.lambda) < 1e-7);
        }
    }
}

TEST_CASE("pair bounds with correlation") {
    CHECK(gamma2_bound(0, 0, 1, 1, -1) == doctest::Approx(2.0));
    CHECK(gamma2_bound(1, 0, 1, 2, 0) == doctest::Approx(std::sqrt(6.0)));
    CHECK(gamma2_bound(0, 0, 1, 1, 1) == 0.0);
    CHECK_THROWS_AS(gamma2_bound(0, 0, 1, 1, 1.5), DomainError);
    const PairBounds b = pair_cov_bounds(0, 1, 1, 2, 0.5);
    CHECK(b.max_low == 1.0);
    CHECK(b.max_high == doctest::Approx(0.5 + 0.5 * std::sqrt(1 + 1 + 4 - 2)));
    CHECK(b.cov_low == doctest::Approx(1.0));
    CHECK(b.cov_high == doctest::Approx(0.25 * (1 + 4 + 2)));
}

TEST_CASE("pair bound examples") {
    const PairBounds a = pair_cov_bounds(0, 0, 1, 1, 0);
    CHECK(a.max_high == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(a.cov_high == doctest::Approx(0.5));
    const PairBounds b = pair_cov_bounds(0, 0, 1, 1, 1);
    CHECK(b.max_high == 0.0);
    CHECK(b.cov_low == 1.0);
    CHECK(b.cov_high == 1.0);
    const PairBounds c = pair_cov_bounds(0, 0, 1, 1, -1);
    CHECK(c.max_high == doctest::Approx(1.0));
    CHECK(c.cov_low == -1.0);
    CHECK(c.cov_high == doctest::Approx(0.0));
    CHECK(gamma2_bound(0, 3, 1, 2, 0) == doctest::Approx(std::sqrt(14.0)));
    for (double r = -1.0; r < 0.95; r += 0.1) CHECK(gamma2_bound(0.5, -1, 1, 2, r + 0.05) < gamma2_bound(0.5, -1, 1, 2, r));
}

TEST_CASE("structural properties at the optimum") {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 3 + t % 6;
        const MomentSpec s = testing_support::random_spec(rng, n);
        const BoundReport r = rho_bound(s);
        CHECK(r.optimum.c > s.min_mean());
        CHECK(r.optimum.c < s.max_mean());
        CHECK(r.regions.i1.size() <= 1);
        CHECK(r.regions.i3.size() <= n - 1);
        CHECK(r.regions.i4.size() <= n - 1);
        std::vector<double> zeros(n, 0.0);
        const MomentSpec centred(zeros, std::vector<double>(s.sigma().begin(), s.sigma().end()));
        CHECK(r.rho > equal_means_bound(centred));
    }
}

TEST_CASE("n = 2 minimizer set is flat along lambda") {
    const MomentSpec s({0.5, -1.0}, {1.0, 2.5});
    const BoundReport r = rho2_closed(s);
    for (int k = 1; k <= 20; ++k) {
        const double l = r.optimum.lambda * k / 20.0;
        CHECK(phi({r.optimum.c, l}, s) == doctest::Approx(r.rho).epsilon(1e-10));
    }
}

TEST_CASE("small-variance limit approaches the mean spread") {
    const BoundReport r = rho_bound(MomentSpec({0, 1, 3}, {1e-4, 1e-4, 1e-4}));
    CHECK(std::abs(r.rho - 3.0) <= 3e-3);
}

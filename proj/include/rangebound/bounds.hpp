#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "rangebound/moments.hpp"

namespace rangebound {

enum class Method {
    GeneralSolver,
    N2ClosedForm,
    EqualMeansClosedForm,
};

std::string to_string(Method m);

/// Output of the tight-bound computation.
struct BoundReport {
    double rho = 0.0;        ///< tight bound on E[max - min]
    DualPoint optimum;       ///< minimizer (c0, lambda0) of phi
    RegionPartition regions; ///< partition at the optimum
    double ag = 0.0;         ///< Arnold-Groeneveld bound
    double infimum = 0.0;    ///< max mu - min mu
    Method method = Method::GeneralSolver;
    std::size_t iterations = 0;
    double residual = 0.0;   ///< |grad phi| at the optimum

    /// "general-solver", ..., with "/boundary-degenerate" appended when flagged.
    std::string method_tag() const;
};

struct SolverOptions {
    double tol = 1e-10;                ///< required gradient norm at the optimum
    std::size_t inner_max_iter = 200;
    std::size_t outer_max_iter = 500;
    /// Starting point of the outer search. When set, the first probe is at
    /// this c instead of the midpoint of [min mu, max mu].
    std::optional<double> initial_c;
};

// ---------------------------------------------------------------------------
// Closed-form comparison bounds
// ---------------------------------------------------------------------------

double ag_bound(const MomentSpec& spec);

/// E sum c_i X_{i:n} <= mean(mu) sum c_i + |c - mean(c)| sqrt(sum[(mu_i - mean)^2 + sigma_i^2]).
double ag_general_bound(const MomentSpec& spec, std::span<const double> coeffs);

/// Expected range of n i.i.d. variables with standard deviation sigma.
double plackett_iid_bound(std::size_t n, double sigma);

struct BntResult {
    double bound = 0.0;  ///< tight bound on E max
    double y0 = 0.0;     ///< root of sum (y - mu_i)/sqrt((mu_i - y)^2 + sigma_i^2) = n - 2
};

BntResult bnt_max_bound(const MomentSpec& spec);

/// BNT(mu, sigma) + BNT(-mu, sigma): a range bound assembled from max and min bounds.
double bnt_range_bound(const MomentSpec& spec);

/// Tight bound when all means coincide; throws DomainError otherwise.
double equal_means_bound(const MomentSpec& spec);

// ---------------------------------------------------------------------------
// Tight bound
// ---------------------------------------------------------------------------

BoundReport rho2_closed(const MomentSpec& spec);

/// Unique minimizer of phi for n >= 3.
///
/// The outer loop bisects on the sign of dphi/dc over [min mu, max mu], with
/// lambda re-optimized for each probe by `inner_lambda`. Golden-section
/// search on c takes over if the derivative sign is inconsistent with the
/// bracket. Throws ConvergenceError when the gradient norm at the final
/// iterate exceeds `opts.tol`.
BoundReport minimize_phi(const MomentSpec& spec, const SolverOptions& opts = {});

/// For fixed c, the unique lambda in (t_{n-1:n}, sum t_i) with
/// sum_i u_i'(lambda) = n - 2, where t_i = sqrt((mu_i - c)^2 + sigma_i^2) / 2.
double inner_lambda(const MomentSpec& spec, double c, std::size_t max_iter = 200);

/// Bracket (t_{n-1:n}, sum t_i) used by inner_lambda.
std::pair<double, double> inner_lambda_bracket(const MomentSpec& spec, double c);

/// Dispatches: n = 2 closed form, otherwise minimize_phi (with the
/// equal-means closed form as a cross-checked fast path).
BoundReport rho_bound(const MomentSpec& spec, const SolverOptions& opts = {});

// ---------------------------------------------------------------------------
// Pairs with known correlation
// ---------------------------------------------------------------------------

double gamma2_bound(double mu1, double mu2, double sigma1, double sigma2, double rho);

struct PairBounds {
    double max_low = 0.0;
    double max_high = 0.0;
    double cov_low = 0.0;
    double cov_high = 0.0;
};

/// Best possible bounds on E max{X1, X2} and Cov[min, max] for a pair with given correlation.
PairBounds pair_cov_bounds(double mu1, double mu2, double sigma1, double sigma2, double rho);

}  // namespace rangebound

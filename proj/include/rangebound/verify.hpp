#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rangebound/extremal.hpp"
#include "rangebound/moments.hpp"

namespace rangebound {

struct MomentCheckReport {
    std::vector<double> mean_errors;  ///< |E X_i - mu_i|
    std::vector<double> var_errors;   ///< |Var X_i - sigma_i^2|
    double expected_range = 0.0;
    bool pass = false;
};

/// Exact moments of a finite joint against spec.
MomentCheckReport check_moments(const JointDiscreteDistribution& joint, const MomentSpec& spec, double tol);

/// Sum over the support of prob * (max coordinate - min coordinate).
double expected_range(const JointDiscreteDistribution& joint);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Number of independent streams used by the Monte Carlo estimators. Shard k
/// draws from a generator seeded by a fixed hash of (seed, k) and shards are
/// merged in index order, so results depend only on (seed, n_samples).
inline constexpr std::size_t kMonteCarloShards = 8;

McEstimate mc_expected_range(const JointDiscreteDistribution& joint, std::size_t n_samples, std::uint64_t seed);
McEstimate mc_expected_range(const PairSampler& sampler, std::size_t n_samples, std::uint64_t seed);

struct ProbeResult {
    double max_range = 0.0;  ///< largest exact E R over the generated joints
    double min_range = 0.0;  ///< smallest, for the Jensen floor check
    std::size_t trials = 0;
};

/// Random feasible joints standardized to spec; returns the largest E R seen.
double feasible_probe(const MomentSpec& spec, std::size_t trials, std::uint64_t seed);
ProbeResult feasible_probe_detailed(const MomentSpec& spec, std::size_t trials, std::uint64_t seed);

struct GridResult {
    double min_phi = 0.0;
    DualPoint argmin;
};

/// phi on a grid x grid lattice, c over [min mu - span, max mu + span] and
/// lambda over (0, 2 sum t_i] with t_i taken at the mean of the means.
double dual_grid_check(const MomentSpec& spec, std::size_t grid);
GridResult dual_grid_search(const MomentSpec& spec, std::size_t grid);

/// Monte Carlo estimate of E R for mu + (I/sqrt(eps)) Sigma^{1/2} V, with
/// I ~ Bernoulli(eps) and V i.i.d. uniform on {-1, 1}. Sigma defaults to
/// diag(sigma^2); otherwise its diagonal must match sigma^2 within 1e-10.
McEstimate infimum_witness(const MomentSpec& spec, const std::optional<std::vector<std::vector<double>>>& dispersion,
                           double epsilon, std::size_t n_samples, std::uint64_t seed);

/// Exact E R of the same construction by enumerating the 2^n sign patterns (n <= 20).
double infimum_witness_exact(const MomentSpec& spec,
                             const std::optional<std::vector<std::vector<double>>>& dispersion, double epsilon);

}  // namespace rangebound

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rangebound/bounds.hpp"
#include "rangebound/moments.hpp"

namespace rangebound {

/// Three-point law attaining lambda U((mu-c)/lambda, sigma/lambda).
///
/// Points that the generating row leaves unspecified carry probability zero
/// and sit at c - 2 lambda, c or c + 2 lambda.
struct ThreePointDist {
    double x_minus = 0.0, x_zero = 0.0, x_plus = 0.0;
    double p_minus = 0.0, p_zero = 0.0, p_plus = 0.0;
    Region row = Region::Middle;

    double mean() const noexcept;
    double variance() const noexcept;

    /// (value, probability) pairs with nonzero probability, ascending in value.
    std::vector<std::pair<double, double>> support() const;
};

/// Nonnegative n x n table with unit total mass.
class ProbabilityMatrix {
public:
    /// Throws DomainError unless q is square, nonnegative and sums to 1 within 1e-12.
    explicit ProbabilityMatrix(std::vector<std::vector<double>> q);

    std::size_t size() const noexcept { return q_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return q_.at(i).at(j); }
    const std::vector<std::vector<double>>& rows() const noexcept { return q_; }

    std::vector<double> row_marginals() const;
    std::vector<double> col_marginals() const;
    double trace() const noexcept;
    bool zero_trace() const noexcept;

    friend bool operator==(const ProbabilityMatrix&, const ProbabilityMatrix&) = default;

private:
    std::vector<std::vector<double>> q_;
};

/// Finitely supported law on R^n.
class JointDiscreteDistribution {
public:
    /// Validates dimensions, finiteness, nonnegative probabilities summing to 1
    /// within 1e-12. Identical support vectors are merged (first occurrence
    /// keeps its position).
    JointDiscreteDistribution(std::vector<std::vector<double>> support, std::vector<double> prob);

    std::size_t size() const noexcept { return prob_.size(); }
    std::size_t dimension() const noexcept { return support_.empty() ? 0 : support_.front().size(); }
    const std::vector<double>& point(std::size_t k) const { return support_.at(k); }
    double prob(std::size_t k) const { return prob_.at(k); }
    const std::vector<std::vector<double>>& support() const noexcept { return support_; }
    const std::vector<double>& probs() const noexcept { return prob_; }

private:
    std::vector<std::vector<double>> support_;
    std::vector<double> prob_;
};

enum class Uniqueness { Unique, NotUnique, Unknown };

std::string to_string(Uniqueness u);

ThreePointDist univariate_extremal(double mu, double sigma, double c, double lambda);

struct ExtremalMarginals {
    std::vector<ThreePointDist> laws;
    std::vector<double> p_plus;
    std::vector<double> p_minus;
};

/// Per-coordinate extremal laws at p. Throws DomainError when
/// |sum p+ - 1| or |sum p- - 1| exceeds 1e-6, which signals a non-optimal p.
ExtremalMarginals extremal_marginals(const MomentSpec& spec, DualPoint p);

/// Matrix with row sums p, column sums q and an exactly zero diagonal.
///
/// Throws InfeasibleError when max_i (p_i + q_i) > 1 + 1e-12. When the
/// maximum equals 1 the coupling is unique and is returned directly.
ProbabilityMatrix zero_trace_coupling(std::span<const double> p, std::span<const double> q);

/// A different zero-trace coupling with the same marginals, or nullopt when
/// m is the only one. Mass is shifted around an alternating cycle of
/// off-diagonal cells until some decreased cell reaches zero.
std::optional<ProbabilityMatrix> perturb_coupling(const ProbabilityMatrix& m);

/// Reads the coupling back from an extremal joint: each support point
/// contributes its probability to cell (argmax, argmin).
ProbabilityMatrix coupling_from_joint(const JointDiscreteDistribution& joint);

/// Extremal joint for the tight range bound (n >= 2).
JointDiscreteDistribution build_extremal_joint(const MomentSpec& spec, const SolverOptions& opts = {});

struct ExtremalConstruction {
    BoundReport report;
    ExtremalMarginals marginals;
    ProbabilityMatrix coupling;
    JointDiscreteDistribution joint;
    Uniqueness uniqueness = Uniqueness::Unknown;
    std::string taxonomy;  ///< region counts, advisory only
};

ExtremalConstruction build_extremal(const MomentSpec& spec, const SolverOptions& opts = {});

struct AgTightness {
    bool tight = false;
    bool condition_i = false;   ///< |d_i| <= sqrt(2) (d_i^2 + sigma_i^2) / sqrt(S) for all i
    bool condition_ii = false;  ///< (d_i^2 + sigma_i^2) / S <= 1/2 for all i
    Uniqueness unique = Uniqueness::Unknown;
    std::vector<double> p_plus;
    std::vector<double> p_minus;
    std::optional<ProbabilityMatrix> coupling;
    std::optional<JointDiscreteDistribution> construction;
};

AgTightness ag_tightness(const MomentSpec& spec);

/// n-point joint attaining the tight bound on E max.
JointDiscreteDistribution bnt_extremal_max(const MomentSpec& spec);

/// The two-point pair attaining rho_2.
JointDiscreteDistribution rho2_extremal_pair(const MomentSpec& spec);

/// Sampler for a pair with given means, deviations and correlation and
/// |X1 - X2| = gamma_2 almost surely. Not thread-safe; clone per worker.
class PairSampler {
public:
    PairSampler(double mu1, double mu2, double sigma1, double sigma2, double rho, std::uint64_t seed);

    std::array<double, 2> sample();
    PairSampler clone(std::uint64_t seed) const;

    /// The law being sampled (four points, or two in the degenerate case).
    const JointDiscreteDistribution& law() const noexcept { return law_; }
    double gamma() const noexcept { return gamma_; }
    bool degenerate() const noexcept { return degenerate_; }

private:
    PairSampler(const PairSampler& other, std::uint64_t seed);

    double gamma_ = 0.0;
    bool degenerate_ = false;
    JointDiscreteDistribution law_;
    std::vector<double> cumulative_;
    std::mt19937_64 rng_;
};

PairSampler extremal_pair_given_correlation(double mu1, double mu2, double sigma1, double sigma2, double rho,
                                            std::uint64_t seed);

}  // namespace rangebound

#include "rangebound/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "random_util.hpp"
#include "rangebound/errors.hpp"

namespace rangebound {

namespace {

// Neumaier compensated sum.
class Accumulator {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double range_of(const std::vector<double>& x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *hi - *lo;
}

struct Welford {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }

    void merge(const Welford& o) {
        if (o.count == 0.0) return;
        if (count == 0.0) {
            *this = o;
            return;
        }
        const double total = count + o.count;
        const double d = o.mean - mean;
        mean += d * o.count / total;
        m2 += o.m2 + d * d * count * o.count / total;
        count = total;
    }
};

// Runs body(shard, count, rng) on kMonteCarloShards threads and merges the
// shard statistics in index order.
McEstimate sharded(std::size_t n_samples, std::uint64_t seed,
                   const std::function<void(std::size_t, std::size_t, std::mt19937_64&, Welford&)>& body) {
    if (n_samples == 0) throw DomainError("Monte Carlo: n_samples must be at least 1");
    std::vector<Welford> stats(kMonteCarloShards);
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < kMonteCarloShards; ++k) {
        const std::size_t count = n_samples / kMonteCarloShards + (k < n_samples % kMonteCarloShards ? 1 : 0);
        workers.emplace_back([&, k, count] {
            std::mt19937_64 rng(detail::shard_seed(seed, k));
            body(k, count, rng, stats[k]);
        });
    }
    for (auto& w : workers) w.join();
    Welford all;
    for (const auto& s : stats) all.merge(s);
    McEstimate out;
    out.estimate = all.mean;
    if (all.count > 1.0) out.std_error = std::sqrt(std::max(0.0, all.m2 / (all.count - 1.0)) / all.count);
    return out;
}

Eigen::MatrixXd dispersion_root(const MomentSpec& spec,
                                const std::optional<std::vector<std::vector<double>>>& dispersion) {
    const std::size_t n = spec.size();
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (!dispersion) {
        for (std::size_t i = 0; i < n; ++i) sigma(i, i) = spec.sigma(i) * spec.sigma(i);
    } else {
        const auto& d = *dispersion;
        if (d.size() != n) throw DomainError("infimum_witness: dispersion matrix has the wrong size");
        for (std::size_t i = 0; i < n; ++i) {
            if (d[i].size() != n) throw DomainError("infimum_witness: dispersion matrix is not square");
            for (std::size_t j = 0; j < n; ++j) sigma(i, j) = d[i][j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double s2 = spec.sigma(i) * spec.sigma(i);
            if (std::abs(sigma(i, i) - s2) > 1e-10 * std::max(1.0, s2)) {
                std::ostringstream os;
                os << "infimum_witness: dispersion diagonal entry " << i << " is " << sigma(i, i)
                   << " but sigma^2 is " << s2;
                throw DomainError(os.str());
            }
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-10 * std::max(1.0, std::abs(sigma(i, j))))
                    throw DomainError("infimum_witness: dispersion matrix is not symmetric");
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    Eigen::VectorXd values = eig.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (values.minCoeff() < -1e-10 * scale) throw DomainError("infimum_witness: dispersion matrix is not nonnegative definite");
    values = values.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("infimum_witness: epsilon must lie in (0, 1)");
}

}  // namespace

MomentCheckReport check_moments(const JointDiscreteDistribution& joint, const MomentSpec& spec, double tol) {
    const std::size_t n = spec.size();
    if (joint.dimension() != n) {
        std::ostringstream os;
        os << "check_moments: joint has dimension " << joint.dimension() << " but spec has " << n;
        throw DomainError(os.str());
    }
    MomentCheckReport rep;
    rep.pass = true;
    for (std::size_t i = 0; i < n; ++i) {
        Accumulator mean;
        for (std::size_t k = 0; k < joint.size(); ++k) mean.add(joint.prob(k) * joint.point(k)[i]);
        const double m = mean.value();
        Accumulator var;
        for (std::size_t k = 0; k < joint.size(); ++k) {
            const double d = joint.point(k)[i] - m;
            var.add(joint.prob(k) * d * d);
        }
        rep.mean_errors.push_back(std::abs(m - spec.mu(i)));
        rep.var_errors.push_back(std::abs(var.value() - spec.sigma(i) * spec.sigma(i)));
        if (!(rep.mean_errors.back() <= tol) || !(rep.var_errors.back() <= tol)) rep.pass = false;
    }
    rep.expected_range = expected_range(joint);
    return rep;
}

double expected_range(const JointDiscreteDistribution& joint) {
    if (joint.size() == 0) throw DomainError("expected_range: empty support");
    Accumulator acc;
    for (std::size_t k = 0; k < joint.size(); ++k) acc.add(joint.prob(k) * range_of(joint.point(k)));
    return acc.value();
}

McEstimate mc_expected_range(const JointDiscreteDistribution& joint, std::size_t n_samples, std::uint64_t seed) {
    const auto cum = detail::cumulative(joint.probs());
    std::vector<double> ranges(joint.size());
    for (std::size_t k = 0; k < joint.size(); ++k) ranges[k] = range_of(joint.point(k));
    return sharded(n_samples, seed, [&](std::size_t, std::size_t count, std::mt19937_64& rng, Welford& w) {
        for (std::size_t s = 0; s < count; ++s) w.add(ranges[detail::draw_index(cum, detail::uniform01(rng))]);
    });
}

McEstimate mc_expected_range(const PairSampler& sampler, std::size_t n_samples, std::uint64_t seed) {
    return sharded(n_samples, seed, [&](std::size_t k, std::size_t count, std::mt19937_64&, Welford& w) {
        PairSampler local = sampler.clone(detail::shard_seed(seed, k));
        for (std::size_t s = 0; s < count; ++s) {
            const auto x = local.sample();
            w.add(std::abs(x[0] - x[1]));
        }
    });
}

ProbeResult feasible_probe_detailed(const MomentSpec& spec, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw DomainError("feasible_probe: trials must be at least 1");
    const std::size_t n = spec.size();
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return detail::uniform01(rng); };

    ProbeResult out;
    out.max_range = -std::numeric_limits<double>::infinity();
    out.min_range = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        bool built = false;
        for (int attempt = 0; attempt < 100 && !built; ++attempt) {
            std::vector<std::vector<double>> values(n);
            std::size_t kmax = 0;
            for (auto& v : values) {
                v.resize(2 + static_cast<std::size_t>(rng() % 4));
                for (double& x : v) x = 2.0 * uniform() - 1.0;
                kmax = std::max(kmax, v.size());
            }
            const std::size_t atoms = kmax + static_cast<std::size_t>(rng() % (kmax + 1));
            std::vector<std::vector<double>> support(atoms, std::vector<double>(n));
            std::vector<double> w(atoms);
            double total = 0.0;
            for (std::size_t a = 0; a < atoms; ++a) {
                for (std::size_t i = 0; i < n; ++i) support[a][i] = values[i][rng() % values[i].size()];
                w[a] = -std::log1p(-uniform()) + 1e-3;
                total += w[a];
            }
            for (double& x : w) x /= total;

            bool degenerate = false;
            for (std::size_t i = 0; i < n && !degenerate; ++i) {
                Accumulator m;
                for (std::size_t a = 0; a < atoms; ++a) m.add(w[a] * support[a][i]);
                Accumulator v;
                for (std::size_t a = 0; a < atoms; ++a) {
                    const double d = support[a][i] - m.value();
                    v.add(w[a] * d * d);
                }
                const double sd = std::sqrt(v.value());
                if (sd < 1e-6) {
                    degenerate = true;
                    break;
                }
                for (std::size_t a = 0; a < atoms; ++a)
                    support[a][i] = spec.mu(i) + spec.sigma(i) * (support[a][i] - m.value()) / sd;
            }
            if (degenerate) continue;

            Accumulator total_mass;
            for (double x : w) total_mass.add(x);
            const double mass = total_mass.value();
            for (double& x : w) x /= mass;
            const double er = expected_range(JointDiscreteDistribution(std::move(support), std::move(w)));
            out.max_range = std::max(out.max_range, er);
            out.min_range = std::min(out.min_range, er);
            built = true;
        }
        if (!built) throw Error("feasible_probe: could not generate a non-degenerate joint");
        ++out.trials;
    }
    return out;
}

double feasible_probe(const MomentSpec& spec, std::size_t trials, std::uint64_t seed) {
    return feasible_probe_detailed(spec, trials, seed).max_range;
}

GridResult dual_grid_search(const MomentSpec& spec, std::size_t grid) {
    grid = std::max<std::size_t>(grid, 2);
    double span = spec.mean_spread();
    if (span <= 0.0) {
        const auto s = spec.sigma();
        span = *std::max_element(s.begin(), s.end());
    }
    const double lo = spec.min_mean() - span, hi = spec.max_mean() + span;
    const double bar = spec.mean_of_means();
    double lambda_max = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) lambda_max += std::hypot(spec.mu(i) - bar, spec.sigma(i));

    GridResult best{std::numeric_limits<double>::infinity(), {}};
    for (std::size_t j = 0; j < grid; ++j) {
        const double c = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(grid - 1);
        for (std::size_t k = 1; k <= grid; ++k) {
            const double lambda = lambda_max * static_cast<double>(k) / static_cast<double>(grid);
            const double v = phi({c, lambda}, spec);
            if (v < best.min_phi) best = {v, {c, lambda}};
        }
    }
    return best;
}

double dual_grid_check(const MomentSpec& spec, std::size_t grid) { return dual_grid_search(spec, grid).min_phi; }

McEstimate infimum_witness(const MomentSpec& spec, const std::optional<std::vector<std::vector<double>>>& dispersion,
                           double epsilon, std::size_t n_samples, std::uint64_t seed) {
    check_epsilon(epsilon);
    const Eigen::MatrixXd root = dispersion_root(spec, dispersion) / std::sqrt(epsilon);
    const std::size_t n = spec.size();
    const double base = spec.mean_spread();
    return sharded(n_samples, seed, [&](std::size_t, std::size_t count, std::mt19937_64& rng, Welford& w) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        std::vector<double> x(n);
        for (std::size_t s = 0; s < count; ++s) {
            if (detail::uniform01(rng) >= epsilon) {
                w.add(base);
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = (rng() >> 63) ? 1.0 : -1.0;
            const Eigen::VectorXd shift = root * v;
            for (std::size_t i = 0; i < n; ++i) x[i] = spec.mu(i) + shift(static_cast<Eigen::Index>(i));
            w.add(range_of(x));
        }
    });
}

double infimum_witness_exact(const MomentSpec& spec,
                             const std::optional<std::vector<std::vector<double>>>& dispersion, double epsilon) {
    check_epsilon(epsilon);
    const std::size_t n = spec.size();
    if (n > 20) throw DomainError("infimum_witness_exact: n must be at most 20");
    const Eigen::MatrixXd root = dispersion_root(spec, dispersion) / std::sqrt(epsilon);
    const std::size_t patterns = std::size_t{1} << n;
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    std::vector<double> x(n);
    Accumulator acc;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
        for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = (mask >> i) & 1U ? 1.0 : -1.0;
        const Eigen::VectorXd shift = root * v;
        for (std::size_t i = 0; i < n; ++i) x[i] = spec.mu(i) + shift(static_cast<Eigen::Index>(i));
        acc.add(range_of(x));
    }
    return (1.0 - epsilon) * spec.mean_spread() + epsilon * acc.value() / static_cast<double>(patterns);
}

}  // namespace rangebound

#include "rangebound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "rangebound/errors.hpp"

namespace rangebound {

std::string to_string(Method m) {
    switch (m) {
        case Method::GeneralSolver: return "general-solver";
        case Method::N2ClosedForm: return "n2-closed-form";
        case Method::EqualMeansClosedForm: return "equal-means-closed-form";
    }
    return "unknown";
}

std::string BoundReport::method_tag() const {
    std::string tag = to_string(method);
    if (regions.boundary_degenerate) tag += "/boundary-degenerate";
    return tag;
}

namespace {

double sum_squared_dispersion(const MomentSpec& spec) {
    const double bar = spec.mean_of_means();
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double d = spec.mu(i) - bar;
        s += d * d + spec.sigma(i) * spec.sigma(i);
    }
    return s;
}

// u_i'(lambda) for a coordinate at distance a = |mu_i - c|.
double u_prime(double lambda, double a, double sigma) {
    const double s2 = a * a + sigma * sigma;
    const double t = 0.5 * std::sqrt(s2);
    if (lambda <= t) return 0.0;
    const double gamma = a > 0.0 ? s2 / (2.0 * a) : std::numeric_limits<double>::infinity();
    if (lambda < gamma) return 1.0 - s2 / (4.0 * lambda * lambda);
    const double d = lambda - a;
    return 0.5 * (1.0 + d / std::hypot(d, sigma));
}

double inner_residual(const MomentSpec& spec, double c, double lambda) {
    double s = -(static_cast<double>(spec.size()) - 2.0);
    for (std::size_t i = 0; i < spec.size(); ++i)
        s += u_prime(lambda, std::abs(spec.mu(i) - c), spec.sigma(i));
    return s;
}

struct OuterProbe {
    double c;
    double lambda;
    double slope;  // d phi / d c at (c, lambda(c))
};

OuterProbe probe(const MomentSpec& spec, double c, std::size_t inner_iter) {
    const double lambda = inner_lambda(spec, c, inner_iter);
    return {c, lambda, phi_gradient({c, lambda}, spec)[0]};
}

// Minimizes g(c) = phi(c, lambda(c)) by golden-section search on [lo, hi].
OuterProbe golden_section(const MomentSpec& spec, double lo, double hi, std::size_t max_iter,
                          std::size_t inner_iter, std::size_t& iterations) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    auto g = [&](double c) { return phi({c, inner_lambda(spec, c, inner_iter)}, spec); };
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double ga = g(a), gb = g(b);
    for (std::size_t k = 0; k < max_iter && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lo)); ++k) {
        ++iterations;
        if (ga < gb) {
            hi = b;
            b = a;
            gb = ga;
            a = hi - ratio * (hi - lo);
            ga = g(a);
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + ratio * (hi - lo);
            gb = g(b);
        }
    }
    return probe(spec, 0.5 * (lo + hi), inner_iter);
}

}  // namespace

double ag_bound(const MomentSpec& spec) { return std::sqrt(2.0 * sum_squared_dispersion(spec)); }

double ag_general_bound(const MomentSpec& spec, std::span<const double> coeffs) {
    if (coeffs.size() != spec.size()) {
        std::ostringstream os;
        os << "ag_general_bound: " << coeffs.size() << " coefficients for " << spec.size() << " coordinates";
        throw DomainError(os.str());
    }
    const double n = static_cast<double>(coeffs.size());
    const double csum = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
    const double cbar = csum / n;
    double cdev = 0.0;
    for (double ci : coeffs) cdev += (ci - cbar) * (ci - cbar);
    return spec.mean_of_means() * csum + std::sqrt(cdev) * std::sqrt(sum_squared_dispersion(spec));
}

double plackett_iid_bound(std::size_t n, double sigma) {
    if (n < 2) throw DomainError("plackett_iid_bound: need n >= 2");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("plackett_iid_bound: sigma must be positive and finite");
    // 1 / C(2n-2, n-1)
    double inv_binom;
    if (n <= 500) {
        double binom = 1.0;
        for (std::size_t k = 1; k < n; ++k) binom *= static_cast<double>(n - 1 + k) / static_cast<double>(k);
        inv_binom = 1.0 / binom;
    } else {
        const double dn = static_cast<double>(n);
        inv_binom = std::exp(2.0 * std::lgamma(dn) - std::lgamma(2.0 * dn - 1.0));
    }
    const double dn = static_cast<double>(n);
    return dn * sigma * std::sqrt(2.0 / (2.0 * dn - 1.0) * (1.0 - inv_binom));
}

BntResult bnt_max_bound(const MomentSpec& spec) {
    const std::size_t n = spec.size();
    const double target = static_cast<double>(n) - 2.0;
    auto lhs = [&](double y) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (y - spec.mu(i)) / std::hypot(spec.mu(i) - y, spec.sigma(i));
        return s - target;
    };
    const auto sig = spec.sigma();
    const double smax = *std::max_element(sig.begin(), sig.end());
    double lo = spec.min_mean() - smax * static_cast<double>(n);
    double hi = spec.max_mean() + smax * static_cast<double>(n);
    for (int k = 0; k < 200 && lhs(lo) >= 0.0; ++k) lo -= (hi - lo);
    for (int k = 0; k < 200 && lhs(hi) <= 0.0; ++k) hi += (hi - lo);

    double y = 0.5 * (lo + hi);
    for (int k = 0; k < 400; ++k) {
        y = 0.5 * (lo + hi);
        if (y <= lo || y >= hi) break;
        const double f = lhs(y);
        if (f > 0.0)
            hi = y;
        else if (f < 0.0)
            lo = y;
        else
            break;
    }

    double bound = -0.5 * target * y;
    for (std::size_t i = 0; i < n; ++i) bound += 0.5 * spec.mu(i) + 0.5 * std::hypot(spec.mu(i) - y, spec.sigma(i));
    return {bound, y};
}

double bnt_range_bound(const MomentSpec& spec) {
    std::vector<double> neg(spec.mu().begin(), spec.mu().end());
    for (double& m : neg) m = -m;
    const MomentSpec mirrored(std::move(neg), std::vector<double>(spec.sigma().begin(), spec.sigma().end()));
    return bnt_max_bound(spec).bound + bnt_max_bound(mirrored).bound;
}

double equal_means_bound(const MomentSpec& spec) {
    if (!spec.has_equal_means()) throw DomainError("equal_means_bound: means are not all equal");
    double total = 0.0, largest = 0.0;
    for (double s : spec.sigma()) {
        total += s * s;
        largest = std::max(largest, s * s);
    }
    if (2.0 * largest <= total) return std::sqrt(2.0 * total);
    return std::sqrt(largest) + std::sqrt(total - largest);
}

BoundReport rho2_closed(const MomentSpec& spec) {
    if (spec.size() != 2) throw DomainError("rho2_closed: requires exactly two coordinates");
    const double m1 = spec.mu(0), m2 = spec.mu(1);
    const double s1 = spec.sigma(0), s2 = spec.sigma(1);
    BoundReport rep;
    rep.rho = std::hypot(m1 - m2, s1 + s2);
    rep.optimum.c = (s1 * m2 + s2 * m1) / (s1 + s2);
    rep.optimum.lambda = rep.rho * std::min(s1, s2) / (2.0 * (s1 + s2));
    rep.regions = classify_regions(rep.optimum, spec);
    rep.ag = ag_bound(spec);
    rep.infimum = spec.mean_spread();
    rep.method = Method::N2ClosedForm;
    const auto g = phi_gradient(rep.optimum, spec);
    rep.residual = std::hypot(g[0], g[1]);
    return rep;
}

std::pair<double, double> inner_lambda_bracket(const MomentSpec& spec, double c) {
    std::vector<double> t(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) t[i] = 0.5 * std::hypot(spec.mu(i) - c, spec.sigma(i));
    const double total = std::accumulate(t.begin(), t.end(), 0.0);
    std::sort(t.begin(), t.end());
    return {t[t.size() - 2], total};
}

double inner_lambda(const MomentSpec& spec, double c, std::size_t max_iter) {
    if (spec.size() < 3) throw DomainError("inner_lambda: requires n >= 3");
    auto [lo, hi] = inner_lambda_bracket(spec, c);
    double f_lo = inner_residual(spec, c, lo);
    double f_hi = inner_residual(spec, c, hi);
    for (std::size_t k = 0; k < max_iter; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = inner_residual(spec, c, mid);
        if (f > 0.0) {
            hi = mid;
            f_hi = f;
        } else if (f < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            return mid;
        }
    }
    return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

BoundReport minimize_phi(const MomentSpec& spec, const SolverOptions& opts) {
    if (spec.size() == 2)
        throw DomainError("minimize_phi: the n = 2 minimizer set is a segment; use rho2_closed");
    if (!(opts.tol > 0.0)) throw DomainError("minimize_phi: tol must be positive");

    double lo = spec.min_mean();
    double hi = spec.max_mean();
    std::size_t iterations = 0;
    OuterProbe best{};

    if (lo == hi) {
        best = probe(spec, lo, opts.inner_max_iter);
    } else {
        const OuterProbe left = probe(spec, lo, opts.inner_max_iter);
        const OuterProbe right = probe(spec, hi, opts.inner_max_iter);
        bool consistent = !(std::isnan(left.slope) || std::isnan(right.slope));
        if (consistent && left.slope >= 0.0 && right.slope > 0.0) {
            best = left;
        } else if (consistent && right.slope <= 0.0 && left.slope < 0.0) {
            best = right;
        } else if (!consistent || left.slope > 0.0 || right.slope < 0.0) {
            best = golden_section(spec, lo, hi, opts.outer_max_iter, opts.inner_max_iter, iterations);
        } else {
            best = std::abs(left.slope) <= std::abs(right.slope) ? left : right;
            double c = 0.5 * (lo + hi);
            if (opts.initial_c) c = std::clamp(*opts.initial_c, lo, hi);
            for (; iterations < opts.outer_max_iter; ++iterations) {
                if (c <= lo || c >= hi) break;
                const OuterProbe p = probe(spec, c, opts.inner_max_iter);
                if (std::isnan(p.slope)) break;
                if (std::abs(p.slope) < std::abs(best.slope)) best = p;
                if (p.slope > 0.0)
                    hi = c;
                else if (p.slope < 0.0)
                    lo = c;
                else
                    break;
                c = 0.5 * (lo + hi);
            }
        }
    }

    BoundReport rep;
    rep.optimum = {best.c, best.lambda};
    rep.rho = phi(rep.optimum, spec);
    rep.regions = classify_regions(rep.optimum, spec);
    rep.ag = ag_bound(spec);
    rep.infimum = spec.mean_spread();
    rep.method = Method::GeneralSolver;
    rep.iterations = iterations;
    const auto g = phi_gradient(rep.optimum, spec);
    rep.residual = std::hypot(g[0], g[1]);
    if (!(rep.residual <= opts.tol)) {
        std::ostringstream os;
        os << "minimize_phi: gradient norm " << rep.residual << " exceeds tolerance " << opts.tol
           << " after " << iterations << " outer iterations";
        throw ConvergenceError(os.str(), rep.optimum.c, rep.optimum.lambda, rep.residual);
    }
    return rep;
}

BoundReport rho_bound(const MomentSpec& spec, const SolverOptions& opts) {
    if (spec.size() == 2) return rho2_closed(spec);
    BoundReport rep = minimize_phi(spec, opts);
    if (spec.has_equal_means()) {
        const double closed = equal_means_bound(spec);
        if (std::abs(closed - rep.rho) > 1e-8 * std::max(1.0, std::abs(closed))) {
            std::ostringstream os;
            os.precision(17);
            os << "rho_bound: equal-means closed form " << closed << " disagrees with solver value " << rep.rho;
            throw Error(os.str());
        }
        rep.rho = closed;
        rep.method = Method::EqualMeansClosedForm;
    }
    return rep;
}

double gamma2_bound(double mu1, double mu2, double sigma1, double sigma2, double rho) {
    if (!(std::abs(rho) <= 1.0)) throw DomainError("gamma2_bound: correlation must lie in [-1, 1]");
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw DomainError("gamma2_bound: sigmas must be positive");
    const double d = mu1 - mu2;
    const double r2 = d * d + sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * rho * sigma1 * sigma2;
    return std::sqrt(std::max(0.0, r2));
}

PairBounds pair_cov_bounds(double mu1, double mu2, double sigma1, double sigma2, double rho) {
    const double g = gamma2_bound(mu1, mu2, sigma1, sigma2, rho);
    PairBounds b;
    b.max_low = std::max(mu1, mu2);
    b.max_high = 0.5 * (mu1 + mu2) + 0.5 * g;
    b.cov_low = rho * sigma1 * sigma2;
    b.cov_high = 0.25 * (sigma1 * sigma1 + sigma2 * sigma2 + 2.0 * rho * sigma1 * sigma2);
    return b;
}

}  // namespace rangebound

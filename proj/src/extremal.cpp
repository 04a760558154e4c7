#include "rangebound/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "random_util.hpp"
#include "rangebound/errors.hpp"

namespace rangebound {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kResidualMass = 1e-14;
constexpr double kNegligible = 1e-15;

double sum_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

void validate_probability_vector(std::span<const double> v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] < 0.0) {
            std::ostringstream os;
            os << "zero_trace_coupling: " << name << "[" << i << "] = " << v[i] << " is not a probability";
            throw DomainError(os.str());
        }
    }
    const double s = sum_of(v);
    if (std::abs(s - 1.0) > kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "zero_trace_coupling: " << name << " sums to " << s << ", not 1";
        throw DomainError(os.str());
    }
}

bool marginals_match(const std::vector<std::vector<double>>& q, std::span<const double> p,
                     std::span<const double> r) {
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (q[i][i] != 0.0) return false;
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (q[i][j] < 0.0) return false;
            row += q[i][j];
            col += q[j][i];
        }
        if (std::abs(row - p[i]) > kMassTol || std::abs(col - r[i]) > kMassTol) return false;
    }
    return true;
}

// Transfers mass between the two heaviest indices (by remaining row + column
// mass), never letting any other index exceed the remaining total.
std::optional<std::vector<std::vector<double>>> greedy_coupling(std::span<const double> p,
                                                                std::span<const double> q) {
    const std::size_t n = p.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    std::vector<double> r(p.begin(), p.end()), s(q.begin(), q.end());
    double m = sum_of(r);

    const std::size_t max_steps = 4 * n * n + 16;
    for (std::size_t step = 0; step < max_steps && m > kResidualMass; ++step) {
        std::size_t k1 = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (r[k] + s[k] > r[k1] + s[k1]) k1 = k;
        std::size_t k2 = k1 == 0 ? 1 : 0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != k1 && r[k] + s[k] > r[k2] + s[k2]) k2 = k;

        std::size_t a = n, b = n;
        if (r[k1] > 0.0 && s[k2] > 0.0) {
            a = k1, b = k2;
        } else if (r[k2] > 0.0 && s[k1] > 0.0) {
            a = k2, b = k1;
        } else if (r[k1] > 0.0) {
            a = k1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k1 && (b == n || s[j] > s[b])) b = j;
        } else if (s[k1] > 0.0) {
            b = k1;
            for (std::size_t i = 0; i < n; ++i)
                if (i != k1 && (a == n || r[i] > r[a])) a = i;
        }
        if (a == n || b == n || r[a] <= 0.0 || s[b] <= 0.0) return std::nullopt;

        double other = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != a && k != b) other = std::max(other, r[k] + s[k]);
        const double delta = std::min({r[a], s[b], m - other});
        if (!(delta > 0.0)) return std::nullopt;

        out[a][b] += delta;
        r[a] -= delta;
        s[b] -= delta;
        if (r[a] < kNegligible) r[a] = 0.0;
        if (s[b] < kNegligible) s[b] = 0.0;
        m = sum_of(r);
    }
    if (m > kResidualMass) return std::nullopt;
    return out;
}

// Starts from the product coupling and removes diagonal mass with 2x2 swaps
// (two positive diagonal cells) or the 3-cell swap (kk, rs) -> (rk, ks).
std::optional<std::vector<std::vector<double>>> trace_reduction(std::span<const double> p,
                                                                std::span<const double> q) {
    const std::size_t n = p.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = p[i] * q[j];

    const std::size_t max_steps = 20 * n * n + 100;
    for (std::size_t step = 0; step < max_steps; ++step) {
        std::vector<std::size_t> diag;
        double trace = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (out[k][k] > 0.0) diag.push_back(k);
            trace += out[k][k];
        }
        if (trace <= kResidualMass) break;
        if (diag.size() >= 2) {
            const std::size_t k = diag[0], l = diag[1];
            const double eps = std::min(out[k][k], out[l][l]);
            out[k][k] -= eps;
            out[l][l] -= eps;
            out[k][l] += eps;
            out[l][k] += eps;
            if (out[k][k] < kNegligible) out[k][k] = 0.0;
            if (out[l][l] < kNegligible) out[l][l] = 0.0;
            continue;
        }
        const std::size_t k = diag[0];
        std::size_t br = n, bs = n;
        for (std::size_t i = 0; i < n && br == n; ++i) {
            if (i == k) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != k && j != i && out[i][j] > 0.0) {
                    br = i, bs = j;
                    break;
                }
            }
        }
        if (br == n) return std::nullopt;
        const double eps = std::min(out[k][k], out[br][bs]);
        out[k][k] -= eps;
        out[br][bs] -= eps;
        out[br][k] += eps;
        out[k][bs] += eps;
        if (out[k][k] < kNegligible) out[k][k] = 0.0;
        if (out[br][bs] < kNegligible) out[br][bs] = 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) out[k][k] = 0.0;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double ThreePointDist::mean() const noexcept { return p_minus * x_minus + p_zero * x_zero + p_plus * x_plus; }

double ThreePointDist::variance() const noexcept {
    const double m = mean();
    const double a = x_minus - m, b = x_zero - m, c = x_plus - m;
    return p_minus * a * a + p_zero * b * b + p_plus * c * c;
}

std::vector<std::pair<double, double>> ThreePointDist::support() const {
    std::vector<std::pair<double, double>> out;
    if (p_minus > 0.0) out.emplace_back(x_minus, p_minus);
    if (p_zero > 0.0) out.emplace_back(x_zero, p_zero);
    if (p_plus > 0.0) out.emplace_back(x_plus, p_plus);
    return out;
}

ProbabilityMatrix::ProbabilityMatrix(std::vector<std::vector<double>> q) : q_(std::move(q)) {
    if (q_.empty()) throw DomainError("probability matrix: empty");
    double total = 0.0;
    for (std::size_t i = 0; i < q_.size(); ++i) {
        if (q_[i].size() != q_.size()) throw DomainError("probability matrix: not square");
        for (std::size_t j = 0; j < q_.size(); ++j) {
            if (!std::isfinite(q_[i][j]) || q_[i][j] < 0.0) {
                std::ostringstream os;
                os << "probability matrix: entry (" << i << ", " << j << ") = " << q_[i][j] << " is negative";
                throw DomainError(os.str());
            }
            total += q_[i][j];
        }
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "probability matrix: total mass " << total << " differs from 1";
        throw DomainError(os.str());
    }
}

std::vector<double> ProbabilityMatrix::row_marginals() const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (double x : q_[i]) out[i] += x;
    return out;
}

std::vector<double> ProbabilityMatrix::col_marginals() const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < size(); ++j) out[j] += q_[i][j];
    return out;
}

double ProbabilityMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < size(); ++i) t += q_[i][i];
    return t;
}

bool ProbabilityMatrix::zero_trace() const noexcept {
    for (std::size_t i = 0; i < size(); ++i)
        if (q_[i][i] != 0.0) return false;
    return true;
}

JointDiscreteDistribution::JointDiscreteDistribution(std::vector<std::vector<double>> support,
                                                     std::vector<double> prob) {
    if (support.empty()) throw DomainError("joint distribution: empty support");
    if (support.size() != prob.size()) throw DomainError("joint distribution: support and prob lengths differ");
    const std::size_t n = support.front().size();
    if (n == 0) throw DomainError("joint distribution: zero-dimensional support");
    double total = 0.0;
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (support[k].size() != n) throw DomainError("joint distribution: support vectors differ in dimension");
        for (double x : support[k])
            if (!std::isfinite(x)) throw DomainError("joint distribution: non-finite support value");
        if (!std::isfinite(prob[k]) || prob[k] < 0.0) throw DomainError("joint distribution: negative probability");
        total += prob[k];
        auto [it, inserted] = seen.emplace(support[k], support_.size());
        if (inserted) {
            support_.push_back(std::move(support[k]));
            prob_.push_back(prob[k]);
        } else {
            prob_[it->second] += prob[k];
        }
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "joint distribution: probabilities sum to " << total;
        throw DomainError(os.str());
    }
}

std::string to_string(Uniqueness u) {
    switch (u) {
        case Uniqueness::Unique: return "unique";
        case Uniqueness::NotUnique: return "not-unique";
        case Uniqueness::Unknown: return "unknown";
    }
    return "unknown";
}

ThreePointDist univariate_extremal(double mu, double sigma, double c, double lambda) {
    if (!std::isfinite(mu) || !std::isfinite(c)) throw DomainError("univariate_extremal: mu and c must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("univariate_extremal: sigma must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("univariate_extremal: lambda must be positive");

    ThreePointDist d;
    d.row = classify_coordinate(mu, sigma, {c, lambda});
    d.x_minus = c - 2.0 * lambda;
    d.x_zero = c;
    d.x_plus = c + 2.0 * lambda;
    const double xi = mu - c;
    const double theta2 = xi * xi + sigma * sigma;
    switch (d.row) {
        case Region::Outer: {
            const double theta = std::sqrt(theta2);
            d.x_minus = c - theta;
            d.x_plus = c + theta;
            d.p_minus = 0.5 * (1.0 - xi / theta);
            d.p_plus = 0.5 * (1.0 + xi / theta);
            break;
        }
        case Region::Middle: {
            const double l2 = lambda * lambda;
            d.p_minus = (theta2 - 2.0 * lambda * xi) / (8.0 * l2);
            d.p_zero = 1.0 - theta2 / (4.0 * l2);
            d.p_plus = (theta2 + 2.0 * lambda * xi) / (8.0 * l2);
            break;
        }
        case Region::Upper: {
            const double alpha = std::hypot(xi - lambda, sigma);
            d.x_zero = c + lambda - alpha;
            d.x_plus = c + lambda + alpha;
            d.p_zero = 0.5 * (1.0 - (xi - lambda) / alpha);
            d.p_plus = 0.5 * (1.0 + (xi - lambda) / alpha);
            break;
        }
        case Region::Lower: {
            const double beta = std::hypot(xi + lambda, sigma);
            d.x_minus = c - lambda - beta;
            d.x_zero = c - lambda + beta;
            d.p_minus = 0.5 * (1.0 - (xi + lambda) / beta);
            d.p_zero = 0.5 * (1.0 + (xi + lambda) / beta);
            break;
        }
    }
    d.p_minus = std::max(0.0, d.p_minus);
    d.p_zero = std::max(0.0, d.p_zero);
    d.p_plus = std::max(0.0, d.p_plus);
    return d;
}

ExtremalMarginals extremal_marginals(const MomentSpec& spec, DualPoint p) {
    ExtremalMarginals out;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out.laws.push_back(univariate_extremal(spec.mu(i), spec.sigma(i), p.c, p.lambda));
        out.p_plus.push_back(out.laws.back().p_plus);
        out.p_minus.push_back(out.laws.back().p_minus);
    }
    const double sp = sum_of(out.p_plus), sm = sum_of(out.p_minus);
    if (std::abs(sp - 1.0) > 1e-6 || std::abs(sm - 1.0) > 1e-6) {
        std::ostringstream os;
        os.precision(17);
        os << "extremal_marginals: (c, lambda) = (" << p.c << ", " << p.lambda
           << ") is not optimal: sum p+ = " << sp << ", sum p- = " << sm;
        throw DomainError(os.str());
    }
    return out;
}

ProbabilityMatrix zero_trace_coupling(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DomainError("zero_trace_coupling: marginals differ in length");
    if (p.size() < 2) throw DomainError("zero_trace_coupling: need n >= 2");
    validate_probability_vector(p, "p");
    validate_probability_vector(q, "q");
    const std::size_t n = p.size();

    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (p[i] + q[i] > p[k] + q[k]) k = i;
    const double peak = p[k] + q[k];
    if (peak > 1.0 + kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "zero_trace_coupling: infeasible, p[" << k << "] + q[" << k << "] = " << peak
           << " exceeds 1 (need max_i p_i + q_i <= 1)";
        throw InfeasibleError(os.str());
    }

    if (peak >= 1.0 - kMassTol) {
        std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            out[i][k] = p[i];
            out[k][i] = q[i];
        }
        return ProbabilityMatrix(std::move(out));
    }

    if (auto g = greedy_coupling(p, q); g && marginals_match(*g, p, q)) return ProbabilityMatrix(std::move(*g));
    if (auto t = trace_reduction(p, q); t && marginals_match(*t, p, q)) return ProbabilityMatrix(std::move(*t));
    throw Error("zero_trace_coupling: no construction met the marginal tolerance");
}

std::optional<ProbabilityMatrix> perturb_coupling(const ProbabilityMatrix& m) {
    if (!m.zero_trace()) throw DomainError("perturb_coupling: input has a nonzero diagonal");
    const std::size_t n = m.size();
    const auto& q = m.rows();

    // Nodes 0..n-1 are rows, n..2n-1 columns. Row i -> col j lowers q_ij
    // (needs q_ij > 0); col j -> row i raises q_ij (needs i != j).
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (q[r][c] <= 0.0) continue;
            std::vector<std::size_t> parent(2 * n, 2 * n);
            std::deque<std::size_t> frontier{n + c};
            parent[n + c] = n + c;
            bool found = false;
            while (!frontier.empty() && !found) {
                const std::size_t node = frontier.front();
                frontier.pop_front();
                if (node >= n) {
                    const std::size_t col = node - n;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i == col || parent[i] != 2 * n) continue;
                        if (col == c && i == r) continue;
                        parent[i] = node;
                        if (i == r) {
                            found = true;
                            break;
                        }
                        frontier.push_back(i);
                    }
                } else {
                    for (std::size_t j = 0; j < n; ++j) {
                        if (q[node][j] <= 0.0 || parent[n + j] != 2 * n) continue;
                        parent[n + j] = node;
                        frontier.push_back(n + j);
                    }
                }
            }
            if (!found) continue;

            // Walk back from row r to col c collecting the cycle's cells.
            std::vector<std::pair<std::size_t, std::size_t>> lower{{r, c}}, raise;
            std::size_t node = r;
            while (node != n + c) {
                const std::size_t prev = parent[node];
                if (node < n)
                    raise.emplace_back(node, prev - n);
                else
                    lower.emplace_back(prev, node - n);
                node = prev;
            }
            double eps = q[r][c];
            for (auto [i, j] : lower) eps = std::min(eps, q[i][j]);
            auto next = q;
            for (auto [i, j] : lower) next[i][j] = std::max(0.0, next[i][j] - eps);
            for (auto [i, j] : raise) next[i][j] += eps;
            return ProbabilityMatrix(std::move(next));
        }
    }
    return std::nullopt;
}

ProbabilityMatrix coupling_from_joint(const JointDiscreteDistribution& joint) {
    const std::size_t n = joint.dimension();
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < joint.size(); ++k) {
        const auto& x = joint.point(k);
        const auto hi = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
        const auto lo = static_cast<std::size_t>(std::min_element(x.begin(), x.end()) - x.begin());
        q[hi][lo] += joint.prob(k);
    }
    return ProbabilityMatrix(std::move(q));
}

JointDiscreteDistribution rho2_extremal_pair(const MomentSpec& spec) {
    if (spec.size() != 2) throw DomainError("rho2_extremal_pair: requires exactly two coordinates");
    const double m1 = spec.mu(0), m2 = spec.mu(1);
    const double s1 = spec.sigma(0), s2 = spec.sigma(1);
    const double rho = std::hypot(m1 - m2, s1 + s2);
    const double c0 = (s1 * m2 + s2 * m1) / (s1 + s2);
    const double a1 = s1 * rho / (s1 + s2), a2 = s2 * rho / (s1 + s2);
    const double p = 0.5 * (1.0 + (m1 - m2) / rho);
    return JointDiscreteDistribution({{c0 + a1, c0 - a2}, {c0 - a1, c0 + a2}}, {p, 1.0 - p});
}

namespace {

ExtremalConstruction build_pair(const MomentSpec& spec) {
    BoundReport report = rho2_closed(spec);
    JointDiscreteDistribution joint = rho2_extremal_pair(spec);
    const double p = joint.prob(0);
    ExtremalMarginals marg;
    for (std::size_t i = 0; i < 2; ++i) {
        ThreePointDist d;
        d.row = classify_coordinate(spec.mu(i), spec.sigma(i), report.optimum);
        const double v0 = joint.point(0)[i], v1 = joint.point(1)[i];
        // Coordinate 0 is the maximum in point 0, coordinate 1 in point 1.
        d.x_plus = i == 0 ? v0 : v1;
        d.x_minus = i == 0 ? v1 : v0;
        d.p_plus = i == 0 ? p : 1.0 - p;
        d.p_minus = 1.0 - d.p_plus;
        d.x_zero = report.optimum.c;
        marg.laws.push_back(d);
        marg.p_plus.push_back(d.p_plus);
        marg.p_minus.push_back(d.p_minus);
    }
    ProbabilityMatrix coupling({{0.0, p}, {1.0 - p, 0.0}});
    return {std::move(report), std::move(marg), std::move(coupling), std::move(joint), Uniqueness::Unique,
            "n=2"};
}

}  // namespace

ExtremalConstruction build_extremal(const MomentSpec& spec, const SolverOptions& opts) {
    if (spec.size() == 2) return build_pair(spec);

    BoundReport report = rho_bound(spec, opts);
    ExtremalMarginals marg = extremal_marginals(spec, report.optimum);
    std::vector<double> pp = marg.p_plus, pm = marg.p_minus;
    const double sp = sum_of(pp), sm = sum_of(pm);
    for (double& x : pp) x /= sp;
    for (double& x : pm) x /= sm;
    ProbabilityMatrix coupling = zero_trace_coupling(pp, pm);

    const std::size_t n = spec.size();
    std::vector<double> base(n);
    for (std::size_t k = 0; k < n; ++k) base[k] = marg.laws[k].x_zero;
    std::vector<std::vector<double>> support;
    std::vector<double> prob;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (coupling(i, j) <= 0.0) continue;
            auto x = base;
            x[i] = marg.laws[i].x_plus;
            x[j] = marg.laws[j].x_minus;
            support.push_back(std::move(x));
            prob.push_back(coupling(i, j));
        }
    }
    JointDiscreteDistribution joint(std::move(support), std::move(prob));

    Uniqueness uniq;
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, pp[i] + pm[i]);
    if (report.regions.i1.size() == 1 || peak >= 1.0 - kMassTol)
        uniq = Uniqueness::Unique;
    else
        uniq = perturb_coupling(coupling) ? Uniqueness::NotUnique : Uniqueness::Unique;

    std::ostringstream tag;
    tag << "n1=" << report.regions.i1.size() << " n2=" << report.regions.i2.size()
        << " n3=" << report.regions.i3.size() << " n4=" << report.regions.i4.size();

    return {std::move(report), std::move(marg), std::move(coupling), std::move(joint), uniq, tag.str()};
}

JointDiscreteDistribution build_extremal_joint(const MomentSpec& spec, const SolverOptions& opts) {
    return build_extremal(spec, opts).joint;
}

AgTightness ag_tightness(const MomentSpec& spec) {
    const std::size_t n = spec.size();
    const double bar = spec.mean_of_means();
    std::vector<double> d(n), w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = spec.mu(i) - bar;
        w[i] = d[i] * d[i] + spec.sigma(i) * spec.sigma(i);
        total += w[i];
    }
    const double root = std::sqrt(total);
    const double ag = std::sqrt(2.0 * total);

    AgTightness out;
    out.condition_i = true;
    out.condition_ii = true;
    bool equality_ii = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(d[i]) > std::sqrt(2.0) * w[i] / root * (1.0 + kMassTol)) out.condition_i = false;
        const double share = w[i] / total;
        if (share > 0.5 * (1.0 + kMassTol)) out.condition_ii = false;
        if (std::abs(share - 0.5) <= 0.5 * kMassTol) equality_ii = true;
    }
    out.tight = out.condition_i && out.condition_ii;
    if (!out.tight) return out;

    for (std::size_t i = 0; i < n; ++i) {
        out.p_plus.push_back(std::max(0.0, (w[i] + 0.5 * d[i] * ag) / total));
        out.p_minus.push_back(std::max(0.0, (w[i] - 0.5 * d[i] * ag) / total));
    }
    const double sp = sum_of(out.p_plus), sm = sum_of(out.p_minus);
    std::vector<double> pp = out.p_plus, pm = out.p_minus;
    for (double& x : pp) x /= sp;
    for (double& x : pm) x /= sm;
    ProbabilityMatrix coupling = zero_trace_coupling(pp, pm);

    std::vector<std::vector<double>> support;
    std::vector<double> prob;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (coupling(i, j) <= 0.0) continue;
            std::vector<double> x(n, bar);
            x[i] = bar + 0.5 * ag;
            x[j] = bar - 0.5 * ag;
            support.push_back(std::move(x));
            prob.push_back(coupling(i, j));
        }
    }
    if (equality_ii)
        out.unique = Uniqueness::Unique;
    else
        out.unique = perturb_coupling(coupling) ? Uniqueness::NotUnique : Uniqueness::Unique;
    out.construction.emplace(std::move(support), std::move(prob));
    out.coupling.emplace(std::move(coupling));
    return out;
}

JointDiscreteDistribution bnt_extremal_max(const MomentSpec& spec) {
    const std::size_t n = spec.size();
    const double y0 = bnt_max_bound(spec).y0;
    std::vector<double> alpha(n), p(n);
    for (std::size_t j = 0; j < n; ++j) {
        alpha[j] = std::hypot(spec.mu(j) - y0, spec.sigma(j));
        p[j] = 0.5 * (1.0 - (y0 - spec.mu(j)) / alpha[j]);
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    std::vector<std::vector<double>> support;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = y0 - alpha[i];
        x[j] = y0 + alpha[j];
        support.push_back(std::move(x));
        p[j] /= total;
    }
    return JointDiscreteDistribution(std::move(support), std::move(p));
}

// ---------------------------------------------------------------------------

namespace {

JointDiscreteDistribution pair_law(double mu1, double mu2, double s1, double s2, double rho, double& gamma,
                                   bool& degenerate) {
    gamma = gamma2_bound(mu1, mu2, s1, s2, rho);
    const double delta = s1 * s1 + s2 * s2 - 2.0 * rho * s1 * s2;
    degenerate = delta <= 1e-14 * (s1 * s1 + s2 * s2);
    if (degenerate) {
        const double s = 0.5 * (s1 + s2);
        return JointDiscreteDistribution({{mu1 - s, mu2 - s}, {mu1 + s, mu2 + s}}, {0.5, 0.5});
    }
    const double p = 0.5 * (1.0 + (mu1 - mu2) / gamma);
    const double mt = mu1 * s2 * s2 + mu2 * s1 * s1 - rho * s1 * s2 * (mu1 + mu2);
    const double st = std::sqrt(std::max(0.0, delta * s1 * s1 * s2 * s2 * (1.0 - rho * rho)));
    const double a1 = gamma * (s1 * s1 - rho * s1 * s2);
    const double a2 = gamma * (rho * s1 * s2 - s2 * s2);
    std::vector<std::vector<double>> support;
    std::vector<double> prob;
    for (int sign_i : {1, -1}) {
        for (int sign_t : {1, -1}) {
            const double t = mt + sign_t * st;
            support.push_back({(a1 * sign_i + t) / delta, (a2 * sign_i + t) / delta});
            prob.push_back((sign_i == 1 ? p : 1.0 - p) * 0.5);
        }
    }
    return JointDiscreteDistribution(std::move(support), std::move(prob));
}

}  // namespace

PairSampler::PairSampler(double mu1, double mu2, double sigma1, double sigma2, double rho, std::uint64_t seed)
    : law_(pair_law(mu1, mu2, sigma1, sigma2, rho, gamma_, degenerate_)),
      cumulative_(detail::cumulative(law_.probs())),
      rng_(seed) {}

PairSampler::PairSampler(const PairSampler& other, std::uint64_t seed)
    : gamma_(other.gamma_), degenerate_(other.degenerate_), law_(other.law_), cumulative_(other.cumulative_),
      rng_(seed) {}

std::array<double, 2> PairSampler::sample() {
    const auto& x = law_.point(detail::draw_index(cumulative_, detail::uniform01(rng_)));
    return {x[0], x[1]};
}

PairSampler PairSampler::clone(std::uint64_t seed) const { return PairSampler(*this, seed); }

PairSampler extremal_pair_given_correlation(double mu1, double mu2, double sigma1, double sigma2, double rho,
                                            std::uint64_t seed) {
    return PairSampler(mu1, mu2, sigma1, sigma2, rho, seed);
}

}  // namespace rangebound

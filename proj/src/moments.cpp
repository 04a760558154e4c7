#include "rangebound/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rangebound/errors.hpp"

namespace rangebound {

namespace {

void require_positive_scale(double y, const char* what) {
    if (!(y > 0.0) || !std::isfinite(y)) {
        std::ostringstream os;
        os << what << ": second argument must be positive and finite, got " << y;
        throw DomainError(os.str());
    }
}

void require_dual_point(DualPoint p) {
    if (!std::isfinite(p.c)) throw DomainError("dual point: c must be finite");
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw DomainError("dual point: lambda must be positive and finite");
}

}  // namespace

MomentSpec::MomentSpec(std::vector<double> mu, std::vector<double> sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
    if (mu_.size() != sigma_.size()) {
        std::ostringstream os;
        os << "moment spec: mu has " << mu_.size() << " entries but sigma has " << sigma_.size();
        throw DomainError(os.str());
    }
    if (mu_.size() < 2) throw DomainError("moment spec: need n >= 2 coordinates");
    for (std::size_t i = 0; i < mu_.size(); ++i) {
        if (!std::isfinite(mu_[i])) {
            std::ostringstream os;
            os << "moment spec: mu[" << i << "] is not finite";
            throw DomainError(os.str());
        }
        if (!(sigma_[i] > 0.0) || !std::isfinite(sigma_[i])) {
            std::ostringstream os;
            os << "moment spec: sigma[" << i << "] must be positive and finite, got " << sigma_[i];
            throw DomainError(os.str());
        }
    }
}

double MomentSpec::mean_of_means() const noexcept {
    double s = 0.0;
    for (double m : mu_) s += m;
    return s / static_cast<double>(mu_.size());
}

double MomentSpec::min_mean() const noexcept { return *std::min_element(mu_.begin(), mu_.end()); }

double MomentSpec::max_mean() const noexcept { return *std::max_element(mu_.begin(), mu_.end()); }

bool MomentSpec::has_equal_means() const noexcept {
    const double bar = mean_of_means();
    double dev = 0.0, mag = 0.0;
    for (double m : mu_) {
        dev = std::max(dev, std::abs(m - bar));
        mag = std::max(mag, std::abs(m));
    }
    return dev <= 1e-12 * (1.0 + mag);
}

const std::vector<std::size_t>& RegionPartition::set(Region r) const {
    switch (r) {
        case Region::Outer: return i1;
        case Region::Middle: return i2;
        case Region::Upper: return i3;
        case Region::Lower: return i4;
    }
    return i2;
}

Region classify_coordinate(double mu, double sigma, DualPoint p) {
    const double xi = mu - p.c;
    const double theta2 = xi * xi + sigma * sigma;
    const double four_l2 = 4.0 * p.lambda * p.lambda;
    if (theta2 >= four_l2 * (1.0 - kBoundaryTieTolerance)) return Region::Outer;
    const double band = 2.0 * p.lambda * std::abs(xi);
    if (theta2 <= band * (1.0 + kBoundaryTieTolerance)) return xi > 0.0 ? Region::Upper : Region::Lower;
    return Region::Middle;
}

double u_value(double x, double y) {
    require_positive_scale(y, "u_value");
    const double s = x * x + y * y;
    const double ax = std::abs(x);
    if (s >= 4.0) return 2.0 * std::sqrt(s);
    if (s <= 2.0 * ax) return ax + 1.0 + std::hypot(ax - 1.0, y);
    return 2.0 + 0.5 * s;
}

std::array<double, 2> u_gradient(double x, double y) {
    require_positive_scale(y, "u_gradient");
    const double s = x * x + y * y;
    if (s >= 4.0) {
        const double r = std::sqrt(s);
        return {2.0 * x / r, 2.0 * y / r};
    }
    if (s <= 2.0 * std::abs(x)) {
        if (x > 0.0) {
            const double r = std::hypot(x - 1.0, y);
            return {(x - 1.0) / r + 1.0, y / r};
        }
        const double r = std::hypot(x + 1.0, y);
        return {(x + 1.0) / r - 1.0, y / r};
    }
    return {x, y};
}

double phi(DualPoint p, const MomentSpec& spec) {
    require_dual_point(p);
    const auto n = static_cast<double>(spec.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        sum += u_value((spec.mu(i) - p.c) / p.lambda, spec.sigma(i) / p.lambda);
    return -(n - 2.0) * p.lambda + 0.5 * p.lambda * sum;
}

std::array<double, 2> phi_gradient(DualPoint p, const MomentSpec& spec) {
    require_dual_point(p);
    const auto n = static_cast<double>(spec.size());
    double dc = 0.0;
    double dl = -(n - 2.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double x = (spec.mu(i) - p.c) / p.lambda;
        const double y = spec.sigma(i) / p.lambda;
        const auto g = u_gradient(x, y);
        // d/dc [lambda/2 U] = -U_x / 2;  d/dlambda [lambda/2 U] = (U - x U_x - y U_y) / 2
        dc -= 0.5 * g[0];
        dl += 0.5 * (u_value(x, y) - x * g[0] - y * g[1]);
    }
    return {dc, dl};
}

RegionPartition classify_regions(DualPoint p, const MomentSpec& spec) {
    require_dual_point(p);
    RegionPartition part;
    part.of.reserve(spec.size());
    constexpr double kDegenerate = 1e-9;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const Region r = classify_coordinate(spec.mu(i), spec.sigma(i), p);
        part.of.push_back(r);
        switch (r) {
            case Region::Outer: part.i1.push_back(i); break;
            case Region::Middle: part.i2.push_back(i); break;
            case Region::Upper: part.i3.push_back(i); break;
            case Region::Lower: part.i4.push_back(i); break;
        }
        const double xi = spec.mu(i) - p.c;
        const double theta2 = xi * xi + spec.sigma(i) * spec.sigma(i);
        const double four_l2 = 4.0 * p.lambda * p.lambda;
        const double band = 2.0 * p.lambda * std::abs(xi);
        if (std::abs(theta2 - four_l2) <= kDegenerate * four_l2 ||
            std::abs(theta2 - band) <= kDegenerate * std::max(theta2, band))
            part.boundary_degenerate = true;
    }
    return part;
}

}  // namespace rangebound

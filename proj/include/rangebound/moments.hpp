#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rangebound {

/// Means and standard deviations of n arbitrarily dependent coordinates.
///
/// Construction validates the instance: at least two coordinates, matching
/// lengths, finite values and strictly positive standard deviations. A
/// constructed MomentSpec is immutable.
class MomentSpec {
public:
    MomentSpec(std::vector<double> mu, std::vector<double> sigma);

    std::size_t size() const noexcept { return mu_.size(); }
    std::span<const double> mu() const noexcept { return mu_; }
    std::span<const double> sigma() const noexcept { return sigma_; }
    double mu(std::size_t i) const { return mu_.at(i); }
    double sigma(std::size_t i) const { return sigma_.at(i); }

    double mean_of_means() const noexcept;
    double min_mean() const noexcept;
    double max_mean() const noexcept;

    /// max mu - min mu, the best possible lower bound on the expected range.
    double mean_spread() const noexcept { return max_mean() - min_mean(); }

    /// True when max |mu_i - mean| <= 1e-12 (1 + max |mu_i|).
    bool has_equal_means() const noexcept;

private:
    std::vector<double> mu_;
    std::vector<double> sigma_;
};

/// A point (c, lambda) of the dual domain R x (0, inf).
struct DualPoint {
    double c = 0.0;
    double lambda = 1.0;
};

enum class Region {
    Outer = 1,   // (mu-c)^2 + sigma^2 >= 4 lambda^2
    Middle = 2,  // strictly between the other three
    Upper = 3,   // (mu-c)^2 + sigma^2 <= 2 lambda (mu - c)
    Lower = 4,   // (mu-c)^2 + sigma^2 <= 2 lambda (c - mu)
};

/// Index sets I1..I4 (0-based coordinate indices, ascending).
struct RegionPartition {
    std::vector<std::size_t> i1;
    std::vector<std::size_t> i2;
    std::vector<std::size_t> i3;
    std::vector<std::size_t> i4;

    /// Region of each coordinate, in coordinate order.
    std::vector<Region> of;

    /// Set when some coordinate lies within 1e-9 (relative) of a region boundary.
    bool boundary_degenerate = false;

    const std::vector<std::size_t>& set(Region r) const;
};

/// Relative slack used when deciding ties on region boundaries.
inline constexpr double kBoundaryTieTolerance = 1e-12;

/// Classifies a single coordinate. Boundary ties go to Outer first, then to
/// Upper / Lower, so that Middle is always the strict band.
Region classify_coordinate(double mu, double sigma, DualPoint p);

/// Maximal value of E{|X-1| + |X+1|} over laws with mean x and standard deviation y.
double u_value(double x, double y);

/// Partial derivatives (dU/dx, dU/dy).
std::array<double, 2> u_gradient(double x, double y);

/// -(n-2) lambda + (lambda/2) sum_i U((mu_i - c)/lambda, sigma_i/lambda).
double phi(DualPoint p, const MomentSpec& spec);

/// (d phi/d c, d phi/d lambda).
std::array<double, 2> phi_gradient(DualPoint p, const MomentSpec& spec);

RegionPartition classify_regions(DualPoint p, const MomentSpec& spec);

}  // namespace rangebound

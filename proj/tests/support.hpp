#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "rangebound/moments.hpp"

namespace testing_support {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline rangebound::MomentSpec random_spec(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> mu(n), sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = uniform(rng, -3.0, 3.0);
        sigma[i] = uniform(rng, 0.1, 3.0);
    }
    return {mu, sigma};
}

// Draws specs that frequently satisfy the AG tightness conditions.
inline rangebound::MomentSpec near_homogeneous_spec(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> mu(n), sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = uniform(rng, -0.4, 0.4);
        sigma[i] = uniform(rng, 0.7, 1.3);
    }
    return {mu, sigma};
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    double fa = f(a), fb = f(b);
    for (int k = 0; k < iters && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++k) {
        if (fa < fb) {
            hi = b, b = a, fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a, a = b, fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    return std::min(fa, fb);
}

// Brute-force maximum of E{|X-1| + |X+1|} over laws with mean x and standard
// deviation y supported on at most three points of a lattice (plus the
// two-point laws spanned by lattice points and their moment-matched partner).
inline double brute_force_u(double x, double y, double half_width = 8.0, double step = 0.1) {
    const double m2 = x * x + y * y;
    auto g = [](double v) { return std::abs(v - 1.0) + std::abs(v + 1.0); };
    std::vector<double> grid;
    for (double v = -half_width; v <= half_width + 1e-12; v += step) grid.push_back(std::round(v / step) * step);
    double best = -1.0;
    // Two-point laws: for each lattice point a < x the partner b is fixed by the moments.
    for (double a : grid) {
        if (a >= x) continue;
        const double b = x + y * y / (x - a);
        const double p = (b - x) / (b - a);
        best = std::max(best, p * g(a) + (1.0 - p) * g(b));
    }
    const std::size_t m = grid.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                const double a = grid[i], b = grid[j], c = grid[k];
                // Solve for probabilities via Lagrange basis of the moment system.
                const double pa = (m2 - x * (b + c) + b * c) / ((a - b) * (a - c));
                const double pb = (m2 - x * (a + c) + a * c) / ((b - a) * (b - c));
                const double pc = 1.0 - pa - pb;
                if (pa < -1e-14 || pb < -1e-14 || pc < -1e-14) continue;
                best = std::max(best, pa * g(a) + pb * g(b) + pc * g(c));
            }
        }
    }
    return best;
}

}  // namespace testing_support

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dpgec/error.hpp"
#include "dpgec/mesh.hpp"

namespace dpgec {

/// 1D rule on [-1, 1].
struct QuadRule1D {
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

/// 2D rule on [-1, 1]^2; point k is (points[k].x, points[k].y).
struct QuadRule2D {
    std::vector<Vec2> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

/// Rule on a physical segment: weights already include the length / 2 scaling.
/// `ref` keeps the reference abscissae in [-1, 1] along the facet parameterization.
struct FacetQuad {
    std::vector<Vec2> points;
    std::vector<double> ref;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxGaussPoints = 30;

namespace detail {

// Legendre P_n and its derivative at x via the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

inline QuadRule1D gauss_1d(int n) {
    if (n < 1 || n > kMaxGaussPoints)
        throw Error("invalid_quadrature", "Gauss-Legendre point count must be in [1, 30]");
    QuadRule1D q;
    q.points.resize(n);
    q.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            detail::legendre(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        detail::legendre(n, x, p, dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.points[i] = -x;
        q.points[n - 1 - i] = x;
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) q.points[n / 2] = 0.0;
    return q;
}

/// Gauss-Lobatto nodes on [-1, 1] (n >= 2): endpoints plus the roots of P'_{n-1}.
inline std::vector<double> gauss_lobatto_nodes(int n) {
    if (n < 2 || n > kMaxGaussPoints)
        throw Error("invalid_quadrature", "Gauss-Lobatto point count must be in [2, 30]");
    std::vector<double> x(n);
    x[0] = -1.0;
    x[n - 1] = 1.0;
    const int m = n - 1;
    for (int i = 1; i < n - 1; ++i) {
        // Chebyshev-Gauss-Lobatto guess, Newton on (1 - x^2) P'_m(x).
        double t = -std::cos(std::numbers::pi * i / m);
        for (int it = 0; it < 100; ++it) {
            double p = 0.0, dp = 0.0;
            detail::legendre(m, t, p, dp);
            // d/dx[(1-x^2) P'_m] = -m(m+1) P_m
            double f = (1.0 - t * t) * dp;
            double df = -m * (m + 1.0) * p;
            double dt = f / df;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[i] = t;
    }
    for (int i = 0; i < n / 2; ++i) x[n - 1 - i] = -x[i];
    if (n % 2 == 1) x[n / 2] = 0.0;
    return x;
}

inline QuadRule2D tensor_quad(int n) {
    const QuadRule1D g = gauss_1d(n);
    QuadRule2D q;
    q.points.reserve(static_cast<std::size_t>(n) * n);
    q.weights.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            q.points.push_back({g.points[i], g.points[j]});
            q.weights.push_back(g.weights[i] * g.weights[j]);
        }
    return q;
}

inline FacetQuad facet_quad(int n, Vec2 a, Vec2 b) {
    const double len = norm(b - a);
    if (!(len > 0.0)) throw Error("invalid_quadrature", "degenerate facet");
    const QuadRule1D g = gauss_1d(n);
    FacetQuad q;
    q.points.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double t = 0.5 * (g.points[k] + 1.0);
        q.points.push_back(a + t * (b - a));
        q.ref.push_back(g.points[k]);
        q.weights.push_back(0.5 * len * g.weights[k]);
    }
    return q;
}

inline FacetQuad facet_quad(int n, const Facet& f) { return facet_quad(n, f.a, f.b); }

}  // namespace dpgec

#include <catch_amalgamated.hpp>

#include <cmath>

#include "dpgec/quadrature.hpp"

using namespace dpgec;
using Catch::Approx;

namespace {

double exact_monomial(int k) { return k % 2 == 1 ? 0.0 : 2.0 / (k + 1); }

}  // namespace

TEST_CASE("low order Gauss rules", "[quadrature]") {
    const QuadRule1D q1 = gauss_1d(1);
    REQUIRE(q1.size() == 1);
    CHECK(q1.points[0] == 0.0);
    CHECK(q1.weights[0] == 2.0);

    const QuadRule1D q2 = gauss_1d(2);
    CHECK(std::abs(std::abs(q2.points[0]) - 0.5773502691896257) < 1e-15);
    CHECK(std::abs(q2.points[0] + q2.points[1]) < 1e-15);
    CHECK(q2.weights[0] == Approx(1.0).epsilon(1e-15));
    CHECK(q2.weights[1] == Approx(1.0).epsilon(1e-15));

    // n = 3: +-sqrt(3/5) with weight 5/9, 0 with weight 8/9
    const QuadRule1D q3 = gauss_1d(3);
    std::vector<double> pts = q3.points;
    std::sort(pts.begin(), pts.end());
    CHECK(pts[0] == Approx(-std::sqrt(0.6)).epsilon(1e-15));
    CHECK(std::abs(pts[1]) < 1e-15);
    double x4 = 0.0;
    for (std::size_t k = 0; k < q3.size(); ++k) x4 += q3.weights[k] * std::pow(q3.points[k], 4);
    CHECK(x4 == Approx(0.4).epsilon(1e-14));
}

TEST_CASE("Gauss rules integrate monomials of degree 2n-1", "[quadrature]") {
    for (int n = 1; n <= 10; ++n) {
        const QuadRule1D q = gauss_1d(n);
        double wsum = 0.0;
        for (double w : q.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(std::abs(wsum - 2.0) < 1e-13);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i], k);
            CHECK(std::abs(s - exact_monomial(k)) <= 1e-13);
        }
        // symmetric points
        for (std::size_t i = 0; i < q.size(); ++i)
            CHECK(std::abs(q.points[i] + q.points[q.size() - 1 - i]) < 1e-14);
    }
}

TEST_CASE("Gauss rule range", "[quadrature]") {
    CHECK_THROWS_AS(gauss_1d(0), Error);
    CHECK_THROWS_AS(gauss_1d(31), Error);
    CHECK_NOTHROW(gauss_1d(30));
}

TEST_CASE("Gauss-Lobatto nodes", "[quadrature]") {
    const auto n4 = gauss_lobatto_nodes(4);
    REQUIRE(n4.size() == 4);
    CHECK(n4.front() == -1.0);
    CHECK(n4.back() == 1.0);
    CHECK(n4[1] == Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(n4[2] == Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
    const auto n5 = gauss_lobatto_nodes(5);
    CHECK(n5[1] == Approx(-std::sqrt(3.0 / 7.0)).epsilon(1e-14));
    CHECK(std::abs(n5[2]) < 1e-15);
}

TEST_CASE("tensor rules", "[quadrature]") {
    const QuadRule2D q1 = tensor_quad(1);
    REQUIRE(q1.size() == 1);
    CHECK(q1.points[0] == Vec2{0.0, 0.0});
    CHECK(q1.weights[0] == 4.0);

    const QuadRule2D q2 = tensor_quad(2);
    double s = 0.0;
    for (std::size_t k = 0; k < q2.size(); ++k)
        s += q2.weights[k] * q2.points[k].x * q2.points[k].x * q2.points[k].y * q2.points[k].y;
    CHECK(s == Approx(4.0 / 9.0).epsilon(1e-14));

    for (int n = 1; n <= 10; ++n) {
        const QuadRule2D q = tensor_quad(n);
        CHECK(q.size() == static_cast<std::size_t>(n * n));
        double w = 0.0;
        for (double v : q.weights) w += v;
        CHECK(std::abs(w - 4.0) < 1e-13);
        const int k = 2 * n - 1;
        double m = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
            m += q.weights[i] * std::pow(q.points[i].x, k - 1) * std::pow(q.points[i].y, k - 1);
        CHECK(std::abs(m - exact_monomial(k - 1) * exact_monomial(k - 1)) < 1e-13);
    }
}

TEST_CASE("facet rules", "[quadrature]") {
    const FacetQuad u = facet_quad(1, Vec2{0.0, 0.0}, Vec2{1.0, 0.0});
    REQUIRE(u.size() == 1);
    CHECK(u.points[0] == Vec2{0.5, 0.0});
    CHECK(u.weights[0] == Approx(1.0));

    const FacetQuad h = facet_quad(4, Vec2{0.25, 0.5}, Vec2{0.25, 1.0});
    double w = 0.0;
    for (double v : h.weights) w += v;
    CHECK(w == Approx(0.5).epsilon(1e-14));

    // arc-length linear function on a slanted segment: f = 2 + 3 s, s in [0, L]
    const Vec2 a{0.0, 1.0}, b{3.0, 5.0};
    const double L = 5.0;
    const FacetQuad q = facet_quad(2, a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * (2.0 + 3.0 * norm(q.points[k] - a));
    CHECK(s == Approx(2.0 * L + 1.5 * L * L).epsilon(1e-14));
    CHECK_THROWS_AS(facet_quad(2, a, a), Error);
}

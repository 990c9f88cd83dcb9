#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dpgec/fespace.hpp"
#include "dpgec/solver.hpp"

using namespace dpgec;
using Catch::Approx;

namespace {

std::vector<Vec2> random_points(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec2> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

std::vector<Vec2> node_grid(int degree) {
    const Lagrange1D l(degree);
    std::vector<Vec2> pts;
    for (double y : l.nodes())
        for (double x : l.nodes()) pts.push_back({x, y});
    return pts;
}

}  // namespace

TEST_CASE("bilinear basis at the center", "[fespace]") {
    const std::array<Vec2, 1> c{Vec2{0.0, 0.0}};
    const BasisTable t = tabulate_h1_basis(1, c);
    REQUIRE(t.num_basis == 4);
    for (int a = 0; a < 4; ++a) CHECK(t.value(0, a) == Approx(0.25).epsilon(1e-15));
}

TEST_CASE("partition of unity and zero gradient sum", "[fespace]") {
    const auto pts = random_points(25, 7);
    for (int p = 1; p <= kMaxOrder; ++p) {
        const BasisTable t = tabulate_h1_basis(p, pts);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            double s = 0.0, gx = 0.0, gy = 0.0;
            for (std::size_t a = 0; a < t.num_basis; ++a) {
                s += t.value(k, a);
                gx += t.grad_x(k, a);
                gy += t.grad_y(k, a);
            }
            CHECK(std::abs(s - 1.0) <= 1e-12);
            CHECK(std::abs(gx) <= 1e-10);
            CHECK(std::abs(gy) <= 1e-10);
        }
    }
}

TEST_CASE("Lagrange delta property", "[fespace]") {
    for (int p : {1, 2, 3, 5}) {
        const auto nodes = node_grid(p);
        const BasisTable t = tabulate_h1_basis(p, nodes);
        for (std::size_t k = 0; k < nodes.size(); ++k)
            for (std::size_t a = 0; a < t.num_basis; ++a)
                CHECK(std::abs(t.value(k, a) - (k == a ? 1.0 : 0.0)) < 1e-13);
    }
    // flux modes, p = 2: 4 scalar modes, delta at their own nodes
    const auto fn = node_grid(1);
    const BasisTable f = tabulate_l2_basis(1, fn);
    REQUIRE(f.num_basis == 4);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t a = 0; a < 4; ++a) CHECK(std::abs(f.value(k, a) - (k == a ? 1.0 : 0.0)) < 1e-14);
    CHECK(SpaceLayout{2, 1, 0}.flux_per_element() == 8);
}

TEST_CASE("constant flux and trace modes for p = 1", "[fespace]") {
    const auto pts = random_points(5, 3);
    const BasisTable f = tabulate_l2_basis(0, pts);
    REQUIRE(f.num_basis == 1);
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(f.value(k, 0) == 1.0);
    const std::vector<double> t{-0.7, 0.1, 0.9};
    const BasisTable tr = tabulate_facet_basis(0, t);
    REQUIRE(tr.num_basis == 1);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(tr.value(k, 0) == 1.0);
}

TEST_CASE("facet modes for p = 3", "[fespace]") {
    const Lagrange1D l(2);
    const BasisTable t = tabulate_facet_basis(2, l.nodes());
    REQUIRE(t.num_basis == 3);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t a = 0; a < 3; ++a) CHECK(std::abs(t.value(k, a) - (k == a ? 1.0 : 0.0)) < 1e-14);
    // GLL nodes -1, 0, 1: moments of the quadratic Lagrange modes are 1/3, 4/3, 1/3
    const QuadRule1D q = gauss_1d(4);
    const BasisTable m = tabulate_facet_basis(2, q.points);
    std::array<double, 3> mom{};
    for (std::size_t k = 0; k < q.size(); ++k)
        for (std::size_t a = 0; a < 3; ++a) mom[a] += q.weights[k] * m.value(k, a);
    CHECK(mom[0] == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(mom[1] == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(mom[2] == Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("order range", "[fespace]") {
    const std::array<Vec2, 1> c{Vec2{0.0, 0.0}};
    CHECK_THROWS_AS(tabulate_h1_basis(0, c), Error);
    CHECK_THROWS_AS(tabulate_h1_basis(11, c), Error);
    CHECK_THROWS_AS((SpaceLayout{2, 0, 0}.validate()), Error);
}

TEST_CASE("interpolation reproduces bi-degree p polynomials", "[fespace]") {
    const QuadRule2D q = tensor_quad(6);
    for (int p = 1; p <= 4; ++p) {
        auto poly = [p](double x, double y) {
            return std::pow(x, p) * std::pow(y, p) - 0.5 * std::pow(x, p - 1) * y + 0.25;
        };
        const auto nodes = node_grid(p);
        const BasisTable t = tabulate_h1_basis(p, q.points);
        for (std::size_t k = 0; k < q.size(); ++k) {
            double v = 0.0;
            for (std::size_t a = 0; a < t.num_basis; ++a) v += poly(nodes[a].x, nodes[a].y) * t.value(k, a);
            const double ex = poly(q.points[k].x, q.points[k].y);
            CHECK(std::abs(v - ex) <= 1e-11 * std::max(1.0, std::abs(ex)));
        }
    }
}

TEST_CASE("dof counts", "[fespace]") {
    {
        const Mesh m = build_rect_mesh({}, 2, 2);
        const DofMap d = build_dofmap(m, {1, 1, 0}, active_facets(m, ProblemKind::concentration));
        CHECK(d.n_field == 9);
        CHECK(d.n_flux == 8);
        CHECK(d.n_trace == 4);
    }
    {
        const Mesh m = build_rect_mesh({}, 1, 1);
        const DofMap d = build_dofmap(m, {2, 1, 0}, {});
        CHECK(d.n_field == 9);
        CHECK(d.n_flux == 8);
        CHECK(d.n_trace == 0);
    }
    for (int nx = 1; nx <= 4; ++nx)
        for (int ny = 1; ny <= 4; ++ny)
            for (int p = 1; p <= 3; ++p) {
                const Mesh m = build_rect_mesh({}, nx, ny);
                const auto act = active_facets(m, ProblemKind::concentration);
                const DofMap d = build_dofmap(m, {p, 1, 0}, act);
                CHECK(d.n_field == (nx * p + 1) * (ny * p + 1));
                CHECK(d.n_flux == 2 * p * p * nx * ny);
                CHECK(d.n_trace == p * static_cast<int>(act.size()));
                // contiguous, gap-free global range
                std::set<int> all;
                for (int e = 0; e < nx * ny; ++e)
                    for (int g : element_dofs(m, d, e).global) all.insert(g);
                CHECK(static_cast<int>(all.size()) == d.total());
                CHECK(*all.begin() == 0);
                CHECK(*all.rbegin() == d.total() - 1);
            }
}

TEST_CASE("neighbours share field dofs on common facets", "[fespace]") {
    const Mesh m = build_rect_mesh({}, 3, 2);
    const int p = 3;
    const DofMap d = build_dofmap(m, {p, 1, 0}, active_facets(m, ProblemKind::concentration));
    for (const auto& f : m.facets) {
        if (f.on_boundary()) continue;
        const Element& e0 = m.elements[f.elements[0]];
        const Element& e1 = m.elements[f.elements[1]];
        for (int k = 0; k <= p; ++k) {
            if (f.vertical) CHECK(d.field_dof(e0.ix, e0.iy, p, k) == d.field_dof(e1.ix, e1.iy, 0, k));
            else CHECK(d.field_dof(e0.ix, e0.iy, k, p) == d.field_dof(e1.ix, e1.iy, k, 0));
        }
        // single-valued trace dofs: both elements see the same global indices
        const auto d0 = element_dofs(m, d, e0.index);
        const auto d1 = element_dofs(m, d, e1.index);
        const int s0 = f.vertical ? 1 : 2, s1 = f.vertical ? 3 : 0;
        for (int k = 0; k < p; ++k) CHECK(d0.global[d0.trace_offset[s0] + k] == d1.global[d1.trace_offset[s1] + k]);
    }
}

TEST_CASE("active facets are numbered in ascending order", "[fespace]") {
    const Mesh m = build_rect_mesh({}, 2, 2);
    const std::vector<int> shuffled{9, 1, 7, 4};
    const DofMap d = build_dofmap(m, {1, 1, 0}, shuffled);
    CHECK(d.active_facets == std::vector<int>{1, 4, 7, 9});
    CHECK(d.trace_dof(1, 0) < d.trace_dof(4, 0));
    CHECK_THROWS_AS(build_dofmap(m, {1, 1, 0}, std::vector<int>{99}), Error);
}

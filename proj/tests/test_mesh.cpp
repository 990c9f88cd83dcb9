#include <catch_amalgamated.hpp>

#include <set>

#include "dpgec/mesh.hpp"
#include "dpgec/quadrature.hpp"

using namespace dpgec;
using Catch::Approx;

namespace {

const BoundaryPartition kPotential{
    {BoundaryKind::dirichlet, BoundaryKind::neumann, BoundaryKind::robin, BoundaryKind::robin}};

double total_area(const Mesh& m) {
    double a = 0.0;
    for (const auto& e : m.elements) a += (e.xb - e.xa) * (e.yb - e.ya);
    return a;
}

}  // namespace

TEST_CASE("single cell mesh", "[mesh]") {
    const Mesh m = build_rect_mesh({}, 1, 1);
    CHECK(m.num_elements() == 1);
    CHECK(m.num_boundary_facets() == 4);
    CHECK(m.count(FacetTag::interior) == 0);
}

TEST_CASE("facet counts follow the structured formulas", "[mesh]") {
    for (int nx = 1; nx <= 5; ++nx)
        for (int ny = 1; ny <= 5; ++ny) {
            const Mesh m = build_rect_mesh({}, nx, ny);
            CHECK(m.num_facets() == static_cast<std::size_t>((nx + 1) * ny + nx * (ny + 1)));
            CHECK(m.count(FacetTag::interior) == static_cast<std::size_t>((nx - 1) * ny + nx * (ny - 1)));
            CHECK(m.num_boundary_facets() == static_cast<std::size_t>(2 * (nx + ny)));
        }
    const Mesh m = build_rect_mesh({}, 2, 2);
    CHECK(m.num_elements() == 4);
    CHECK(m.num_boundary_facets() == 8);
    CHECK(m.count(FacetTag::interior) == 4);
}

TEST_CASE("areas of a 2x1 rectangle mesh", "[mesh]") {
    const Mesh m = build_rect_mesh({0.0, 2.0, 0.0, 1.0}, 4, 2);
    CHECK(total_area(m) == Approx(2.0).epsilon(1e-12));
    for (const auto& e : m.elements) CHECK((e.xb - e.xa) * (e.yb - e.ya) == Approx(0.25).epsilon(1e-14));
}

TEST_CASE("rejects degenerate input", "[mesh]") {
    CHECK_THROWS_AS(build_rect_mesh({}, 0, 1), Error);
    CHECK_THROWS_AS(build_rect_mesh({}, 3, -1), Error);
    CHECK_THROWS_AS(build_rect_mesh({1.0, 1.0, 0.0, 1.0}, 2, 2), Error);
    CHECK_THROWS_AS(build_rect_mesh({0.0, 1.0, 2.0, 1.0}, 2, 2), Error);
}

TEST_CASE("incidence and normal orientation", "[mesh]") {
    const Mesh m = build_rect_mesh({-1.0, 2.0, 0.5, 1.5}, 3, 4);
    for (const auto& f : m.facets) {
        CHECK(norm(f.normal) == Approx(1.0));
        if (f.on_boundary()) {
            REQUIRE(f.side.has_value());
            // outward: points away from the element center
            const Vec2 mid = 0.5 * (f.a + f.b);
            CHECK(dot(f.normal, mid - m.elements[f.elements[0]].center()) > 0.0);
        } else {
            CHECK(f.elements[0] < f.elements[1]);
            const Vec2 d = m.elements[f.elements[1]].center() - m.elements[f.elements[0]].center();
            CHECK(dot(f.normal, d) > 0.0);
        }
    }
    // Each element's facets agree with the local slot convention.
    for (const auto& e : m.elements)
        for (int s = 0; s < 4; ++s) {
            const Facet& f = m.facets[e.facets[s]];
            const Vec2 outward = kOutwardNormals[s];
            CHECK(facet_sign(f, e.index) * dot(f.normal, outward) == Approx(1.0));
        }
}

TEST_CASE("facet geometry", "[mesh]") {
    const Mesh m = build_rect_mesh({}, 2, 2);
    // vertical interior facet between elements 0 and 1
    const FacetGeometry g = facet_geometry(m, 1);
    CHECK(g.length == Approx(0.5));
    CHECK(g.normal == Vec2{1.0, 0.0});
    CHECK(g.elements == std::array<int, 2>{0, 1});
    CHECK(g.signs == std::array<int, 2>{1, -1});

    const FacetGeometry b = facet_geometry(m, 0);
    CHECK(b.elements[1] == -1);
    CHECK(b.signs[0] == 1);
    CHECK(b.normal == Vec2{-1.0, 0.0});

    CHECK_THROWS_AS(facet_geometry(m, -1), Error);
    CHECK_THROWS_AS(facet_geometry(m, static_cast<int>(m.num_facets())), Error);
}

TEST_CASE("signed facet integrals cancel across interior facets", "[mesh]") {
    const Mesh m = build_rect_mesh({0.0, 1.0, 0.0, 3.0}, 3, 2);
    for (const auto& f : m.facets) {
        if (f.on_boundary()) continue;
        const FacetQuad q = facet_quad(3, f);
        double s = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            const double val = 1.0 + q.points[k].x * q.points[k].x - 2.0 * q.points[k].y;
            s += facet_sign(f, f.elements[0]) * q.weights[k] * val;
            s += facet_sign(f, f.elements[1]) * q.weights[k] * val;
        }
        CHECK(std::abs(s) < 1e-14);
    }
}

TEST_CASE("uniform refinement", "[mesh]") {
    const Mesh m1 = classify_boundary(build_rect_mesh({}, 1, 1), kPotential, ProblemKind::potential);
    const Mesh m2 = refine_uniform(m1);
    CHECK(m2.num_elements() == 4);
    const Mesh m4 = refine_uniform(m2);
    CHECK(m4.count(FacetTag::interior) == 24);
    CHECK(m4.h_max() == Approx(0.5 * m2.h_max()));

    Mesh m = build_rect_mesh({0.0, 3.0, -1.0, 1.0}, 3, 1);
    for (int k = 0; k < 4; ++k) {
        m = refine_uniform(m);
        CHECK(total_area(m) == Approx(6.0).epsilon(1e-12));
    }

    // Tagged regions are unchanged: per side, tagged facet lengths sum to the side length.
    for (const Mesh* mm : {&m1, &m4}) {
        std::array<double, 4> len{};
        for (const auto& f : mm->facets) {
            if (!f.side) continue;
            CHECK(f.tag == to_tag(kPotential[*f.side]));
            len[static_cast<int>(*f.side)] += f.length();
        }
        for (double l : len) CHECK(l == Approx(1.0));
    }
    CHECK(m4.count(FacetTag::dirichlet) == 4);
    CHECK(m4.count(FacetTag::neumann) == 4);
    CHECK(m4.count(FacetTag::robin) == 8);
}

TEST_CASE("boundary classification", "[mesh]") {
    const Mesh base = build_rect_mesh({}, 2, 2);
    const Mesh conc = classify_boundary(base, BoundaryPartition::all_neumann(), ProblemKind::concentration);
    CHECK(conc.count(FacetTag::neumann) == 8);
    CHECK(conc.count(FacetTag::dirichlet) + conc.count(FacetTag::robin) == 0);

    const Mesh pot = classify_boundary(base, kPotential, ProblemKind::potential);
    CHECK(pot.count(FacetTag::dirichlet) == 2);
    CHECK(pot.count(FacetTag::neumann) == 2);
    CHECK(pot.count(FacetTag::robin) == 4);

    BoundaryPartition all_d{{BoundaryKind::dirichlet, BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                             BoundaryKind::dirichlet}};
    try {
        classify_boundary(base, all_d, ProblemKind::potential);
        FAIL("expected an invalid partition error");
    } catch (const Error& e) {
        CHECK(e.code() == "invalid_partition");
        CHECK(std::string(e.what()).rfind("invalid partition", 0) == 0);
    }
    CHECK_THROWS_AS(classify_boundary(base, kPotential, ProblemKind::concentration), Error);

    // Dirichlet may be empty for the potential problem.
    BoundaryPartition no_d{{BoundaryKind::robin, BoundaryKind::neumann, BoundaryKind::robin, BoundaryKind::robin}};
    CHECK_NOTHROW(classify_boundary(base, no_d, ProblemKind::potential));
}

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dpgec/error.hpp"

namespace dpgec {

struct Vec2 {
    double x{};
    double y{};

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Rect {
    double x0{0.0};
    double x1{1.0};
    double y0{0.0};
    double y1{1.0};

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

enum class ProblemKind { concentration, potential };

/// Sides of the rectangular domain: left is x = x0, right x = x1, bottom y = y0, top y = y1.
enum class Side { left = 0, right = 1, bottom = 2, top = 3 };

enum class BoundaryKind { dirichlet, neumann, robin };

enum class FacetTag { interior, dirichlet, neumann, robin };

inline const char* to_string(ProblemKind k) {
    return k == ProblemKind::concentration ? "concentration" : "potential";
}

inline const char* to_string(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::bottom: return "bottom";
        case Side::top: return "top";
    }
    return "?";
}

inline const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::dirichlet: return "dirichlet";
        case BoundaryKind::neumann: return "neumann";
        case BoundaryKind::robin: return "robin";
    }
    return "?";
}

inline const char* to_string(FacetTag t) {
    switch (t) {
        case FacetTag::interior: return "interior";
        case FacetTag::dirichlet: return "dirichlet";
        case FacetTag::neumann: return "neumann";
        case FacetTag::robin: return "robin";
    }
    return "?";
}

inline FacetTag to_tag(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::dirichlet: return FacetTag::dirichlet;
        case BoundaryKind::neumann: return FacetTag::neumann;
        case BoundaryKind::robin: return FacetTag::robin;
    }
    return FacetTag::interior;
}

/// Per-side assignment of boundary conditions, indexed by `Side`.
struct BoundaryPartition {
    std::array<BoundaryKind, 4> sides{BoundaryKind::neumann, BoundaryKind::neumann,
                                      BoundaryKind::neumann, BoundaryKind::neumann};

    BoundaryKind operator[](Side s) const { return sides[static_cast<std::size_t>(s)]; }
    BoundaryKind& operator[](Side s) { return sides[static_cast<std::size_t>(s)]; }

    bool has(BoundaryKind k) const {
        for (auto s : sides)
            if (s == k) return true;
        return false;
    }

    static BoundaryPartition all_neumann() { return {}; }

    friend bool operator==(const BoundaryPartition&, const BoundaryPartition&) = default;
};

/// Local facet slots of an element, counter-clockwise starting at the bottom edge.
enum class LocalFacet { bottom = 0, right = 1, top = 2, left = 3 };

inline constexpr std::array<Vec2, 4> kOutwardNormals{Vec2{0.0, -1.0}, Vec2{1.0, 0.0},
                                                     Vec2{0.0, 1.0}, Vec2{-1.0, 0.0}};

struct Element {
    int index{};
    int ix{};
    int iy{};
    double xa{}, xb{}, ya{}, yb{};
    std::array<int, 4> facets{};  // by LocalFacet

    Vec2 center() const { return {0.5 * (xa + xb), 0.5 * (ya + yb)}; }
};

/// An edge of the mesh. The facet is parameterized from `a` to `b` (a is the endpoint
/// with the smaller coordinate), which fixes the orientation of facet-local bases.
struct Facet {
    int index{};
    Vec2 a{};
    Vec2 b{};
    Vec2 normal{};                  // global normal
    std::array<int, 2> elements{};  // elements[1] == -1 on the boundary
    std::optional<Side> side;       // set for boundary facets
    FacetTag tag{FacetTag::interior};
    bool vertical{};

    bool on_boundary() const { return elements[1] < 0; }
    double length() const { return norm(b - a); }
};

/// Structured mesh of a rectangle by nx * ny congruent axis-aligned cells.
///
/// Element (ix, iy) has index iy * nx + ix. Vertical facets come first, indexed
/// iy * (nx + 1) + i; horizontal facets follow, indexed offset + j * nx + ix.
/// Interior facet normals point from the lower to the higher element index,
/// boundary normals point outward.
struct Mesh {
    Rect domain;
    int nx{};
    int ny{};
    double hx{};
    double hy{};
    std::vector<Element> elements;
    std::vector<Facet> facets;
    BoundaryPartition partition;

    std::size_t num_elements() const { return elements.size(); }
    std::size_t num_facets() const { return facets.size(); }
    double h_max() const { return std::hypot(hx, hy); }
    double element_area() const { return hx * hy; }

    std::size_t count(FacetTag tag) const {
        std::size_t n = 0;
        for (const auto& f : facets)
            if (f.tag == tag) ++n;
        return n;
    }
    std::size_t num_boundary_facets() const { return num_facets() - count(FacetTag::interior); }
};

inline Mesh build_rect_mesh(const Rect& domain, int nx, int ny) {
    if (nx < 1 || ny < 1) throw Error("invalid_mesh", "element counts must be at least 1");
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
        throw Error("invalid_mesh", "degenerate rectangle");

    Mesh m;
    m.domain = domain;
    m.nx = nx;
    m.ny = ny;
    m.hx = domain.width() / nx;
    m.hy = domain.height() / ny;

    auto xv = [&](int i) { return i == nx ? domain.x1 : domain.x0 + i * m.hx; };
    auto yv = [&](int j) { return j == ny ? domain.y1 : domain.y0 + j * m.hy; };

    const int n_vert = (nx + 1) * ny;
    auto vfacet = [&](int i, int j) { return j * (nx + 1) + i; };
    auto hfacet = [&](int i, int j) { return n_vert + j * nx + i; };

    m.elements.reserve(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            Element e;
            e.index = iy * nx + ix;
            e.ix = ix;
            e.iy = iy;
            e.xa = xv(ix);
            e.xb = xv(ix + 1);
            e.ya = yv(iy);
            e.yb = yv(iy + 1);
            e.facets = {hfacet(ix, iy), vfacet(ix + 1, iy), hfacet(ix, iy + 1), vfacet(ix, iy)};
            m.elements.push_back(e);
        }
    }

    m.facets.resize(static_cast<std::size_t>(n_vert + nx * (ny + 1)));
    for (int iy = 0; iy < ny; ++iy) {
        for (int i = 0; i <= nx; ++i) {
            Facet& f = m.facets[vfacet(i, iy)];
            f.index = vfacet(i, iy);
            f.vertical = true;
            f.a = {xv(i), yv(iy)};
            f.b = {xv(i), yv(iy + 1)};
            if (i == 0) {
                f.elements = {iy * nx, -1};
                f.normal = {-1.0, 0.0};
                f.side = Side::left;
            } else if (i == nx) {
                f.elements = {iy * nx + nx - 1, -1};
                f.normal = {1.0, 0.0};
                f.side = Side::right;
            } else {
                f.elements = {iy * nx + i - 1, iy * nx + i};
                f.normal = {1.0, 0.0};
            }
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int ix = 0; ix < nx; ++ix) {
            Facet& f = m.facets[hfacet(ix, j)];
            f.index = hfacet(ix, j);
            f.vertical = false;
            f.a = {xv(ix), yv(j)};
            f.b = {xv(ix + 1), yv(j)};
            if (j == 0) {
                f.elements = {ix, -1};
                f.normal = {0.0, -1.0};
                f.side = Side::bottom;
            } else if (j == ny) {
                f.elements = {(ny - 1) * nx + ix, -1};
                f.normal = {0.0, 1.0};
                f.side = Side::top;
            } else {
                f.elements = {(j - 1) * nx + ix, j * nx + ix};
                f.normal = {0.0, 1.0};
            }
        }
    }
    for (auto& f : m.facets)
        f.tag = f.side ? to_tag(m.partition[*f.side]) : FacetTag::interior;
    return m;
}

/// Checks a partition against the admissibility rules of a problem kind.
/// Returns the list of violations (empty if valid).
inline std::vector<std::string> partition_violations(const BoundaryPartition& part,
                                                     ProblemKind kind) {
    std::vector<std::string> out;
    if (kind == ProblemKind::concentration) {
        if (part.has(BoundaryKind::dirichlet) || part.has(BoundaryKind::robin))
            out.emplace_back("concentration problem requires all sides Neumann");
    } else {
        if (!part.has(BoundaryKind::neumann)) out.emplace_back("Neumann boundary part is empty");
        if (!part.has(BoundaryKind::robin)) out.emplace_back("Robin boundary part is empty");
    }
    return out;
}

/// Returns a copy of `mesh` with every boundary facet tagged by `partition`.
inline Mesh classify_boundary(const Mesh& mesh, const BoundaryPartition& partition,
                              ProblemKind kind) {
    auto bad = partition_violations(partition, kind);
    if (!bad.empty()) {
        std::string msg = "invalid partition";
        for (const auto& b : bad) msg += ": " + b;
        throw Error("invalid_partition", msg);
    }
    Mesh out = mesh;
    out.partition = partition;
    for (auto& f : out.facets)
        f.tag = f.side ? to_tag(partition[*f.side]) : FacetTag::interior;
    return out;
}

/// Uniform refinement: doubles nx and ny; child facets inherit the side tags.
inline Mesh refine_uniform(const Mesh& mesh) {
    Mesh out = build_rect_mesh(mesh.domain, 2 * mesh.nx, 2 * mesh.ny);
    out.partition = mesh.partition;
    for (auto& f : out.facets)
        f.tag = f.side ? to_tag(out.partition[*f.side]) : FacetTag::interior;
    return out;
}

struct FacetGeometry {
    double length{};
    Vec2 normal{};
    std::array<int, 2> elements{};
    std::array<int, 2> signs{};  // signs[1] is 0 on the boundary
};

/// +1 if the facet's global normal is the outward normal of `element`, else -1.
inline int facet_sign(const Facet& f, int element) { return f.elements[0] == element ? 1 : -1; }

inline FacetGeometry facet_geometry(const Mesh& mesh, int facet_id) {
    if (facet_id < 0 || static_cast<std::size_t>(facet_id) >= mesh.num_facets())
        throw Error("out_of_range", "facet id out of range");
    const Facet& f = mesh.facets[facet_id];
    FacetGeometry g;
    g.length = f.length();
    g.normal = f.normal;
    g.elements = f.elements;
    g.signs = {1, f.on_boundary() ? 0 : -1};
    return g;
}

}  // namespace dpgec

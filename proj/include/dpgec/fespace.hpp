#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dpgec/error.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/quadrature.hpp"

namespace dpgec {

/// 1D Lagrange basis on Gauss-Lobatto nodes (degree >= 1) or the midpoint (degree 0).
class Lagrange1D {
public:
    explicit Lagrange1D(int degree) : degree_(degree) {
        if (degree < 0 || degree >= kMaxGaussPoints)
            throw Error("invalid_order", "Lagrange degree out of range");
        nodes_ = degree == 0 ? std::vector<double>{0.0} : gauss_lobatto_nodes(degree + 1);
        denom_.resize(nodes_.size());
        for (std::size_t a = 0; a < nodes_.size(); ++a) {
            double d = 1.0;
            for (std::size_t b = 0; b < nodes_.size(); ++b)
                if (b != a) d *= nodes_[a] - nodes_[b];
            denom_[a] = d;
        }
    }

    int degree() const { return degree_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }

    double value(std::size_t a, double x) const {
        double v = 1.0;
        for (std::size_t b = 0; b < nodes_.size(); ++b)
            if (b != a) v *= x - nodes_[b];
        return v / denom_[a];
    }

    double derivative(std::size_t a, double x) const {
        double sum = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (k == a) continue;
            double prod = 1.0;
            for (std::size_t b = 0; b < nodes_.size(); ++b)
                if (b != a && b != k) prod *= x - nodes_[b];
            sum += prod;
        }
        return sum / denom_[a];
    }

private:
    int degree_;
    std::vector<double> nodes_;
    std::vector<double> denom_;
};

/// Values (and reference-coordinate gradients) of a scalar basis at a point set.
/// Entry (k, a) is stored at k * num_basis + a.
struct BasisTable {
    std::size_t num_basis{};
    std::size_t num_points{};
    std::vector<double> values;
    std::vector<double> dx;
    std::vector<double> dy;

    double value(std::size_t k, std::size_t a) const { return values[k * num_basis + a]; }
    double grad_x(std::size_t k, std::size_t a) const { return dx[k * num_basis + a]; }
    double grad_y(std::size_t k, std::size_t a) const { return dy[k * num_basis + a]; }
};

/// Tensor-product Lagrange basis of bi-degree `degree` on [-1,1]^2.
/// Basis a = j * (degree + 1) + i is the product of 1D modes i (in x) and j (in y).
inline BasisTable tabulate_lagrange_2d(int degree, std::span<const Vec2> points) {
    const Lagrange1D l(degree);
    const std::size_t n1 = l.size();
    BasisTable t;
    t.num_basis = n1 * n1;
    t.num_points = points.size();
    t.values.resize(t.num_basis * t.num_points);
    t.dx.resize(t.values.size());
    t.dy.resize(t.values.size());
    std::vector<double> vx(n1), vy(n1), dx(n1), dy(n1);
    for (std::size_t k = 0; k < points.size(); ++k) {
        for (std::size_t i = 0; i < n1; ++i) {
            vx[i] = l.value(i, points[k].x);
            vy[i] = l.value(i, points[k].y);
            dx[i] = l.derivative(i, points[k].x);
            dy[i] = l.derivative(i, points[k].y);
        }
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t i = 0; i < n1; ++i) {
                const std::size_t idx = k * t.num_basis + j * n1 + i;
                t.values[idx] = vx[i] * vy[j];
                t.dx[idx] = dx[i] * vy[j];
                t.dy[idx] = vx[i] * dy[j];
            }
    }
    return t;
}

inline constexpr int kMaxOrder = 10;

/// H1-conforming field basis of order p on Gauss-Lobatto nodes.
inline BasisTable tabulate_h1_basis(int p, std::span<const Vec2> points) {
    if (p < 1 || p > kMaxOrder) throw Error("invalid_order", "field order p must be in [1, 10]");
    return tabulate_lagrange_2d(p, points);
}

/// Scalar modes of the discontinuous flux space (degree p - 1). The vector basis
/// takes every scalar mode once per component.
inline BasisTable tabulate_l2_basis(int p_minus_1, std::span<const Vec2> points) {
    if (p_minus_1 < 0 || p_minus_1 > kMaxOrder - 1)
        throw Error("invalid_order", "flux degree must be in [0, 9]");
    return tabulate_lagrange_2d(p_minus_1, points);
}

/// Facet modes of degree p - 1 at reference abscissae in [-1, 1];
/// entry (k, a) at k * num_basis + a.
inline BasisTable tabulate_facet_basis(int p_minus_1, std::span<const double> points) {
    if (p_minus_1 < 0 || p_minus_1 > kMaxOrder - 1)
        throw Error("invalid_order", "trace degree must be in [0, 9]");
    const Lagrange1D l(p_minus_1);
    BasisTable t;
    t.num_basis = l.size();
    t.num_points = points.size();
    t.values.resize(t.num_basis * t.num_points);
    t.dx.resize(t.values.size());
    t.dy.assign(t.values.size(), 0.0);
    for (std::size_t k = 0; k < points.size(); ++k)
        for (std::size_t a = 0; a < t.num_basis; ++a) {
            t.values[k * t.num_basis + a] = l.value(a, points[k]);
            t.dx[k * t.num_basis + a] = l.derivative(a, points[k]);
        }
    return t;
}

/// Discretization parameters: nominal order p, enrichment delta_p and an optional
/// quadrature override (points per direction; 0 selects p + delta_p + 1).
struct SpaceLayout {
    int p{1};
    int delta_p{1};
    int quad_override{0};

    int field_per_element() const { return (p + 1) * (p + 1); }
    int flux_modes() const { return p * p; }
    int flux_per_element() const { return 2 * p * p; }
    int trace_per_facet() const { return p; }
    int enriched_degree() const { return p + delta_p; }
    int enriched_per_element() const { return (p + delta_p + 1) * (p + delta_p + 1); }
    int quad_points() const { return quad_override > 0 ? quad_override : p + delta_p + 1; }

    void validate() const {
        if (p < 1 || p > kMaxOrder) throw Error("invalid_order", "p must be in [1, 10]");
        if (delta_p < 1) throw Error("invalid_order", "delta_p must be at least 1");
        if (p + delta_p + 1 > kMaxGaussPoints)
            throw Error("invalid_order", "p + delta_p too large");
        if (quad_override < 0 || quad_override > kMaxGaussPoints)
            throw Error("invalid_order", "quadrature override must be in [1, 30]");
    }
};

/// Global numbering. Field dofs occupy [0, n_field), element-local flux dofs
/// [n_field, n_field + n_flux), trace dofs on active facets the rest.
struct DofMap {
    int p{1};
    int nx{}, ny{};
    int n_field{};
    int n_flux{};
    int n_trace{};
    int n_active{};
    std::vector<int> active_index;  // per facet, -1 when the facet has no trace unknowns
    std::vector<int> active_facets;

    int total() const { return n_field + n_flux + n_trace; }
    int flux_offset() const { return n_field; }
    int trace_offset() const { return n_field + n_flux; }
    int field_row_length() const { return nx * p + 1; }

    /// Global field dof of local node (i, j) of element (ix, iy).
    int field_dof(int ix, int iy, int i, int j) const {
        return (iy * p + j) * field_row_length() + ix * p + i;
    }
    /// Field dof sitting on mesh vertex (I, J).
    int vertex_dof(int I, int J) const { return J * p * field_row_length() + I * p; }

    int flux_dof(int element, int local) const {
        return n_field + element * 2 * p * p + local;
    }
    int trace_dof(int facet, int k) const {
        return trace_offset() + active_index[facet] * p + k;
    }
    bool active(int facet) const { return active_index[facet] >= 0; }
};

inline DofMap build_dofmap(const Mesh& mesh, const SpaceLayout& layout,
                           std::span<const int> active_facets) {
    layout.validate();
    DofMap d;
    d.p = layout.p;
    d.nx = mesh.nx;
    d.ny = mesh.ny;
    d.n_field = (mesh.nx * layout.p + 1) * (mesh.ny * layout.p + 1);
    d.n_flux = layout.flux_per_element() * static_cast<int>(mesh.num_elements());
    d.active_index.assign(mesh.num_facets(), -1);
    for (int f : active_facets) {
        if (f < 0 || static_cast<std::size_t>(f) >= mesh.num_facets())
            throw Error("out_of_range", "active facet id out of range");
        if (d.active_index[f] >= 0) continue;
        d.active_index[f] = 0;
    }
    // Number active facets in ascending facet order regardless of input order.
    for (std::size_t f = 0; f < mesh.num_facets(); ++f)
        if (d.active_index[f] >= 0) {
            d.active_index[f] = d.n_active++;
            d.active_facets.push_back(static_cast<int>(f));
        }
    d.n_trace = d.n_active * layout.trace_per_facet();
    return d;
}

/// Local trial dofs of one element: field, then flux (x modes, y modes), then
/// the traces of active facets in LocalFacet order.
struct ElementDofs {
    std::vector<int> global;
    int n_field{};
    int n_flux{};
    std::array<int, 4> trace_offset{-1, -1, -1, -1};

    int size() const { return static_cast<int>(global.size()); }
};

inline ElementDofs element_dofs(const Mesh& mesh, const DofMap& dm, int e) {
    const Element& el = mesh.elements[e];
    const int p = dm.p;
    ElementDofs out;
    out.n_field = (p + 1) * (p + 1);
    out.n_flux = 2 * p * p;
    out.global.reserve(out.n_field + out.n_flux + 4 * p);
    for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) out.global.push_back(dm.field_dof(el.ix, el.iy, i, j));
    for (int k = 0; k < out.n_flux; ++k) out.global.push_back(dm.flux_dof(e, k));
    for (int s = 0; s < 4; ++s) {
        const int f = el.facets[s];
        if (!dm.active(f)) continue;
        out.trace_offset[s] = static_cast<int>(out.global.size());
        for (int k = 0; k < p; ++k) out.global.push_back(dm.trace_dof(f, k));
    }
    return out;
}

/// Reference coordinate in [-1,1]^2 of a point on local facet `slot` of an element,
/// given the facet's own reference abscissa t in [-1, 1] (facet parameterized a -> b).
inline Vec2 facet_to_element_ref(int slot, double t) {
    switch (static_cast<LocalFacet>(slot)) {
        case LocalFacet::bottom: return {t, -1.0};
        case LocalFacet::right: return {1.0, t};
        case LocalFacet::top: return {t, 1.0};
        case LocalFacet::left: return {-1.0, t};
    }
    return {};
}

}  // namespace dpgec

#pragma once

// Element kernels of the broken mixed DPG discretization.
//
// Trial unknowns per element: the continuous field (c or phi, order p), the
// discontinuous flux (j or i, degree p-1 per component) and the single-valued
// normal-flux traces on the element's active facets (degree p-1). The test space
// is broken H1 x L2. The L2 component is eliminated exactly (its Riesz map is the
// identity), which leaves a first-order least-squares block; the broken H1
// component is resolved with the Gram matrix of an enriched space of degree
// p + delta_p.

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "dpgec/error.hpp"
#include "dpgec/fespace.hpp"
#include "dpgec/linalg.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/problem.hpp"
#include "dpgec/quadrature.hpp"

namespace dpgec {

/// Basis tabulations on the reference square shared by every element of a layout.
struct ReferenceData {
    SpaceLayout layout;
    QuadRule2D quad;
    QuadRule1D quad1d;
    BasisTable field;  // order p at volume points
    BasisTable flux;   // scalar modes of degree p-1 at volume points
    BasisTable test;   // order p + delta_p at volume points
    std::array<BasisTable, 4> field_facet;  // per LocalFacet, at quad1d points
    std::array<BasisTable, 4> test_facet;
    BasisTable trace;  // facet modes at quad1d points

    int n_field() const { return static_cast<int>(field.num_basis); }
    int n_flux_modes() const { return static_cast<int>(flux.num_basis); }
    int n_test() const { return static_cast<int>(test.num_basis); }
    int n_trace() const { return static_cast<int>(trace.num_basis); }
};

inline ReferenceData make_reference(const SpaceLayout& layout) {
    layout.validate();
    ReferenceData r;
    r.layout = layout;
    const int nq = layout.quad_points();
    r.quad = tensor_quad(nq);
    r.quad1d = gauss_1d(nq);
    r.field = tabulate_h1_basis(layout.p, r.quad.points);
    r.flux = tabulate_l2_basis(layout.p - 1, r.quad.points);
    r.test = tabulate_lagrange_2d(layout.enriched_degree(), r.quad.points);
    for (int s = 0; s < 4; ++s) {
        std::vector<Vec2> pts;
        for (double t : r.quad1d.points) pts.push_back(facet_to_element_ref(s, t));
        r.field_facet[s] = tabulate_h1_basis(layout.p, pts);
        r.test_facet[s] = tabulate_lagrange_2d(layout.enriched_degree(), pts);
    }
    r.trace = tabulate_facet_basis(layout.p - 1, r.quad1d.points);
    return r;
}

/// Physical coordinates of reference point `ref` in element `el`.
inline Vec2 map_to_physical(const Element& el, Vec2 ref) {
    return {el.xa + 0.5 * (ref.x + 1.0) * (el.xb - el.xa),
            el.ya + 0.5 * (ref.y + 1.0) * (el.yb - el.ya)};
}

struct LocalSystem {
    DenseMatrix G;  // enriched test Gram
    DenseMatrix B;  // enriched test x local trial
    DenseVector l;  // enriched load
    DenseMatrix A;  // first-order least-squares block
    DenseVector f;  // first-order least-squares load
    double c0{0.0};  // squared norm of the first-order load

    // First-order residual at volume points: residual_q = ops.middleRows(2q, 2) u + shift.segment(2q, 2)
    DenseMatrix fosls_ops;
    DenseVector fosls_shift;
    DenseVector fosls_weights;
};

struct IndicatorResult {
    double eta_sq_riesz{0.0};
    double eta_sq_fosls{0.0};

    double total() const { return eta_sq_riesz + eta_sq_fosls; }
};

namespace detail {

struct ElementScales {
    double jx, jy, det;  // d(ref)/d(phys) factors and Jacobian determinant
};

inline ElementScales scales(const Mesh& mesh) {
    return {2.0 / mesh.hx, 2.0 / mesh.hy, 0.25 * mesh.hx * mesh.hy};
}

inline double facet_half_length(const Mesh& mesh, int slot) {
    return (slot == 0 || slot == 2) ? 0.5 * mesh.hx : 0.5 * mesh.hy;
}

}  // namespace detail

/// Broken H1 Gram of the enriched test space: (r_a, r_b)_K + (grad r_a, grad r_b)_K.
inline DenseMatrix local_gram(const Mesh& mesh, const ReferenceData& ref) {
    const auto sc = detail::scales(mesh);
    const int ne = ref.n_test();
    DenseMatrix g = DenseMatrix::Zero(ne, ne);
    for (std::size_t q = 0; q < ref.quad.size(); ++q) {
        const double w = ref.quad.weights[q] * sc.det;
        for (int a = 0; a < ne; ++a) {
            const double va = ref.test.value(q, a);
            const double xa = ref.test.grad_x(q, a) * sc.jx;
            const double ya = ref.test.grad_y(q, a) * sc.jy;
            for (int b = a; b < ne; ++b) {
                const double v = va * ref.test.value(q, b) + xa * ref.test.grad_x(q, b) * sc.jx +
                                 ya * ref.test.grad_y(q, b) * sc.jy;
                g(a, b) += w * v;
            }
        }
    }
    g.triangularView<Eigen::StrictlyLower>() = g.transpose().triangularView<Eigen::StrictlyLower>();
    return g;
}

/// Coupling of the element's active-facet traces with the enriched test space,
/// C[e, mu] = sigma_{K,f} <mu, r_e>_f. Columns follow `dofs.trace_offset`
/// shifted to start at zero.
inline DenseMatrix local_trace_coupling(const Mesh& mesh, int e, const ElementDofs& dofs,
                                        const ReferenceData& ref) {
    const Element& el = mesh.elements[e];
    const int ne = ref.n_test();
    const int first = dofs.n_field + dofs.n_flux;
    const int nt = dofs.size() - first;
    DenseMatrix c = DenseMatrix::Zero(ne, nt);
    for (int s = 0; s < 4; ++s) {
        if (dofs.trace_offset[s] < 0) continue;
        const Facet& f = mesh.facets[el.facets[s]];
        const double sign = facet_sign(f, e);
        const double half = detail::facet_half_length(mesh, s);
        const int col0 = dofs.trace_offset[s] - first;
        for (std::size_t k = 0; k < ref.quad1d.size(); ++k) {
            const double w = sign * ref.quad1d.weights[k] * half;
            for (std::size_t m = 0; m < ref.trace.num_basis; ++m) {
                const double mu = ref.trace.value(k, m);
                for (int a = 0; a < ne; ++a) c(a, col0 + m) += w * mu * ref.test_facet[s].value(k, a);
            }
        }
    }
    return c;
}

namespace detail {

struct KernelData {
    double trace_scale;          // dt (concentration) or 1
    double flux_scale;           // -dt (concentration) or -1, multiplies (flux, grad r)
    double inv_coef;             // 1/D or 1/kappa in the constitutive residual
};

inline KernelData kernel_data(const Problem& problem) {
    if (const auto* c = std::get_if<ConcentrationProblem>(&problem))
        return {c->dt, -c->dt, 1.0 / c->D};
    const auto& p = std::get<PotentialProblem>(problem);
    return {1.0, -1.0, 1.0 / p.kappa};
}

}  // namespace detail

/// Fills B and l of `ls` (G must already be set or is ignored).
inline void local_trial_test(const Mesh& mesh, int e, const Problem& problem,
                             const ElementDofs& dofs, const ReferenceData& ref, LocalSystem& ls) {
    const Element& el = mesh.elements[e];
    const auto sc = detail::scales(mesh);
    const auto kd = detail::kernel_data(problem);
    const int ne = ref.n_test();
    const int nf = dofs.n_field;
    const int nm = ref.n_flux_modes();
    ls.B = DenseMatrix::Zero(ne, dofs.size());
    ls.l = DenseVector::Zero(ne);

    const auto* conc = std::get_if<ConcentrationProblem>(&problem);
    const auto* pot = std::get_if<PotentialProblem>(&problem);

    for (std::size_t q = 0; q < ref.quad.size(); ++q) {
        const double w = ref.quad.weights[q] * sc.det;
        const Vec2 x = map_to_physical(el, ref.quad.points[q]);
        const double cprev = conc ? conc->c_prev(x.x, x.y) : 0.0;
        for (int a = 0; a < ne; ++a) {
            const double r = ref.test.value(q, a);
            const double rx = ref.test.grad_x(q, a) * sc.jx;
            const double ry = ref.test.grad_y(q, a) * sc.jy;
            if (conc) {
                for (int b = 0; b < nf; ++b) ls.B(a, b) += w * ref.field.value(q, b) * r;
                ls.l(a) += w * cprev * r;
            }
            for (int m = 0; m < nm; ++m) {
                const double psi = w * kd.flux_scale * ref.flux.value(q, m);
                ls.B(a, nf + m) += psi * rx;
                ls.B(a, nf + nm + m) += psi * ry;
            }
        }
    }

    // Traces on active facets.
    if (dofs.size() > nf + dofs.n_flux) {
        const DenseMatrix c = local_trace_coupling(mesh, e, dofs, ref);
        ls.B.rightCols(c.cols()) = kd.trace_scale * c;
    }

    // Boundary data and the Robin term.
    for (int s = 0; s < 4; ++s) {
        const Facet& f = mesh.facets[el.facets[s]];
        if (!f.on_boundary()) continue;
        const double half = detail::facet_half_length(mesh, s);
        const FacetQuad fq = facet_quad(static_cast<int>(ref.quad1d.size()), f);
        for (std::size_t k = 0; k < fq.size(); ++k) {
            const double w = ref.quad1d.weights[k] * half;
            const Vec2 x = fq.points[k];
            const BasisTable& tf = ref.test_facet[s];
            if (conc) {
                const double g = conc->J(x.x, x.y, f.normal);
                for (int a = 0; a < ne; ++a) ls.l(a) -= conc->dt * w * g * tf.value(k, a);
            } else if (f.tag == FacetTag::neumann) {
                const double g = pot->I(x.x, x.y, f.normal);
                for (int a = 0; a < ne; ++a) ls.l(a) -= w * g * tf.value(k, a);
            } else if (f.tag == FacetTag::robin) {
                const double g = pot->R(x.x, x.y, f.normal);
                const double beta = pot->beta(x.x, x.y);
                const BasisTable& ff = ref.field_facet[s];
                for (int a = 0; a < ne; ++a) {
                    const double r = tf.value(k, a);
                    ls.l(a) -= w * g * r;
                    for (int b = 0; b < nf; ++b) ls.B(a, b) += w * beta * ff.value(k, b) * r;
                }
            }
        }
    }
}

/// First-order least-squares block from the optimal L2 test functions
/// grad(dfield) + coef^{-1} dflux.
inline void local_fosls(const Mesh& mesh, int e, const Problem& problem, const ElementDofs& dofs,
                        const ReferenceData& ref, LocalSystem& ls) {
    const Element& el = mesh.elements[e];
    const auto sc = detail::scales(mesh);
    const auto kd = detail::kernel_data(problem);
    const int nt = dofs.size();
    const int nf = dofs.n_field;
    const int nm = ref.n_flux_modes();
    const std::size_t nq = ref.quad.size();
    const auto* pot = std::get_if<PotentialProblem>(&problem);

    ls.fosls_ops = DenseMatrix::Zero(2 * nq, nt);
    ls.fosls_shift = DenseVector::Zero(2 * nq);
    ls.fosls_weights = DenseVector::Zero(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        ls.fosls_weights(q) = ref.quad.weights[q] * sc.det;
        for (int b = 0; b < nf; ++b) {
            ls.fosls_ops(2 * q, b) = ref.field.grad_x(q, b) * sc.jx;
            ls.fosls_ops(2 * q + 1, b) = ref.field.grad_y(q, b) * sc.jy;
        }
        for (int m = 0; m < nm; ++m) {
            ls.fosls_ops(2 * q, nf + m) = kd.inv_coef * ref.flux.value(q, m);
            ls.fosls_ops(2 * q + 1, nf + nm + m) = kd.inv_coef * ref.flux.value(q, m);
        }
        if (pot) {
            const Vec2 x = map_to_physical(el, ref.quad.points[q]);
            ls.fosls_shift(2 * q) = kd.inv_coef * pot->S_x(x.x, x.y);
            ls.fosls_shift(2 * q + 1) = kd.inv_coef * pot->S_y(x.x, x.y);
        }
    }

    ls.A = DenseMatrix::Zero(nt, nt);
    ls.f = DenseVector::Zero(nt);
    ls.c0 = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
        const double w = ls.fosls_weights(q);
        const auto v = ls.fosls_ops.middleRows(2 * q, 2);
        const auto s = ls.fosls_shift.segment(2 * q, 2);
        ls.A.noalias() += w * v.transpose() * v;
        ls.f.noalias() -= w * v.transpose() * s;
        ls.c0 += w * s.squaredNorm();
    }
    ls.A = 0.5 * (ls.A + ls.A.transpose()).eval();
}

/// Builds the complete local system of element `e`. `gram` is the (shared) Gram
/// matrix of the congruent reference geometry.
inline LocalSystem local_system(const Mesh& mesh, int e, const Problem& problem,
                                const ElementDofs& dofs, const ReferenceData& ref,
                                const DenseMatrix& gram) {
    LocalSystem ls;
    ls.G = gram;
    local_trial_test(mesh, e, problem, dofs, ref, ls);
    local_fosls(mesh, e, problem, dofs, ref, ls);
    return ls;
}

struct CondensedSystem {
    DenseMatrix S;
    DenseVector rhs;
};

/// Cholesky factor of the Gram matrix; throws if it is not SPD.
inline Eigen::LLT<DenseMatrix> factor_gram(const DenseMatrix& g) {
    Eigen::LLT<DenseMatrix> llt(g);
    if (llt.info() != Eigen::Success)
        throw Error("internal", "test Gram matrix is not SPD (factorization failed)");
    return llt;
}

/// S_K = A + B^T G^{-1} B,  rhs_K = f + B^T G^{-1} l, via G = L L^T.
inline CondensedSystem condense_local(const LocalSystem& ls, const Eigen::LLT<DenseMatrix>& llt) {
    const DenseMatrix w = llt.matrixL().solve(ls.B);
    const DenseVector z = llt.matrixL().solve(ls.l);
    CondensedSystem out;
    out.S = ls.A;
    out.S.noalias() += w.transpose() * w;
    out.rhs = ls.f;
    out.rhs.noalias() += w.transpose() * z;
    return out;
}

inline CondensedSystem condense_local(const LocalSystem& ls) {
    return condense_local(ls, factor_gram(ls.G));
}

/// Residual-based indicator: the enriched dual norm of l - B u plus the
/// squared L2 residual of the constitutive equation.
inline IndicatorResult error_indicator(const LocalSystem& ls, const Eigen::LLT<DenseMatrix>& llt,
                                       const DenseVector& u) {
    IndicatorResult out;
    const DenseVector res = ls.l - ls.B * u;
    out.eta_sq_riesz = std::max(0.0, llt.matrixL().solve(res).squaredNorm());
    const DenseVector r = ls.fosls_ops * u + ls.fosls_shift;
    double s = 0.0;
    for (Eigen::Index q = 0; q < ls.fosls_weights.size(); ++q)
        s += ls.fosls_weights(q) * r.segment(2 * q, 2).squaredNorm();
    out.eta_sq_fosls = std::max(0.0, s);
    return out;
}

inline IndicatorResult error_indicator(const LocalSystem& ls, const DenseVector& u) {
    return error_indicator(ls, factor_gram(ls.G), u);
}

}  // namespace dpgec

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dpgec/dpg_core.hpp"
#include "dpgec/error.hpp"
#include "dpgec/fespace.hpp"
#include "dpgec/linalg.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/problem.hpp"
#include "dpgec/solver.hpp"

namespace dpgec {

using VectorFn = std::function<Vec2(double, double)>;

/// Exact solution with hand-derived data. `source_divergence` is div S for the
/// potential problem (zero for concentration); `degree` is -1 for smooth cases.
struct ManufacturedCase {
    std::string name;
    ProblemKind kind{};
    Rect domain;
    BoundaryPartition partition;
    ScalarFn field;
    VectorFn gradient;
    ScalarFn laplacian;
    VectorFn flux;
    ScalarFn flux_divergence;
    ScalarFn source_divergence;
    Problem problem;
    int degree{-1};

    Mesh mesh(int nx, int ny) const {
        return classify_boundary(build_rect_mesh(domain, nx, ny), partition, kind);
    }
    Mesh mesh(int n) const { return mesh(n, n); }
};

inline const std::vector<std::string>& manufactured_case_names() {
    static const std::vector<std::string> names{"conc-poly2", "conc-trig", "pot-poly2", "pot-trig"};
    return names;
}

namespace detail {

inline BoundaryFn normal_flux(VectorFn flux) {
    return [flux = std::move(flux)](double x, double y, Vec2 n) { return dot(flux(x, y), n); };
}

inline const BoundaryPartition kReferencePartition{
    {BoundaryKind::dirichlet, BoundaryKind::neumann, BoundaryKind::robin, BoundaryKind::robin}};

inline ManufacturedCase conc_poly2() {
    ManufacturedCase mc;
    mc.name = "conc-poly2";
    mc.kind = ProblemKind::concentration;
    mc.partition = BoundaryPartition::all_neumann();
    mc.degree = 2;
    const double D = 1.0, dt = 1.0;
    mc.field = [](double x, double) { return x * x; };
    mc.gradient = [](double x, double) { return Vec2{2.0 * x, 0.0}; };
    mc.laplacian = [](double, double) { return 2.0; };
    mc.flux = [D](double x, double) { return Vec2{-2.0 * D * x, 0.0}; };
    mc.flux_divergence = [D](double, double) { return -2.0 * D; };
    mc.source_divergence = constant_fn(0.0);
    ConcentrationProblem p;
    p.D = D;
    p.dt = dt;
    p.c_prev = [](double x, double) { return x * x - 2.0; };
    p.J = normal_flux(mc.flux);
    mc.problem = p;
    return mc;
}

inline ManufacturedCase conc_trig() {
    using std::numbers::pi;
    ManufacturedCase mc;
    mc.name = "conc-trig";
    mc.kind = ProblemKind::concentration;
    mc.partition = BoundaryPartition::all_neumann();
    const double D = 0.5, dt = 0.1;
    mc.field = [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); };
    mc.gradient = [](double x, double y) {
        return Vec2{-pi * std::sin(pi * x) * std::cos(pi * y), -pi * std::cos(pi * x) * std::sin(pi * y)};
    };
    mc.laplacian = [](double x, double y) {
        return -2.0 * pi * pi * std::cos(pi * x) * std::cos(pi * y);
    };
    mc.flux = [D](double x, double y) {
        return Vec2{D * pi * std::sin(pi * x) * std::cos(pi * y), D * pi * std::cos(pi * x) * std::sin(pi * y)};
    };
    mc.flux_divergence = [D](double x, double y) {
        return 2.0 * D * pi * pi * std::cos(pi * x) * std::cos(pi * y);
    };
    mc.source_divergence = constant_fn(0.0);
    ConcentrationProblem p;
    p.D = D;
    p.dt = dt;
    p.c_prev = [D, dt](double x, double y) {
        return (1.0 + 2.0 * pi * pi * dt * D) * std::cos(pi * x) * std::cos(pi * y);
    };
    p.J = normal_flux(mc.flux);
    mc.problem = p;
    return mc;
}

inline ManufacturedCase pot_poly2() {
    ManufacturedCase mc;
    mc.name = "pot-poly2";
    mc.kind = ProblemKind::potential;
    mc.partition = kReferencePartition;
    mc.degree = 2;
    mc.field = [](double x, double) { return x * (1.0 - x); };
    mc.gradient = [](double x, double) { return Vec2{1.0 - 2.0 * x, 0.0}; };
    mc.laplacian = [](double, double) { return -2.0; };
    mc.flux = [](double, double) { return Vec2{-1.0, 0.0}; };
    mc.flux_divergence = constant_fn(0.0);
    mc.source_divergence = constant_fn(2.0);
    PotentialProblem p;
    p.kappa = 1.0;
    p.beta = constant_fn(1.0);
    p.S_x = [](double x, double) { return 2.0 * x; };
    p.S_y = constant_fn(0.0);
    p.I = normal_flux(mc.flux);
    p.R = [flux = mc.flux, field = mc.field, beta = p.beta](double x, double y, Vec2 n) {
        return dot(flux(x, y), n) - beta(x, y) * field(x, y);
    };
    p.partition = mc.partition;
    mc.problem = p;
    return mc;
}

inline ManufacturedCase pot_trig() {
    using std::numbers::pi;
    ManufacturedCase mc;
    mc.name = "pot-trig";
    mc.kind = ProblemKind::potential;
    mc.partition = kReferencePartition;
    const double kappa = 2.0;
    mc.field = [](double x, double y) { return std::sin(pi * x) * std::sin(0.5 * pi * y); };
    mc.gradient = [](double x, double y) {
        return Vec2{pi * std::cos(pi * x) * std::sin(0.5 * pi * y),
                    0.5 * pi * std::sin(pi * x) * std::cos(0.5 * pi * y)};
    };
    mc.laplacian = [](double x, double y) {
        return -1.25 * pi * pi * std::sin(pi * x) * std::sin(0.5 * pi * y);
    };
    // S = (-(5 pi kappa / 4) cos(pi x) sin(pi y / 2), 0) makes div i = 0.
    mc.flux = [kappa](double x, double y) {
        return Vec2{0.25 * kappa * pi * std::cos(pi * x) * std::sin(0.5 * pi * y),
                    -0.5 * kappa * pi * std::sin(pi * x) * std::cos(0.5 * pi * y)};
    };
    mc.flux_divergence = [kappa](double x, double y) {
        return -0.25 * kappa * pi * pi * std::sin(pi * x) * std::sin(0.5 * pi * y) +
               0.25 * kappa * pi * pi * std::sin(pi * x) * std::sin(0.5 * pi * y);
    };
    mc.source_divergence = [kappa](double x, double y) {
        return 1.25 * kappa * pi * pi * std::sin(pi * x) * std::sin(0.5 * pi * y);
    };
    PotentialProblem p;
    p.kappa = kappa;
    p.beta = [](double x, double) { return 1.0 + x; };
    p.S_x = [kappa](double x, double y) {
        return -1.25 * kappa * pi * std::cos(pi * x) * std::sin(0.5 * pi * y);
    };
    p.S_y = constant_fn(0.0);
    p.I = normal_flux(mc.flux);
    p.R = [flux = mc.flux, field = mc.field, beta = p.beta](double x, double y, Vec2 n) {
        return dot(flux(x, y), n) - beta(x, y) * field(x, y);
    };
    p.partition = mc.partition;
    mc.problem = p;
    return mc;
}

}  // namespace detail

inline ManufacturedCase manufactured_case(const std::string& name) {
    if (name == "conc-poly2") return detail::conc_poly2();
    if (name == "conc-trig") return detail::conc_trig();
    if (name == "pot-poly2") return detail::pot_poly2();
    if (name == "pot-trig") return detail::pot_trig();
    throw Error("unknown_case", "unknown manufactured case '" + name + "'");
}

// ---------------------------------------------------------------------------
// Classical Bubnov-Galerkin oracle

/// H1-conforming Galerkin solve of the second-order problem with the same field
/// space and numbering as the DPG field. Boundary data follow the first-order
/// convention (I and R prescribe the current density i.n).
inline std::vector<double> classical_galerkin_solve(const Mesh& mesh, int p,
                                                    const Problem& problem,
                                                    const SolveOptions& opt = {},
                                                    SolveStats* stats_out = nullptr) {
    validate_problem(problem, mesh);
    SpaceLayout layout{p, 1, 0};
    const DofMap dm = build_dofmap(mesh, layout, {});
    const int nq = p + 2;
    const QuadRule2D quad = tensor_quad(nq);
    const QuadRule1D q1 = gauss_1d(nq);
    const BasisTable tab = tabulate_h1_basis(p, quad.points);
    std::array<BasisTable, 4> ftab;
    for (int s = 0; s < 4; ++s) {
        std::vector<Vec2> pts;
        for (double t : q1.points) pts.push_back(facet_to_element_ref(s, t));
        ftab[s] = tabulate_h1_basis(p, pts);
    }
    const int nb = (p + 1) * (p + 1);
    const double jx = 2.0 / mesh.hx, jy = 2.0 / mesh.hy, det = 0.25 * mesh.hx * mesh.hy;
    const auto* conc = std::get_if<ConcentrationProblem>(&problem);
    const auto* pot = std::get_if<PotentialProblem>(&problem);

    std::vector<std::vector<int>> groups;
    for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
        const auto d = element_dofs(mesh, dm, e);
        groups.emplace_back(d.global.begin(), d.global.begin() + nb);
    }
    CsrMatrix a = CsrMatrix::from_groups(dm.n_field, groups);
    std::vector<double> rhs(dm.n_field, 0.0);

    for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
        const Element& el = mesh.elements[e];
        const auto& g = groups[e];
        DenseMatrix ke = DenseMatrix::Zero(nb, nb);
        DenseVector fe = DenseVector::Zero(nb);
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const double w = quad.weights[q] * det;
            const Vec2 x = map_to_physical(el, quad.points[q]);
            const double mass = conc ? 1.0 : 0.0;
            const double diff = conc ? conc->dt * conc->D : pot->kappa;
            const double load = conc ? conc->c_prev(x.x, x.y) : 0.0;
            const double sx = pot ? pot->S_x(x.x, x.y) : 0.0;
            const double sy = pot ? pot->S_y(x.x, x.y) : 0.0;
            for (int i = 0; i < nb; ++i) {
                const double vi = tab.value(q, i);
                const double gx = tab.grad_x(q, i) * jx, gy = tab.grad_y(q, i) * jy;
                fe(i) += w * (load * vi - sx * gx - sy * gy);
                for (int j = 0; j < nb; ++j)
                    ke(i, j) += w * (mass * vi * tab.value(q, j) +
                                     diff * (gx * tab.grad_x(q, j) * jx + gy * tab.grad_y(q, j) * jy));
            }
        }
        for (int s = 0; s < 4; ++s) {
            const Facet& f = mesh.facets[el.facets[s]];
            if (!f.on_boundary()) continue;
            const FacetQuad fq = facet_quad(nq, f);
            for (std::size_t k = 0; k < fq.size(); ++k) {
                const Vec2 x = fq.points[k];
                const double w = fq.weights[k];
                double g_load = 0.0, robin = 0.0;
                if (conc) {
                    g_load = -conc->dt * conc->J(x.x, x.y, f.normal);
                } else if (f.tag == FacetTag::neumann) {
                    g_load = -pot->I(x.x, x.y, f.normal);
                } else if (f.tag == FacetTag::robin) {
                    g_load = -pot->R(x.x, x.y, f.normal);
                    robin = pot->beta(x.x, x.y);
                }
                for (int i = 0; i < nb; ++i) {
                    const double vi = ftab[s].value(k, i);
                    fe(i) += w * g_load * vi;
                    if (robin != 0.0)
                        for (int j = 0; j < nb; ++j) ke(i, j) += w * robin * vi * ftab[s].value(k, j);
                }
            }
        }
        for (int i = 0; i < nb; ++i) {
            rhs[g[i]] += fe(i);
            for (int j = 0; j < nb; ++j) a.add(g[i], g[j], ke(i, j));
        }
    }
    if (pot) apply_constraints(a, rhs, dirichlet_dofs(mesh, dm));
    SolveStats stats;
    auto sol = solve_spd(a, rhs, opt, stats);
    if (stats_out) *stats_out = stats;
    return sol;
}

// ---------------------------------------------------------------------------
// Error norms

/// L2 error of a degree-p continuous field given by its global coefficients.
inline double field_l2_error(const Mesh& mesh, int p, std::span<const double> field,
                             const ScalarFn& exact, int nq) {
    const SpaceLayout layout{p, 1, 0};
    const DofMap dm = build_dofmap(mesh, layout, {});
    const QuadRule2D quad = tensor_quad(nq);
    const BasisTable tab = tabulate_h1_basis(p, quad.points);
    const double det = 0.25 * mesh.hx * mesh.hy;
    double sum = 0.0;
    for (const Element& el : mesh.elements) {
        for (std::size_t q = 0; q < quad.size(); ++q) {
            double uh = 0.0;
            int a = 0;
            for (int j = 0; j <= p; ++j)
                for (int i = 0; i <= p; ++i, ++a)
                    uh += field[dm.field_dof(el.ix, el.iy, i, j)] * tab.value(q, a);
            const Vec2 x = map_to_physical(el, quad.points[q]);
            const double d = uh - (exact ? exact(x.x, x.y) : 0.0);
            sum += quad.weights[q] * det * d * d;
        }
    }
    return std::sqrt(sum);
}

/// L2 error of the element-local flux (flux coefficients only, offset-free).
inline double flux_l2_error(const Mesh& mesh, int p, std::span<const double> flux,
                            const VectorFn& exact, int nq) {
    const QuadRule2D quad = tensor_quad(nq);
    const BasisTable tab = tabulate_l2_basis(p - 1, quad.points);
    const double det = 0.25 * mesh.hx * mesh.hy;
    const int nm = p * p;
    double sum = 0.0;
    for (const Element& el : mesh.elements) {
        const std::size_t base = static_cast<std::size_t>(el.index) * 2 * nm;
        for (std::size_t q = 0; q < quad.size(); ++q) {
            Vec2 qh{};
            for (int m = 0; m < nm; ++m) {
                qh.x += flux[base + m] * tab.value(q, m);
                qh.y += flux[base + nm + m] * tab.value(q, m);
            }
            const Vec2 x = map_to_physical(el, quad.points[q]);
            const Vec2 d = exact ? qh - exact(x.x, x.y) : qh;
            sum += quad.weights[q] * det * dot(d, d);
        }
    }
    return std::sqrt(sum);
}

/// Facet-wise L2 projection of the exact normal flux (global facet normal)
/// onto the trace space of the active facets.
inline std::vector<double> project_trace(const Mesh& mesh, const DofMap& dm,
                                         const VectorFn& flux) {
    const int p = dm.p;
    const QuadRule1D q1 = gauss_1d(p + 4);
    const BasisTable mu = tabulate_facet_basis(p - 1, q1.points);
    std::vector<double> out(dm.n_trace, 0.0);
    for (int f : dm.active_facets) {
        const Facet& fa = mesh.facets[f];
        const FacetQuad fq = facet_quad(p + 4, fa);
        DenseMatrix m = DenseMatrix::Zero(p, p);
        DenseVector b = DenseVector::Zero(p);
        for (std::size_t k = 0; k < fq.size(); ++k) {
            const double g = dot(flux(fq.points[k].x, fq.points[k].y), fa.normal);
            for (int a = 0; a < p; ++a) {
                b(a) += fq.weights[k] * g * mu.value(k, a);
                for (int c = 0; c < p; ++c) m(a, c) += fq.weights[k] * mu.value(k, a) * mu.value(k, c);
            }
        }
        const DenseVector c = m.llt().solve(b);
        for (int a = 0; a < p; ++a) out[dm.active_index[f] * p + a] = c(a);
    }
    return out;
}

/// Discrete skeleton dual norm: the supremum of <trace, u> over the enriched
/// broken H1 space, normalized by the broken H1 norm of u.
inline double skeleton_dual_norm(std::span<const double> trace, const Mesh& mesh,
                                 const DofMap& dm, const ReferenceData& ref) {
    if (static_cast<int>(trace.size()) != dm.n_trace)
        throw Error("internal", "trace vector size does not match the dof map");
    const auto llt = factor_gram(local_gram(mesh, ref));
    double sum = 0.0;
    for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
        const ElementDofs d = element_dofs(mesh, dm, e);
        const int first = d.n_field + d.n_flux;
        if (d.size() == first) continue;
        const DenseMatrix c = local_trace_coupling(mesh, e, d, ref);
        DenseVector t(d.size() - first);
        for (int a = first; a < d.size(); ++a) t(a - first) = trace[d.global[a] - dm.trace_offset()];
        sum += llt.matrixL().solve(c * t).squaredNorm();
    }
    return std::sqrt(sum);
}

struct ErrorNorms {
    double field{};
    double flux{};
    double trace{};
    double exact_field{};  // norms of the exact quantities, for relative errors
    double exact_flux{};
    double exact_trace{};

    double combined() const { return std::hypot(field, flux); }
};

inline ErrorNorms error_norms(const Solution& sol, const ManufacturedCase& mc, const Mesh& mesh,
                              const DofMap& dm, const ReferenceData& ref) {
    const int p = dm.p;
    const int nq = ref.layout.quad_points() + 3;
    ErrorNorms out;
    out.field = field_l2_error(mesh, p, sol.field, mc.field, nq);
    out.flux = flux_l2_error(mesh, p, sol.flux, mc.flux, nq);
    const std::vector<double> zero_field(sol.field.size(), 0.0), zero_flux(sol.flux.size(), 0.0);
    out.exact_field = field_l2_error(mesh, p, zero_field, mc.field, nq);
    out.exact_flux = flux_l2_error(mesh, p, zero_flux, mc.flux, nq);
    const std::vector<double> proj = project_trace(mesh, dm, mc.flux);
    std::vector<double> diff(proj.size());
    for (std::size_t i = 0; i < proj.size(); ++i) diff[i] = sol.trace[i] - proj[i];
    out.trace = skeleton_dual_norm(diff, mesh, dm, ref);
    out.exact_trace = skeleton_dual_norm(proj, mesh, dm, ref);
    return out;
}

// ---------------------------------------------------------------------------
// Convergence study

struct EocRow {
    int n{};
    double h{};
    int dofs{};
    double e_field{};
    double e_flux{};
    double e_trace{};
    double e_combined{};
    double eta{};
    double galerkin_e_field{};
    int iterations{};
    double runtime_s{};
};

struct EocReport {
    std::string case_name;
    int p{};
    int delta_p{};
    std::vector<EocRow> rows;

    static double rate(double coarse, double fine) { return std::log2(coarse / fine); }

    /// Rate between rows i and i+1 of the quantity selected by `get`.
    template <class Get>
    double eoc(std::size_t i, Get get) const {
        return rate(get(rows[i]), get(rows[i + 1]));
    }
    double final_eoc_combined() const {
        return eoc(rows.size() - 2, [](const EocRow& r) { return r.e_combined; });
    }
    double final_eoc_eta() const {
        return eoc(rows.size() - 2, [](const EocRow& r) { return r.eta; });
    }
    double final_eoc_field() const {
        return eoc(rows.size() - 2, [](const EocRow& r) { return r.e_field; });
    }
};

inline EocReport eoc_study(const ManufacturedCase& mc, const SpaceLayout& layout, int levels,
                           int n0 = 8, const SolveOptions& opt = {}, bool with_galerkin = true) {
    if (levels < 3) throw Error("invalid_config", "a convergence study needs at least 3 levels");
    EocReport rep;
    rep.case_name = mc.name;
    rep.p = layout.p;
    rep.delta_p = layout.delta_p;
    const ReferenceData ref = make_reference(layout);
    Mesh mesh = mc.mesh(n0);
    for (int lvl = 0; lvl < levels; ++lvl) {
        const auto t0 = std::chrono::steady_clock::now();
        const DpgRun run = solve_dpg(mesh, mc.problem, layout, opt);
        const ErrorNorms en = error_norms(run.solution, mc, mesh, run.dofmap, ref);
        EocRow row;
        row.n = mesh.nx;
        row.h = mesh.h_max();
        row.dofs = run.dofmap.total();
        row.e_field = en.field;
        row.e_flux = en.flux;
        row.e_trace = en.trace;
        row.e_combined = en.combined();
        row.eta = run.solution.eta;
        row.iterations = run.stats.iterations;
        if (with_galerkin) {
            const auto g = classical_galerkin_solve(mesh, layout.p, mc.problem, opt);
            row.galerkin_e_field = field_l2_error(mesh, layout.p, g, mc.field, layout.quad_points() + 3);
        }
        row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.rows.push_back(row);
        if (lvl + 1 < levels) mesh = refine_uniform(mesh);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Discrete inf-sup constant

inline constexpr int kInfSupMaxDofs = 600;

/// Square root of the smallest generalized eigenvalue of (A_dpg, M_trial) where
/// M_trial is block diagonal: H1 Gram for the field, L2 Gram for the flux and the
/// discrete skeleton dual-norm Gram for the traces. Dirichlet dofs are removed.
inline double infsup_constant(const Mesh& mesh, const SpaceLayout& layout, const Problem& problem) {
    validate_problem(problem, mesh);
    const ReferenceData ref = make_reference(layout);
    const DofMap dm = build_dofmap(mesh, layout, active_facets(mesh, problem));
    if (dm.total() > kInfSupMaxDofs)
        throw Error("size_cap", "inf-sup computation limited to " + std::to_string(kInfSupMaxDofs) +
                                    " trial dofs");
    const GlobalSystem sys = assemble(mesh, dm, problem, ref, false);
    const DenseMatrix a = sys.matrix.to_dense();

    const int n = dm.total();
    DenseMatrix m = DenseMatrix::Zero(n, n);
    const auto sc = detail::scales(mesh);
    const int nf = ref.n_field(), nm = ref.n_flux_modes();
    const DenseMatrix gram = local_gram(mesh, ref);
    const auto llt = factor_gram(gram);
    for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
        const ElementDofs d = element_dofs(mesh, dm, e);
        for (std::size_t q = 0; q < ref.quad.size(); ++q) {
            const double w = ref.quad.weights[q] * sc.det;
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j)
                    m(d.global[i], d.global[j]) +=
                        w * (ref.field.value(q, i) * ref.field.value(q, j) +
                             ref.field.grad_x(q, i) * ref.field.grad_x(q, j) * sc.jx * sc.jx +
                             ref.field.grad_y(q, i) * ref.field.grad_y(q, j) * sc.jy * sc.jy);
            for (int i = 0; i < nm; ++i)
                for (int j = 0; j < nm; ++j) {
                    const double v = w * ref.flux.value(q, i) * ref.flux.value(q, j);
                    m(d.global[nf + i], d.global[nf + j]) += v;
                    m(d.global[nf + nm + i], d.global[nf + nm + j]) += v;
                }
        }
        const int first = d.n_field + d.n_flux;
        if (d.size() > first) {
            const DenseMatrix c = local_trace_coupling(mesh, e, d, ref);
            const DenseMatrix w = llt.matrixL().solve(c);
            const DenseMatrix mt = w.transpose() * w;
            for (int i = 0; i < mt.rows(); ++i)
                for (int j = 0; j < mt.cols(); ++j) m(d.global[first + i], d.global[first + j]) += mt(i, j);
        }
    }

    std::vector<char> fixed(n, 0);
    for (int c : sys.constrained) fixed[c] = 1;
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (!fixed[i]) keep.push_back(i);
    const int k = static_cast<int>(keep.size());
    DenseMatrix ar(k, k), mr(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            ar(i, j) = a(keep[i], keep[j]);
            mr(i, j) = m(keep[i], keep[j]);
        }
    ar = 0.5 * (ar + ar.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(ar, mr, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("solver", "generalized eigensolve failed");
    const double lmin = es.eigenvalues().minCoeff();
    return lmin > 0.0 ? std::sqrt(lmin) : 0.0;
}

}  // namespace dpgec

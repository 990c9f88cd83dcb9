#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "dpgec/dpg_core.hpp"
#include "dpgec/error.hpp"
#include "dpgec/fespace.hpp"
#include "dpgec/linalg.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/problem.hpp"

namespace dpgec {

/// Facets carrying trace unknowns: interior facets for both problems, plus the
/// Dirichlet facets of the potential problem. Neumann and Robin facets carry none;
/// their data enter the load.
inline std::vector<int> active_facets(const Mesh& mesh, ProblemKind kind) {
    std::vector<int> out;
    for (const auto& f : mesh.facets) {
        if (f.tag == FacetTag::interior) out.push_back(f.index);
        else if (kind == ProblemKind::potential && f.tag == FacetTag::dirichlet)
            out.push_back(f.index);
    }
    return out;
}

inline std::vector<int> active_facets(const Mesh& mesh, const Problem& problem) {
    return active_facets(mesh, kind_of(problem));
}

/// Field dofs lying on Dirichlet facets, ascending.
inline std::vector<int> dirichlet_dofs(const Mesh& mesh, const DofMap& dm) {
    std::set<int> out;
    const int p = dm.p;
    for (const auto& f : mesh.facets) {
        if (f.tag != FacetTag::dirichlet) continue;
        const Element& el = mesh.elements[f.elements[0]];
        for (int k = 0; k <= p; ++k) {
            switch (*f.side) {
                case Side::left: out.insert(dm.field_dof(el.ix, el.iy, 0, k)); break;
                case Side::right: out.insert(dm.field_dof(el.ix, el.iy, p, k)); break;
                case Side::bottom: out.insert(dm.field_dof(el.ix, el.iy, k, 0)); break;
                case Side::top: out.insert(dm.field_dof(el.ix, el.iy, k, p)); break;
            }
        }
    }
    return {out.begin(), out.end()};
}

struct GlobalSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    DofMap dofmap;
    std::vector<int> constrained;  // Dirichlet field dofs, fixed to zero
};

/// Applies homogeneous constraints by symmetric elimination: rows and columns
/// cleared, unit diagonal, zero right-hand side.
inline void apply_constraints(CsrMatrix& a, std::vector<double>& rhs,
                              std::span<const int> constrained) {
    if (constrained.empty()) return;
    std::vector<char> fixed(a.size(), 0);
    for (int d : constrained) fixed[d] = 1;
    auto& vals = a.values();
    const auto& rp = a.row_ptr();
    const auto& cols = a.cols();
    for (int i = 0; i < a.size(); ++i)
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (fixed[i] || fixed[cols[k]]) vals[k] = (i == cols[k]) ? 1.0 : 0.0;
    for (int d : constrained) rhs[d] = 0.0;
}

/// Scatter-adds every condensed element system. Elements are visited in
/// ascending order so repeated assemblies are bit-identical.
inline GlobalSystem assemble(const Mesh& mesh, const DofMap& dofmap, const Problem& problem,
                             const ReferenceData& ref, bool constrain = true) {
    GlobalSystem sys;
    sys.dofmap = dofmap;
    const int ne = static_cast<int>(mesh.num_elements());
    std::vector<ElementDofs> edofs;
    edofs.reserve(ne);
    std::vector<std::vector<int>> groups;
    groups.reserve(ne);
    for (int e = 0; e < ne; ++e) {
        edofs.push_back(element_dofs(mesh, dofmap, e));
        groups.push_back(edofs.back().global);
    }
    sys.matrix = CsrMatrix::from_groups(dofmap.total(), groups);
    groups.clear();
    sys.rhs.assign(dofmap.total(), 0.0);

    const DenseMatrix gram = local_gram(mesh, ref);
    const auto llt = factor_gram(gram);
    for (int e = 0; e < ne; ++e) {
        const ElementDofs& d = edofs[e];
        const LocalSystem ls = local_system(mesh, e, problem, d, ref, gram);
        const CondensedSystem cs = condense_local(ls, llt);
        for (int a = 0; a < d.size(); ++a) {
            sys.rhs[d.global[a]] += cs.rhs(a);
            for (int b = 0; b < d.size(); ++b) sys.matrix.add(d.global[a], d.global[b], cs.S(a, b));
        }
    }
    if (kind_of(problem) == ProblemKind::potential) sys.constrained = dirichlet_dofs(mesh, dofmap);
    if (constrain) apply_constraints(sys.matrix, sys.rhs, sys.constrained);
    return sys;
}

inline GlobalSystem assemble(const Mesh& mesh, const DofMap& dofmap, const Problem& problem,
                             const SpaceLayout& layout) {
    return assemble(mesh, dofmap, problem, make_reference(layout));
}

struct Solution {
    std::vector<double> field;
    std::vector<double> flux;
    std::vector<double> trace;
    std::vector<IndicatorResult> indicators;
    double eta{0.0};
};

/// Splits a global coefficient vector into its field, flux and trace parts.
inline Solution extract_solution(std::span<const double> coeffs, const DofMap& dm,
                                 std::vector<IndicatorResult> indicators) {
    if (static_cast<int>(coeffs.size()) != dm.total())
        throw Error("internal", "coefficient vector size does not match the dof map");
    Solution s;
    s.field.assign(coeffs.begin(), coeffs.begin() + dm.n_field);
    s.flux.assign(coeffs.begin() + dm.flux_offset(), coeffs.begin() + dm.trace_offset());
    s.trace.assign(coeffs.begin() + dm.trace_offset(), coeffs.end());
    s.indicators = std::move(indicators);
    double sum = 0.0;
    for (const auto& ind : s.indicators) sum += ind.total();
    s.eta = std::sqrt(sum);
    return s;
}

/// Per-element indicators for a global coefficient vector.
inline std::vector<IndicatorResult> compute_indicators(const Mesh& mesh, const DofMap& dm,
                                                       const Problem& problem,
                                                       const ReferenceData& ref,
                                                       std::span<const double> coeffs) {
    const DenseMatrix gram = local_gram(mesh, ref);
    const auto llt = factor_gram(gram);
    std::vector<IndicatorResult> out;
    out.reserve(mesh.num_elements());
    for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
        const ElementDofs d = element_dofs(mesh, dm, e);
        const LocalSystem ls = local_system(mesh, e, problem, d, ref, gram);
        DenseVector u(d.size());
        for (int a = 0; a < d.size(); ++a) u(a) = coeffs[d.global[a]];
        out.push_back(error_indicator(ls, llt, u));
    }
    return out;
}

struct DpgRun {
    Mesh mesh;
    SpaceLayout layout;
    DofMap dofmap;
    GlobalSystem system;
    std::vector<double> coeffs;
    Solution solution;
    SolveStats stats;
    ValidationReport validation;
    double load_norm{0.0};  // estimator evaluated at the zero solution
};

/// Validates, assembles and solves one problem; attaches the error indicators.
inline DpgRun solve_dpg(const Mesh& mesh, const Problem& problem, const SpaceLayout& layout,
                        const SolveOptions& opt = {}) {
    DpgRun run;
    run.mesh = mesh;
    run.layout = layout;
    run.validation = validate_problem(problem, mesh);
    const ReferenceData ref = make_reference(layout);
    const auto act = active_facets(mesh, problem);
    run.dofmap = build_dofmap(mesh, layout, act);
    run.system = assemble(mesh, run.dofmap, problem, ref);
    run.coeffs = solve_spd(run.system.matrix, run.system.rhs, opt, run.stats);
    auto ind = compute_indicators(mesh, run.dofmap, problem, ref, run.coeffs);
    run.solution = extract_solution(run.coeffs, run.dofmap, std::move(ind));
    const std::vector<double> zero(run.coeffs.size(), 0.0);
    double sum = 0.0;
    for (const auto& i : compute_indicators(mesh, run.dofmap, problem, ref, zero)) sum += i.total();
    run.load_norm = std::sqrt(sum);
    return run;
}

// ---------------------------------------------------------------------------
// Evaluation of discrete fields

/// Evaluates the discrete field, its gradient and the discrete flux inside one element.
class ElementEvaluator {
public:
    ElementEvaluator(const Mesh& mesh, const DofMap& dm, int p) : mesh_(mesh), dm_(dm), p_(p) {}

    struct Values {
        double field{};
        Vec2 grad{};
        Vec2 flux{};
    };

    Values at(std::span<const double> coeffs, int e, Vec2 ref) const {
        const Element& el = mesh_.elements[e];
        const std::array<Vec2, 1> pt{ref};
        const BasisTable f = tabulate_h1_basis(p_, pt);
        const BasisTable q = tabulate_l2_basis(p_ - 1, pt);
        Values v;
        int a = 0;
        for (int j = 0; j <= p_; ++j)
            for (int i = 0; i <= p_; ++i, ++a) {
                const double c = coeffs[dm_.field_dof(el.ix, el.iy, i, j)];
                v.field += c * f.value(0, a);
                v.grad.x += c * f.grad_x(0, a) * 2.0 / mesh_.hx;
                v.grad.y += c * f.grad_y(0, a) * 2.0 / mesh_.hy;
            }
        const int nm = p_ * p_;
        for (int m = 0; m < nm; ++m) {
            v.flux.x += coeffs[dm_.flux_dof(e, m)] * q.value(0, m);
            v.flux.y += coeffs[dm_.flux_dof(e, nm + m)] * q.value(0, m);
        }
        return v;
    }

private:
    const Mesh& mesh_;
    const DofMap& dm_;
    int p_;
};

}  // namespace dpgec

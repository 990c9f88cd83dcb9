#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dpgec/error.hpp"
#include "dpgec/expr.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/quadrature.hpp"

namespace dpgec {

/// Pointwise data f(x, y).
using ScalarFn = std::function<double(double, double)>;
/// Boundary data g(x, y, n) with n the outward unit normal at the point.
using BoundaryFn = std::function<double(double, double, Vec2)>;

inline ScalarFn constant_fn(double v) {
    return [v](double, double) { return v; };
}
inline BoundaryFn constant_boundary(double v) {
    return [v](double, double, Vec2) { return v; };
}
inline ScalarFn expr_fn(expr::Expr e) {
    return [e = std::move(e)](double x, double y) { return e.eval(x, y); };
}
inline BoundaryFn boundary_fn(ScalarFn f) {
    return [f = std::move(f)](double x, double y, Vec2) { return f(x, y); };
}

/// Backward-Euler step  c - dt div(D grad c) = c_prev,  (-D grad c).n = J.
struct ConcentrationProblem {
    double D{1.0};
    double dt{1.0};
    ScalarFn c_prev = constant_fn(0.0);
    BoundaryFn J = constant_boundary(0.0);
};

/// First-order potential problem with current density i = -kappa grad phi - S:
///   div i = 0,  phi = 0 on Gamma_D,  i.n = I on Gamma_N,  i.n - beta phi = R on Gamma_R.
struct PotentialProblem {
    double kappa{1.0};
    ScalarFn beta = constant_fn(1.0);
    ScalarFn S_x = constant_fn(0.0);
    ScalarFn S_y = constant_fn(0.0);
    BoundaryFn I = constant_boundary(0.0);
    BoundaryFn R = constant_boundary(0.0);
    BoundaryPartition partition{{BoundaryKind::dirichlet, BoundaryKind::neumann,
                                 BoundaryKind::robin, BoundaryKind::robin}};
};

using Problem = std::variant<ConcentrationProblem, PotentialProblem>;

inline ProblemKind kind_of(const Problem& p) {
    return std::holds_alternative<ConcentrationProblem>(p) ? ProblemKind::concentration
                                                           : ProblemKind::potential;
}

inline BoundaryPartition partition_of(const Problem& p) {
    if (const auto* pot = std::get_if<PotentialProblem>(&p)) return pot->partition;
    return BoundaryPartition::all_neumann();
}

// ---------------------------------------------------------------------------
// Butler-Volmer kinetics (linearized in the overpotential)

/// Open-circuit potential as a function of the state of charge.
using OpenCircuitFn = std::function<double(double)>;

struct ButlerVolmerParams {
    double k_bv{1.0};
    double F{96485.33212};
    double R_gas{8.314462618};
    double T{298.15};
    double c_smax{1.0};
    double t_plus{0.5};
    OpenCircuitFn phi_open = [](double) { return 0.0; };

    void validate() const {
        std::vector<std::string> bad;
        if (!(k_bv > 0.0)) bad.emplace_back("k_bv must be positive");
        if (!(F > 0.0)) bad.emplace_back("F must be positive");
        if (!(R_gas > 0.0)) bad.emplace_back("R_gas must be positive");
        if (!(T > 0.0)) bad.emplace_back("T must be positive");
        if (!(c_smax > 0.0)) bad.emplace_back("c_smax must be positive");
        if (!(t_plus >= 0.0 && t_plus <= 1.0)) bad.emplace_back("t_plus must lie in [0, 1]");
        if (!bad.empty()) throw ValidationError(std::move(bad));
    }
};

inline double state_of_charge(double c_s, double c_smax) {
    if (!(c_smax > 0.0)) throw Error("domain", "c_smax must be positive");
    if (c_s < 0.0 || c_s > c_smax) throw Error("domain", "concentration outside [0, c_smax]");
    return c_s / c_smax;
}

/// I_c = k_bv F sqrt(c_e) sqrt(c_smax - c_s) sqrt(c_s).
inline double exchange_current(const ButlerVolmerParams& bv, double c_e, double c_s) {
    if (c_e < 0.0) throw Error("domain", "electrolyte concentration must be non-negative");
    if (c_s < 0.0 || c_s > bv.c_smax) throw Error("domain", "concentration outside [0, c_smax]");
    return bv.k_bv * bv.F * std::sqrt(c_e) * std::sqrt(bv.c_smax - c_s) * std::sqrt(c_s);
}

inline double overpotential(double phi_s, double phi_e, double phi_open_val) {
    return phi_s - phi_e - phi_open_val;
}

inline double butler_volmer_current(const ButlerVolmerParams& bv, double I_c, double eta) {
    if (I_c < 0.0) throw Error("domain", "exchange current must be non-negative");
    return I_c * bv.F / (bv.R_gas * bv.T) * eta;
}

struct RobinData {
    double I_c{};
    double beta{};
    double R_load{};
};

/// Robin coefficient and load obtained by moving everything except the
/// solid-potential term of the linearized reaction current to the right-hand side.
inline RobinData robin_coefficients(const ButlerVolmerParams& bv, double c_e, double c_s,
                                    double phi_e) {
    RobinData out;
    out.I_c = exchange_current(bv, c_e, c_s);
    out.beta = out.I_c * bv.F / (bv.R_gas * bv.T);
    const double open = bv.phi_open(state_of_charge(c_s, bv.c_smax));
    out.R_load = out.beta * (-phi_e - open);
    return out;
}

enum class Medium { electrode, electrolyte };

inline double reaction_species_flux(double I_bv, double F, double t_plus, Medium medium) {
    if (!(F > 0.0)) throw Error("domain", "F must be positive");
    return medium == Medium::electrode ? I_bv / F : -(1.0 - t_plus) * I_bv / F;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
    std::vector<std::string> warnings;
};

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }

inline void validate_data(const ConcentrationProblem& c, const Mesh& mesh,
                          std::vector<std::string>& bad, ValidationReport& rep) {
    if (!(c.D > 0.0)) bad.emplace_back("D must be positive");
    if (!(c.dt > 0.0)) bad.emplace_back("dt must be positive");
    if (c.D >= 1.0) rep.warnings.emplace_back("D >= 1: outside the small-parameter regime");
    if (c.dt >= 1.0) rep.warnings.emplace_back("dt >= 1: outside the small-parameter regime");
    if (!c.c_prev) bad.emplace_back("c_prev is not set");
    if (!c.J) bad.emplace_back("J is not set");
    for (const auto& v : partition_violations(mesh.partition, ProblemKind::concentration))
        bad.push_back(v);
}

inline void validate_data(const PotentialProblem& p, const Mesh& mesh,
                          std::vector<std::string>& bad, ValidationReport&) {
    if (!(p.kappa > 0.0)) bad.emplace_back("kappa must be positive");
    for (const auto& v : partition_violations(p.partition, ProblemKind::potential))
        bad.push_back(v);
    if (!(mesh.partition == p.partition))
        bad.emplace_back("mesh boundary tags do not match the problem partition");
    if (!p.beta || !p.S_x || !p.S_y || !p.I || !p.R) {
        bad.emplace_back("potential data incomplete");
        return;
    }
    double beta_min = INFINITY;
    bool beta_finite = true;
    for (const auto& f : mesh.facets) {
        if (!f.side || p.partition[*f.side] != BoundaryKind::robin) continue;
        const FacetQuad q = facet_quad(5, f);
        for (const auto& x : q.points) {
            const double b = p.beta(x.x, x.y);
            if (!finite(b)) beta_finite = false;
            else beta_min = std::min(beta_min, b);
        }
    }
    if (!beta_finite) bad.emplace_back("beta not bounded on Gamma_R");
    else if (std::isfinite(beta_min) && !(beta_min > 0.0))
        bad.emplace_back("beta not positive on Gamma_R");
}

}  // namespace detail

/// Checks the data assumptions of either problem. Throws ValidationError listing
/// every violation; soft issues are returned as warnings.
inline ValidationReport validate_problem(const Problem& problem, const Mesh& mesh) {
    std::vector<std::string> bad;
    ValidationReport rep;
    std::visit([&](const auto& data) { detail::validate_data(data, mesh, bad, rep); }, problem);
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return rep;
}

}  // namespace dpgec

#pragma once

// Report writers. Numbers are printed in shortest round-trip form so identical
// runs give byte-identical files.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpgec/error.hpp"
#include "dpgec/fespace.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/solver.hpp"
#include "dpgec/verify.hpp"

namespace dpgec::io {

using json = nlohmann::ordered_json;

inline std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("io", "write failed for '" + path.string() + "'");
}

inline json mesh_summary(const Mesh& mesh) {
    json j;
    j["domain"] = {mesh.domain.x0, mesh.domain.x1, mesh.domain.y0, mesh.domain.y1};
    j["nx"] = mesh.nx;
    j["ny"] = mesh.ny;
    j["elements"] = mesh.num_elements();
    j["facets"] = {{"interior", mesh.count(FacetTag::interior)},
                   {"dirichlet", mesh.count(FacetTag::dirichlet)},
                   {"neumann", mesh.count(FacetTag::neumann)},
                   {"robin", mesh.count(FacetTag::robin)}};
    j["h_max"] = mesh.h_max();
    return j;
}

inline json error_json(const ErrorNorms& en) {
    return {{"e_field", en.field},
            {"e_flux", en.flux},
            {"e_trace", en.trace},
            {"e_combined", en.combined()},
            {"norm_field", en.exact_field},
            {"norm_flux", en.exact_flux},
            {"norm_trace", en.exact_trace}};
}

/// Legacy VTK structured grid on the field nodes: the field values are the nodal
/// coefficients; the flux is sampled from the element with the lowest index
/// containing the node.
inline std::string vtk_fields(const Mesh& mesh, const DofMap& dm, std::span<const double> coeffs,
                              const ScalarFn& exact = {}) {
    const int p = dm.p;
    const int nxp = mesh.nx * p + 1, nyp = mesh.ny * p + 1;
    const Lagrange1D nodes(p);
    const ElementEvaluator ev(mesh, dm, p);
    std::vector<Vec2> pts;
    std::vector<double> field;
    std::vector<Vec2> flux;
    for (int J = 0; J < nyp; ++J)
        for (int I = 0; I < nxp; ++I) {
            const int ix = std::min(I / p, mesh.nx - 1), iy = std::min(J / p, mesh.ny - 1);
            const int i = I - ix * p, j = J - iy * p;
            const int e = iy * mesh.nx + ix;
            const Vec2 ref{nodes.nodes()[i], nodes.nodes()[j]};
            pts.push_back(map_to_physical(mesh.elements[e], ref));
            const auto v = ev.at(coeffs, e, ref);
            field.push_back(coeffs[dm.field_dof(ix, iy, i, j)]);
            flux.push_back(v.flux);
        }
    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\n"
       << "dpgec fields\nASCII\nDATASET STRUCTURED_GRID\n"
       << "DIMENSIONS " << nxp << ' ' << nyp << " 1\n"
       << "POINTS " << pts.size() << " double\n";
    for (const Vec2& x : pts) os << fmt(x.x) << ' ' << fmt(x.y) << " 0\n";
    os << "POINT_DATA " << pts.size() << "\n"
       << "SCALARS field double 1\nLOOKUP_TABLE default\n";
    for (double v : field) os << fmt(v) << '\n';
    if (exact) {
        os << "SCALARS exact_field double 1\nLOOKUP_TABLE default\n";
        for (const Vec2& x : pts) os << fmt(exact(x.x, x.y)) << '\n';
    }
    os << "VECTORS flux double\n";
    for (const Vec2& q : flux) os << fmt(q.x) << ' ' << fmt(q.y) << " 0\n";
    return os.str();
}

inline std::string indicators_csv(const Mesh& mesh, const std::vector<IndicatorResult>& ind) {
    std::ostringstream os;
    os << "element,ix,iy,eta_sq_riesz,eta_sq_fosls,eta_sq\n";
    for (std::size_t e = 0; e < ind.size(); ++e) {
        const Element& el = mesh.elements[e];
        os << e << ',' << el.ix << ',' << el.iy << ',' << fmt(ind[e].eta_sq_riesz) << ','
           << fmt(ind[e].eta_sq_fosls) << ',' << fmt(ind[e].total()) << '\n';
    }
    return os.str();
}

/// One row per level; the EOC columns compare a row with the previous one and
/// are empty on the first row.
inline std::string eoc_csv(const EocReport& rep) {
    std::ostringstream os;
    os << "level,n,h,dofs,e_field,e_flux,e_trace,e_combined,eta,galerkin_e_field,"
          "eoc_field,eoc_flux,eoc_trace,eoc_combined,eoc_eta\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const EocRow& r = rep.rows[i];
        os << i << ',' << r.n << ',' << fmt(r.h) << ',' << r.dofs << ',' << fmt(r.e_field) << ','
           << fmt(r.e_flux) << ',' << fmt(r.e_trace) << ',' << fmt(r.e_combined) << ','
           << fmt(r.eta) << ',' << fmt(r.galerkin_e_field);
        if (i == 0) {
            os << ",,,,,\n";
            continue;
        }
        const EocRow& c = rep.rows[i - 1];
        os << ',' << fmt(EocReport::rate(c.e_field, r.e_field)) << ','
           << fmt(EocReport::rate(c.e_flux, r.e_flux)) << ','
           << fmt(EocReport::rate(c.e_trace, r.e_trace)) << ','
           << fmt(EocReport::rate(c.e_combined, r.e_combined)) << ','
           << fmt(EocReport::rate(c.eta, r.eta)) << '\n';
    }
    return os.str();
}

inline json eoc_json(const EocReport& rep) {
    json j;
    j["case"] = rep.case_name;
    j["p"] = rep.p;
    j["delta_p"] = rep.delta_p;
    json rows = json::array();
    for (const EocRow& r : rep.rows)
        rows.push_back({{"n", r.n},
                        {"h", r.h},
                        {"dofs", r.dofs},
                        {"e_field", r.e_field},
                        {"e_flux", r.e_flux},
                        {"e_trace", r.e_trace},
                        {"e_combined", r.e_combined},
                        {"eta", r.eta},
                        {"galerkin_e_field", r.galerkin_e_field},
                        {"iterations", r.iterations}});
    j["rows"] = rows;
    json eocs = json::array();
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const EocRow &a = rep.rows[i], &b = rep.rows[i + 1];
        eocs.push_back({{"field", EocReport::rate(a.e_field, b.e_field)},
                        {"flux", EocReport::rate(a.e_flux, b.e_flux)},
                        {"trace", EocReport::rate(a.e_trace, b.e_trace)},
                        {"combined", EocReport::rate(a.e_combined, b.e_combined)},
                        {"eta", EocReport::rate(a.eta, b.eta)}});
    }
    j["eoc"] = eocs;
    return j;
}

struct InfSupRow {
    int n{};
    double h{};
    int dofs{};
    double alpha{};
};

inline std::string infsup_csv(const std::vector<InfSupRow>& rows) {
    std::ostringstream os;
    os << "level,n,h,dofs,alpha,ratio\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << i << ',' << rows[i].n << ',' << fmt(rows[i].h) << ',' << rows[i].dofs << ','
           << fmt(rows[i].alpha) << ',';
        if (i > 0) os << fmt(rows[i].alpha / rows[i - 1].alpha);
        os << '\n';
    }
    return os.str();
}

}  // namespace dpgec::io

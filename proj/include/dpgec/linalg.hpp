#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dpgec/error.hpp"

namespace dpgec {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

/// Square sparse matrix in compressed row storage with a fixed pattern.
class CsrMatrix {
public:
    CsrMatrix() = default;

    /// Builds the pattern from dense couplings: every pair of indices within one
    /// group becomes a stored entry.
    static CsrMatrix from_groups(int n, const std::vector<std::vector<int>>& groups) {
        std::vector<std::vector<int>> rows(n);
        for (const auto& g : groups)
            for (int i : g)
                for (int j : g) rows[i].push_back(j);
        CsrMatrix m;
        m.n_ = n;
        m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (int i = 0; i < n; ++i) {
            auto& r = rows[i];
            if (std::find(r.begin(), r.end(), i) == r.end()) r.push_back(i);
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            m.row_ptr_[i + 1] = m.row_ptr_[i] + static_cast<int>(r.size());
        }
        m.cols_.reserve(m.row_ptr_.back());
        for (auto& r : rows) {
            m.cols_.insert(m.cols_.end(), r.begin(), r.end());
            std::vector<int>().swap(r);
        }
        m.vals_.assign(m.cols_.size(), 0.0);
        return m;
    }

    int size() const { return n_; }
    std::size_t nnz() const { return vals_.size(); }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& values() { return vals_; }

    /// Position of (i, j) in the value array, or -1 if not in the pattern.
    std::ptrdiff_t find(int i, int j) const {
        auto first = cols_.begin() + row_ptr_[i];
        auto last = cols_.begin() + row_ptr_[i + 1];
        auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return -1;
        return it - cols_.begin();
    }

    void add(int i, int j, double v) {
        const auto k = find(i, j);
        if (k < 0) throw Error("internal", "entry outside sparsity pattern");
        vals_[static_cast<std::size_t>(k)] += v;
    }

    double at(int i, int j) const {
        const auto k = find(i, j);
        return k < 0 ? 0.0 : vals_[static_cast<std::size_t>(k)];
    }

    void multiply(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
            y[i] = s;
        }
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(n_);
        for (int i = 0; i < n_; ++i) d[i] = at(i, i);
        return d;
    }

    DenseMatrix to_dense() const {
        DenseMatrix a = DenseMatrix::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) a(i, cols_[k]) = vals_[k];
        return a;
    }

    /// max |a_ij - a_ji| / max |a_ij|.
    double asymmetry() const {
        double amax = 0.0, dmax = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                amax = std::max(amax, std::abs(vals_[k]));
                dmax = std::max(dmax, std::abs(vals_[k] - at(cols_[k], i)));
            }
        return amax > 0.0 ? dmax / amax : 0.0;
    }

    bool operator==(const CsrMatrix&) const = default;

private:
    int n_{0};
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> vals_;
};

struct SolveOptions {
    double tol{1e-10};
    int dense_limit{2000};  // systems up to this size use a dense Cholesky factorization
};

struct SolveStats {
    int iterations{0};
    bool dense{false};
    double relative_residual{0.0};
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
inline std::vector<double> pcg(const CsrMatrix& a, std::span<const double> b, double tol,
                               SolveStats& stats) {
    const int n = a.size();
    std::vector<double> x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), q(n);
    const std::vector<double> diag = a.diagonal();
    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        if (!(diag[i] > 0.0)) throw Error("solver", "not SPD: non-positive diagonal entry");
        inv_diag[i] = 1.0 / diag[i];
    }
    const double bnorm = std::sqrt(dot(b, b));
    stats = {};
    if (bnorm == 0.0) return x;

    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    const long max_iter = 10L * n;
    for (long it = 1; it <= max_iter; ++it) {
        a.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) throw Error("solver", "not SPD: negative curvature direction in CG");
        const double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        const double rnorm = std::sqrt(dot(r, r));
        stats.iterations = static_cast<int>(it);
        stats.relative_residual = rnorm / bnorm;
        if (rnorm <= tol * bnorm) return x;
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw Error("solver", "no convergence: CG exceeded 10 n iterations");
}

/// Solves an SPD system: dense Cholesky for small systems, PCG otherwise.
inline std::vector<double> solve_spd(const CsrMatrix& a, std::span<const double> b,
                                     const SolveOptions& opt, SolveStats& stats) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n) throw Error("internal", "rhs size mismatch");
    if (n <= opt.dense_limit) {
        const DenseMatrix dense = a.to_dense();
        Eigen::LLT<DenseMatrix> llt(dense);
        if (llt.info() != Eigen::Success) throw Error("solver", "not SPD: Cholesky failed");
        const DenseVector rhs = Eigen::Map<const DenseVector>(b.data(), n);
        const DenseVector sol = llt.solve(rhs);
        stats = {};
        stats.dense = true;
        const double bnorm = rhs.norm();
        stats.relative_residual = bnorm > 0.0 ? (dense * sol - rhs).norm() / bnorm : 0.0;
        return {sol.data(), sol.data() + n};
    }
    return pcg(a, b, opt.tol, stats);
}

}  // namespace dpgec

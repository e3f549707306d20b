// simplex.hpp
// Dense two-phase primal simplex for small equality-form programs
//
//     min c.x   s.t.  A x = b,  x >= 0.
//
// Bland's rule throughout, so the iteration never cycles. Problem sizes in
// this project stay below ~20 rows x ~40 columns; everything is kept in one
// flat tableau.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nogo {

struct LpResult {
    enum class Status { Optimal, Infeasible };
    Status status = Status::Infeasible;
    double phase1_objective = 0.0;  // residual infeasibility after phase 1
    double objective = 0.0;         // c.x at the returned point
    std::vector<double> x;
};

class SimplexTableau {
public:
    // A is row-major m x n, b has length m, tol is the pivot/optimality threshold.
    SimplexTableau(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                   double tol)
        : m_(a.size()), n_(a.empty() ? 0 : a.front().size()), tol_(tol) {
        if (b.size() != m_) throw std::invalid_argument("simplex: |b| != rows(A)");
        rows_.resize(m_, std::vector<double>(n_ + m_ + 1, 0.0));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            if (a[i].size() != n_) throw std::invalid_argument("simplex: ragged A");
            const double sign = b[i] < 0.0 ? -1.0 : 1.0;  // keep rhs nonnegative
            for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = sign * a[i][j];
            rows_[i][n_ + i] = 1.0;  // artificial
            rows_[i].back() = sign * b[i];
            basis_[i] = n_ + i;
        }
    }

    // Phase 1: minimize the artificial sum. Returns the residual objective.
    double phase1() {
        std::vector<double> cost(n_ + m_, 0.0);
        for (std::size_t j = n_; j < n_ + m_; ++j) cost[j] = 1.0;
        iterate(cost, n_ + m_);
        double infeas = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= n_) infeas += rows_[i].back();
        }
        drive_out_artificials();
        return infeas;
    }

    // Phase 2 over the structural columns only; call after a clean phase 1.
    double phase2(const std::vector<double>& c) {
        if (c.size() != n_) throw std::invalid_argument("simplex: |c| != cols(A)");
        std::vector<double> cost(c);
        cost.resize(n_ + m_, 0.0);
        iterate(cost, n_);
        double value = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) value += c[basis_[i]] * rows_[i].back();
        }
        return value;
    }

    std::vector<double> solution() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) x[basis_[i]] = rows_[i].back();
        }
        return x;
    }

private:
    void iterate(const std::vector<double>& cost, std::size_t active_cols) {
        for (;;) {
            // Reduced costs under the current basis; Bland: first negative enters.
            std::size_t enter = active_cols;
            for (std::size_t j = 0; j < active_cols && enter == active_cols; ++j) {
                if (is_basic(j)) continue;
                double r = cost[j];
                for (std::size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * rows_[i][j];
                if (r < -tol_) enter = j;
            }
            if (enter == active_cols) return;  // optimal

            // Ratio test; Bland tie-break on the leaving basis index.
            std::size_t leave = m_;
            double best = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (rows_[i][enter] <= tol_) continue;
                const double ratio = rows_[i].back() / rows_[i][enter];
                if (leave == m_ || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) {
                throw std::runtime_error("simplex: unbounded direction in bounded program");
            }
            pivot(leave, enter);
        }
    }

    // Degenerate pivots (near-zero rhs) swap basic artificials for structural
    // columns without moving the point; the largest-magnitude pivot keeps the
    // swapped-in value at rhs/|pivot| ~ 0. Rows with no structural support
    // are redundant and dropped.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_;) {
            if (basis_[i] < n_) {
                ++i;
                continue;
            }
            std::size_t j = n_;
            for (std::size_t k = 0; k < n_; ++k) {
                if (j == n_ || std::abs(rows_[i][k]) > std::abs(rows_[i][j])) j = k;
            }
            if (j < n_ && std::abs(rows_[i][j]) > tol_) {
                pivot(i, j);
                ++i;
            } else {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                --m_;
            }
        }
    }

    bool is_basic(std::size_t j) const {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] == j) return true;
        }
        return false;
    }

    void pivot(std::size_t pr, std::size_t pc) {
        const double piv = rows_[pr][pc];
        for (double& v : rows_[pr]) v /= piv;
        rows_[pr][pc] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == pr) continue;
            const double f = rows_[i][pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < rows_[i].size(); ++j) rows_[i][j] -= f * rows_[pr][j];
            rows_[i][pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    std::size_t m_;
    std::size_t n_;
    double tol_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> basis_;
};

// One-call interface: feasibility when c is empty or zero, otherwise both phases.
inline LpResult solve_equality_lp(const std::vector<std::vector<double>>& a,
                                  const std::vector<double>& b, const std::vector<double>& c,
                                  double tol = 1e-9) {
    SimplexTableau tab(a, b, tol);
    LpResult res;
    res.phase1_objective = tab.phase1();
    if (res.phase1_objective > tol) {
        res.status = LpResult::Status::Infeasible;
        return res;
    }
    res.status = LpResult::Status::Optimal;
    if (!c.empty()) res.objective = tab.phase2(c);
    res.x = tab.solution();
    return res;
}

}  // namespace nogo

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace seiar::qp {

/// One inequality a'x <= b.
struct QpRow {
    Eigen::VectorXd a;
    double b = 0.0;
};

/// minimize 1/2 x'Hx + B'x subject to every row.
struct QpProblem {
    int n = 0;
    Eigen::MatrixXd H;
    Eigen::VectorXd B;
    std::vector<QpRow> rows;

    double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(H * x) + B.dot(x); }
};

enum class QpStatus { Optimal, Infeasible };

struct QpSolution {
    QpStatus status = QpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::vector<int> active_set;   ///< sorted row indices
    Eigen::VectorXd multipliers;   ///< one per row, zero off the active set
    int iterations = 0;            ///< active-set changes
    bool regularized = false;      ///< H was shifted to recover a Cholesky factor
};

/// Primal active-set method. Starts from the unconstrained minimizer when it is
/// feasible, otherwise from the centroid of the feasible vertices. Throws IllConditioned.
QpSolution solve(const QpProblem& p);

/// Exhaustive reference: solves the equality-constrained problem for every
/// subset of rows and keeps the best primal/dual feasible candidate.
/// Limited to n <= 4 and at most 10 rows.
QpSolution kkt_enumerate_oracle(const QpProblem& p);

/// Residuals of the KKT conditions at a solution.
struct KktReport {
    double stationarity = 0.0;   ///< |Hx + B + sum lambda_i a_i|_inf
    double primal = 0.0;         ///< max(a'x - b), clipped at 0
    double dual = 0.0;           ///< max(-lambda), clipped at 0
    double complementarity = 0.0;
};

KktReport check_kkt(const QpProblem& p, const QpSolution& s);

/// Absolute tolerance on a row of right-hand side b.
inline double feasibility_tol(double b) { return 1e-8 * (1.0 + std::abs(b)); }

} // namespace seiar::qp

#pragma once

#include <Eigen/Dense>

namespace vlmrrt {

/// Strictly convex quadratic program
///     minimize    0.5 x' H x + f' x
///     subject to  A x >= b
/// with H symmetric positive definite.
struct QpProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd f;
    Eigen::MatrixXd A;  // one constraint per row; empty A means unconstrained
    Eigen::VectorXd b;
};

struct QpSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;  // per-row multipliers, zero for inactive constraints
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
};

/// Dual active-set solver (Goldfarb-Idnani). Starts from the unconstrained
/// minimizer and adds violated constraints one at a time, so no feasible
/// initial point is needed. Terminates finitely on non-degenerate problems;
/// when the iteration cap is hit the best iterate is returned with
/// converged = false.
QpSolution solve_qp(const QpProblem& qp, int max_iterations = 0);

/// Max-norm KKT residual of a candidate primal/dual pair: stationarity,
/// primal and dual feasibility, and complementary slackness.
double kkt_residual(const QpProblem& qp, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& lambda);

}  // namespace vlmrrt

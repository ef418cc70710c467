#include "vlmrrt/qp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vlmrrt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rotates columns (j-1, j) of J by the Givens rotation that maps
// (d[j-1], d[j]) to (hypot, 0).
void rotate_columns(Eigen::MatrixXd& J, Eigen::VectorXd& d, int j) {
    const double cc = d[j - 1];
    const double ss = d[j];
    const double h = std::hypot(cc, ss);
    if (h == 0.0) return;
    const double c = cc / h;
    const double s = ss / h;
    d[j - 1] = h;
    d[j] = 0.0;
    const Eigen::VectorXd col1 = J.col(j - 1);
    J.col(j - 1) = c * col1 + s * J.col(j);
    J.col(j) = -s * col1 + c * J.col(j).eval();
}

}  // namespace

double kkt_residual(const QpProblem& qp, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& lambda) {
    Eigen::VectorXd grad = qp.H * x + qp.f;
    if (qp.A.rows() > 0) grad -= qp.A.transpose() * lambda;
    double res = grad.cwiseAbs().maxCoeff();
    if (qp.A.rows() > 0) {
        const Eigen::VectorXd slack = qp.A * x - qp.b;
        res = std::max(res, std::max(0.0, (-slack).maxCoeff()));
        res = std::max(res, std::max(0.0, (-lambda).maxCoeff()));
        res = std::max(res, (lambda.array() * slack.array()).abs().maxCoeff());
    }
    return res;
}

QpSolution solve_qp(const QpProblem& qp, int max_iterations) {
    const int n = static_cast<int>(qp.H.rows());
    const int m = static_cast<int>(qp.A.rows());
    if (qp.H.cols() != n || qp.f.size() != n)
        throw std::invalid_argument("qp: H/f dimension mismatch");
    if (qp.A.rows() != qp.b.size() || (m > 0 && qp.A.cols() != n))
        throw std::invalid_argument("qp: A/b dimension mismatch");
    if (max_iterations <= 0) max_iterations = 20 * (n + m) + 200;

    Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("qp: H must be positive definite");

    QpSolution sol;
    sol.x = -llt.solve(qp.f);
    sol.lambda = Eigen::VectorXd::Zero(m);

    // J = L^{-T}; its columns split into the range (first q) and null space
    // complement of the active constraint normals.
    Eigen::MatrixXd J =
        llt.matrixL().transpose().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);

    std::vector<int> active;
    std::vector<char> is_active(static_cast<std::size_t>(m), 0);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);  // multipliers of active rows
    Eigen::VectorXd d(n), z(n), r(n);

    auto drop_constraint = [&](int l) {
        const int q = static_cast<int>(active.size());
        is_active[static_cast<std::size_t>(active[static_cast<std::size_t>(l)])] = 0;
        active.erase(active.begin() + l);
        for (int k = l; k + 1 < q; ++k) {
            u[k] = u[k + 1];
            R.col(k) = R.col(k + 1);
        }
        u[q - 1] = 0.0;
        R.col(q - 1).setZero();
        // Shifting columns leaves one subdiagonal entry per column l..q-2;
        // restore the triangle and keep J consistent.
        for (int j = l; j + 1 < q; ++j) {
            const double cc = R(j, j);
            const double ss = R(j + 1, j);
            const double h = std::hypot(cc, ss);
            if (h == 0.0) continue;
            const double c = cc / h;
            const double s = ss / h;
            for (int col = j; col + 1 < q; ++col) {
                const double top = R(j, col);
                R(j, col) = c * top + s * R(j + 1, col);
                R(j + 1, col) = -s * top + c * R(j + 1, col);
            }
            R(j, j) = h;
            R(j + 1, j) = 0.0;
            const Eigen::VectorXd colj = J.col(j);
            J.col(j) = c * colj + s * J.col(j + 1);
            J.col(j + 1) = -s * colj + c * J.col(j + 1).eval();
        }
    };

    int iter = 0;
    bool done = false;
    while (!done) {
        if (++iter > max_iterations) break;

        // Most violated inactive constraint.
        int ip = -1;
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            if (is_active[static_cast<std::size_t>(i)]) continue;
            const double s_i = qp.A.row(i).dot(sol.x) - qp.b[i];
            const double tol = 1e-11 * (1.0 + std::abs(qp.b[i]));
            if (s_i < -tol && s_i < worst) {
                worst = s_i;
                ip = i;
            }
        }
        if (ip < 0) {
            done = true;
            sol.converged = true;
            break;
        }

        const Eigen::VectorXd np = qp.A.row(ip).transpose();
        double u_candidate = 0.0;
        double slack = qp.A.row(ip).dot(sol.x) - qp.b[ip];

        while (true) {
            if (++iter > max_iterations) { done = true; break; }
            const int q = static_cast<int>(active.size());

            d = J.transpose() * np;
            z = J.rightCols(n - q) * d.tail(n - q);
            if (q > 0) {
                r.head(q) = R.topLeftCorner(q, q)
                                .triangularView<Eigen::Upper>()
                                .solve(d.head(q));
            }

            double t1 = kInf;
            int l = -1;
            for (int k = 0; k < q; ++k) {
                if (r[k] > 0.0 && u[k] / r[k] < t1) {
                    t1 = u[k] / r[k];
                    l = k;
                }
            }
            const double ztnp = z.dot(np);
            const double t2 = ztnp > 1e-13 * std::max(1.0, np.squaredNorm())
                                  ? -slack / ztnp
                                  : kInf;
            const double t = std::min(t1, t2);

            if (t == kInf) {
                // Dual unbounded: the QP is infeasible. Report best effort.
                done = true;
                break;
            }

            if (t2 == kInf) {
                // Dual-only step; drop the blocking constraint and retry.
                for (int k = 0; k < q; ++k) u[k] -= t * r[k];
                u_candidate += t;
                drop_constraint(l);
                continue;
            }

            sol.x += t * z;
            slack = qp.A.row(ip).dot(sol.x) - qp.b[ip];
            for (int k = 0; k < q; ++k) u[k] -= t * r[k];
            u_candidate += t;

            if (t == t2) {
                // Full step: activate ip.
                for (int j = n - 1; j > q; --j) rotate_columns(J, d, j);
                R.col(q).head(q + 1) = d.head(q + 1);
                u[q] = u_candidate;
                active.push_back(ip);
                is_active[static_cast<std::size_t>(ip)] = 1;
                break;
            }
            drop_constraint(l);
        }
    }

    sol.lambda.setZero();
    for (std::size_t k = 0; k < active.size(); ++k) {
        sol.lambda[active[k]] = u[static_cast<Eigen::Index>(k)];
    }
    sol.objective = 0.5 * sol.x.dot(qp.H * sol.x) + qp.f.dot(sol.x);
    sol.iterations = iter;
    sol.kkt_residual = kkt_residual(qp, sol.x, sol.lambda);
    return sol;
}

}  // namespace vlmrrt

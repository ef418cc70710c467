#include "vlmrrt/tracker.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vlmrrt {

using nlohmann::json;

Eigen::Matrix4d LtiModel::A() const {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    a.topLeftCorner<2, 2>() = Eigen::Matrix2d::Identity();
    a.topRightCorner<2, 2>() = dt * Eigen::Matrix2d::Identity();
    a.bottomRightCorner<2, 2>() = (1.0 - drag) * Eigen::Matrix2d::Identity();
    return a;
}

Eigen::Matrix<double, 4, 2> LtiModel::B() const {
    Eigen::Matrix<double, 4, 2> b = Eigen::Matrix<double, 4, 2>::Zero();
    b.bottomRows<2>() = (dt / mass) * Eigen::Matrix2d::Identity();
    return b;
}

Eigen::Matrix<double, 2, 4> LtiModel::C() const {
    Eigen::Matrix<double, 2, 4> c = Eigen::Matrix<double, 2, 4>::Zero();
    c.leftCols<2>() = Eigen::Matrix2d::Identity();
    return c;
}

Eigen::Matrix2d LtiModel::D() const { return Eigen::Matrix2d::Zero(); }

Eigen::Vector4d LtiModel::step(const Eigen::Vector4d& x, const Eigen::Vector2d& u) const {
    return A() * x + B() * u;
}

CondensedQp build_qp(const MpcProblem& problem) {
    const int T = problem.horizon();
    if (T < 1) throw std::invalid_argument("mpc horizon must be >= 1");
    const int nu = 2 * T;

    const Eigen::Matrix4d A = problem.model.A();
    const Eigen::Matrix<double, 4, 2> B = problem.model.B();
    const Eigen::Matrix<double, 2, 4> C = problem.model.C();

    // Powers of A up to T.
    std::vector<Eigen::Matrix4d> Apow(static_cast<std::size_t>(T) + 1);
    Apow[0] = Eigen::Matrix4d::Identity();
    for (int t = 1; t <= T; ++t) Apow[static_cast<std::size_t>(t)] = A * Apow[static_cast<std::size_t>(t - 1)];

    // State prediction x(t) = Apow[t] x0 + sum_{j<t} Apow[t-1-j] B u(j);
    // S holds the input-to-state map stacked over t = 0..T.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4 * (T + 1), nu);
    for (int t = 1; t <= T; ++t) {
        for (int j = 0; j < t; ++j) {
            S.block<4, 2>(4 * t, 2 * j) = Apow[static_cast<std::size_t>(t - 1 - j)] * B;
        }
    }
    Eigen::VectorXd x_free(4 * (T + 1));
    for (int t = 0; t <= T; ++t)
        x_free.segment<4>(4 * t) = Apow[static_cast<std::size_t>(t)] * problem.x_init;

    // Output stack y(0..T-1): Y = Phi x0 + Gamma U.
    Eigen::MatrixXd Gamma = Eigen::MatrixXd::Zero(2 * T, nu);
    Eigen::VectorXd y_free(2 * T);
    for (int t = 0; t < T; ++t) {
        Gamma.middleRows<2>(2 * t) = C * S.middleRows<4>(4 * t);
        y_free.segment<2>(2 * t) = C * x_free.segment<4>(4 * t);
    }

    Eigen::VectorXd p_ref(2 * T);
    for (int t = 0; t < T; ++t)
        p_ref.segment<2>(2 * t) = problem.reference.samples[static_cast<std::size_t>(t)];

    Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(2 * T, 2 * T);
    Eigen::MatrixXd Rbar = Eigen::MatrixXd::Zero(nu, nu);
    for (int t = 0; t < T; ++t) {
        Qbar.block<2, 2>(2 * t, 2 * t) = problem.Q;
        Rbar.block<2, 2>(2 * t, 2 * t) = problem.R;
    }

    CondensedQp out;
    out.horizon = T;
    out.qp.H = 2.0 * (Gamma.transpose() * Qbar * Gamma + Rbar);
    out.qp.H = 0.5 * (out.qp.H + out.qp.H.transpose());  // exact symmetry
    out.qp.f = 2.0 * Gamma.transpose() * Qbar * (y_free - p_ref);

    // Inequalities as rows of A x >= b: control boxes for every component,
    // velocity and position boxes for t = 1..T-1 (t = 0 is fixed by x_init).
    const int n_state_steps = std::max(0, T - 1);
    const int rows = 2 * nu + 8 * n_state_steps;
    Eigen::MatrixXd Ain = Eigen::MatrixXd::Zero(rows, nu);
    Eigen::VectorXd bin(rows);
    int row = 0;
    for (int i = 0; i < nu; ++i) {
        Ain(row, i) = 1.0;
        bin[row++] = problem.model.u_min;
        Ain(row, i) = -1.0;
        bin[row++] = -problem.model.u_max;
    }
    for (int t = 1; t < T; ++t) {
        for (int c = 0; c < 2; ++c) {
            const Eigen::RowVectorXd vel_row = S.row(4 * t + 2 + c);
            const double vel_free = x_free[4 * t + 2 + c];
            Ain.row(row) = vel_row;
            bin[row++] = -problem.model.v_max - vel_free;
            Ain.row(row) = -vel_row;
            bin[row++] = vel_free - problem.model.v_max;

            const Eigen::RowVectorXd pos_row = S.row(4 * t + c);
            const double pos_free = x_free[4 * t + c];
            const double lo = c == 0 ? problem.position_bounds.min.x()
                                     : problem.position_bounds.min.y();
            const double hi = c == 0 ? problem.position_bounds.max.x()
                                     : problem.position_bounds.max.y();
            Ain.row(row) = pos_row;
            bin[row++] = lo - pos_free;
            Ain.row(row) = -pos_row;
            bin[row++] = pos_free - hi;
        }
    }
    out.qp.A = std::move(Ain);
    out.qp.b = std::move(bin);
    return out;
}

std::string qp_to_text(const QpProblem& qp) {
    std::ostringstream out;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "H " << qp.H.rows() << " " << qp.H.cols() << "\n";
    for (Eigen::Index i = 0; i < qp.H.rows(); ++i) {
        for (Eigen::Index j = 0; j < qp.H.cols(); ++j) {
            if (j) out << " ";
            out << num(qp.H(i, j));
        }
        out << "\n";
    }
    out << "f " << qp.f.size() << "\n";
    for (Eigen::Index i = 0; i < qp.f.size(); ++i) {
        if (i) out << " ";
        out << num(qp.f[i]);
    }
    out << "\n";
    return out.str();
}

MpcSolution solve_mpc(const MpcProblem& problem) {
    const CondensedQp condensed = build_qp(problem);
    const QpSolution qp_sol = solve_qp(condensed.qp);
    const int T = condensed.horizon;

    MpcSolution sol;
    sol.converged = qp_sol.converged;
    sol.kkt_residual = qp_sol.kkt_residual;
    sol.qp_iterations = qp_sol.iterations;

    sol.controls.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) sol.controls[static_cast<std::size_t>(t)] = qp_sol.x.segment<2>(2 * t);

    // The dynamics are equality constraints eliminated by condensation, so
    // the state sequence is reproduced exactly by simulation.
    sol.states.resize(static_cast<std::size_t>(T) + 1);
    sol.states[0] = problem.x_init;
    for (int t = 0; t < T; ++t)
        sol.states[static_cast<std::size_t>(t) + 1] =
            problem.model.step(sol.states[static_cast<std::size_t>(t)], sol.controls[static_cast<std::size_t>(t)]);

    const Eigen::Matrix<double, 2, 4> C = problem.model.C();
    sol.outputs.resize(static_cast<std::size_t>(T));
    double objective = 0.0;
    for (int t = 0; t < T; ++t) {
        sol.outputs[static_cast<std::size_t>(t)] = C * sol.states[static_cast<std::size_t>(t)];
        const Eigen::Vector2d err =
            sol.outputs[static_cast<std::size_t>(t)] - problem.reference.samples[static_cast<std::size_t>(t)];
        objective += err.dot(problem.Q * err);
        objective += sol.controls[static_cast<std::size_t>(t)].dot(problem.R * sol.controls[static_cast<std::size_t>(t)]);
    }
    sol.objective_value = objective;
    return sol;
}

std::string to_string(TrackStatus status) {
    switch (status) {
        case TrackStatus::Ok: return "ok";
        case TrackStatus::CollisionInTrack: return "collision_in_track";
        case TrackStatus::SolverLimit: return "solver_limit";
    }
    return "?";
}

TrackResult track(const PlanResult& plan, const Env& env, const LtiModel& model,
                  const Eigen::Matrix2d& Q, const Eigen::Matrix2d& R) {
    if (plan.status != PlanStatus::Success)
        throw std::invalid_argument("track requires a successful plan");

    MpcProblem problem;
    problem.model = model;
    problem.reference = fit_reference(plan.path);
    problem.x_init << plan.path.front().x(), plan.path.front().y(), 0.0, 0.0;
    problem.position_bounds = env.bounds;
    problem.Q = Q;
    problem.R = R;

    TrackResult result;
    result.solution = solve_mpc(problem);
    result.reference = problem.reference;

    const int T = problem.horizon();
    result.tracking_error.resize(static_cast<std::size_t>(T));
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
        const double e = (result.solution.outputs[static_cast<std::size_t>(t)] -
                          problem.reference.samples[static_cast<std::size_t>(t)])
                             .norm();
        result.tracking_error[static_cast<std::size_t>(t)] = e;
        sum += e;
        result.max_tracking_error = std::max(result.max_tracking_error, e);
    }
    result.mean_tracking_error = sum / T;
    result.endpoint = result.solution.outputs.back();

    if (!result.solution.converged) {
        result.status = TrackStatus::SolverLimit;
    } else {
        for (int t = 0; t + 1 < T; ++t) {
            if (!segment_free(result.solution.outputs[static_cast<std::size_t>(t)],
                              result.solution.outputs[static_cast<std::size_t>(t) + 1],
                              env.obstacles)) {
                result.status = TrackStatus::CollisionInTrack;
                break;
            }
        }
    }
    return result;
}

std::string TrackResult::to_json() const {
    json j;
    j["status"] = vlmrrt::to_string(status);
    j["objective_value"] = solution.objective_value;
    j["kkt_residual"] = solution.kkt_residual;
    j["mean_tracking_error"] = mean_tracking_error;
    j["max_tracking_error"] = max_tracking_error;
    j["endpoint"] = {endpoint.x(), endpoint.y()};
    j["controls"] = json::array();
    for (const auto& u : solution.controls) j["controls"].push_back({u.x(), u.y()});
    j["states"] = json::array();
    for (const auto& x : solution.states)
        j["states"].push_back({x[0], x[1], x[2], x[3]});
    j["outputs"] = json::array();
    for (const auto& y : solution.outputs) j["outputs"].push_back({y.x(), y.y()});
    j["tracking_error"] = tracking_error;
    j["reference_samples"] = json::array();
    for (const auto& p : reference.samples) j["reference_samples"].push_back({p.x(), p.y()});
    return j.dump(2) + "\n";
}

}  // namespace vlmrrt

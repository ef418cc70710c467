#pragma once

#include "vlmrrt/env.hpp"
#include "vlmrrt/planner.hpp"
#include "vlmrrt/qp.hpp"
#include "vlmrrt/spline.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace vlmrrt {

/// Discrete double-integrator with linear drag:
///   x(t+1) = A x(t) + B u(t),  y(t) = C x(t),
/// state = [position; velocity] in the plane, input = applied force.
struct LtiModel {
    double dt = 1.0;     // seconds
    double drag = 0.2;   // unitless air-resistance coefficient
    double mass = 1.05;  // kg
    double u_min = -10.0, u_max = 10.0;  // per-axis input bounds, newtons
    double v_max = 15.0;                 // per-axis velocity cap, m/s

    Eigen::Matrix4d A() const;
    Eigen::Matrix<double, 4, 2> B() const;
    Eigen::Matrix<double, 2, 4> C() const;
    Eigen::Matrix2d D() const;  // zero

    Eigen::Vector4d step(const Eigen::Vector4d& x, const Eigen::Vector2d& u) const;
};

struct MpcProblem {
    LtiModel model;
    Eigen::Vector4d x_init = Eigen::Vector4d::Zero();
    ReferencePath reference;
    Eigen::Matrix2d Q = 0.9 * Eigen::Matrix2d::Identity();
    Eigen::Matrix2d R = 0.1 * Eigen::Matrix2d::Identity();
    Rect position_bounds;

    int horizon() const { return reference.horizon(); }
};

/// Finite-horizon tracking objective sum_t |y(t)-P(t)|_Q^2 + |u(t)|_R^2 with
/// the dynamics eliminated by forward substitution: the decision vector is
/// the stacked control sequence (dimension 2T), H is symmetric positive
/// definite whenever R is. Constraints: per-component control bounds,
/// per-step velocity boxes, and position bounds from the world rectangle.
struct CondensedQp {
    QpProblem qp;
    int horizon = 0;
};

CondensedQp build_qp(const MpcProblem& problem);

/// Dense text dump of the condensed objective for external verification.
std::string qp_to_text(const QpProblem& qp);

struct MpcSolution {
    std::vector<Eigen::Vector2d> controls;  // u(0..T-1)
    std::vector<Eigen::Vector4d> states;    // x(0..T), re-simulated from controls
    std::vector<Eigen::Vector2d> outputs;   // y(0..T-1)
    double objective_value = 0.0;
    double kkt_residual = 0.0;
    int qp_iterations = 0;
    bool converged = false;
};

MpcSolution solve_mpc(const MpcProblem& problem);

enum class TrackStatus { Ok, CollisionInTrack, SolverLimit };

std::string to_string(TrackStatus status);

struct TrackResult {
    TrackStatus status = TrackStatus::Ok;
    MpcSolution solution;
    ReferencePath reference;
    std::vector<double> tracking_error;  // |y(t) - P(t)| per step
    double mean_tracking_error = 0.0;
    double max_tracking_error = 0.0;
    Point2 endpoint{0.0, 0.0};  // y(T-1)

    std::string to_json() const;
};

/// Full pipeline: fit the reference, condense and solve the QP, re-simulate
/// the dynamics, and verify the simulated output polyline against the
/// obstacles (a clipped trajectory is reported, never silently repaired).
TrackResult track(const PlanResult& plan, const Env& env, const LtiModel& model,
                  const Eigen::Matrix2d& Q = 0.9 * Eigen::Matrix2d::Identity(),
                  const Eigen::Matrix2d& R = 0.1 * Eigen::Matrix2d::Identity());

}  // namespace vlmrrt

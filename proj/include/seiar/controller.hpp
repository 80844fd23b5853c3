#pragma once

#include "seiar/qp.hpp"
#include "seiar/types.hpp"

namespace seiar::controller {

enum class TrajectoryLaw { ConstantZero, ExpDecay };

/// Reference for the tracked compartments (S, I).
struct DesiredTrajectory {
    TrajectoryLaw law = TrajectoryLaw::ExpDecay;
    double gamma = 0.3; ///< decay rate, 1/day
    Vec2 z0 = Vec2::Zero();

    Vec2 value(double t) const;
    Vec2 rate(double t) const;
};

struct ClfConfig {
    double lambda = 1.0;
    double k_r = 2.0;
    double c = 10.0;
    Vec2 u_min = Vec2::Zero();
    Vec2 u_max = Vec2::Ones();
    double z_floor = 1e-6;

    void validate() const;
};

struct ClfTerms {
    double V = 0.0;
    double LfV = 0.0;
    Vec2 LgV = Vec2::Zero();
    double phi0 = 0.0;
    double phi0_rob = 0.0;
    Vec2 phi1 = Vec2::Zero();
    Vec2 e = Vec2::Zero();
    Vec2 y_hat = Vec2::Zero();
    Vec2 z_e_hat = Vec2::Zero(); ///< (S, I) estimates
};

/// Drift of the tracked compartments under the estimated parameters.
Vec2 y_hat(const SeiarState& z_hat, const ModelParams& th_hat);

/// Lyapunov quantities for V = e'e / 2 with e = (S, I)_hat - z_d(t).
ClfTerms clf_terms(const SeiarState& z_hat, const ModelParams& th_hat, const DesiredTrajectory& traj,
                   double t, const ClfConfig& cfg);

/// Closed-form min-norm input meeting phi0_rob + phi1'u <= 0. Not clamped.
/// Throws DegenerateDirection when phi0_rob > 0 and |phi1| < z_floor |e|.
ControlInput pwmc(const ClfTerms& terms, double z_floor = 1e-6);

/// QP in x = (h, u1, u2): penalized relaxation h plus the squared virtual
/// input, subject to the relaxed robust CLF row and the input box.
qp::QpProblem assemble_qp(const ClfTerms& terms, const DesiredTrajectory& traj, double t,
                          const ClfConfig& cfg);

/// Virtual input mu = Y_hat - dz_d - Z_e_hat u.
Vec2 virtual_input(const ClfTerms& terms, const Vec2& dz_d, const ControlInput& u);

} // namespace seiar::controller

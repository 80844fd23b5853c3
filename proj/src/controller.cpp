#include "seiar/controller.hpp"

#include "seiar/errors.hpp"

#include <cmath>

namespace seiar::controller {

Vec2 DesiredTrajectory::value(double t) const
{
    if (law == TrajectoryLaw::ConstantZero)
        return Vec2::Zero();
    return z0 * std::exp(-gamma * t);
}

Vec2 DesiredTrajectory::rate(double t) const
{
    if (law == TrajectoryLaw::ConstantZero)
        return Vec2::Zero();
    return -gamma * z0 * std::exp(-gamma * t);
}

void ClfConfig::validate() const
{
    if (!(lambda > 0.0))
        throw ValidationError("clf.lambda > 0");
    if (!(k_r >= 0.0))
        throw ValidationError("clf.k_r >= 0");
    if (!(c > 0.0))
        throw ValidationError("clf.c > 0");
    if (!(z_floor > 0.0))
        throw ValidationError("clf.z_floor > 0");
    for (int j = 0; j < 2; ++j) {
        if (!(u_min[j] >= 0.0 && u_min[j] <= u_max[j] && u_max[j] <= 1.0))
            throw ValidationError("0 <= clf.u_min <= clf.u_max <= 1");
    }
}

Vec2 y_hat(const SeiarState& z_hat, const ModelParams& th)
{
    const double s = z_hat.s();
    // theta_1' Phi_1 and theta_2' Phi_2
    const double y1 = -th.epsilon * th.beta * s * z_hat.e() - th.beta * (1.0 - th.q) * s * z_hat.i() -
                      th.beta * th.delta * s * z_hat.a();
    const double y2 = th.p * th.kappa * z_hat.e() - th.alpha * z_hat.i();
    return {y1, y2};
}

ClfTerms clf_terms(const SeiarState& z_hat, const ModelParams& th_hat, const DesiredTrajectory& traj,
                   double t, const ClfConfig& cfg)
{
    ClfTerms k;
    k.z_e_hat = {z_hat.s(), z_hat.i()};
    k.y_hat = y_hat(z_hat, th_hat);
    k.e = k.z_e_hat - traj.value(t);
    k.V = 0.5 * k.e.dot(k.e);
    k.LfV = k.e.dot(k.y_hat - traj.rate(t));
    k.LgV = -k.e.cwiseProduct(k.z_e_hat);
    k.phi0 = k.LfV + cfg.lambda * k.V;
    k.phi1 = k.LgV;
    k.phi0_rob = k.phi0 + cfg.k_r * k.e.norm();
    return k;
}

ControlInput pwmc(const ClfTerms& terms, double z_floor)
{
    if (!(terms.phi0_rob > 0.0))
        return {};
    const double n2 = terms.phi1.squaredNorm();
    if (std::sqrt(n2) < z_floor * terms.e.norm() || n2 == 0.0)
        throw DegenerateDirection("pwmc: phi1 vanishes while the robust CLF condition is violated");
    const Vec2 u = -terms.phi0_rob * terms.phi1 / n2;
    return {u[0], u[1]};
}

qp::QpProblem assemble_qp(const ClfTerms& terms, const DesiredTrajectory& traj, double t,
                          const ClfConfig& cfg)
{
    const Vec2 dz_d = traj.rate(t);
    const double z1 = terms.z_e_hat[0];
    const double z3 = terms.z_e_hat[1];
    const double floor2 = cfg.z_floor * cfg.z_floor;

    qp::QpProblem p;
    p.n = 3;
    p.H = Eigen::MatrixXd::Zero(3, 3);
    p.H(0, 0) = 2.0 * cfg.c;
    p.H(1, 1) = 2.0 * std::max(z1 * z1, floor2);
    p.H(2, 2) = 2.0 * std::max(z3 * z3, floor2);
    p.B = Eigen::VectorXd::Zero(3);
    p.B[1] = 2.0 * z1 * (dz_d[0] - terms.y_hat[0]);
    p.B[2] = 2.0 * z3 * (dz_d[1] - terms.y_hat[1]);

    auto row = [](double a0, double a1, double a2, double b) {
        qp::QpRow r;
        r.a = Eigen::Vector3d(a0, a1, a2);
        r.b = b;
        return r;
    };
    // relaxed robust CLF constraint: phi1'u - h <= -phi0_rob
    p.rows.push_back(row(-1.0, terms.phi1[0], terms.phi1[1], -terms.phi0_rob));
    // input box
    p.rows.push_back(row(0.0, 1.0, 0.0, cfg.u_max[0]));
    p.rows.push_back(row(0.0, 0.0, 1.0, cfg.u_max[1]));
    p.rows.push_back(row(0.0, -1.0, 0.0, -cfg.u_min[0]));
    p.rows.push_back(row(0.0, 0.0, -1.0, -cfg.u_min[1]));
    return p;
}

Vec2 virtual_input(const ClfTerms& terms, const Vec2& dz_d, const ControlInput& u)
{
    return terms.y_hat - dz_d - terms.z_e_hat.cwiseProduct(u.vec());
}

} // namespace seiar::controller

#include "seiar/filter.hpp"

#include "seiar/errors.hpp"
#include "seiar/model.hpp"

#include <cmath>
#include <limits>

namespace seiar::filter {

namespace {

Mat2 inverse_r(const Mat2& R)
{
    Eigen::LLT<Mat2> llt(R);
    if (llt.info() != Eigen::Success || !R.allFinite())
        throw SingularR("measurement covariance R is not positive definite");
    return llt.solve(Mat2::Identity());
}

} // namespace

double kernel(double x, double sigma)
{
    return std::exp(-(x * x) / (2.0 * sigma * sigma));
}

double correntropy_weight(const Vec2& y, const SeiarState& z_hat, const Mat2& R, double sigma,
                          bool kernel_literal)
{
    const Mat2 r_inv = inverse_r(R);
    const Vec2 innovation = y - model::measurement_jacobian() * z_hat.z;
    const double form = innovation.dot(r_inv * innovation);
    const double x = kernel_literal ? form : std::sqrt(form);
    return std::max(kernel(x, sigma), std::numeric_limits<double>::min());
}

Mat52 gain(const Mat5& P, const Mat25& C, const Mat2& R, double nu)
{
    return nu * P * C.transpose() * inverse_r(R);
}

double asymmetry(const Mat5& P)
{
    const double scale = P.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (P - P.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const Mat5& P)
{
    const Mat5 sym = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Mat5> eig(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

FilterState initialize(const SeiarState& z_hat0, const Mat5& P0, double sigma)
{
    if (!P0.allFinite())
        throw BadCovariance("P0 has non-finite entries");
    if (asymmetry(P0) > 1e-9)
        throw BadCovariance("P0 is not symmetric");
    const double tr = std::max(P0.trace(), 0.0);
    if (min_eigenvalue(P0) < -1e-9 * std::max(tr, 1.0))
        throw BadCovariance("P0 is not positive semidefinite");
    if (!(sigma > 0.0))
        throw BadCovariance("kernel bandwidth sigma must be > 0");

    FilterState fs;
    fs.z_hat = z_hat0;
    fs.P = 0.5 * (P0 + P0.transpose());
    fs.nu = 1.0;
    fs.sigma = sigma;
    return fs;
}

namespace {

struct Deriv {
    Vec5 dz;
    Mat5 dP;
};

template <class Rhs>
std::pair<Vec5, Mat5> rk4(const Vec5& z0, const Mat5& P0, double dt, Rhs rhs)
{
    const Deriv k1 = rhs(z0, P0);
    const Deriv k2 = rhs(z0 + 0.5 * dt * k1.dz, P0 + 0.5 * dt * k1.dP);
    const Deriv k3 = rhs(z0 + 0.5 * dt * k2.dz, P0 + 0.5 * dt * k2.dP);
    const Deriv k4 = rhs(z0 + dt * k3.dz, P0 + dt * k3.dP);
    const double w = dt / 6.0;
    return {z0 + w * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz),
            P0 + w * (k1.dP + 2.0 * k2.dP + 2.0 * k3.dP + k4.dP)};
}

} // namespace

FilterState filter_step(const FilterState& fs, const Vec2& y, const ControlInput& u,
                        const ModelParams& th_hat, const FilterConfig& cfg, double dt)
{
    const Mat2 r_inv = inverse_r(cfg.R);
    const Mat25 C = model::measurement_jacobian();
    const Mat5 info = C.transpose() * r_inv * C;

    const double nu = cfg.mode == FilterMode::Ekf
                          ? 1.0
                          : correntropy_weight(y, fs.z_hat, cfg.R, fs.sigma, cfg.kernel_literal);

    auto rhs = [&](const Vec5& z, const Mat5& P) {
        const SeiarState s(z);
        const Mat5 A = model::state_jacobian(s, u, th_hat);
        const Mat52 K = nu * P * C.transpose() * r_inv;
        Deriv d;
        d.dz = model::dynamics(s, u, th_hat) + K * (y - model::measurement(s));
        d.dP = A * P + P * A.transpose() + cfg.Q - P * info * P;
        return d;
    };

    auto [z1, P1] = rk4(fs.z_hat.z, fs.P, dt, rhs);
    if (!z1.allFinite() || !P1.allFinite())
        throw NonFinite("filter state became non-finite");

    FilterState out = fs;
    out.z_hat.z = z1;
    out.P = 0.5 * (P1 + P1.transpose());
    out.nu = nu;
    return out;
}

SeiarState predict_only(const FilterState& fs, const ControlInput& u, const ModelParams& th_hat,
                        double dt)
{
    auto f = [&](const Vec5& x) { return model::dynamics(SeiarState(x), u, th_hat); };
    const Vec5& x0 = fs.z_hat.z;
    const Vec5 k1 = f(x0);
    const Vec5 k2 = f(x0 + 0.5 * dt * k1);
    const Vec5 k3 = f(x0 + 0.5 * dt * k2);
    const Vec5 k4 = f(x0 + dt * k3);
    return SeiarState(Vec5(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)));
}

} // namespace seiar::filter

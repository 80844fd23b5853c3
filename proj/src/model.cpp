#include "seiar/model.hpp"

#include "seiar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seiar {

void ModelParams::validate() const
{
    auto nonneg = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError(std::string(name) + " >= 0");
    };
    auto fraction = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ValidationError(std::string(name) + " in [0, 1]");
    };
    nonneg(beta, "beta");
    nonneg(kappa, "kappa");
    nonneg(alpha, "alpha");
    nonneg(eta, "eta");
    fraction(epsilon, "epsilon");
    fraction(q, "q");
    fraction(delta, "delta");
    fraction(p, "p");
    fraction(zeta, "zeta");
}

ModelParams ModelParams::scaled(double factor) const
{
    auto frac = [](double v) { return std::clamp(v, 0.0, 1.0); };
    ModelParams out = *this;
    out.beta *= factor;
    out.kappa *= factor;
    out.alpha *= factor;
    out.eta *= factor;
    out.epsilon = frac(epsilon * factor);
    out.q = frac(q * factor);
    out.delta = frac(delta * factor);
    out.p = frac(p * factor);
    out.zeta = frac(zeta * factor);
    return out;
}

ModelParams table_params(double beta)
{
    ModelParams th;
    th.beta = beta;
    return th;
}

namespace model {

Vec5 dynamics(const SeiarState& state, const ControlInput& u, const ModelParams& th)
{
    const Vec5& z = state.z;
    const double force = th.epsilon * z[1] + (1.0 - th.q) * z[2] + th.delta * z[3];
    const double infection = th.beta * z[0] * force;
    const double vaccinated = z[0] * u.u1;
    const double treated = z[2] * u.u2;

    Vec5 dz;
    dz[0] = -infection - vaccinated;
    dz[1] = infection - th.kappa * z[1];
    dz[2] = th.p * th.kappa * z[1] - th.alpha * z[2] - treated;
    dz[3] = (1.0 - th.p) * th.kappa * z[1] - th.eta * z[3];
    dz[4] = th.alpha * th.zeta * z[2] + vaccinated + treated + th.eta * z[3];
    return dz;
}

Mat5 state_jacobian(const SeiarState& state, const ControlInput& u, const ModelParams& th)
{
    const Vec5& z = state.z;
    const double force = th.epsilon * z[1] + (1.0 - th.q) * z[2] + th.delta * z[3];
    const double bs = th.beta * z[0];

    Mat5 A = Mat5::Zero();
    A(0, 0) = -th.beta * force - u.u1;
    A(0, 1) = -bs * th.epsilon;
    A(0, 2) = -bs * (1.0 - th.q);
    A(0, 3) = -bs * th.delta;

    A(1, 0) = th.beta * force;
    A(1, 1) = bs * th.epsilon - th.kappa;
    A(1, 2) = bs * (1.0 - th.q);
    A(1, 3) = bs * th.delta;

    A(2, 1) = th.p * th.kappa;
    A(2, 2) = -th.alpha - u.u2;

    A(3, 1) = (1.0 - th.p) * th.kappa;
    A(3, 3) = -th.eta;

    A(4, 0) = u.u1;
    A(4, 2) = th.alpha * th.zeta + u.u2;
    A(4, 3) = th.eta;
    return A;
}

Vec2 measurement(const SeiarState& z)
{
    return {z.z[1], z.z[2]};
}

Mat25 measurement_jacobian()
{
    Mat25 C = Mat25::Zero();
    C(0, 1) = 1.0;
    C(1, 2) = 1.0;
    return C;
}

StepResult rk4_step(const SeiarState& z, const ControlInput& u, const ModelParams& th,
                    const Vec5& w, double dt)
{
    auto f = [&](const Vec5& x) { return Vec5(dynamics(SeiarState(x), u, th) + w); };

    const Vec5& x0 = z.z;
    const Vec5 k1 = f(x0);
    const Vec5 k2 = f(x0 + 0.5 * dt * k1);
    const Vec5 k3 = f(x0 + 0.5 * dt * k2);
    const Vec5 k4 = f(x0 + dt * k3);

    StepResult out;
    out.z.z = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!out.z.z.allFinite())
        throw NonFinite("plant state became non-finite during an RK4 step");
    for (int j = 0; j < 5; ++j) {
        if (out.z.z[j] < 0.0) {
            out.z.z[j] = 0.0;
            ++out.clamp_events;
        }
    }
    return out;
}

double basic_reproduction_number(const ModelParams& th, double n0)
{
    const double per_case = th.epsilon / th.kappa + th.p * (1.0 - th.q) / th.alpha +
                            (1.0 - th.p) * th.delta / th.eta;
    return th.beta * n0 * per_case;
}

double calibrate_beta(const ModelParams& th, double n0, double r0)
{
    ModelParams unit = th;
    unit.beta = 1.0;
    return r0 / basic_reproduction_number(unit, n0);
}

double default_beta()
{
    return calibrate_beta(table_params(0.0), kDefaultPopulation, kDefaultR0);
}

} // namespace model
} // namespace seiar

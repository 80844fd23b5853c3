#pragma once

#include <Eigen/Dense>

namespace seiar {

using Vec2 = Eigen::Vector2d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat25 = Eigen::Matrix<double, 2, 5>;
using Mat52 = Eigen::Matrix<double, 5, 2>;

/// Compartment populations in absolute individuals: S, E, I, A, R.
struct SeiarState {
    Vec5 z = Vec5::Zero();

    SeiarState() = default;
    explicit SeiarState(const Vec5& v) : z(v) {}
    SeiarState(double s, double e, double i, double a, double r) { z << s, e, i, a, r; }

    double s() const { return z[0]; }
    double e() const { return z[1]; }
    double i() const { return z[2]; }
    double a() const { return z[3]; }
    double r() const { return z[4]; }

    double total() const { return z.sum(); }

    bool operator==(const SeiarState& o) const { return z == o.z; }
};

/// Epidemiological parameters. Rates are per day, beta is per individual per day.
struct ModelParams {
    double beta = 0.0;
    double epsilon = 0.0;
    double q = 0.5;
    double delta = 1.0;
    double kappa = 0.526;
    double p = 0.667;
    double alpha = 0.244;
    double eta = 0.244;
    double zeta = 0.98;

    /// Throws ValidationError naming the first violated bound.
    void validate() const;

    /// Every parameter multiplied by `factor`; fractions are then clamped to [0, 1].
    ModelParams scaled(double factor) const;

    bool operator==(const ModelParams&) const = default;
};

/// Table values of the SEIAR model with the given transmission rate.
ModelParams table_params(double beta);

/// Normalized vaccination (u1) and antiviral treatment (u2) rates.
struct ControlInput {
    double u1 = 0.0;
    double u2 = 0.0;

    Vec2 vec() const { return {u1, u2}; }
    bool operator==(const ControlInput&) const = default;
};

} // namespace seiar

#pragma once

#include "seiar/types.hpp"

namespace seiar::filter {

enum class FilterMode { Emckf, Ekf };

struct FilterConfig {
    FilterMode mode = FilterMode::Emckf;
    Mat5 Q = Mat5::Identity();
    Mat2 R = Mat2::Identity() * 0.01;
    double sigma = 0.01; ///< kernel bandwidth
    /// Feed the quadratic form r'R^-1 r itself (rather than its square root)
    /// into the kernel as the norm argument.
    bool kernel_literal = false;
};

struct FilterState {
    SeiarState z_hat;
    Mat5 P = Mat5::Identity();
    double nu = 1.0;      ///< correntropy weight used by the latest step
    double sigma = 0.01;
};

/// Gaussian kernel exp(-x^2 / (2 sigma^2)).
double kernel(double x, double sigma);

/// Weight of the innovation y - C z_hat. Underflow is floored at the smallest
/// normal double so the weight stays strictly positive. Throws SingularR.
double correntropy_weight(const Vec2& y, const SeiarState& z_hat, const Mat2& R, double sigma,
                          bool kernel_literal = false);

/// K = nu P C' R^-1. Throws SingularR.
Mat52 gain(const Mat5& P, const Mat25& C, const Mat2& R, double nu);

/// Filter state at t = 0 with nu = 1. Throws BadCovariance unless P0 is
/// symmetric positive semidefinite.
FilterState initialize(const SeiarState& z_hat0, const Mat5& P0, double sigma);

/// One RK4 step of the coupled estimate / Riccati equations over dt with the
/// measurement y, the control u and the weight nu held for the whole step.
/// nu is evaluated from the innovation at the start of the step (forced to 1
/// in EKF mode); the Riccati equation itself does not carry nu.
/// Throws NonFinite, SingularR.
FilterState filter_step(const FilterState& fs, const Vec2& y, const ControlInput& u,
                        const ModelParams& th_hat, const FilterConfig& cfg, double dt);

/// Same step with the innovation term removed (pure model prediction); the
/// difference to filter_step is the measurement-driven part of the update.
SeiarState predict_only(const FilterState& fs, const ControlInput& u, const ModelParams& th_hat,
                        double dt);

/// Largest |P - P'| entry relative to the largest |P| entry.
double asymmetry(const Mat5& P);

/// Smallest eigenvalue of the symmetric part of P.
double min_eigenvalue(const Mat5& P);

} // namespace seiar::filter

#pragma once

#include "seiar/types.hpp"

namespace seiar::model {

/// Right-hand side of the controlled SEIAR system, individuals/day.
Vec5 dynamics(const SeiarState& z, const ControlInput& u, const ModelParams& th);

/// Closed-form d(dynamics)/dz.
Mat5 state_jacobian(const SeiarState& z, const ControlInput& u, const ModelParams& th);

/// Measured channels (E, I).
Vec2 measurement(const SeiarState& z);

/// Constant selector of the E and I rows.
Mat25 measurement_jacobian();

struct StepResult {
    SeiarState z;
    int clamp_events = 0; ///< components raised to zero after the step
};

/// Classical RK4 with the process-noise vector `w` held constant and added to
/// the derivative at every stage. Negative components are clamped to zero and
/// counted. Throws NonFinite.
StepResult rk4_step(const SeiarState& z, const ControlInput& u, const ModelParams& th,
                    const Vec5& w, double dt);

// Transmission-rate calibration.
//
// Linearizing the infected subsystem (E, I, A) at the disease-free state with
// S = n0 gives new-infection matrix F and transition matrix V:
//
//   F = beta*n0 * [eps, 1-q, delta; 0 0 0; 0 0 0]
//   V = [kappa, 0, 0; -p*kappa, alpha, 0; -(1-p)*kappa, 0, eta]
//
// and R0 = rho(F V^-1) = beta*n0 * (eps/kappa + p(1-q)/alpha + (1-p)delta/eta).

/// Basic reproduction number at susceptible population n0.
double basic_reproduction_number(const ModelParams& th, double n0);

/// beta giving `r0` at n0 with the remaining parameters of `th`.
double calibrate_beta(const ModelParams& th, double n0, double r0);

inline constexpr double kDefaultR0 = 1.8;
inline constexpr double kDefaultPopulation = 16000.0;

/// beta for the Table-1 parameters at the default population and R0.
double default_beta();

} // namespace seiar::model

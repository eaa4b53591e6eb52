#pragma once

#include "phdae/model.hpp"

namespace phdae {

/// DC network: generator with internal resistance R_G, pi-model line (C1, L/R_L, C2)
/// and a resistive consumer R_R. State x = (I, V1, V2, I_G, I_R), input E_G, output I_G.
struct CircuitParams {
    double L = 2.0;
    double C1 = 0.01;
    double C2 = 0.02;
    double RL = 0.1;
    double RG = 6.0;
    double RR = 3.0;

    /// Throws Error unless all six constants are strictly positive.
    void validate() const;
};

enum class ControlVariant { open_loop_zero, ramp_to_ustar, feedback };

struct ControlPlan {
    ControlVariant variant = ControlVariant::open_loop_zero;
    double P_demand = 10.0;
    double alpha = 0.0;

    void validate() const;
};

LtiModel dc_network_lti(const CircuitParams& p);

/// n = ell = 5, m = 1, E = diag(L, C1, C2, 0, 0), z = x, H = 1/2 x^T E x.
PhdaeModel build_dc_network(const CircuitParams& p);

struct DesiredState {
    Vec x_star;
    double u_star = 0.0;
};

/// Equilibrium delivering power P to the consumer:
/// x* = sqrt(P / R_R) (1, -R_R - R_L, -R_R, 1, -1), u* = (R_R + R_L + R_G) sqrt(P / R_R).
DesiredState desired_state(const CircuitParams& p, double P);

/// u*(atan(5(t - 0.5)) + 0.5).
double ramp_control(double t, double u_star);

InputFn ramp_input(double u_star);

/// The ramp up to t_switch, then the constant u*.
InputFn switched_ramp_input(double u_star, double t_switch);

/// Shifted closed loop in x~ = x - x* under u = u* - alpha (I_G - I_G*) + u^.
struct ClosedLoop {
    PhdaeModel model;
    Vec x_star;
    double u_star = 0.0;
    double alpha = 0.0;

    /// Generator voltage applied at the original state x when u^ = 0.
    double control(const Vec& x) const;
};

/// R_alpha = R + alpha B B^T with the coefficients of `base` read at x*; H~ = 1/2 x~^T E x~.
/// `base` must have constant coefficients.
ClosedLoop feedback_model(const PhdaeModel& base, const CircuitParams& p, double P, double alpha);

/// 1/2 L (I - I*)^2 + 1/2 C1 (V1 - V1*)^2 + 1/2 C2 (V2 - V2*)^2.
ScalarFn shifted_hamiltonian(const CircuitParams& p, const Vec& x_star);

}  // namespace phdae

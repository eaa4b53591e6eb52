#include "phdae/circuits.hpp"

#include "phdae/error.hpp"

#include <cmath>
#include <sstream>

namespace phdae {

void CircuitParams::validate() const {
    const std::pair<const char*, double> values[] = {{"L", L}, {"C1", C1}, {"C2", C2},
                                                     {"RL", RL}, {"RG", RG}, {"RR", RR}};
    for (const auto& [name, value] : values) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            std::ostringstream os;
            os << "circuit parameter " << name << " must be positive, got " << value;
            throw Error(os.str());
        }
    }
}

void ControlPlan::validate() const {
    if (!(P_demand >= 0.0)) throw Error("power demand must be non-negative");
    if (alpha < 0.0) throw Error("feedback gain must be non-negative");
    if (variant == ControlVariant::feedback && !(alpha > 0.0)) {
        throw Error("the feedback plan needs a positive gain");
    }
}

LtiModel dc_network_lti(const CircuitParams& p) {
    p.validate();
    LtiModel lti = LtiModel::zeros(5, 5, 1);
    lti.E.diagonal() << p.L, p.C1, p.C2, 0.0, 0.0;
    lti.J << 0, -1, 1, 0, 0,
             1, 0, 0, -1, 0,
             -1, 0, 0, 0, -1,
             0, 1, 0, 0, 0,
             0, 0, 1, 0, 0;
    lti.R.diagonal() << p.RL, 0.0, 0.0, p.RG, p.RR;
    lti.B(3, 0) = 1.0;
    lti.Z.setIdentity();
    lti.Q = lti.E;
    return lti;
}

PhdaeModel build_dc_network(const CircuitParams& p) { return lti_to_model(dc_network_lti(p)); }

DesiredState desired_state(const CircuitParams& p, double P) {
    p.validate();
    if (!(P >= 0.0)) throw Error("power demand must be non-negative");
    const double a = std::sqrt(P / p.RR);
    DesiredState out;
    out.x_star.resize(5);
    out.x_star << a, -(p.RR + p.RL) * a, -p.RR * a, a, -a;
    out.u_star = (p.RR + p.RL + p.RG) * a;
    return out;
}

double ramp_control(double t, double u_star) { return u_star * (std::atan(5.0 * (t - 0.5)) + 0.5); }

InputFn ramp_input(double u_star) {
    return [u_star](double t, const Vec&) { return Vec::Constant(1, ramp_control(t, u_star)); };
}

InputFn switched_ramp_input(double u_star, double t_switch) {
    return [u_star, t_switch](double t, const Vec&) {
        return Vec::Constant(1, t < t_switch ? ramp_control(t, u_star) : u_star);
    };
}

double ClosedLoop::control(const Vec& x) const { return u_star - alpha * (x[3] - x_star[3]); }

ClosedLoop feedback_model(const PhdaeModel& base, const CircuitParams& p, double P, double alpha) {
    if (alpha < 0.0) throw Error("feedback gain must be non-negative");
    const DesiredState d = desired_state(p, P);
    base.require_state(d.x_star, "desired state");
    const Coefficients c = base.evaluate(0.0, d.x_star);

    LtiModel lti = LtiModel::zeros(base.n, base.ell, base.m);
    lti.E = c.E;
    lti.J = c.J;
    lti.R = c.R + alpha * c.B * c.B.transpose();
    lti.B = c.B;
    lti.P = c.P;
    lti.S = c.S;
    lti.N = c.N;
    lti.Z.setIdentity();
    lti.Q = c.E.transpose();

    ClosedLoop out;
    out.model = lti_to_model(lti);
    out.x_star = d.x_star;
    out.u_star = d.u_star;
    out.alpha = alpha;
    return out;
}

ScalarFn shifted_hamiltonian(const CircuitParams& p, const Vec& x_star) {
    if (x_star.size() != 5) throw DimensionError("desired state must have five entries");
    return [p, x_star](double, const Vec& x) {
        const double dI = x[0] - x_star[0];
        const double d1 = x[1] - x_star[1];
        const double d2 = x[2] - x_star[2];
        return 0.5 * (p.L * dI * dI + p.C1 * d1 * d1 + p.C2 * d2 * d2);
    };
}

}  // namespace phdae

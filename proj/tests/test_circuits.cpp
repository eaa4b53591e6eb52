#include "phdae/circuits.hpp"
#include "phdae/collocation.hpp"
#include "phdae/error.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace phdae;
using Catch::Approx;

TEST_CASE("default constants give the reference matrices") {
    const CircuitParams p;
    const PhdaeModel c = build_dc_network(p);
    CHECK(c.n == 5);
    CHECK(c.ell == 5);
    CHECK(c.m == 1);
    const Coefficients k = c.evaluate(0.0, Vec::Zero(5));
    Vec e(5);
    e << 2.0, 0.01, 0.02, 0.0, 0.0;
    CHECK(k.E == Mat(e.asDiagonal()));
    Mat J(5, 5);
    J << 0, -1, 1, 0, 0, 1, 0, 0, -1, 0, -1, 0, 0, 0, -1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0;
    CHECK(k.J == J);
    Vec r(5);
    r << 0.1, 0.0, 0.0, 6.0, 3.0;
    CHECK(k.R == Mat(r.asDiagonal()));
    CHECK(k.B == Vec::Unit(5, 3));
    CHECK(validate_structure(c, SampleBox::uniform(5, 10.0), 100, 1).check("skew").worst == 0.0);
}

TEST_CASE("Hamiltonian vanishes at zero and is positive on differential deviations") {
    const PhdaeModel c = build_dc_network(CircuitParams{});
    CHECK(c.H(0.0, Vec::Zero(5)) == 0.0);
    for (Index i = 0; i < 3; ++i) CHECK(c.H(0.0, Vec::Unit(5, i)) > 0.0);
    Vec alg = Vec::Zero(5);
    alg[3] = 4.0;
    alg[4] = -2.0;
    CHECK(c.H(0.0, alg) == 0.0);
}

TEST_CASE("desired state for P = 10") {
    const CircuitParams p;
    const DesiredState d = desired_state(p, 10.0);
    const double a = std::sqrt(10.0 / 3.0);
    CHECK(d.x_star[0] == Approx(1.8257).margin(1e-4));
    CHECK(d.x_star[1] == Approx(-5.6598).margin(1e-4));
    CHECK(d.x_star[2] == Approx(-5.4772).margin(1e-4));
    CHECK(d.x_star[3] == Approx(1.8257).margin(1e-4));
    CHECK(d.x_star[4] == Approx(-1.8257).margin(1e-4));
    CHECK(d.u_star == Approx(16.614).margin(1e-3));
    CHECK(d.u_star == Approx(9.1 * a).epsilon(1e-14));

    const Coefficients k = build_dc_network(p).evaluate(0.0, d.x_star);
    const Vec balance = (k.J - k.R) * d.x_star + k.B * Vec::Constant(1, d.u_star);
    CHECK(balance.cwiseAbs().maxCoeff() <= 1e-12);
    // The consumer draws I_R^2 R_R = P.
    CHECK(d.x_star[4] * d.x_star[4] * p.RR == Approx(10.0));

    const DesiredState z = desired_state(p, 0.0);
    CHECK(z.x_star.isZero(0.0));
    CHECK(z.u_star == 0.0);
    CHECK_THROWS_AS(desired_state(p, -1.0), Error);
}

TEST_CASE("arctan ramp control") {
    const double u = 16.614;
    CHECK(ramp_control(0.5, u) == Approx(0.5 * u));
    CHECK(ramp_control(0.0, u) == Approx(-11.4685).margin(1e-3));
    CHECK(ramp_control(1e9, u) == Approx(u * (M_PI / 2.0 + 0.5)).epsilon(1e-9));
    CHECK(ramp_control(1e9, 1.0) == Approx(2.0708).margin(1e-4));
    const InputFn sw = switched_ramp_input(u, 1.0);
    CHECK(sw(0.5, Vec::Zero(5))[0] == Approx(0.5 * u));
    CHECK(sw(1.0, Vec::Zero(5))[0] == u);
    CHECK(sw(7.0, Vec::Zero(5))[0] == u);
}

TEST_CASE("feedback model") {
    const CircuitParams p;
    const PhdaeModel base = build_dc_network(p);
    const ClosedLoop zero = feedback_model(base, p, 10.0, 0.0);
    CHECK(zero.model.R(0.0, Vec::Zero(5)) == base.R(0.0, Vec::Zero(5)));

    const ClosedLoop loop = feedback_model(base, p, 10.0, 1.0);
    const Mat R = loop.model.R(0.0, Vec::Zero(5));
    CHECK(R(3, 3) == p.RG + 1.0);
    CHECK(validate_structure(loop.model, SampleBox::uniform(5, 10.0), 100, 2).pass);
    CHECK(loop.model.H(0.0, Vec::Zero(5)) == 0.0);
    CHECK(loop.control(loop.x_star) == loop.u_star);
    CHECK_THROWS_AS(feedback_model(base, p, 10.0, -1.0), Error);

    // Strengthened dissipation: dH~/dt = -R_L I~^2 - (R_G + alpha) I_G~^2 - R_R I_R~^2 on solutions.
    Vec xt(5);
    xt << 0.3, -0.2, 0.1, 0.0, 0.0;
    xt = consistent_init(loop.model, 0.0, xt, Vec::Zero(1));
    const Coefficients k = loop.model.evaluate(0.0, xt);
    Vec xdot = Vec::Zero(5);
    const Vec rhs = (k.J - k.R) * k.z;
    xdot.head(3) = rhs.head(3).cwiseQuotient(k.E.diagonal().head(3));
    const double hdot = xdot.dot(k.E * xt);
    CHECK(hdot == Approx(-p.RL * xt[0] * xt[0] - (p.RG + 1.0) * xt[3] * xt[3] - p.RR * xt[4] * xt[4]).epsilon(1e-12));
}

TEST_CASE("matched steps: feedback never dissipates less") {
    const CircuitParams p;
    const PhdaeModel base = build_dc_network(p);
    const ClosedLoop with = feedback_model(base, p, 10.0, 1.0);
    const ClosedLoop without = feedback_model(base, p, 10.0, 0.0);
    const ButcherTableau tab = gauss_legendre_tableau(2);
    Vec x = consistent_init(with.model, 0.0, Vec(-with.x_star), Vec::Zero(1));
    for (int k = 0; k < 50; ++k) {
        const StepRecord rec = step(with.model, 0.0, x, 0.05, tab, zero_input(1));
        const StepRecord same_stages = record_from_rates(without.model, 0.0, x, 0.05, tab, zero_input(1), rec.rates);
        CHECK(rec.dissipation_sum <= same_stages.dissipation_sum + 1e-14);
        x = rec.xf;
    }
}

TEST_CASE("shifted Hamiltonian") {
    const CircuitParams p;
    const DesiredState d = desired_state(p, 10.0);
    const ScalarFn ht = shifted_hamiltonian(p, d.x_star);
    CHECK(ht(0.0, d.x_star) == 0.0);
    const double at_zero = 0.5 * (2.0 * d.x_star[0] * d.x_star[0] + 0.01 * d.x_star[1] * d.x_star[1] +
                                  0.02 * d.x_star[2] * d.x_star[2]);
    CHECK(ht(0.0, Vec::Zero(5)) == Approx(at_zero));

    // H~ - H is affine: its second differences vanish.
    const PhdaeModel c = build_dc_network(p);
    const auto diff = [&](const Vec& x) { return ht(0.0, x) - c.H(0.0, x); };
    Vec a(5), b(5);
    a << 0.3, -1.0, 2.0, 0.1, 0.5;
    b << -1.4, 0.2, 0.7, -2.0, 1.0;
    CHECK(diff(a) + diff(b) - 2.0 * diff(0.5 * (a + b)) == Approx(0.0).margin(1e-12));

    Vec dev = d.x_star;
    dev[1] += 0.5;
    CHECK(ht(0.0, dev) > 0.0);
}

TEST_CASE("constant control u* keeps x* in place") {
    const CircuitParams p;
    const DesiredState d = desired_state(p, 10.0);
    const PhdaeModel c = build_dc_network(p);
    const Trajectory traj =
        integrate(c, {0.0, 1.0}, d.x_star, 0.05, gauss_legendre_tableau(1), constant_input(Vec::Constant(1, d.u_star)));
    for (const auto& rec : traj.steps) CHECK((rec.xf - d.x_star).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("uncontrolled circuit decays to the origin") {
    const PhdaeModel c = build_dc_network(CircuitParams{});
    Vec guess = Vec::Zero(5);
    guess << 1.0, 2.0, -1.0, 0.0, 0.0;
    const Vec x0 = consistent_init(c, 0.0, guess, zero_input(1));
    const Trajectory traj = integrate(c, {0.0, 200.0}, x0, 0.01, gauss_legendre_tableau(1), zero_input(1));
    double previous = x0.norm();
    for (double t : {20.0, 50.0, 100.0, 200.0}) {
        const double now = traj.state_at(t).norm();
        CHECK(now < previous);
        previous = now;
    }
    CHECK(traj.steps.back().Hf < 0.01 * c.H(0.0, x0));
}

TEST_CASE("parameter and plan validation") {
    CircuitParams p;
    p.RL = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK_THROWS_AS(build_dc_network(p), Error);
    ControlPlan plan;
    plan.variant = ControlVariant::feedback;
    CHECK_THROWS_AS(plan.validate(), Error);
    plan.alpha = 0.5;
    CHECK_NOTHROW(plan.validate());
    plan.P_demand = -1.0;
    CHECK_THROWS_AS(plan.validate(), Error);
}

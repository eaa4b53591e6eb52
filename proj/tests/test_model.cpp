#include "phdae/circuits.hpp"
#include "phdae/error.hpp"
#include "phdae/model.hpp"
#include "phdae/scenarios.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace phdae;
using Catch::Approx;

namespace {

LtiModel scalar_lti(double j, double r) {
    LtiModel lti = LtiModel::zeros(1, 1, 0);
    lti.E(0, 0) = 1.0;
    lti.J(0, 0) = j;
    lti.R(0, 0) = r;
    lti.Z(0, 0) = 1.0;
    lti.Q(0, 0) = 1.0;
    return lti;
}

}  // namespace

TEST_CASE("circuit model passes validation with an exactly zero skew residual") {
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const ValidationReport report = validate_structure(circuit, SampleBox::uniform(5, 10.0), 200, 3);
    CHECK(report.pass);
    CHECK(report.check("skew").worst == 0.0);
    CHECK(report.check("symmetry").worst == 0.0);
    CHECK(report.check("psd").worst >= 0.0);
    CHECK(report.check("grad_x").worst <= 1e-12);
    CHECK(report.check("grad_t").worst == 0.0);
    CHECK(report.min_hamiltonian >= 0.0);
}

TEST_CASE("a non-skew J fails the skew check") {
    const PhdaeModel model = lti_to_model(scalar_lti(1.0, 0.5));
    const ValidationReport report = validate_structure(model, SampleBox::uniform(1, 1.0), 20, 1);
    CHECK_FALSE(report.pass);
    CHECK_FALSE(report.check("skew").ok);
    CHECK(report.check("skew").worst == Approx(2.0));
    CHECK(report.check("psd").ok);
}

TEST_CASE("an indefinite R fails the psd check and reports the eigenvalue") {
    const PhdaeModel model = lti_to_model(scalar_lti(0.0, -0.25));
    const ValidationReport report = validate_structure(model, SampleBox::uniform(1, 1.0), 20, 1);
    CHECK_FALSE(report.pass);
    CHECK_FALSE(report.check("psd").ok);
    CHECK(report.check("psd").worst == Approx(-0.25));
    CHECK(report.check("skew").ok);
}

TEST_CASE("the LTI wrapper rejects a Hamiltonian inconsistent with E^T z") {
    LtiModel lti = scalar_lti(0.0, 1.0);
    lti.Q(0, 0) = 2.0;
    CHECK_THROWS_AS(lti_to_model(lti), StructureError);
    try {
        lti_to_model(lti);
    } catch (const StructureError& e) {
        CHECK(std::string(e.what()).find("gradient condition") != std::string::npos);
    }
    LtiModel asym = LtiModel::zeros(2, 2, 0);
    asym.Q(0, 1) = 1.0;
    CHECK_THROWS_AS(lti_to_model(asym), StructureError);
}

TEST_CASE("a wrong gradient is caught by sampling") {
    PhdaeModel model = decay_model();
    model.H = [](double, const Vec& x) { return x[0] * x[0]; };
    model.grad_H_x = {};
    const ValidationReport report = validate_structure(model, SampleBox::uniform(1, 2.0), 50, 9);
    CHECK_FALSE(report.check("grad_x").ok);
    CHECK(report.check("skew").ok);
}

TEST_CASE("finite-difference gradients are accepted for a nonlinear Hamiltonian") {
    PhdaeModel model = quartic_model();
    model.grad_H_x = {};
    model.grad_H_t = {};
    const ValidationReport report = validate_structure(model, SampleBox::uniform(1, 2.0), 100, 5);
    CHECK(report.pass);
    CHECK(report.check("grad_x").tolerance == Approx(1e-8));
}

TEST_CASE("time dependence: dH/dt = z^T r is checked") {
    // H = (1 + t) x^2 / 2, z = (1 + t) x, r = x / (2 (1 + t)).
    PhdaeModel model = decay_model();
    model.z = [](double t, const Vec& x) -> Vec { return (1.0 + t) * x; };
    model.r = [](double t, const Vec& x) -> Vec { return x / (2.0 * (1.0 + t)); };
    model.H = [](double t, const Vec& x) { return 0.5 * (1.0 + t) * x[0] * x[0]; };
    model.grad_H_x = [](double t, const Vec& x) -> Vec { return (1.0 + t) * x; };
    model.grad_H_t = [](double, const Vec& x) { return 0.5 * x[0] * x[0]; };
    model.time_invariant = false;
    CHECK(validate_structure(model, SampleBox::uniform(1, 2.0, 0.0, 3.0), 100, 2).pass);

    model.r = constant(Vec(Vec::Zero(1)));
    const ValidationReport bad = validate_structure(model, SampleBox::uniform(1, 2.0, 0.0, 3.0), 100, 2);
    CHECK_FALSE(bad.check("grad_t").ok);
}

TEST_CASE("non-finite coefficients produce a failure naming the point") {
    PhdaeModel model = decay_model();
    model.R = [](double, const Vec& x) -> Mat { return Mat::Constant(1, 1, x[0] > 0.5 ? std::nan("") : 1.0); };
    const ValidationReport report = validate_structure(model, SampleBox{0.0, 1.0, Vec::Constant(1, 0.6), Vec::Ones(1)}, 10, 1);
    CHECK_FALSE(report.pass);
    REQUIRE(report.failure.has_value());
    CHECK(report.failure->find("non-finite R") != std::string::npos);
    CHECK(report.failure->find("x=[") != std::string::npos);
}

TEST_CASE("validation arguments are checked") {
    const PhdaeModel model = decay_model();
    CHECK_THROWS_AS(validate_structure(model, SampleBox::uniform(2, 1.0), 10, 1), DimensionError);
    CHECK_THROWS_AS(validate_structure(model, SampleBox::uniform(1, 1.0), 0, 1), Error);
    CHECK_THROWS_AS(validate_structure(model, SampleBox::uniform(1, 1.0), 10, 1, 0.0), Error);
}

TEST_CASE("evaluate rejects coefficient shapes that disagree with the dimensions") {
    PhdaeModel model = decay_model();
    model.J = constant(Mat(Mat::Zero(2, 2)));
    CHECK_THROWS_AS(model.evaluate(0.0, Vec::Ones(1)), DimensionError);
    CHECK_THROWS_AS(decay_model().evaluate(0.0, Vec::Ones(2)), DimensionError);
}

TEST_CASE("power balance on the circuit matches the hand-written energy rate") {
    const CircuitParams p;
    const PhdaeModel circuit = build_dc_network(p);
    const double I = 0.7, V1 = -1.3, V2 = 2.1, u = 4.0;
    const double IG = (V1 + u) / p.RG;
    const double IR = V2 / p.RR;
    Vec x(5);
    x << I, V1, V2, IG, IR;
    Vec xdot(5);
    xdot << (-V1 + V2 - p.RL * I) / p.L, (I - IG) / p.C1, (-I - IR) / p.C2, 0.3, -0.8;
    const Vec uu = Vec::Constant(1, u);
    CHECK(circuit.residual(0.0, x, xdot, uu).cwiseAbs().maxCoeff() < 1e-12);

    const Vec y = circuit.output(0.0, x, uu);
    CHECK(y[0] == IG);
    CHECK(std::abs(pbe_residual(circuit, 0.0, x, xdot, uu, y)) < 1e-12);

    const double hdot = p.L * I * xdot[0] + p.C1 * V1 * xdot[1] + p.C2 * V2 * xdot[2];
    const double supplied = -p.RL * I * I - p.RG * IG * IG - p.RR * IR * IR + IG * u;
    CHECK(hdot == Approx(supplied).epsilon(1e-12));
}

TEST_CASE("serial and parallel validation give identical reports") {
    const PhdaeModel two = builtin_model("two-circuits");
    const SampleBox box = SampleBox::uniform(14, 5.0);
    const ValidationReport a = validate_structure(two, box, 300, 11);
    const ValidationReport b = validate_structure_serial(two, box, 300, 11);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t c = 0; c < a.checks.size(); ++c) {
        CHECK(a.checks[c].worst == b.checks[c].worst);
        CHECK(a.checks[c].scaled == b.checks[c].scaled);
        CHECK(a.checks[c].t == b.checks[c].t);
    }
    CHECK(a.min_hamiltonian == b.min_hamiltonian);
    CHECK(a.pass == b.pass);
}

TEST_CASE("fd_step scales with the coordinate") {
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    CHECK(fd_step(0.0) == base);
    CHECK(fd_step(-100.0) == Approx(100.0 * base));
}

#include "phdae/circuits.hpp"
#include "phdae/collocation.hpp"
#include "phdae/error.hpp"
#include "phdae/scenarios.hpp"
#include "phdae/transform.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace phdae;
using Catch::Approx;

namespace {

Mat random_invertible(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> s(0.5, 2.0);
    Mat a(n, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    const Mat q = Eigen::HouseholderQR<Mat>(a).householderQ();
    Vec d(n);
    for (Index i = 0; i < n; ++i) d[i] = s(rng);
    return q * d.asDiagonal();
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// x' = -(1 + sin(t)^2) x + cos(t) u, y = cos(t) x, with a time-dependent Hamiltonian
/// H = (1 + t) x^2 / 2 and the matching r.
PhdaeModel time_varying_model() {
    PhdaeModel model;
    model.n = model.ell = model.m = 1;
    model.E = constant(Mat(Mat::Identity(1, 1)));
    model.J = constant(Mat(Mat::Zero(1, 1)));
    model.R = [](double t, const Vec&) -> Mat { return Mat::Constant(1, 1, 1.0 + std::sin(t) * std::sin(t)); };
    model.B = [](double t, const Vec&) -> Mat { return Mat::Constant(1, 1, std::cos(t)); };
    model.P = constant(Mat(Mat::Zero(1, 1)));
    model.S = constant(Mat(Mat::Zero(1, 1)));
    model.N = constant(Mat(Mat::Zero(1, 1)));
    model.z = [](double t, const Vec& x) -> Vec { return (1.0 + t) * x; };
    model.r = [](double t, const Vec& x) -> Vec { return x / (2.0 * (1.0 + t)); };
    model.H = [](double t, const Vec& x) { return 0.5 * (1.0 + t) * x[0] * x[0]; };
    model.grad_H_x = [](double t, const Vec& x) -> Vec { return (1.0 + t) * x; };
    model.grad_H_t = [](double, const Vec& x) { return 0.5 * x[0] * x[0]; };
    return model;
}

}  // namespace

TEST_CASE("identity transform reproduces the coefficients") {
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const PhdaeModel same = apply_transformation(circuit, TransformSpec::identity(5, 5));
    Vec x(5);
    x << 0.3, -1.0, 2.0, 0.5, -0.25;
    const Coefficients a = circuit.evaluate(0.4, x);
    const Coefficients b = same.evaluate(0.4, x);
    CHECK(a.E == b.E);
    CHECK(a.J == b.J);
    CHECK(a.R == b.R);
    CHECK(a.z == b.z);
    CHECK(same.H(0.4, x) == circuit.H(0.4, x));
}

TEST_CASE("affine transform matches the congruence formulas computed by hand") {
    std::mt19937_64 rng(21);
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const Mat A = random_invertible(5, rng);
    const Mat U = random_invertible(5, rng);
    const Vec b = Vec::LinSpaced(5, -1.0, 1.0);
    const PhdaeModel t = apply_transformation(circuit, TransformSpec::affine(A, b, U));

    Vec xt(5);
    xt << 0.1, 0.2, -0.3, 0.4, 0.5;
    const Vec x = A * xt + b;
    const Coefficients o = circuit.evaluate(0.0, x);
    const Coefficients c = t.evaluate(0.0, xt);
    CHECK(max_abs(c.E - U.transpose() * o.E * A) < 1e-12);
    CHECK(max_abs(c.J - U.transpose() * o.J * U) < 1e-12);
    CHECK(max_abs(c.R - U.transpose() * o.R * U) < 1e-12);
    CHECK(max_abs(c.B - U.transpose() * o.B) < 1e-12);
    CHECK(max_abs(c.z - U.inverse() * o.z) < 1e-12);
    CHECK(c.r.isZero(0.0));
    CHECK(t.H(0.0, xt) == Approx(circuit.H(0.0, x)));
    CHECK(validate_structure(t, SampleBox::uniform(5, 5.0), 100, 3).pass);

    const TransformCheck check = check_transform(TransformSpec::affine(A, b, U), {{0.0, xt}});
    CHECK(check.full_column_rank);
    CHECK(check.U_invertible);
    CHECK(check.max_condition_U == Approx(U.jacobiSvd().singularValues()(0) / U.jacobiSvd().singularValues()(4)));
}

TEST_CASE("shift transform of the circuit") {
    const CircuitParams p;
    const DesiredState d = desired_state(p, 10.0);
    const PhdaeModel circuit = build_dc_network(p);
    const PhdaeModel shifted = apply_transformation(circuit, TransformSpec::shift(d.x_star, 5));
    CHECK(validate_structure(shifted, SampleBox::uniform(5, 10.0), 100, 8).pass);
    const Vec zero = Vec::Zero(5);
    CHECK(shifted.H(0.0, zero) == Approx(circuit.H(0.0, d.x_star)));
    CHECK(shifted.evaluate(0.0, zero).z == d.x_star);
}

TEST_CASE("time-dependent change of variables adds E dphi/dt to r") {
    const PhdaeModel decay = decay_model();
    const Vec c = Vec::Constant(1, 0.75);
    TransformSpec spec = TransformSpec::identity(1, 1);
    spec.phi = [c](double t, const Vec& x) -> Vec { return x + t * c; };
    spec.dphi_dt = constant(c);
    spec.time_invariant = false;
    const PhdaeModel moved = apply_transformation(decay, spec);
    CHECK(moved.r(1.0, Vec::Ones(1))[0] == Approx(0.75));
    CHECK_FALSE(moved.time_invariant);
    CHECK(validate_structure(moved, SampleBox::uniform(1, 2.0, 0.0, 2.0), 100, 3).pass);
}

TEST_CASE("singular U is reported at the evaluation point") {
    Mat U = Mat::Identity(1, 1);
    U(0, 0) = 0.0;
    const PhdaeModel bad = apply_transformation(decay_model(), TransformSpec::affine(Mat::Identity(1, 1), Vec::Zero(1), U));
    CHECK_THROWS_AS(bad.evaluate(0.5, Vec::Ones(1)), StructureError);
    try {
        bad.z(0.5, Vec::Ones(1));
    } catch (const StructureError& e) {
        CHECK(std::string(e.what()).find("t=0.5") != std::string::npos);
    }
    const TransformCheck check = check_transform(TransformSpec::affine(Mat::Identity(1, 1), Vec::Zero(1), U),
                                                 {{0.0, Vec::Ones(1)}});
    CHECK_FALSE(check.U_invertible);
}

TEST_CASE("rank-deficient dphi/dx is flagged") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 1.0;
    const TransformCheck check = check_transform(TransformSpec::affine(A, Vec::Zero(2), Mat::Identity(2, 2)),
                                                 {{0.0, Vec::Ones(2)}});
    CHECK_FALSE(check.full_column_rank);
}

TEST_CASE("autonomization keeps the structure and the solution") {
    const PhdaeModel model = time_varying_model();
    const ValidationReport base = validate_structure(model, SampleBox::uniform(1, 2.0, 0.0, 2.0), 100, 4);
    REQUIRE(base.pass);

    const PhdaeModel aut = autonomize(model);
    CHECK(aut.n == 2);
    CHECK(aut.ell == 2);
    CHECK(aut.m == 2);
    CHECK(aut.time_invariant);
    SampleBox box{0.0, 1.0, Vec(2), Vec(2)};
    box.x_lo << -2.0, 0.0;
    box.x_hi << 2.0, 2.0;
    CHECK(validate_structure(aut, box, 100, 4).pass);

    Vec xt(2);
    xt << 0.5, 1.25;
    const Mat E = aut.E(0.0, xt);
    CHECK(E(0, 1) == Approx(model.r(1.25, Vec::Constant(1, 0.5))[0]));
    CHECK(E(1, 1) == 1.0);
    CHECK(E(1, 0) == 0.0);

    const InputFn u = [](double t, const Vec&) { return Vec::Constant(1, std::sin(3.0 * t)); };
    const ButcherTableau tab = gauss_legendre_tableau(2);
    const Trajectory direct = integrate(model, {0.0, 1.0}, Vec::Ones(1), 0.05, tab, u);
    Vec x0(2);
    x0 << 1.0, 0.0;
    const Trajectory lifted = integrate(aut, {0.0, 1.0}, x0, 0.05, tab, autonomous_input(u, 1));
    CHECK(lifted.final_state()[1] == Approx(1.0).epsilon(1e-13));
    CHECK(lifted.final_state()[0] == Approx(direct.final_state()[0]).epsilon(1e-10));
}

TEST_CASE("interconnection of two circuits") {
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const InterconnectionSpec spec = gyrator_coupling();
    const PhdaeModel agg = interconnect(circuit, circuit, spec);
    CHECK(agg.n == 5 + 5 + 4);
    CHECK(agg.ell == 5 + 5 + 4 + 2);
    CHECK(agg.m == 2);
    CHECK(validate_structure(agg, SampleBox::uniform(14, 10.0), 200, 6).pass);

    // The rows of the aggregate encode y^ = y, u^ = u and M u^ + N y^ = 0.
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    Vec xa(14);
    for (Index i = 0; i < 14; ++i) xa[i] = g(rng);
    Vec u(2);
    u << g(rng), g(rng);
    const Coefficients c = agg.evaluate(0.0, xa);
    const Vec rhs = (c.J - c.R) * c.z + c.B * u;
    const Vec x1 = xa.head(5), x2 = xa.segment(5, 5), uh = xa.segment(10, 2), yh = xa.segment(12, 2);
    const Vec y1 = circuit.output(0.0, x1, uh.head(1));
    const Vec y2 = circuit.output(0.0, x2, uh.tail(1));
    CHECK(rhs[10] == Approx(yh[0] - y1[0]));
    CHECK(rhs[11] == Approx(yh[1] - y2[0]));
    CHECK(rhs[12] == Approx(u[0] - uh[0]));
    CHECK(rhs[13] == Approx(u[1] - uh[1]));
    const Vec relation = spec.M_ic * uh + spec.N_ic * yh;
    CHECK(rhs[14] == Approx(relation[0]));
    CHECK(rhs[15] == Approx(relation[1]));
    CHECK(agg.output(0.0, xa, u) == yh);
    CHECK(agg.H(0.0, xa) == Approx(circuit.H(0.0, x1) + circuit.H(0.0, x2)));
}

TEST_CASE("interconnection preconditions") {
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    CHECK_THROWS_AS(interconnect(circuit, circuit, InterconnectionSpec{Mat::Identity(1, 1), Mat::Zero(1, 1)}),
                    DimensionError);
    PhdaeModel varying = circuit;
    varying.time_invariant = false;
    CHECK_THROWS_AS(interconnect(varying, circuit, gyrator_coupling()), StructureError);
    const PhdaeModel open = interconnect(circuit, circuit, InterconnectionSpec{Mat::Zero(0, 2), Mat::Zero(0, 2)});
    CHECK(open.ell == open.n);
}

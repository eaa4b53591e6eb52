#include "phdae/circuits.hpp"
#include "phdae/collocation.hpp"
#include "phdae/dirac.hpp"
#include "phdae/error.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace phdae;
using Catch::Approx;

namespace {

Vec random_vec(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

Mat random_skew(Index d, std::mt19937_64& rng) {
    Mat a(d, d);
    for (Index j = 0; j < d; ++j) a.col(j) = random_vec(d, rng);
    return a - a.transpose();
}

}  // namespace

TEST_CASE("structure operator layout and skewness") {
    std::mt19937_64 rng(1);
    const Mat gamma = random_skew(3, rng);
    const Mat K = structure_operator(gamma);
    REQUIRE(K.rows() == 6);
    CHECK(K.topLeftCorner(3, 3) == gamma);
    CHECK(K.topRightCorner(3, 3) == Mat::Identity(3, 3));
    CHECK(K.bottomLeftCorner(3, 3) == -Mat::Identity(3, 3));
    CHECK(K.bottomRightCorner(3, 3).isZero(0.0));
    CHECK((K + K.transpose()).isZero(0.0));
}

TEST_CASE("members built from efforts are power conserving and isotropic") {
    std::mt19937_64 rng(2);
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const Index d = 2 * (circuit.ell + circuit.m);
    for (int k = 0; k < 20; ++k) {
        const Vec x = random_vec(5, rng);
        const DiracPoint p = member_from_effort(circuit, 0.0, x, random_vec(d, rng));
        const DiracPoint q = member_from_effort(circuit, 0.0, x, random_vec(d, rng));
        const Vec e = p.effort();
        const double bound = 1e-10 * (1.0 + e.squaredNorm() * structure_operator(circuit, 0.0, x).norm());
        CHECK(std::abs(pairing(p)) <= bound);
        CHECK(membership(circuit, p, 1e-12).member);
        CHECK(std::abs(bilinear(p, q)) <= 1e-9 * (1.0 + p.effort().norm() * q.effort().norm()));
    }
}

TEST_CASE("separating member witnesses non-membership") {
    std::mt19937_64 rng(3);
    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const Vec x = random_vec(5, rng);
    const Index d = 2 * (circuit.ell + circuit.m);
    const DiracPoint outside = DiracPoint::from_stacked(random_vec(d, rng), random_vec(d, rng), 5, 1, 0.0, x);
    CHECK_FALSE(membership(circuit, outside, 1e-8).member);
    const DiracPoint q = separating_member(circuit, outside);
    CHECK(membership(circuit, q, 1e-10).member);
    CHECK(bilinear(outside, q) == Approx(1.0).epsilon(1e-10));

    const DiracPoint inside = member_from_effort(circuit, 0.0, x, random_vec(d, rng));
    CHECK_THROWS_AS(separating_member(circuit, inside), Error);
}

TEST_CASE("dimension check on random skew structures") {
    std::mt19937_64 rng(4);
    for (Index d = 1; d <= 8; ++d) {
        const DimensionReport r = dimension_check(random_skew(d, rng));
        CHECK(r.pass);
        CHECK(r.dimension == 2 * d);
        CHECK(r.expected == 2 * d);
        CHECK(r.rank == 2 * d);
    }
    Mat not_skew = Mat::Identity(2, 2);
    CHECK_FALSE(dimension_check(not_skew).pass);
    CHECK(dimension_check(Mat(0, 0)).pass);
    CHECK(dimension_check(build_dc_network(CircuitParams{}), 0.0, Vec::Ones(5)).pass);
}

TEST_CASE("lifting an exact circuit trajectory point gives a member in the storage fiber") {
    const CircuitParams p;
    const PhdaeModel circuit = build_dc_network(p);
    const double I = 0.4, V1 = 1.5, V2 = -0.7, u = 2.0;
    Vec x(5);
    x << I, V1, V2, (V1 + u) / p.RG, V2 / p.RR;
    Vec xdot(5);
    xdot << (-V1 + V2 - p.RL * I) / p.L, (I - x[3]) / p.C1, (-I - x[4]) / p.C2, 0.0, 0.0;
    const Vec uu = Vec::Constant(1, u);
    const DiracPoint pt = lift(circuit, 0.0, x, xdot, uu, circuit.output(0.0, x, uu));
    const MembershipResult m = membership(circuit, pt, 1e-12);
    CHECK(m.member);
    CHECK(m.in_storage_fiber);
    // Pairing equals -dH/dt - <e_d, f_d> + <y, u> summed, which vanishes on solutions.
    CHECK(std::abs(pairing(pt)) < 1e-12);

    Vec wrong = xdot;
    wrong[0] += 0.1;
    const DiracPoint off = lift(circuit, 0.0, x, wrong, uu, circuit.output(0.0, x, uu));
    CHECK_FALSE(membership(circuit, off, 1e-8).member);
}

TEST_CASE("flow and effort stacking round trips") {
    std::mt19937_64 rng(5);
    const Vec f = random_vec(12, rng);
    const Vec e = random_vec(12, rng);
    const DiracPoint p = DiracPoint::from_stacked(f, e, 5, 1, 0.25, Vec::Zero(5));
    CHECK(p.flow() == f);
    CHECK(p.effort() == e);
    CHECK(p.f_s.size() == 5);
    CHECK(p.f_p.size() == 1);
    CHECK(p.f_d.size() == 6);
    CHECK(pairing(p) == Approx(f.dot(e)));
}

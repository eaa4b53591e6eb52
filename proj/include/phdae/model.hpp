#pragma once

#include "phdae/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace phdae {

/// All coefficient matrices of a model evaluated at one point (t, x).
struct Coefficients {
    Mat E, J, R, B, P, S, N;
    Vec z, r;
};

/// Port-Hamiltonian descriptor system
///
///     E(t,x) x' + r(t,x) = (J(t,x) - R(t,x)) z(t,x) + (B(t,x) - P(t,x)) u
///                      y = (B(t,x) + P(t,x))^T z(t,x) + (S(t,x) - N(t,x)) u
///
/// with Hamiltonian H(t,x). E is ell x n, J and R are ell x ell, B and P are ell x m,
/// S and N are m x m. The structural conditions (Gamma skew, W symmetric positive
/// semidefinite, dH/dx = E^T z, dH/dt = z^T r) are not enforced on construction; use
/// validate_structure().
///
/// Treat instances as immutable once built. Every member function is const and
/// the coefficient functions must be pure, so a model can be shared across threads.
struct PhdaeModel {
    Index n = 0;
    Index ell = 0;
    Index m = 0;

    MatrixFn E, J, R, B, P, S, N;
    VectorFn z, r;
    ScalarFn H;

    /// Optional analytic gradients. When empty, central differences of H are used.
    VectorFn grad_H_x;
    ScalarFn grad_H_t;

    TimeInterval time_interval;

    /// True when no coefficient depends on t. Required by interconnect().
    bool time_invariant = false;

    Coefficients evaluate(double t, const Vec& x) const;

    Vec grad_x(double t, const Vec& x) const;
    double grad_t(double t, const Vec& x) const;

    /// Gamma = [[J, B], [-B^T, N]].
    Mat gamma(double t, const Vec& x) const;
    /// W = [[R, P], [P^T, S]].
    Mat dissipation(double t, const Vec& x) const;

    Vec output(double t, const Vec& x, const Vec& u) const;

    /// E x' + r - (J - R) z - (B - P) u. Zero along exact solutions.
    Vec residual(double t, const Vec& x, const Vec& xdot, const Vec& u) const;

    void require_state(const Vec& x, const char* what = "state") const;
    void require_input(const Vec& u, const char* what = "input") const;
};

Mat gamma_of(const Coefficients& c);
Mat dissipation_of(const Coefficients& c);
Vec output_of(const Coefficients& c, const Vec& u);
Vec residual_of(const Coefficients& c, const Vec& xdot, const Vec& u);

/// Constant-coefficient helpers.
MatrixFn constant(Mat value);
VectorFn constant(Vec value);

/// Central-difference step used for default gradients: cbrt(eps) * max(1, |coordinate|).
double fd_step(double coordinate);

/// Linear time-invariant model with quadratic Hamiltonian
/// H(x) = 1/2 x^T Q x + v^T x + c and affine effort z(x) = Z x + w.
struct LtiModel {
    Mat E, J, R, B, P, S, N;
    Mat Z;
    Vec w;
    Mat Q;
    Vec v;
    double c = 0.0;

    Index n() const { return E.cols(); }
    Index ell() const { return E.rows(); }
    Index m() const { return B.cols(); }

    /// Zero model of the given dimensions.
    static LtiModel zeros(Index n, Index ell, Index m);
};

/// Checks the LTI invariants (dimensions, Q = Q^T, Q = E^T Z, v = E^T w) and wraps the
/// data as constant coefficient functions with analytic gradient Q x + v.
/// Throws StructureError naming the violated condition.
PhdaeModel lti_to_model(const LtiModel& lti, double tol = 1e-12);

/// Sampling region for validate_structure.
struct SampleBox {
    double t_lo = 0.0;
    double t_hi = 1.0;
    Vec x_lo;
    Vec x_hi;

    static SampleBox uniform(Index n, double half_width, double t_lo = 0.0, double t_hi = 1.0);
};

struct ConditionCheck {
    std::string name;
    /// Raw worst value: a norm for residual checks, the most negative eigenvalue for psd.
    double worst = 0.0;
    /// Worst value scaled by the local coefficient magnitude; compared with `tolerance`.
    double scaled = 0.0;
    double tolerance = 0.0;
    bool ok = true;
    double t = 0.0;
    Vec x;
};

struct ValidationReport {
    /// skew, symmetry, psd, grad_x, grad_t in that order.
    std::vector<ConditionCheck> checks;
    bool pass = false;
    /// Set when a coefficient evaluated to a non-finite value; names the point.
    std::optional<std::string> failure;
    /// Advisory only: smallest sampled value of H. Never affects `pass`.
    double min_hamiltonian = 0.0;

    int count = 0;
    std::uint64_t seed = 0;
    SampleBox box;

    const ConditionCheck& check(const std::string& name) const;
};

std::string to_string(const ValidationReport& report);

/// Samples (t, x) uniformly from `box` and checks the two structural conditions at
/// every sample. The samples are drawn serially from `seed`; evaluation runs in an
/// OpenMP loop and the merge is by sample index, so the report does not depend on
/// the thread count.
ValidationReport validate_structure(const PhdaeModel& model, const SampleBox& box, int count,
                                    std::uint64_t seed, double tol = 1e-9);

/// Single-threaded reference for validate_structure. Produces an identical report.
ValidationReport validate_structure_serial(const PhdaeModel& model, const SampleBox& box, int count,
                                           std::uint64_t seed, double tol = 1e-9);

/// dH/dt - ( -[z;u]^T W [z;u] + u^T y ) with dH/dt = dH/dt|_x + grad_x(H)^T x'.
double pbe_residual(const PhdaeModel& model, double t, const Vec& x, const Vec& xdot, const Vec& u,
                    const Vec& y);

}  // namespace phdae

#pragma once

#include "phdae/model.hpp"

#include <functional>
#include <optional>

namespace phdae {

/// Change of variables x = phi(t, x~) together with a pointwise invertible
/// left factor U(t, x~) applied to the equations.
struct TransformSpec {
    Index n_new = 0;
    VectorFn phi;
    /// Jacobian of phi with respect to x~, n x n_new.
    MatrixFn dphi_dx;
    /// Partial derivative of phi with respect to t, length n.
    VectorFn dphi_dt;
    /// ell x ell.
    MatrixFn U;
    /// Optional x~ = phi^{-1}(t, x); needed only to test equivalence of solutions.
    VectorFn phi_inverse;
    /// True when neither phi nor U depends on t.
    bool time_invariant = false;

    static TransformSpec identity(Index n, Index ell);
    /// phi(x~) = A x~ + b, constant U.
    static TransformSpec affine(const Mat& A, const Vec& b, const Mat& U);
    /// phi(x~) = x~ + shift, U = I.
    static TransformSpec shift(const Vec& shift, Index ell);
};

struct TransformCheck {
    /// Smallest singular value of dphi/dx over the tested points relative to its largest.
    double min_jacobian_rank_ratio = 0.0;
    bool full_column_rank = false;
    /// Largest 2-norm condition number of U over the tested points.
    double max_condition_U = 0.0;
    bool U_invertible = false;
};

/// Checks the invariants of `spec` at the given points.
TransformCheck check_transform(const TransformSpec& spec, const std::vector<std::pair<double, Vec>>& points);

/// Transformed model
///   E~ = U^T E(phi) dphi/dx,  J~ = U^T J(phi) U,  R~ = U^T R(phi) U,
///   B~ = U^T B(phi),          P~ = U^T P(phi),    z~ = U^{-1} z(phi),
///   r~ = U^T (r(phi) + E(phi) dphi/dt),           H~ = H(t, phi),
/// with S and N composed with phi. Evaluating z~ at a point where U is singular throws
/// StructureError naming (t, x~).
PhdaeModel apply_transformation(const PhdaeModel& model, const TransformSpec& spec);

/// Appends time as a state: x~ = (x, tau), one extra equation tau' = 1 and one extra
/// input channel whose value is always 1 (see autonomous_input). The result is time
/// invariant and its coefficients only read the appended coordinate.
PhdaeModel autonomize(const PhdaeModel& model);

/// Input law for an autonomized model: (u(tau, x), 1).
InputFn autonomous_input(InputFn input, Index m);

/// Linear relation M_ic u + N_ic y = 0 on the aggregated ports u = (u1, u2), y = (y1, y2).
struct InterconnectionSpec {
    Mat M_ic;
    Mat N_ic;

    Index relations() const { return M_ic.rows(); }

    /// Rank of [M_ic N_ic] equals k. Advisory.
    bool full_row_rank(double tol = 1e-12) const;
};

/// Aggregates two time-invariant models under a linear port relation.
///
/// State (x1, x2, u^, y^) of size n1 + n2 + 2m where u^ and y^ copy the aggregated input
/// and output. The equations are
///
///   [E 0 0] (x, u^, y^)' = [[Gamma - W, T], [-T^T, [[0, -N_ic^T], [N_ic, 0]]]] (z, u^, y^, 0_k) + (0, 0, I_m, 0) u
///
/// with T = [[0, 0], [I_m, -M_ic^T]], Gamma and W the block-diagonal extended matrices
/// reordered to (z1, z2, u1, u2), so ell = ell1 + ell2 + 2m + k. The new input has size m,
/// the output is y^ and H = H1 + H2.
PhdaeModel interconnect(const PhdaeModel& m1, const PhdaeModel& m2, const InterconnectionSpec& spec);

}  // namespace phdae

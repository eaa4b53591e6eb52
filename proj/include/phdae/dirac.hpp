#pragma once

#include "phdae/model.hpp"

namespace phdae {

/// Flow/effort pair partitioned into storage, port and dissipation parts, attached to
/// the base point (t, x) at which the structure operator K is evaluated.
struct DiracPoint {
    Vec f_s, f_p, f_d;
    Vec e_s, e_p, e_d;
    double t = 0.0;
    Vec x;

    /// Stacked (f_s, f_p, f_d).
    Vec flow() const;
    /// Stacked (e_s, e_p, e_d).
    Vec effort() const;

    static DiracPoint from_stacked(const Vec& f, const Vec& e, Index ell, Index m, double t, Vec x);
};

/// K = [[Gamma, I], [-I, 0]], size 2(ell + m). Skew whenever Gamma is.
Mat structure_operator(const Mat& gamma);
Mat structure_operator(const PhdaeModel& model, double t, const Vec& x);

/// <e, f> = e_s.f_s + e_p.f_p + e_d.f_d.
double pairing(const DiracPoint& p);

/// Symmetric bilinear form <<p, q>> = <e_p, f_q> + <e_q, f_p>.
double bilinear(const DiracPoint& p, const DiracPoint& q);

struct MembershipResult {
    /// ||f + K e||_inf.
    double residual = 0.0;
    bool member = false;
    /// f_s lies in range(E(x)) up to a rank tolerance of 1e-10 * ||E||.
    bool in_storage_fiber = false;
};

MembershipResult membership(const PhdaeModel& model, const DiracPoint& p, double tol);

/// Flows and efforts of a trajectory point:
///   f_s = -(E x' + r), e_s = z, f_p = y, e_p = u, f_d = (z, u), e_d = -W f_d.
/// For autonomous models r = 0 and f_s = -E x'.
DiracPoint lift(const PhdaeModel& model, double t, const Vec& x, const Vec& xdot, const Vec& u, const Vec& y);

/// Member built from an effort: f = -K e.
DiracPoint member_from_effort(const PhdaeModel& model, double t, const Vec& x, const Vec& effort);

/// For a point p outside D_x, a member q with <<p, q>> = 1. Throws if p is a member.
DiracPoint separating_member(const PhdaeModel& model, const DiracPoint& p);

struct DimensionReport {
    /// Rank of [I K].
    Index rank = 0;
    /// Dimension of the solution space of f + K e = 0.
    Index dimension = 0;
    /// 2(ell + m).
    Index expected = 0;
    bool pass = false;
};

/// Numerical rank of the membership system with threshold 1e-10 * sigma_max.
DimensionReport dimension_check(const Mat& gamma);
DimensionReport dimension_check(const PhdaeModel& model, double t, const Vec& x);

}  // namespace phdae

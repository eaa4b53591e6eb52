#include "phdae/dirac.hpp"

#include "phdae/error.hpp"

namespace phdae {

Vec DiracPoint::flow() const {
    Vec f(f_s.size() + f_p.size() + f_d.size());
    f << f_s, f_p, f_d;
    return f;
}

Vec DiracPoint::effort() const {
    Vec e(e_s.size() + e_p.size() + e_d.size());
    e << e_s, e_p, e_d;
    return e;
}

DiracPoint DiracPoint::from_stacked(const Vec& f, const Vec& e, Index ell, Index m, double t, Vec x) {
    const Index d = ell + m;
    if (f.size() != 2 * d || e.size() != 2 * d) throw DimensionError("Dirac point: flow/effort size mismatch");
    DiracPoint p;
    p.f_s = f.head(ell);
    p.f_p = f.segment(ell, m);
    p.f_d = f.tail(d);
    p.e_s = e.head(ell);
    p.e_p = e.segment(ell, m);
    p.e_d = e.tail(d);
    p.t = t;
    p.x = std::move(x);
    return p;
}

Mat structure_operator(const Mat& gamma) {
    const Index d = gamma.rows();
    Mat k = Mat::Zero(2 * d, 2 * d);
    k.topLeftCorner(d, d) = gamma;
    k.topRightCorner(d, d) = Mat::Identity(d, d);
    k.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
    return k;
}

Mat structure_operator(const PhdaeModel& model, double t, const Vec& x) {
    return structure_operator(model.gamma(t, x));
}

double pairing(const DiracPoint& p) { return p.e_s.dot(p.f_s) + p.e_p.dot(p.f_p) + p.e_d.dot(p.f_d); }

double bilinear(const DiracPoint& p, const DiracPoint& q) {
    return p.effort().dot(q.flow()) + q.effort().dot(p.flow());
}

MembershipResult membership(const PhdaeModel& model, const DiracPoint& p, double tol) {
    const Coefficients c = model.evaluate(p.t, p.x);
    const Mat k = structure_operator(gamma_of(c));
    const Vec f = p.flow();
    const Vec e = p.effort();
    if (f.size() != k.rows() || e.size() != k.rows()) throw DimensionError("Dirac point does not match the model");

    MembershipResult out;
    out.residual = (f + k * e).cwiseAbs().maxCoeff();
    out.member = out.residual <= tol;

    if (c.E.size() == 0) {
        out.in_storage_fiber = p.f_s.size() == 0 || p.f_s.isZero(0.0);
    } else {
        Eigen::ColPivHouseholderQR<Mat> qr(c.E);
        qr.setThreshold(1e-10);
        const Vec projected = c.E * qr.solve(p.f_s);
        const double scale = 1.0 + c.E.norm() * (1.0 + p.f_s.norm());
        out.in_storage_fiber = (projected - p.f_s).norm() <= 1e-10 * scale;
    }
    return out;
}

DiracPoint lift(const PhdaeModel& model, double t, const Vec& x, const Vec& xdot, const Vec& u, const Vec& y) {
    model.require_state(xdot, "state rate");
    model.require_input(u);
    model.require_input(y, "output");
    const Coefficients c = model.evaluate(t, x);
    DiracPoint p;
    p.t = t;
    p.x = x;
    p.f_s = -(c.E * xdot + c.r);
    p.e_s = c.z;
    p.f_p = y;
    p.e_p = u;
    p.f_d.resize(model.ell + model.m);
    p.f_d << c.z, u;
    p.e_d = -dissipation_of(c) * p.f_d;
    return p;
}

DiracPoint member_from_effort(const PhdaeModel& model, double t, const Vec& x, const Vec& effort) {
    const Mat k = structure_operator(model, t, x);
    if (effort.size() != k.rows()) throw DimensionError("effort size must be 2(ell + m)");
    return DiracPoint::from_stacked(-k * effort, effort, model.ell, model.m, t, x);
}

DiracPoint separating_member(const PhdaeModel& model, const DiracPoint& p) {
    const Mat k = structure_operator(model, p.t, p.x);
    const Vec defect = p.flow() + k * p.effort();
    const double norm2 = defect.squaredNorm();
    if (norm2 == 0.0) throw Error("separating_member: point is a member of D_x");
    return member_from_effort(model, p.t, p.x, defect / norm2);
}

DimensionReport dimension_check(const Mat& gamma) {
    const Index d = gamma.rows();
    const Mat k = structure_operator(gamma);
    Mat system(2 * d, 4 * d);
    system << Mat::Identity(2 * d, 2 * d), k;

    DimensionReport out;
    out.expected = 2 * d;
    if (d == 0) {
        out.pass = true;
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(system);
    const Vec& s = svd.singularValues();
    const double threshold = 1e-10 * s.maxCoeff();
    out.rank = (s.array() > threshold).count();
    out.dimension = 4 * d - out.rank;
    // Isotropy of the graph of K needs K skew as well as the dimension count.
    const bool skew = (k + k.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + k.cwiseAbs().maxCoeff());
    out.pass = skew && out.dimension == out.expected;
    return out;
}

DimensionReport dimension_check(const PhdaeModel& model, double t, const Vec& x) {
    return dimension_check(model.gamma(t, x));
}

}  // namespace phdae

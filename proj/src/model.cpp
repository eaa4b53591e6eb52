#include "phdae/model.hpp"

#include "phdae/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace phdae {

namespace {

void require_shape(const Mat& m, Index rows, Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
        throw DimensionError(os.str());
    }
}

void require_size(const Vec& v, Index size, const char* name) {
    if (v.size() != size) {
        std::ostringstream os;
        os << name << " has size " << v.size() << ", expected " << size;
        throw DimensionError(os.str());
    }
}

}  // namespace

Coefficients PhdaeModel::evaluate(double t, const Vec& x) const {
    require_state(x);
    Coefficients c{E(t, x), J(t, x), R(t, x), B(t, x), P(t, x), S(t, x), N(t, x), z(t, x), r(t, x)};
    require_shape(c.E, ell, n, "E");
    require_shape(c.J, ell, ell, "J");
    require_shape(c.R, ell, ell, "R");
    require_shape(c.B, ell, m, "B");
    require_shape(c.P, ell, m, "P");
    require_shape(c.S, m, m, "S");
    require_shape(c.N, m, m, "N");
    require_size(c.z, ell, "z");
    require_size(c.r, ell, "r");
    return c;
}

double fd_step(double coordinate) {
    static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    return base * std::max(1.0, std::abs(coordinate));
}

Vec PhdaeModel::grad_x(double t, const Vec& x) const {
    if (grad_H_x) return grad_H_x(t, x);
    Vec g(n);
    Vec xp = x;
    for (Index i = 0; i < n; ++i) {
        const double h = fd_step(x[i]);
        xp[i] = x[i] + h;
        const double fp = H(t, xp);
        xp[i] = x[i] - h;
        const double fm = H(t, xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double PhdaeModel::grad_t(double t, const Vec& x) const {
    if (grad_H_t) return grad_H_t(t, x);
    const double h = fd_step(t);
    return (H(t + h, x) - H(t - h, x)) / (2.0 * h);
}

Mat gamma_of(const Coefficients& c) {
    const Index ell = c.J.rows();
    const Index m = c.B.cols();
    Mat g(ell + m, ell + m);
    g << c.J, c.B, -c.B.transpose(), c.N;
    return g;
}

Mat dissipation_of(const Coefficients& c) {
    const Index ell = c.R.rows();
    const Index m = c.P.cols();
    Mat w(ell + m, ell + m);
    w << c.R, c.P, c.P.transpose(), c.S;
    return w;
}

Vec output_of(const Coefficients& c, const Vec& u) {
    return (c.B + c.P).transpose() * c.z + (c.S - c.N) * u;
}

Vec residual_of(const Coefficients& c, const Vec& xdot, const Vec& u) {
    return c.E * xdot + c.r - (c.J - c.R) * c.z - (c.B - c.P) * u;
}

Mat PhdaeModel::gamma(double t, const Vec& x) const { return gamma_of(evaluate(t, x)); }

Mat PhdaeModel::dissipation(double t, const Vec& x) const { return dissipation_of(evaluate(t, x)); }

Vec PhdaeModel::output(double t, const Vec& x, const Vec& u) const {
    require_input(u);
    return output_of(evaluate(t, x), u);
}

Vec PhdaeModel::residual(double t, const Vec& x, const Vec& xdot, const Vec& u) const {
    require_state(xdot, "state rate");
    require_input(u);
    return residual_of(evaluate(t, x), xdot, u);
}

void PhdaeModel::require_state(const Vec& x, const char* what) const { require_size(x, n, what); }

void PhdaeModel::require_input(const Vec& u, const char* what) const { require_size(u, m, what); }

MatrixFn constant(Mat value) {
    return [value = std::move(value)](double, const Vec&) { return value; };
}

VectorFn constant(Vec value) {
    return [value = std::move(value)](double, const Vec&) { return value; };
}

LtiModel LtiModel::zeros(Index n, Index ell, Index m) {
    LtiModel lti;
    lti.E = Mat::Zero(ell, n);
    lti.J = Mat::Zero(ell, ell);
    lti.R = Mat::Zero(ell, ell);
    lti.B = Mat::Zero(ell, m);
    lti.P = Mat::Zero(ell, m);
    lti.S = Mat::Zero(m, m);
    lti.N = Mat::Zero(m, m);
    lti.Z = Mat::Zero(ell, n);
    lti.w = Vec::Zero(ell);
    lti.Q = Mat::Zero(n, n);
    lti.v = Vec::Zero(n);
    return lti;
}

PhdaeModel lti_to_model(const LtiModel& lti, double tol) {
    const Index n = lti.n();
    const Index ell = lti.ell();
    const Index m = lti.m();
    require_shape(lti.J, ell, ell, "J");
    require_shape(lti.R, ell, ell, "R");
    require_shape(lti.B, ell, m, "B");
    require_shape(lti.P, ell, m, "P");
    require_shape(lti.S, m, m, "S");
    require_shape(lti.N, m, m, "N");
    require_shape(lti.Z, ell, n, "Z");
    require_size(lti.w, ell, "w");
    require_shape(lti.Q, n, n, "Q");
    require_size(lti.v, n, "v");

    const auto scale = [](const auto& a) { return 1.0 + (a.size() ? a.cwiseAbs().maxCoeff() : 0.0); };
    const auto maxabs = [](const auto& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; };

    if (maxabs(lti.Q - lti.Q.transpose()) > tol * scale(lti.Q)) {
        throw StructureError("Q is not symmetric; H(x) = 1/2 x^T Q x + v^T x + c requires Q = Q^T");
    }
    const Mat etz = lti.E.transpose() * lti.Z;
    if (maxabs(lti.Q - etz) > tol * (scale(lti.Q) + maxabs(etz))) {
        std::ostringstream os;
        os << "Q differs from E^T Z by " << maxabs(lti.Q - etz)
           << "; the gradient condition dH/dx = E^T z fails";
        throw StructureError(os.str());
    }
    const Vec etw = lti.E.transpose() * lti.w;
    if (maxabs(lti.v - etw) > tol * (scale(lti.v) + maxabs(etw))) {
        std::ostringstream os;
        os << "v differs from E^T w by " << maxabs(lti.v - etw)
           << "; the gradient condition dH/dx = E^T z fails";
        throw StructureError(os.str());
    }

    PhdaeModel model;
    model.n = n;
    model.ell = ell;
    model.m = m;
    model.E = constant(lti.E);
    model.J = constant(lti.J);
    model.R = constant(lti.R);
    model.B = constant(lti.B);
    model.P = constant(lti.P);
    model.S = constant(lti.S);
    model.N = constant(lti.N);
    model.z = [Z = lti.Z, w = lti.w](double, const Vec& x) -> Vec { return Z * x + w; };
    model.r = constant(Vec(Vec::Zero(ell)));
    model.H = [Q = lti.Q, v = lti.v, c = lti.c](double, const Vec& x) {
        return 0.5 * x.dot(Q * x) + v.dot(x) + c;
    };
    model.grad_H_x = [Q = lti.Q, v = lti.v](double, const Vec& x) -> Vec { return Q * x + v; };
    model.grad_H_t = [](double, const Vec&) { return 0.0; };
    model.time_invariant = true;
    return model;
}

double pbe_residual(const PhdaeModel& model, double t, const Vec& x, const Vec& xdot, const Vec& u,
                    const Vec& y) {
    model.require_state(xdot, "state rate");
    model.require_input(u);
    model.require_input(y, "output");
    const Coefficients c = model.evaluate(t, x);
    const double dHdt = model.grad_t(t, x) + model.grad_x(t, x).dot(xdot);
    Vec zu(model.ell + model.m);
    zu << c.z, u;
    const double dissipated = zu.dot(dissipation_of(c) * zu);
    return dHdt + dissipated - u.dot(y);
}

}  // namespace phdae

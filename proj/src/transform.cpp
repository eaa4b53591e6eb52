#include "phdae/transform.hpp"

#include "phdae/error.hpp"

#include <iomanip>
#include <sstream>

namespace phdae {

namespace {

std::string describe(double t, const Vec& x) {
    std::ostringstream os;
    os << std::setprecision(17) << "t=" << t << " x~=[";
    for (Index i = 0; i < x.size(); ++i) os << (i ? " " : "") << x[i];
    os << "]";
    return os.str();
}

Vec solve_with_U(const Mat& U, const Vec& rhs, double t, const Vec& x) {
    Eigen::FullPivLU<Mat> lu(U);
    if (!lu.isInvertible()) throw StructureError("transformation matrix U is singular at " + describe(t, x));
    return lu.solve(rhs);
}

}  // namespace

TransformSpec TransformSpec::identity(Index n, Index ell) {
    TransformSpec spec;
    spec.n_new = n;
    spec.phi = [](double, const Vec& x) { return x; };
    spec.dphi_dx = constant(Mat(Mat::Identity(n, n)));
    spec.dphi_dt = constant(Vec(Vec::Zero(n)));
    spec.U = constant(Mat(Mat::Identity(ell, ell)));
    spec.phi_inverse = [](double, const Vec& x) { return x; };
    spec.time_invariant = true;
    return spec;
}

TransformSpec TransformSpec::affine(const Mat& A, const Vec& b, const Mat& U) {
    if (A.rows() != b.size()) throw DimensionError("affine transform: A and b disagree");
    TransformSpec spec;
    spec.n_new = A.cols();
    spec.phi = [A, b](double, const Vec& x) -> Vec { return A * x + b; };
    spec.dphi_dx = constant(A);
    spec.dphi_dt = constant(Vec(Vec::Zero(A.rows())));
    spec.U = constant(U);
    if (A.rows() == A.cols()) {
        Eigen::FullPivLU<Mat> lu(A);
        if (lu.isInvertible()) {
            spec.phi_inverse = [lu, b](double, const Vec& x) -> Vec { return lu.solve(x - b); };
        }
    }
    spec.time_invariant = true;
    return spec;
}

TransformSpec TransformSpec::shift(const Vec& shift, Index ell) {
    const Index n = shift.size();
    TransformSpec spec;
    spec.n_new = n;
    spec.phi = [shift](double, const Vec& x) -> Vec { return x + shift; };
    spec.dphi_dx = constant(Mat(Mat::Identity(n, n)));
    spec.dphi_dt = constant(Vec(Vec::Zero(n)));
    spec.U = constant(Mat(Mat::Identity(ell, ell)));
    spec.phi_inverse = [shift](double, const Vec& x) -> Vec { return x - shift; };
    spec.time_invariant = true;
    return spec;
}

TransformCheck check_transform(const TransformSpec& spec,
                               const std::vector<std::pair<double, Vec>>& points) {
    TransformCheck out;
    out.min_jacobian_rank_ratio = std::numeric_limits<double>::infinity();
    out.full_column_rank = true;
    out.U_invertible = true;
    for (const auto& [t, x] : points) {
        const Mat D = spec.dphi_dx(t, x);
        Eigen::JacobiSVD<Mat> svd_d(D);
        const Vec& sd = svd_d.singularValues();
        const double ratio = sd.size() ? sd.minCoeff() / std::max(sd.maxCoeff(), 1e-300) : 1.0;
        out.min_jacobian_rank_ratio = std::min(out.min_jacobian_rank_ratio, ratio);
        if (D.cols() > D.rows() || ratio <= 1e-12) out.full_column_rank = false;

        const Mat U = spec.U(t, x);
        Eigen::JacobiSVD<Mat> svd_u(U);
        const Vec& su = svd_u.singularValues();
        const double cond = su.size() ? su.maxCoeff() / su.minCoeff() : 1.0;
        out.max_condition_U = std::max(out.max_condition_U, cond);
        if (!std::isfinite(cond) || cond > 1e12) out.U_invertible = false;
    }
    return out;
}

PhdaeModel apply_transformation(const PhdaeModel& model, const TransformSpec& spec) {
    if (!spec.phi || !spec.dphi_dx || !spec.dphi_dt || !spec.U) {
        throw Error("apply_transformation: phi, dphi_dx, dphi_dt and U are all required");
    }
    const Index n = model.n;
    const Index ell = model.ell;
    const Index n_new = spec.n_new;

    // Shape checks run on every evaluation since phi may be nonlinear.
    auto at = [spec, n](double t, const Vec& xt) -> Vec {
        Vec x = spec.phi(t, xt);
        if (x.size() != n) throw DimensionError("phi returns a vector of the wrong size");
        return x;
    };
    auto U_at = [spec, ell](double t, const Vec& xt) -> Mat {
        Mat U = spec.U(t, xt);
        if (U.rows() != ell || U.cols() != ell) throw DimensionError("U must be ell x ell");
        return U;
    };

    PhdaeModel out;
    out.n = n_new;
    out.ell = ell;
    out.m = model.m;
    out.time_interval = model.time_interval;
    out.time_invariant = model.time_invariant && spec.time_invariant;

    out.E = [model, spec, at, U_at](double t, const Vec& xt) -> Mat {
        return U_at(t, xt).transpose() * model.E(t, at(t, xt)) * spec.dphi_dx(t, xt);
    };
    out.J = [model, at, U_at](double t, const Vec& xt) -> Mat {
        const Mat U = U_at(t, xt);
        return U.transpose() * model.J(t, at(t, xt)) * U;
    };
    out.R = [model, at, U_at](double t, const Vec& xt) -> Mat {
        const Mat U = U_at(t, xt);
        return U.transpose() * model.R(t, at(t, xt)) * U;
    };
    out.B = [model, at, U_at](double t, const Vec& xt) -> Mat {
        return U_at(t, xt).transpose() * model.B(t, at(t, xt));
    };
    out.P = [model, at, U_at](double t, const Vec& xt) -> Mat {
        return U_at(t, xt).transpose() * model.P(t, at(t, xt));
    };
    out.S = [model, at](double t, const Vec& xt) -> Mat { return model.S(t, at(t, xt)); };
    out.N = [model, at](double t, const Vec& xt) -> Mat { return model.N(t, at(t, xt)); };
    out.z = [model, at, U_at](double t, const Vec& xt) -> Vec {
        return solve_with_U(U_at(t, xt), model.z(t, at(t, xt)), t, xt);
    };
    out.r = [model, spec, at, U_at](double t, const Vec& xt) -> Vec {
        const Vec x = at(t, xt);
        return U_at(t, xt).transpose() * (model.r(t, x) + model.E(t, x) * spec.dphi_dt(t, xt));
    };
    out.H = [model, at](double t, const Vec& xt) { return model.H(t, at(t, xt)); };

    if (model.grad_H_x) {
        out.grad_H_x = [model, spec, at](double t, const Vec& xt) -> Vec {
            return spec.dphi_dx(t, xt).transpose() * model.grad_H_x(t, at(t, xt));
        };
        if (model.grad_H_t) {
            out.grad_H_t = [model, spec, at](double t, const Vec& xt) {
                const Vec x = at(t, xt);
                return model.grad_H_t(t, x) + model.grad_H_x(t, x).dot(spec.dphi_dt(t, xt));
            };
        }
    }
    return out;
}

PhdaeModel autonomize(const PhdaeModel& model) {
    const Index n = model.n;
    const Index ell = model.ell;
    const Index m = model.m;

    // x~ = (x, tau); every coefficient is evaluated at (tau, x).
    const auto split = [n](const Vec& xt) { return std::pair<double, Vec>{xt[n], xt.head(n)}; };

    PhdaeModel out;
    out.n = n + 1;
    out.ell = ell + 1;
    out.m = m + 1;
    out.time_interval = model.time_interval;
    out.time_invariant = true;

    out.E = [model, split, n, ell](double, const Vec& xt) -> Mat {
        const auto [tau, x] = split(xt);
        Mat e = Mat::Zero(ell + 1, n + 1);
        e.topLeftCorner(ell, n) = model.E(tau, x);
        e.topRightCorner(ell, 1) = model.r(tau, x);
        e(ell, n) = 1.0;
        return e;
    };
    const auto padded = [split](MatrixFn f, Index rows, Index cols) -> MatrixFn {
        return [f = std::move(f), split, rows, cols](double, const Vec& xt) -> Mat {
            const auto [tau, x] = split(xt);
            Mat out = Mat::Zero(rows + 1, cols + 1);
            out.topLeftCorner(rows, cols) = f(tau, x);
            return out;
        };
    };
    out.J = padded(model.J, ell, ell);
    out.R = padded(model.R, ell, ell);
    out.P = padded(model.P, ell, m);
    out.S = padded(model.S, m, m);
    out.N = padded(model.N, m, m);
    out.B = [model, split, ell, m](double, const Vec& xt) -> Mat {
        const auto [tau, x] = split(xt);
        Mat b = Mat::Zero(ell + 1, m + 1);
        b.topLeftCorner(ell, m) = model.B(tau, x);
        b(ell, m) = 1.0;
        return b;
    };
    out.z = [model, split, ell](double, const Vec& xt) -> Vec {
        const auto [tau, x] = split(xt);
        Vec z = Vec::Zero(ell + 1);
        z.head(ell) = model.z(tau, x);
        return z;
    };
    out.r = constant(Vec(Vec::Zero(ell + 1)));
    out.H = [model, split](double, const Vec& xt) {
        const auto [tau, x] = split(xt);
        return model.H(tau, x);
    };
    if (model.grad_H_x && model.grad_H_t) {
        out.grad_H_x = [model, split, n](double, const Vec& xt) -> Vec {
            const auto [tau, x] = split(xt);
            Vec g(n + 1);
            g << model.grad_H_x(tau, x), model.grad_H_t(tau, x);
            return g;
        };
    }
    out.grad_H_t = [](double, const Vec&) { return 0.0; };
    return out;
}

InputFn autonomous_input(InputFn input, Index m) {
    return [input = std::move(input), m](double, const Vec& xt) -> Vec {
        const Index n = xt.size() - 1;
        Vec u(m + 1);
        if (m > 0) u.head(m) = input(xt[n], xt.head(n));
        u[m] = 1.0;
        return u;
    };
}

bool InterconnectionSpec::full_row_rank(double tol) const {
    if (relations() == 0) return true;
    Mat stacked(M_ic.rows(), M_ic.cols() + N_ic.cols());
    stacked << M_ic, N_ic;
    Eigen::JacobiSVD<Mat> svd(stacked);
    const Vec& s = svd.singularValues();
    return s.minCoeff() > tol * std::max(1.0, s.maxCoeff());
}

PhdaeModel interconnect(const PhdaeModel& m1, const PhdaeModel& m2, const InterconnectionSpec& spec) {
    if (!m1.time_invariant || !m2.time_invariant) {
        throw StructureError("interconnect requires time-invariant models; autonomize them first");
    }
    const Index m = m1.m + m2.m;
    const Index k = spec.M_ic.rows();
    if (spec.M_ic.cols() != m || spec.N_ic.cols() != m || spec.N_ic.rows() != k) {
        std::ostringstream os;
        os << "interconnect: M_ic and N_ic must both be k x " << m << " (got " << spec.M_ic.rows() << "x"
           << spec.M_ic.cols() << " and " << spec.N_ic.rows() << "x" << spec.N_ic.cols() << ")";
        throw DimensionError(os.str());
    }

    const Index n1 = m1.n, n2 = m2.n, l1 = m1.ell, l2 = m2.ell, p1 = m1.m, p2 = m2.m;
    const Index n = n1 + n2;
    const Index ls = l1 + l2;
    const Index n_agg = n + 2 * m;
    const Index l_agg = ls + 2 * m + k;

    // Position of each row of diag(Gamma1, Gamma2) in the (z1, z2, u1, u2) ordering.
    std::vector<Index> perm;
    perm.reserve(static_cast<std::size_t>(ls + m));
    for (Index i = 0; i < l1; ++i) perm.push_back(i);
    for (Index i = 0; i < p1; ++i) perm.push_back(ls + i);
    for (Index i = 0; i < l2; ++i) perm.push_back(l1 + i);
    for (Index i = 0; i < p2; ++i) perm.push_back(ls + p1 + i);

    const auto permuted = [perm, ls, m](const Mat& a1, const Mat& a2) {
        Mat d = Mat::Zero(ls + m, ls + m);
        const Index s1 = a1.rows();
        d.topLeftCorner(s1, s1) = a1;
        d.bottomRightCorner(a2.rows(), a2.cols()) = a2;
        Mat out(ls + m, ls + m);
        for (Index i = 0; i < ls + m; ++i) {
            for (Index j = 0; j < ls + m; ++j) out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = d(i, j);
        }
        return out;
    };

    const auto split = [n1, n2, m](const Vec& xa) {
        return std::tuple<Vec, Vec, Vec, Vec>{xa.head(n1), xa.segment(n1, n2), xa.segment(n1 + n2, m),
                                              xa.segment(n1 + n2 + m, m)};
    };

    PhdaeModel out;
    out.n = n_agg;
    out.ell = l_agg;
    out.m = m;
    out.time_invariant = true;
    out.time_interval = m1.time_interval;

    out.E = [m1, m2, split, l1, l2, n1, n2, l_agg, n_agg](double t, const Vec& xa) -> Mat {
        const auto [x1, x2, uh, yh] = split(xa);
        Mat e = Mat::Zero(l_agg, n_agg);
        e.block(0, 0, l1, n1) = m1.E(t, x1);
        e.block(l1, n1, l2, n2) = m2.E(t, x2);
        return e;
    };

    // Constant part of the skew structure: T, -T^T and the relation block.
    Mat skew_fixed = Mat::Zero(l_agg, l_agg);
    {
        const Index row_u = ls;          // Gamma rows belonging to u
        const Index col_yh = ls + m;     // columns acting on y^
        const Index col_zero = ls + 2 * m;
        skew_fixed.block(row_u, col_yh, m, m) = Mat::Identity(m, m);
        skew_fixed.block(row_u, col_zero, m, k) = -spec.M_ic.transpose();
        skew_fixed.block(col_yh, row_u, m, m) = -Mat::Identity(m, m);
        skew_fixed.block(col_zero, row_u, k, m) = spec.M_ic;
        skew_fixed.block(col_yh, col_zero, m, k) = -spec.N_ic.transpose();
        skew_fixed.block(col_zero, col_yh, k, m) = spec.N_ic;
    }

    out.J = [m1, m2, split, permuted, skew_fixed, ls, m](double t, const Vec& xa) -> Mat {
        const auto [x1, x2, uh, yh] = split(xa);
        Mat j = skew_fixed;
        j.topLeftCorner(ls + m, ls + m) = permuted(m1.gamma(t, x1), m2.gamma(t, x2));
        return j;
    };
    out.R = [m1, m2, split, permuted, ls, m, l_agg](double t, const Vec& xa) -> Mat {
        const auto [x1, x2, uh, yh] = split(xa);
        Mat r = Mat::Zero(l_agg, l_agg);
        r.topLeftCorner(ls + m, ls + m) = permuted(m1.dissipation(t, x1), m2.dissipation(t, x2));
        return r;
    };
    Mat b = Mat::Zero(l_agg, m);
    b.block(ls + m, 0, m, m) = Mat::Identity(m, m);
    out.B = constant(b);
    out.P = constant(Mat(Mat::Zero(l_agg, m)));
    out.S = constant(Mat(Mat::Zero(m, m)));
    out.N = constant(Mat(Mat::Zero(m, m)));
    out.z = [m1, m2, split, l1, l2, ls, m, l_agg](double t, const Vec& xa) -> Vec {
        const auto [x1, x2, uh, yh] = split(xa);
        Vec z = Vec::Zero(l_agg);
        z.segment(0, l1) = m1.z(t, x1);
        z.segment(l1, l2) = m2.z(t, x2);
        z.segment(ls, m) = uh;
        z.segment(ls + m, m) = yh;
        return z;
    };
    out.r = constant(Vec(Vec::Zero(l_agg)));
    out.H = [m1, m2, split](double t, const Vec& xa) {
        const auto [x1, x2, uh, yh] = split(xa);
        return m1.H(t, x1) + m2.H(t, x2);
    };
    if (m1.grad_H_x && m2.grad_H_x) {
        out.grad_H_x = [m1, m2, split, n1, n2, n_agg](double t, const Vec& xa) -> Vec {
            const auto [x1, x2, uh, yh] = split(xa);
            Vec g = Vec::Zero(n_agg);
            g.head(n1) = m1.grad_H_x(t, x1);
            g.segment(n1, n2) = m2.grad_H_x(t, x2);
            return g;
        };
    }
    out.grad_H_t = [](double, const Vec&) { return 0.0; };
    return out;
}

}  // namespace phdae

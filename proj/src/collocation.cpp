#include "phdae/collocation.hpp"

#include "phdae/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phdae {

namespace {

struct StageSystem {
    const PhdaeModel& model;
    const ButcherTableau& tab;
    const InputFn& input;
    double t0;
    const Vec& x0;
    double h;

    Index n() const { return model.n; }

    Vec stage_state(const Vec& k, int i) const {
        Vec x = x0;
        for (int j = 0; j < tab.s; ++j) x += h * tab.alpha(i, j) * k.segment(j * n(), n());
        return x;
    }

    /// Stacked stage residuals; `rhs_norm` receives max ||(J - R) z + (B - P) u - r||_inf.
    Vec residual(const Vec& k, double* rhs_norm = nullptr) const {
        Vec f(tab.s * n());
        double scale = 0.0;
        for (int i = 0; i < tab.s; ++i) {
            const double ti = t0 + tab.gamma[i] * h;
            const Vec xi = stage_state(k, i);
            const Coefficients c = model.evaluate(ti, xi);
            const Vec ui = input(ti, xi);
            model.require_input(ui);
            const Vec rhs = (c.J - c.R) * c.z + (c.B - c.P) * ui - c.r;
            f.segment(i * n(), n()) = c.E * k.segment(i * n(), n()) - rhs;
            if (rhs.size()) scale = std::max(scale, rhs.cwiseAbs().maxCoeff());
        }
        if (rhs_norm) *rhs_norm = scale;
        return f;
    }
};

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Mat left_null_space(const Mat& E, Index* rank_out) {
    const Index ell = E.rows();
    if (E.size() == 0) {
        if (rank_out) *rank_out = 0;
        return Mat::Identity(ell, ell);
    }
    Eigen::JacobiSVD<Mat> svd(E, Eigen::ComputeFullU);
    const Vec& s = svd.singularValues();
    const double threshold = 1e-12 * (s.size() ? s.maxCoeff() : 0.0);
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s[i] > threshold && s[i] > 0.0) ++rank;
    }
    if (rank_out) *rank_out = rank;
    return svd.matrixU().rightCols(ell - rank);
}

}  // namespace

EnergyReport discrete_energy_report(const StepRecord& rec) {
    EnergyReport out;
    out.residual = rec.delta_H - rec.dissipation_sum - rec.port_sum;
    out.dissipation_nonpositive = rec.dissipation_sum <= 1e-12;
    return out;
}

double Trajectory::t_start() const {
    if (steps.empty()) throw Error("empty trajectory");
    return steps.front().t0;
}

double Trajectory::t_end() const {
    if (steps.empty()) throw Error("empty trajectory");
    return steps.back().tf();
}

const Vec& Trajectory::final_state() const {
    if (steps.empty()) throw Error("empty trajectory");
    return steps.back().xf;
}

Vec Trajectory::state_at(double t) const {
    if (steps.empty()) throw Error("empty trajectory");
    if (t < t_start() || t > t_end()) throw Error("state_at: t outside the trajectory");
    auto it = std::upper_bound(steps.begin(), steps.end(), t,
                               [](double value, const StepRecord& rec) { return value < rec.t0; });
    const StepRecord& rec = *std::prev(it);
    const double tau = (t - rec.t0) / rec.h;
    Vec x = rec.x0;
    for (int j = 0; j < tableau.s; ++j) x += rec.h * tableau.lagrange_integral(j, tau) * rec.rates[static_cast<std::size_t>(j)];
    return x;
}

double Trajectory::total_delta_H() const {
    double acc = 0.0;
    for (const auto& rec : steps) acc += rec.delta_H;
    return acc;
}

double Trajectory::total_dissipation() const {
    double acc = 0.0;
    for (const auto& rec : steps) acc += rec.dissipation_sum;
    return acc;
}

double Trajectory::total_port() const {
    double acc = 0.0;
    for (const auto& rec : steps) acc += rec.port_sum;
    return acc;
}

StepRecord record_from_rates(const PhdaeModel& model, double t0, const Vec& x0, double h,
                             const ButcherTableau& tab, const InputFn& input, const std::vector<Vec>& rates) {
    if (static_cast<int>(rates.size()) != tab.s) throw DimensionError("record_from_rates: one rate per stage");
    StepRecord rec;
    rec.t0 = t0;
    rec.h = h;
    rec.x0 = x0;
    rec.rates = rates;
    rec.xf = x0;
    for (int j = 0; j < tab.s; ++j) rec.xf += h * tab.beta[j] * rates[static_cast<std::size_t>(j)];

    for (int i = 0; i < tab.s; ++i) {
        const double ti = t0 + tab.gamma[i] * h;
        Vec xi = x0;
        for (int j = 0; j < tab.s; ++j) xi += h * tab.alpha(i, j) * rates[static_cast<std::size_t>(j)];
        const Vec ui = input(ti, xi);
        model.require_input(ui);
        const Coefficients c = model.evaluate(ti, xi);
        const Vec& ki = rates[static_cast<std::size_t>(i)];

        DiracPoint p;
        p.t = ti;
        p.x = xi;
        p.f_s = -(c.E * ki + c.r);
        p.e_s = c.z;
        p.f_p = output_of(c, ui);
        p.e_p = ui;
        p.f_d.resize(model.ell + model.m);
        p.f_d << c.z, ui;
        p.e_d = -dissipation_of(c) * p.f_d;

        rec.dissipation_sum += h * tab.beta[i] * p.e_d.dot(p.f_d);
        rec.port_sum += h * tab.beta[i] * p.f_p.dot(ui);

        rec.stage_times.push_back(ti);
        rec.states.push_back(std::move(xi));
        rec.inputs.push_back(ui);
        rec.outputs.push_back(p.f_p);
        rec.dirac.push_back(std::move(p));
    }

    rec.H0 = model.H(t0, x0);
    rec.Hf = model.H(t0 + h, rec.xf);
    rec.delta_H = rec.Hf - rec.H0;
    return rec;
}

StepRecord step(const PhdaeModel& model, double t0, const Vec& x0, double h, const ButcherTableau& tab,
                const InputFn& input, const NewtonOptions& newton, const std::vector<Vec>& initial_rates) {
    if (model.ell != model.n) {
        std::ostringstream os;
        os << "the integrator requires a square system (ell == n), got ell=" << model.ell << " n=" << model.n;
        throw StructureError(os.str());
    }
    if (!(h > 0.0)) throw Error("step size must be positive");
    model.require_state(x0, "initial state");

    const Index n = model.n;
    const StageSystem sys{model, tab, input, t0, x0, h};

    Vec k = Vec::Zero(tab.s * n);
    if (!initial_rates.empty()) {
        if (static_cast<int>(initial_rates.size()) != tab.s) throw DimensionError("one initial rate per stage");
        for (int j = 0; j < tab.s; ++j) k.segment(j * n, n) = initial_rates[static_cast<std::size_t>(j)];
    }

    double rhs_norm = 0.0;
    Vec f = sys.residual(k, &rhs_norm);
    double res = inf_norm(f);
    int iterations = 0;
    while (!(res <= newton.abs_tol + newton.rel_tol * rhs_norm)) {
        if (!std::isfinite(res)) throw SolverError("non-finite stage residual", res, iterations);
        if (iterations >= newton.max_iterations) {
            std::ostringstream os;
            os << "Newton did not converge in " << newton.max_iterations << " iterations (residual " << res << ")";
            throw SolverError(os.str(), res, iterations);
        }
        Mat jac(k.size(), k.size());
        Vec kp = k;
        for (Index j = 0; j < k.size(); ++j) {
            const double delta = newton.fd_scale * (1.0 + std::abs(k[j]));
            kp[j] = k[j] + delta;
            jac.col(j) = (sys.residual(kp) - f) / delta;
            kp[j] = k[j];
        }
        Eigen::FullPivLU<Mat> lu(jac);
        if (!lu.isInvertible()) {
            throw SolverError("singular iteration matrix; try a smaller step or check the index of the DAE", res,
                              iterations);
        }
        k -= lu.solve(f);
        ++iterations;
        f = sys.residual(k, &rhs_norm);
        res = inf_norm(f);
    }

    std::vector<Vec> rates;
    rates.reserve(static_cast<std::size_t>(tab.s));
    for (int j = 0; j < tab.s; ++j) rates.push_back(k.segment(j * n, n));
    StepRecord rec = record_from_rates(model, t0, x0, h, tab, input, rates);
    rec.newton_iterations = iterations;
    rec.newton_residual = res;
    return rec;
}

Trajectory integrate(const PhdaeModel& model, TimeInterval t_span, const Vec& x0, double h,
                     const ButcherTableau& tab, const InputFn& input, const IntegrateOptions& options,
                     const StepObserver& observer) {
    if (!(h > 0.0)) throw Error("step size must be positive");
    if (!(t_span.end > t_span.start)) throw Error("time span must have positive length");
    model.require_state(x0, "initial state");

    if (options.check_consistency) {
        const Vec u0 = input(t_span.start, x0);
        const Coefficients c = model.evaluate(t_span.start, x0);
        const double scale = 1.0 + inf_norm(Vec((c.J - c.R) * c.z + (c.B - c.P) * u0 - c.r));
        const double res = consistency_residual(model, t_span.start, x0, u0);
        if (res > 1e-8 * scale) {
            std::ostringstream os;
            os << "initial state is not consistent (algebraic residual " << res << "); see consistent_init";
            throw IntegrationError(0, t_span.start, os.str());
        }
    }

    std::vector<double> cuts{t_span.start};
    std::vector<double> inner = options.breakpoints;
    std::sort(inner.begin(), inner.end());
    for (double b : inner) {
        if (b > cuts.back() && b < t_span.end) cuts.push_back(b);
    }
    cuts.push_back(t_span.end);

    Trajectory traj;
    traj.tableau = tab;
    Vec x = x0;
    std::vector<Vec> guess;
    std::size_t index = 0;
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg];
        const double b = cuts[seg + 1];
        if (seg > 0) {
            try {
                x = consistent_init(model, a, x, input, options.differential_mask);
            } catch (const Error& e) {
                throw IntegrationError(index, a, std::string("restart at breakpoint failed: ") + e.what());
            }
        }
        const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-9)));
        for (std::size_t q = 0; q < count; ++q, ++index) {
            const double t = a + static_cast<double>(q) * h;
            const double t_next = q + 1 == count ? b : a + static_cast<double>(q + 1) * h;
            StepRecord rec;
            try {
                rec = step(model, t, x, t_next - t, tab, input, options.newton, guess);
            } catch (const IntegrationError&) {
                throw;
            } catch (const Error& e) {
                throw IntegrationError(index, t, e.what());
            }
            x = rec.xf;
            guess = rec.rates;
            if (observer) observer(rec);
            traj.steps.push_back(std::move(rec));
        }
    }
    return traj;
}

double consistency_residual(const PhdaeModel& model, double t, const Vec& x, const Vec& u) {
    model.require_input(u);
    const Coefficients c = model.evaluate(t, x);
    const Vec g = (c.J - c.R) * c.z + (c.B - c.P) * u - c.r;
    if (c.E.size() == 0) return inf_norm(g);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(c.E);
    const Vec xdot = cod.solve(g);
    return inf_norm(Vec(c.E * xdot - g));
}

Vec consistent_init(const PhdaeModel& model, double t0, const Vec& x_guess, const InputFn& input,
                    const std::optional<std::vector<bool>>& differential_mask) {
    model.require_state(x_guess, "initial guess");
    if (model.ell != model.n) throw StructureError("consistent_init requires a square system (ell == n)");

    const Mat E = model.E(t0, x_guess);
    Index rank = 0;
    const Mat L = left_null_space(E, &rank);

    std::vector<Index> algebraic;
    if (differential_mask) {
        if (static_cast<Index>(differential_mask->size()) != model.n) {
            throw DimensionError("differential mask must have one entry per state");
        }
        for (Index j = 0; j < model.n; ++j) {
            if (!(*differential_mask)[static_cast<std::size_t>(j)]) algebraic.push_back(j);
        }
    } else {
        const double zero = 1e-14 * (E.size() ? E.cwiseAbs().maxCoeff() : 0.0);
        for (Index j = 0; j < model.n; ++j) {
            if (E.col(j).cwiseAbs().maxCoeff() <= zero) algebraic.push_back(j);
        }
    }
    const auto q = static_cast<Index>(algebraic.size());
    if (q != model.ell - rank) {
        std::ostringstream os;
        os << "ambiguous differential/algebraic split: " << q << " algebraic coordinates but "
           << model.ell - rank << " algebraic equations; pass an explicit differential mask";
        throw StructureError(os.str());
    }
    if (q == 0) return x_guess;

    const auto constraint = [&](const Vec& x, double* scale) -> Vec {
        const Vec u = input(t0, x);
        model.require_input(u);
        const Coefficients c = model.evaluate(t0, x);
        const Vec g = (c.J - c.R) * c.z + (c.B - c.P) * u - c.r;
        if (scale) *scale = inf_norm(g);
        return L.transpose() * g;
    };

    Vec x = x_guess;
    double scale = 0.0;
    Vec g = constraint(x, &scale);
    for (int iter = 0;; ++iter) {
        const double res = inf_norm(g);
        if (res <= 1e-13 * (1.0 + scale)) return x;
        if (iter >= 50 || !std::isfinite(res)) {
            throw SolverError("consistent_init: Newton on the algebraic equations did not converge", res, iter);
        }
        Mat jac(q, q);
        Vec xp = x;
        for (Index a = 0; a < q; ++a) {
            const Index j = algebraic[static_cast<std::size_t>(a)];
            const double delta = 1e-7 * (1.0 + std::abs(x[j]));
            xp[j] = x[j] + delta;
            jac.col(a) = (constraint(xp, nullptr) - g) / delta;
            xp[j] = x[j];
        }
        Eigen::FullPivLU<Mat> lu(jac);
        if (!lu.isInvertible()) {
            throw SolverError("consistent_init: algebraic equations are singular in the chosen coordinates", res, iter);
        }
        const Vec dx = lu.solve(g);
        for (Index a = 0; a < q; ++a) x[algebraic[static_cast<std::size_t>(a)]] -= dx[a];
        g = constraint(x, &scale);
    }
}

Vec consistent_init(const PhdaeModel& model, double t0, const Vec& x_guess, const Vec& u0,
                    const std::optional<std::vector<bool>>& differential_mask) {
    return consistent_init(model, t0, x_guess, constant_input(u0), differential_mask);
}

InputFn constant_input(Vec u) {
    return [u = std::move(u)](double, const Vec&) { return u; };
}

InputFn zero_input(Index m) { return constant_input(Vec::Zero(m)); }

std::vector<IntervalReport> dissipation_check(const Trajectory& trajectory, const PhdaeModel& model, double tol) {
    std::vector<IntervalReport> out;
    out.reserve(trajectory.steps.size());
    for (const auto& rec : trajectory.steps) {
        IntervalReport r;
        r.t1 = rec.t0;
        r.t2 = rec.tf();
        r.value = model.H(r.t2, rec.xf) - model.H(r.t1, rec.x0) - rec.port_sum;
        r.ok = r.value <= tol;
        out.push_back(r);
    }
    return out;
}

}  // namespace phdae

#pragma once

#include "phdae/dirac.hpp"
#include "phdae/model.hpp"
#include "phdae/tableau.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace phdae {

/// Full Newton on the stacked stage equations with a forward-difference Jacobian.
/// Converged when ||F||_inf <= abs_tol + rel_tol * ||rhs||_inf.
struct NewtonOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iterations = 25;
    /// Jacobian column j is perturbed by fd_scale * (1 + |k_j|).
    double fd_scale = 1e-7;
};

/// One collocation step. Stage i sits at t0 + gamma_i h.
struct StepRecord {
    double t0 = 0.0;
    double h = 0.0;
    Vec x0;
    Vec xf;

    std::vector<double> stage_times;
    std::vector<Vec> rates;
    std::vector<Vec> states;
    std::vector<Vec> inputs;
    std::vector<Vec> outputs;
    std::vector<DiracPoint> dirac;

    double H0 = 0.0;
    double Hf = 0.0;
    /// H(tf, xf) - H(t0, x0).
    double delta_H = 0.0;
    /// h sum_j beta_j <e_d^j, f_d^j>. Never positive for Gauss-Legendre and W >= 0.
    double dissipation_sum = 0.0;
    /// h sum_j beta_j <y_j, u_j>.
    double port_sum = 0.0;

    int newton_iterations = 0;
    double newton_residual = 0.0;

    double tf() const { return t0 + h; }
};

struct EnergyReport {
    /// delta_H - dissipation_sum - port_sum.
    double residual = 0.0;
    bool dissipation_nonpositive = true;
};

EnergyReport discrete_energy_report(const StepRecord& rec);

/// Chained step records with dense output by the collocation polynomial.
struct Trajectory {
    ButcherTableau tableau;
    std::vector<StepRecord> steps;

    double t_start() const;
    double t_end() const;
    const Vec& final_state() const;

    /// x0 + h sum_j k_j int_0^tau l_j on the step containing t.
    Vec state_at(double t) const;

    double total_delta_H() const;
    double total_dissipation() const;
    double total_port() const;
};

/// Stage rates to full step record: stage states, inputs, outputs, lifted Dirac points
/// and the discrete energy sums, all evaluated on `model`.
StepRecord record_from_rates(const PhdaeModel& model, double t0, const Vec& x0, double h,
                             const ButcherTableau& tab, const InputFn& input, const std::vector<Vec>& rates);

/// Solves the s n stage equations E(x_i) k_i + r(t_i, x_i) = (J - R) z(x_i) + (B - P) u_i with
/// x_i = x0 + h sum_j alpha_ij k_j. Requires ell == n. `initial_rates` seeds Newton;
/// empty means all zero.
StepRecord step(const PhdaeModel& model, double t0, const Vec& x0, double h, const ButcherTableau& tab,
                const InputFn& input, const NewtonOptions& newton = {},
                const std::vector<Vec>& initial_rates = {});

struct IntegrateOptions {
    NewtonOptions newton;
    /// Times where the input is discontinuous. The integrator lands on each one and
    /// recomputes the algebraic coordinates with consistent_init before continuing.
    std::vector<double> breakpoints;
    /// Differential/algebraic split for restarts; see consistent_init.
    std::optional<std::vector<bool>> differential_mask;
    /// Reject an initial state whose algebraic residual exceeds 1e-8 (1 + ||rhs||).
    bool check_consistency = true;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Steps from t_span.start to t_span.end with step h; the last step of each segment is
/// shortened to land on the end point (or a breakpoint). Failures are rethrown as
/// IntegrationError carrying the step index. `observer` sees each step as it completes.
Trajectory integrate(const PhdaeModel& model, TimeInterval t_span, const Vec& x0, double h,
                     const ButcherTableau& tab, const InputFn& input, const IntegrateOptions& options = {},
                     const StepObserver& observer = {});

/// min over x' of ||E x' + r - (J - R) z - (B - P) u||: zero iff x is consistent.
double consistency_residual(const PhdaeModel& model, double t, const Vec& x, const Vec& u);

/// Completes a consistent state. Differential coordinates (columns of E with a nonzero
/// entry at x_guess, unless `differential_mask` says otherwise) are held fixed; the
/// remaining coordinates are solved from the algebraic equations, i.e. the projection of
/// the DAE onto the left null space of E. Throws StructureError when the number of
/// algebraic coordinates does not match the number of algebraic equations.
Vec consistent_init(const PhdaeModel& model, double t0, const Vec& x_guess, const InputFn& input,
                    const std::optional<std::vector<bool>>& differential_mask = std::nullopt);
Vec consistent_init(const PhdaeModel& model, double t0, const Vec& x_guess, const Vec& u0,
                    const std::optional<std::vector<bool>>& differential_mask = std::nullopt);
template <typename Derived>
Vec consistent_init(const PhdaeModel& model, double t0, const Vec& x_guess, const Eigen::MatrixBase<Derived>& u0,
                    const std::optional<std::vector<bool>>& differential_mask = std::nullopt) {
    return consistent_init(model, t0, x_guess, Vec(u0), differential_mask);
}

/// Input law returning a constant vector.
InputFn constant_input(Vec u);
InputFn zero_input(Index m);

/// Integration problem for convergence studies.
struct ConvergenceProblem {
    PhdaeModel model;
    TimeInterval t_span;
    Vec x0;
    ButcherTableau tableau;
    InputFn input;
    IntegrateOptions options;
};

struct ConvergenceReport {
    std::vector<double> h;
    /// Max-norm end-state error over the selected components, per h.
    std::vector<double> error;
    /// error_by_component[k][c]: |x_end - ref| for h[k], component c.
    std::vector<Vec> error_by_component;
    /// Least-squares slope of log(error) against log(h).
    double order = 0.0;
    /// Slope per selected component.
    std::vector<double> component_orders;
    std::vector<Index> components;
    /// Errors do not decrease strictly as h decreases.
    bool non_monotone = false;
};

/// Least-squares slope of log(y) against log(x).
double fitted_order(std::span<const double> x, std::span<const double> y);

/// End-state errors of `problem` for each h against `reference_end` (computed with step
/// h_reference, required to be at most min(h_list) / 10; pass 0 for an exact solution).
/// The h grid runs in an OpenMP loop with results merged in h_list order.
ConvergenceReport convergence_study(const ConvergenceProblem& problem, const Vec& reference_end,
                                    double h_reference, std::span<const double> h_list,
                                    std::vector<Index> components = {});

/// Single-threaded reference for convergence_study.
ConvergenceReport convergence_study_serial(const ConvergenceProblem& problem, const Vec& reference_end,
                                           double h_reference, std::span<const double> h_list,
                                           std::vector<Index> components = {});

/// Per-interval dissipation inequality H(t2) - H(t1) - int u^T y, one entry per step.
struct IntervalReport {
    double t1 = 0.0;
    double t2 = 0.0;
    double value = 0.0;
    bool ok = true;
};

/// Uses the Gauss quadrature of u^T y stored with each step.
std::vector<IntervalReport> dissipation_check(const Trajectory& trajectory, const PhdaeModel& model,
                                              double tol = 1e-10);

}  // namespace phdae

#include "phdae/collocation.hpp"

#include "phdae/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

namespace phdae {

namespace {

std::vector<Index> resolve_components(const ConvergenceProblem& problem, std::vector<Index> components) {
    if (components.empty()) {
        components.resize(static_cast<std::size_t>(problem.model.n));
        std::iota(components.begin(), components.end(), Index{0});
    }
    for (Index c : components) {
        if (c < 0 || c >= problem.model.n) throw DimensionError("convergence_study: component index out of range");
    }
    return components;
}

void require_arguments(const ConvergenceProblem& problem, const Vec& reference_end, double h_reference,
                       std::span<const double> h_list) {
    if (h_list.empty()) throw Error("convergence_study: empty h list");
    problem.model.require_state(reference_end, "reference end state");
    const double h_min = *std::min_element(h_list.begin(), h_list.end());
    if (!(h_min > 0.0)) throw Error("convergence_study: step sizes must be positive");
    if (h_reference < 0.0 || h_reference > h_min / 10.0 * (1.0 + 1e-12)) {
        throw Error("convergence_study: reference step must be at most min(h) / 10");
    }
}

Vec end_error(const ConvergenceProblem& problem, const Vec& reference_end, double h,
              const std::vector<Index>& components) {
    const Trajectory traj =
        integrate(problem.model, problem.t_span, problem.x0, h, problem.tableau, problem.input, problem.options);
    const Vec& x = traj.final_state();
    Vec err(static_cast<Index>(components.size()));
    for (std::size_t c = 0; c < components.size(); ++c) {
        err[static_cast<Index>(c)] = std::abs(x[components[c]] - reference_end[components[c]]);
    }
    return err;
}

ConvergenceReport assemble(std::span<const double> h_list, std::vector<Index> components,
                           std::vector<Vec> by_component) {
    ConvergenceReport report;
    report.h.assign(h_list.begin(), h_list.end());
    report.components = std::move(components);
    report.error_by_component = std::move(by_component);
    for (const Vec& e : report.error_by_component) report.error.push_back(e.size() ? e.maxCoeff() : 0.0);
    report.order = fitted_order(report.h, report.error);

    for (std::size_t c = 0; c < report.components.size(); ++c) {
        std::vector<double> y;
        for (const Vec& e : report.error_by_component) y.push_back(e[static_cast<Index>(c)]);
        report.component_orders.push_back(fitted_order(report.h, y));
    }

    std::vector<std::size_t> idx(report.h.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return report.h[a] > report.h[b]; });
    for (std::size_t k = 1; k < idx.size(); ++k) {
        if (!(report.error[idx[k]] < report.error[idx[k - 1]])) report.non_monotone = true;
    }
    return report;
}

}  // namespace

double fitted_order(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("fitted_order: x and y differ in length");
    if (x.size() < 2) throw Error("fitted_order: need at least two points");
    const double floor = std::numeric_limits<double>::min();
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(x.size());
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(std::max(y[k], floor)));
        mx += lx.back() / n;
        my += ly.back() / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (lx[k] - mx) * (ly[k] - my);
        sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    if (sxx == 0.0) throw Error("fitted_order: all x values coincide");
    return sxy / sxx;
}

ConvergenceReport convergence_study(const ConvergenceProblem& problem, const Vec& reference_end,
                                    double h_reference, std::span<const double> h_list,
                                    std::vector<Index> components) {
    require_arguments(problem, reference_end, h_reference, h_list);
    components = resolve_components(problem, std::move(components));

    std::vector<Vec> errors(h_list.size());
    std::vector<std::exception_ptr> failures(h_list.size());
    const auto total = static_cast<long>(h_list.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < total; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            errors[i] = end_error(problem, reference_end, h_list[i], components);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return assemble(h_list, std::move(components), std::move(errors));
}

ConvergenceReport convergence_study_serial(const ConvergenceProblem& problem, const Vec& reference_end,
                                           double h_reference, std::span<const double> h_list,
                                           std::vector<Index> components) {
    require_arguments(problem, reference_end, h_reference, h_list);
    components = resolve_components(problem, std::move(components));
    std::vector<Vec> errors;
    for (double h : h_list) errors.push_back(end_error(problem, reference_end, h, components));
    return assemble(h_list, std::move(components), std::move(errors));
}

}  // namespace phdae

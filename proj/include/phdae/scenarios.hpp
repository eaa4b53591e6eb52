#pragma once

#include "phdae/circuits.hpp"
#include "phdae/collocation.hpp"
#include "phdae/transform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace phdae {

struct ScenarioSettings {
    CircuitParams params;
    double power = 10.0;
    double alpha = 1.0;
    /// circuit-controlled switches from the ramp to u* here; nullopt keeps the pure arctan ramp.
    std::optional<double> ramp_switch = 1.0;
};

/// One CSV row. `rec` is null for the initial row.
using RowFn = std::function<std::vector<double>(const StepRecord* rec, double t, const Vec& x)>;

struct Scenario {
    std::string name;
    PhdaeModel model;
    /// Model on which stage data is re-evaluated for the energy columns; empty means `model`.
    std::optional<PhdaeModel> audit_model;
    Vec x0;
    InputFn input;
    std::vector<double> breakpoints;
    double t_final = 1.0;
    double convergence_t_final = 1.0;
    /// Components compared in convergence studies.
    std::vector<Index> convergence_components;
    /// Exact state at time t, when known.
    std::function<Vec(double)> exact;
    SampleBox box;
    std::vector<std::string> columns;
    RowFn row;

    const PhdaeModel& validation_model() const { return audit_model ? *audit_model : model; }
    IntegrateOptions integrate_options(const NewtonOptions& newton) const;
    /// `rec` re-evaluated on the audit model, or `rec` itself.
    StepRecord audited(const StepRecord& rec, const ButcherTableau& tab) const;
};

/// circuit-uncontrolled, circuit-controlled, circuit-feedback, decay, two-circuits.
const std::vector<std::string>& scenario_names();

/// Throws Error for an unknown name.
Scenario make_scenario(const std::string& name, const ScenarioSettings& settings = {});

/// Generic scenario for a model read from file: zero input, start at the consistent
/// completion of the all-ones state.
Scenario make_file_scenario(const LtiModel& lti, double t_final = 1.0);

/// Builtin models for validation: every scenario name and `circuit`.
PhdaeModel builtin_model(const std::string& name, const ScenarioSettings& settings = {});
SampleBox builtin_box(const std::string& name);

/// x' = -x: E = 1, R = 1, z = x, H = x^2 / 2, no ports.
PhdaeModel decay_model();

/// x' = -x^3: E = 1, R = 1, z = x^3, H = x^4 / 4, no ports.
PhdaeModel quartic_model();

/// Two circuits coupled by u1 = y2, u2 = -y1, i.e. M_ic = I, N_ic = [[0, -1], [1, 0]].
InterconnectionSpec gyrator_coupling();

}  // namespace phdae

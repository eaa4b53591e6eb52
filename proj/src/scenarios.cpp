#include "phdae/scenarios.hpp"

#include "phdae/error.hpp"

#include <cmath>

namespace phdae {

namespace {

const std::vector<std::string> kCircuitColumns = {"t",  "I", "V1", "V2",     "IG",       "IR",       "u",
                                                  "y",  "H", "Htilde", "diss_sum", "port_sum", "pbe_residual"};

void append_energy(std::vector<double>& row, const StepRecord* rec) {
    if (!rec) {
        row.insert(row.end(), {0.0, 0.0, 0.0});
        return;
    }
    row.push_back(rec->dissipation_sum);
    row.push_back(rec->port_sum);
    row.push_back(discrete_energy_report(*rec).residual);
}

Vec uncontrolled_guess() {
    Vec x = Vec::Zero(5);
    x << 1.0, 2.0, -1.0, 0.0, 0.0;
    return x;
}

/// Rows in original circuit coordinates; `to_original` maps the integrated state.
RowFn circuit_row(PhdaeModel circuit, ScalarFn htilde, std::function<Vec(const Vec&)> to_original,
                  std::function<double(double, const Vec&)> control) {
    return [=](const StepRecord* rec, double t, const Vec& state) {
        const Vec x = to_original(state);
        std::vector<double> row{t};
        for (Index i = 0; i < 5; ++i) row.push_back(x[i]);
        row.push_back(control(t, state));
        row.push_back(x[3]);
        row.push_back(circuit.H(t, x));
        row.push_back(htilde(t, x));
        append_energy(row, rec);
        return row;
    };
}

Scenario circuit_scenario(const std::string& name, const ScenarioSettings& settings) {
    const PhdaeModel circuit = build_dc_network(settings.params);
    const DesiredState d = desired_state(settings.params, settings.power);
    const ScalarFn htilde = shifted_hamiltonian(settings.params, d.x_star);

    Scenario s;
    s.name = name;
    s.box = SampleBox::uniform(5, 10.0);
    s.convergence_components = {0, 1, 2};
    s.columns = kCircuitColumns;
    const auto identity = [](const Vec& x) { return x; };

    if (name == "circuit-uncontrolled") {
        s.model = circuit;
        s.input = zero_input(1);
        s.x0 = consistent_init(circuit, 0.0, uncontrolled_guess(), s.input);
        s.t_final = 200.0;
    } else if (name == "circuit-controlled") {
        s.model = circuit;
        if (settings.ramp_switch) {
            s.input = switched_ramp_input(d.u_star, *settings.ramp_switch);
            s.breakpoints = {*settings.ramp_switch};
        } else {
            s.input = ramp_input(d.u_star);
        }
        s.x0 = consistent_init(circuit, 0.0, Vec::Zero(5), s.input);
        s.t_final = 20.0;
    } else {
        const ClosedLoop loop = feedback_model(circuit, settings.params, settings.power, settings.alpha);
        s.model = loop.model;
        s.input = zero_input(1);
        s.x0 = consistent_init(loop.model, 0.0, Vec(-loop.x_star), s.input);
        s.t_final = 20.0;
        const Vec x_star = loop.x_star;
        s.row = circuit_row(circuit, htilde, [x_star](const Vec& xt) -> Vec { return xt + x_star; },
                            [loop](double, const Vec& xt) { return loop.control(xt + loop.x_star); });
        return s;
    }
    const InputFn input = s.input;
    s.row = circuit_row(circuit, htilde, identity,
                        [input](double t, const Vec& x) { return input(t, x)[0]; });
    return s;
}

Scenario decay_scenario() {
    Scenario s;
    s.name = "decay";
    s.model = decay_model();
    s.x0 = Vec::Ones(1);
    s.input = zero_input(0);
    s.t_final = 1.0;
    s.convergence_components = {0};
    s.exact = [](double t) { return Vec::Constant(1, std::exp(-t)); };
    s.box = SampleBox::uniform(1, 2.0);
    s.columns = {"t", "x", "H", "diss_sum", "port_sum", "pbe_residual"};
    const PhdaeModel model = s.model;
    s.row = [model](const StepRecord* rec, double t, const Vec& x) {
        std::vector<double> row{t, x[0], model.H(t, x)};
        append_energy(row, rec);
        return row;
    };
    return s;
}

Scenario two_circuits_scenario(const ScenarioSettings& settings) {
    const PhdaeModel circuit = build_dc_network(settings.params);
    const InterconnectionSpec coupling = gyrator_coupling();

    Scenario s;
    s.name = "two-circuits";
    s.model = interconnect(circuit, circuit, InterconnectionSpec{Mat::Zero(0, 2), Mat::Zero(0, 2)});
    s.audit_model = interconnect(circuit, circuit, coupling);
    // The relation M u + N y = 0 solved for u as state feedback on y^.
    const Mat gain = -coupling.M_ic.fullPivLu().solve(coupling.N_ic);
    s.input = [gain](double, const Vec& x) -> Vec { return gain * x.segment(12, 2); };

    Vec guess = Vec::Zero(14);
    guess.head(3) << 1.0, 2.0, -1.0;
    guess.segment(5, 3) << -0.5, 1.0, 0.5;
    s.x0 = consistent_init(s.model, 0.0, guess, s.input);
    s.t_final = 20.0;
    s.convergence_components = {0, 1, 2, 5, 6, 7};
    s.box = SampleBox::uniform(14, 10.0);

    for (const char* c : {"t", "I_1", "V1_1", "V2_1", "IG_1", "IR_1", "I_2", "V1_2", "V2_2", "IG_2", "IR_2", "u_1",
                          "u_2", "y_1", "y_2", "H", "H_1", "H_2", "diss_sum", "port_sum", "pbe_residual"}) {
        s.columns.emplace_back(c);
    }
    s.row = [circuit](const StepRecord* rec, double t, const Vec& x) {
        std::vector<double> row{t};
        for (Index i = 0; i < 14; ++i) row.push_back(x[i]);
        const double h1 = circuit.H(t, x.head(5));
        const double h2 = circuit.H(t, x.segment(5, 5));
        row.insert(row.end(), {h1 + h2, h1, h2});
        append_energy(row, rec);
        return row;
    };
    return s;
}

}  // namespace

IntegrateOptions Scenario::integrate_options(const NewtonOptions& newton) const {
    IntegrateOptions opts;
    opts.newton = newton;
    opts.breakpoints = breakpoints;
    return opts;
}

StepRecord Scenario::audited(const StepRecord& rec, const ButcherTableau& tab) const {
    if (!audit_model) return rec;
    StepRecord out = record_from_rates(*audit_model, rec.t0, rec.x0, rec.h, tab, input, rec.rates);
    out.newton_iterations = rec.newton_iterations;
    out.newton_residual = rec.newton_residual;
    return out;
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"circuit-uncontrolled", "circuit-controlled", "circuit-feedback",
                                                   "decay", "two-circuits"};
    return names;
}

Scenario make_scenario(const std::string& name, const ScenarioSettings& settings) {
    if (name == "circuit-uncontrolled" || name == "circuit-controlled" || name == "circuit-feedback") {
        return circuit_scenario(name, settings);
    }
    if (name == "decay") return decay_scenario();
    if (name == "two-circuits") return two_circuits_scenario(settings);
    throw Error("unknown scenario '" + name + "'");
}

Scenario make_file_scenario(const LtiModel& lti, double t_final) {
    Scenario s;
    s.name = "file";
    s.model = lti_to_model(lti);
    const Index n = s.model.n;
    const Index m = s.model.m;
    s.input = zero_input(m);
    s.x0 = consistent_init(s.model, 0.0, Vec::Ones(n), s.input);
    s.t_final = t_final;
    s.convergence_t_final = t_final;
    for (Index j = 0; j < n; ++j) {
        if (lti.E.col(j).cwiseAbs().maxCoeff() > 0.0) s.convergence_components.push_back(j);
    }
    s.box = SampleBox::uniform(n, 10.0);
    s.columns.emplace_back("t");
    for (Index i = 0; i < n; ++i) s.columns.push_back("x" + std::to_string(i + 1));
    for (Index i = 0; i < m; ++i) s.columns.push_back("u" + std::to_string(i + 1));
    for (Index i = 0; i < m; ++i) s.columns.push_back("y" + std::to_string(i + 1));
    for (const char* c : {"H", "diss_sum", "port_sum", "pbe_residual"}) s.columns.emplace_back(c);
    const PhdaeModel model = s.model;
    const InputFn input = s.input;
    s.row = [model, input](const StepRecord* rec, double t, const Vec& x) {
        std::vector<double> row{t};
        for (Index i = 0; i < x.size(); ++i) row.push_back(x[i]);
        const Vec u = input(t, x);
        const Vec y = model.output(t, x, u);
        for (Index i = 0; i < u.size(); ++i) row.push_back(u[i]);
        for (Index i = 0; i < y.size(); ++i) row.push_back(y[i]);
        row.push_back(model.H(t, x));
        append_energy(row, rec);
        return row;
    };
    return s;
}

PhdaeModel builtin_model(const std::string& name, const ScenarioSettings& settings) {
    if (name == "circuit") return build_dc_network(settings.params);
    if (name == "quartic") return quartic_model();
    return make_scenario(name, settings).validation_model();
}

SampleBox builtin_box(const std::string& name) {
    if (name == "decay" || name == "quartic") return SampleBox::uniform(1, 2.0);
    if (name == "two-circuits") return SampleBox::uniform(14, 10.0);
    return SampleBox::uniform(5, 10.0);
}

PhdaeModel decay_model() {
    LtiModel lti = LtiModel::zeros(1, 1, 0);
    lti.E(0, 0) = 1.0;
    lti.R(0, 0) = 1.0;
    lti.Z(0, 0) = 1.0;
    lti.Q(0, 0) = 1.0;
    return lti_to_model(lti);
}

PhdaeModel quartic_model() {
    PhdaeModel model;
    model.n = model.ell = 1;
    model.m = 0;
    model.E = constant(Mat(Mat::Identity(1, 1)));
    model.J = constant(Mat(Mat::Zero(1, 1)));
    model.R = constant(Mat(Mat::Identity(1, 1)));
    model.B = constant(Mat(Mat::Zero(1, 0)));
    model.P = constant(Mat(Mat::Zero(1, 0)));
    model.S = constant(Mat(Mat::Zero(0, 0)));
    model.N = constant(Mat(Mat::Zero(0, 0)));
    model.z = [](double, const Vec& x) -> Vec { return x.array().cube().matrix(); };
    model.r = constant(Vec(Vec::Zero(1)));
    model.H = [](double, const Vec& x) { return 0.25 * std::pow(x[0], 4); };
    model.grad_H_x = [](double, const Vec& x) -> Vec { return x.array().cube().matrix(); };
    model.grad_H_t = [](double, const Vec&) { return 0.0; };
    model.time_invariant = true;
    return model;
}

InterconnectionSpec gyrator_coupling() {
    InterconnectionSpec spec;
    spec.M_ic = Mat::Identity(2, 2);
    spec.N_ic.resize(2, 2);
    spec.N_ic << 0.0, -1.0, 1.0, 0.0;
    return spec;
}

}  // namespace phdae

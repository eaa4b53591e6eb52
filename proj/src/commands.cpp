#include "phdae/commands.hpp"

#include "phdae/error.hpp"
#include "phdae/lti_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace phdae {

namespace {

const std::vector<double> kDefaultHList = {0.1, 0.05, 0.025, 0.0125};

Scenario scenario_for(const RunConfig& config) {
    if (!config.model_path.empty()) {
        return make_file_scenario(read_lti_file(config.model_path), config.t_final.value_or(1.0));
    }
    return make_scenario(config.scenario, config.settings);
}

std::string header_line(const std::vector<std::string>& columns) {
    std::string line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) line += ',';
        line += columns[i];
    }
    return line + '\n';
}

}  // namespace

std::string csv_line(const std::vector<double>& values) {
    std::string line;
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        line += buf;
    }
    return line + '\n';
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    PhdaeModel model;
    SampleBox box;
    try {
        config.validate();
        if (!config.model_path.empty()) {
            model = lti_to_model(read_lti_file(config.model_path));
            box = SampleBox::uniform(model.n, 10.0);
        } else {
            model = builtin_model(config.scenario, config.settings);
            box = builtin_box(config.scenario);
        }
    } catch (const StructureError& e) {
        out << "structure validation: FAIL\n  error: " << e.what() << "\n";
        return exit_structure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        const ValidationReport report = validate_structure(model, box, config.samples, config.seed, config.tol);
        out << to_string(report);
        return report.pass ? exit_ok : exit_structure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_structure;
    }
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    Scenario scenario;
    ButcherTableau tab;
    std::ofstream file;
    try {
        config.validate();
        scenario = scenario_for(config);
        tab = gauss_legendre_tableau(config.stages);
        if (!config.out.empty() && config.out != "-") {
            file.open(config.out, std::ios::binary);
            if (!file) throw Error("cannot open " + config.out + " for writing");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    std::ostream& csv = file.is_open() ? static_cast<std::ostream&>(file) : out;

    const TimeInterval span{0.0, config.t_final.value_or(scenario.t_final)};
    csv << header_line(scenario.columns);
    csv << csv_line(scenario.row(nullptr, span.start, scenario.x0));
    try {
        integrate(scenario.model, span, scenario.x0, config.h, tab, scenario.input,
                  scenario.integrate_options(config.newton), [&](const StepRecord& rec) {
                      const StepRecord audited = scenario.audited(rec, tab);
                      csv << csv_line(scenario.row(&audited, rec.tf(), rec.xf));
                  });
    } catch (const std::exception& e) {
        csv.flush();
        err << "integration failed: " << e.what() << "\n";
        return exit_integration;
    }
    csv.flush();
    if (!csv) {
        err << "error: failed to write the CSV output\n";
        return exit_usage;
    }
    return exit_ok;
}

int cmd_convergence(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const std::vector<double>& h_list = config.h_list.empty() ? kDefaultHList : config.h_list;
    Scenario scenario;
    ButcherTableau tab;
    try {
        config.validate();
        if (h_list.size() < 3) throw Error("convergence needs at least three step sizes in h_list");
        scenario = scenario_for(config);
        tab = gauss_legendre_tableau(config.stages);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    const double T = config.t_final.value_or(scenario.convergence_t_final);
    ConvergenceProblem problem{scenario.model, TimeInterval{0.0, T}, scenario.x0, tab, scenario.input,
                               scenario.integrate_options(config.newton)};
    const double h_min = *std::min_element(h_list.begin(), h_list.end());

    try {
        Vec reference;
        double h_ref = 0.0;
        out << std::setprecision(6);
        if (scenario.exact) {
            reference = scenario.exact(T);
            out << "reference: exact solution at T=" << T << "\n";
        } else {
            h_ref = std::min(1e-3, h_min / 10.0);
            const ButcherTableau fine = gauss_legendre_tableau(3);
            reference = integrate(problem.model, problem.t_span, problem.x0, h_ref, fine, problem.input,
                                  problem.options)
                            .final_state();
            out << "reference: s=3, h=" << h_ref << " at T=" << T << "\n";
        }
        const ConvergenceReport report =
            convergence_study(problem, reference, h_ref, h_list, scenario.convergence_components);

        out << "scenario " << scenario.name << ", s=" << config.stages << "\n";
        out << std::left << std::setw(14) << "h" << std::setw(16) << "error";
        for (Index c : report.components) out << std::setw(14) << ("x" + std::to_string(c + 1));
        out << "\n";
        for (std::size_t k = 0; k < report.h.size(); ++k) {
            out << std::setw(14) << report.h[k] << std::setw(16) << report.error[k];
            const Vec& e = report.error_by_component[k];
            for (Index c = 0; c < e.size(); ++c) out << std::setw(14) << e[c];
            out << "\n";
        }
        out << "component orders:";
        for (std::size_t c = 0; c < report.components.size(); ++c) {
            out << " x" << report.components[c] + 1 << "=" << report.component_orders[c];
        }
        out << "\nobserved order: " << report.order << "\n";
        if (report.non_monotone) out << "warning: errors are not monotone in h\n";
    } catch (const std::exception& e) {
        err << "integration failed: " << e.what() << "\n";
        return exit_integration;
    }
    return exit_ok;
}

}  // namespace phdae

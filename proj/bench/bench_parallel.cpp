#include "phdae/circuits.hpp"
#include "phdae/collocation.hpp"
#include "phdae/scenarios.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace {

template <class F>
double seconds(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace phdae;
    const int samples = argc > 1 ? std::atoi(argv[1]) : 20000;

    std::printf("threads: %d\n", omp_get_max_threads());

    const PhdaeModel circuit = build_dc_network(CircuitParams{});
    const SampleBox box = SampleBox::uniform(5, 10.0);
    ValidationReport serial_report, parallel_report;
    const double t_vs = seconds([&] { serial_report = validate_structure_serial(circuit, box, samples, 7); });
    const double t_vp = seconds([&] { parallel_report = validate_structure(circuit, box, samples, 7); });
    bool same = serial_report.pass == parallel_report.pass;
    for (std::size_t c = 0; c < serial_report.checks.size(); ++c) {
        same = same && serial_report.checks[c].scaled == parallel_report.checks[c].scaled;
    }
    std::printf("validate_structure  %6d samples  serial %.3fs  parallel %.3fs  speedup %.2f  identical=%s\n",
                samples, t_vs, t_vp, t_vs / t_vp, same ? "yes" : "no");

    const Scenario scenario = make_scenario("circuit-uncontrolled");
    const ConvergenceProblem problem{scenario.model, TimeInterval{0.0, 1.0}, scenario.x0, gauss_legendre_tableau(1),
                                     scenario.input, {}};
    const Vec reference = integrate(scenario.model, problem.t_span, scenario.x0, 1e-3, gauss_legendre_tableau(3),
                                    scenario.input)
                              .final_state();
    const std::vector<double> h_list = {0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
    ConvergenceReport cs, cp;
    const double t_cs = seconds([&] { cs = convergence_study_serial(problem, reference, 0.0, h_list, {0, 1, 2}); });
    const double t_cp = seconds([&] { cp = convergence_study(problem, reference, 0.0, h_list, {0, 1, 2}); });
    std::printf("convergence_study   %6zu step sizes  serial %.3fs  parallel %.3fs  speedup %.2f  identical=%s\n",
                h_list.size(), t_cs, t_cp, t_cs / t_cp, cs.error == cp.error ? "yes" : "no");
    return 0;
}

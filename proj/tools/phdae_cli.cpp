#include "phdae/commands.hpp"
#include "phdae/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
    std::optional<std::string> scenario, model, config, out, h_list;
    std::optional<int> stages, samples;
    std::optional<double> h, t_final, tol, alpha, power;
    std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--scenario", f.scenario, "builtin scenario or model name");
    cmd->add_option("--model", f.model, "LTI model file");
    cmd->add_option("--config", f.config, "key = value configuration file");
    cmd->add_option("--stages", f.stages, "Gauss-Legendre stages (1-5)");
    cmd->add_option("--h", f.h, "step size");
    cmd->add_option("--t-final", f.t_final, "horizon");
    cmd->add_option("--out", f.out, "CSV output path");
    cmd->add_option("--samples", f.samples, "validation samples");
    cmd->add_option("--seed", f.seed, "validation seed");
    cmd->add_option("--tol", f.tol, "validation tolerance");
    cmd->add_option("--alpha", f.alpha, "feedback gain");
    cmd->add_option("--power", f.power, "power demand P");
    cmd->add_option("--h-list", f.h_list, "comma-separated step sizes");
}

phdae::RunConfig resolve(const Flags& f) {
    phdae::RunConfig c = f.config ? phdae::read_config_file(*f.config) : phdae::RunConfig{};
    if (f.scenario) c.scenario = *f.scenario;
    if (f.model) c.model_path = *f.model;
    if (f.stages) c.stages = *f.stages;
    if (f.h) c.h = *f.h;
    if (f.t_final) c.t_final = *f.t_final;
    if (f.out) c.out = *f.out;
    if (f.samples) c.samples = *f.samples;
    if (f.seed) c.seed = *f.seed;
    if (f.tol) c.tol = *f.tol;
    if (f.alpha) c.settings.alpha = *f.alpha;
    if (f.power) c.settings.power = *f.power;
    if (f.h_list) c.h_list = phdae::parse_h_list(*f.h_list);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Port-Hamiltonian descriptor systems: validation, simulation and convergence studies"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    Flags flags;
    CLI::App* validate = app.add_subcommand("validate", "check the structural conditions by sampling");
    CLI::App* simulate = app.add_subcommand("simulate", "integrate a scenario and write CSV");
    CLI::App* convergence = app.add_subcommand("convergence", "observed order against a fine reference");
    for (CLI::App* cmd : {validate, simulate, convergence}) {
        cmd->set_help_flag("--help", "print this help message and exit");
        add_flags(cmd, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : phdae::exit_usage;
    }

    phdae::RunConfig config;
    try {
        config = resolve(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return phdae::exit_usage;
    }

    if (validate->parsed()) return phdae::cmd_validate(config, std::cout, std::cerr);
    if (simulate->parsed()) return phdae::cmd_simulate(config, std::cout, std::cerr);
    return phdae::cmd_convergence(config, std::cout, std::cerr);
}

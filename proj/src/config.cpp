#include "phdae/config.hpp"

#include "phdae/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace phdae {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) throw Error("'" + text + "' is not a number");
    return value;
}

long long to_integer(const std::string& text) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw Error("'" + text + "' is not an integer");
    return value;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"scenario", [](RunConfig& c, const std::string& v) { c.scenario = v; }},
        {"model", [](RunConfig& c, const std::string& v) { c.model_path = v; }},
        {"L", [](RunConfig& c, const std::string& v) { c.settings.params.L = to_double(v); }},
        {"C1", [](RunConfig& c, const std::string& v) { c.settings.params.C1 = to_double(v); }},
        {"C2", [](RunConfig& c, const std::string& v) { c.settings.params.C2 = to_double(v); }},
        {"RL", [](RunConfig& c, const std::string& v) { c.settings.params.RL = to_double(v); }},
        {"RG", [](RunConfig& c, const std::string& v) { c.settings.params.RG = to_double(v); }},
        {"RR", [](RunConfig& c, const std::string& v) { c.settings.params.RR = to_double(v); }},
        {"P", [](RunConfig& c, const std::string& v) { c.settings.power = to_double(v); }},
        {"alpha", [](RunConfig& c, const std::string& v) { c.settings.alpha = to_double(v); }},
        {"ramp_switch",
         [](RunConfig& c, const std::string& v) {
             if (v == "none") {
                 c.settings.ramp_switch.reset();
             } else {
                 c.settings.ramp_switch = to_double(v);
             }
         }},
        {"stages", [](RunConfig& c, const std::string& v) { c.stages = static_cast<int>(to_integer(v)); }},
        {"h", [](RunConfig& c, const std::string& v) { c.h = to_double(v); }},
        {"t_final", [](RunConfig& c, const std::string& v) { c.t_final = to_double(v); }},
        {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
        {"seed",
         [](RunConfig& c, const std::string& v) {
             const long long s = to_integer(v);
             if (s < 0) throw Error("seed must be non-negative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"samples", [](RunConfig& c, const std::string& v) { c.samples = static_cast<int>(to_integer(v)); }},
        {"tol", [](RunConfig& c, const std::string& v) { c.tol = to_double(v); }},
        {"h_list", [](RunConfig& c, const std::string& v) { c.h_list = parse_h_list(v); }},
        {"newton_abs_tol", [](RunConfig& c, const std::string& v) { c.newton.abs_tol = to_double(v); }},
        {"newton_rel_tol", [](RunConfig& c, const std::string& v) { c.newton.rel_tol = to_double(v); }},
        {"newton_max_iterations",
         [](RunConfig& c, const std::string& v) { c.newton.max_iterations = static_cast<int>(to_integer(v)); }},
        {"newton_fd_scale", [](RunConfig& c, const std::string& v) { c.newton.fd_scale = to_double(v); }},
    };
    return table;
}

}  // namespace

void RunConfig::validate() const {
    if (stages < 1 || stages > 5) throw Error("stages must lie in [1, 5]");
    if (!(h > 0.0)) throw Error("h must be positive");
    if (t_final && !(*t_final > 0.0)) throw Error("t_final must be positive");
    if (samples < 1) throw Error("samples must be at least 1");
    if (!(tol > 0.0)) throw Error("tol must be positive");
    for (double v : h_list) {
        if (!(v > 0.0)) throw Error("h_list entries must be positive");
    }
    if (!(newton.abs_tol > 0.0) || !(newton.rel_tol >= 0.0)) throw Error("Newton tolerances must be positive");
    if (newton.max_iterations < 1) throw Error("newton_max_iterations must be at least 1");
    if (!(newton.fd_scale > 0.0)) throw Error("newton_fd_scale must be positive");
    settings.params.validate();
    if (!(settings.power >= 0.0)) throw Error("P must be non-negative");
    if (!(settings.alpha >= 0.0)) throw Error("alpha must be non-negative");
    if (settings.ramp_switch && !(*settings.ramp_switch > 0.0)) throw Error("ramp_switch must be positive");
}

std::vector<double> parse_h_list(const std::string& text) {
    std::string spaced = text;
    for (char& ch : spaced) {
        if (ch == ',') ch = ' ';
    }
    std::istringstream is(spaced);
    std::vector<double> out;
    for (std::string tok; is >> tok;) {
        const double v = to_double(tok);
        if (!(v > 0.0)) throw Error("step sizes must be positive");
        out.push_back(v);
    }
    return out;
}

RunConfig read_config(std::istream& in, RunConfig base) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "", "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ParseError(line_no, key, "unknown key '" + key + "'");
        if (value.empty()) throw ParseError(line_no, key, "missing value");
        try {
            it->second(base, value);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, key, e.what());
        }
    }
    return base;
}

RunConfig read_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_config(in, std::move(base));
}

}  // namespace phdae

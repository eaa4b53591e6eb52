#include "phdae/error.hpp"
#include "phdae/model.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace phdae {

namespace {

constexpr int kSkew = 0;
constexpr int kSymmetry = 1;
constexpr int kPsd = 2;
constexpr int kGradX = 3;
constexpr int kGradT = 4;
constexpr int kChecks = 5;

const char* const kNames[kChecks] = {"skew", "symmetry", "psd", "grad_x", "grad_t"};

// Floor on the gradient tolerance when dH is approximated by central differences.
constexpr double kFiniteDifferenceTol = 1e-8;

struct Sample {
    double t;
    Vec x;
};

struct SampleResult {
    double raw[kChecks] = {};
    double scaled[kChecks] = {};
    double hamiltonian = 0.0;
    bool finite = true;
    std::string bad_coefficient;
    std::exception_ptr error;
};

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string first_non_finite(const Coefficients& c) {
    const auto bad = [](const auto& a) { return !a.allFinite(); };
    if (bad(c.E)) return "E";
    if (bad(c.J)) return "J";
    if (bad(c.R)) return "R";
    if (bad(c.B)) return "B";
    if (bad(c.P)) return "P";
    if (bad(c.S)) return "S";
    if (bad(c.N)) return "N";
    if (bad(c.z)) return "z";
    if (bad(c.r)) return "r";
    return {};
}

std::vector<Sample> draw_samples(const PhdaeModel& model, const SampleBox& box, int count,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Sample s;
        s.t = box.t_lo + (box.t_hi - box.t_lo) * unit(rng);
        s.x.resize(model.n);
        for (Index i = 0; i < model.n; ++i) s.x[i] = box.x_lo[i] + (box.x_hi[i] - box.x_lo[i]) * unit(rng);
        samples.push_back(std::move(s));
    }
    return samples;
}

SampleResult evaluate_sample(const PhdaeModel& model, const Sample& s) {
    SampleResult out;
    try {
        const Coefficients c = model.evaluate(s.t, s.x);
        out.bad_coefficient = first_non_finite(c);
        out.hamiltonian = model.H(s.t, s.x);
        if (!out.bad_coefficient.empty() || !std::isfinite(out.hamiltonian)) {
            if (out.bad_coefficient.empty()) out.bad_coefficient = "H";
            out.finite = false;
            return out;
        }

        const Mat gamma = gamma_of(c);
        out.raw[kSkew] = max_abs(Mat(gamma + gamma.transpose()));
        out.scaled[kSkew] = out.raw[kSkew] / (1.0 + max_abs(gamma));

        const Mat w = dissipation_of(c);
        out.raw[kSymmetry] = max_abs(Mat(w - w.transpose()));
        out.scaled[kSymmetry] = out.raw[kSymmetry] / (1.0 + max_abs(w));

        if (w.size() > 0) {
            const Mat sym = 0.5 * (w + w.transpose());
            Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
            const Vec& lambda = eig.eigenvalues();
            out.raw[kPsd] = lambda.minCoeff();
            out.scaled[kPsd] = std::max(0.0, -out.raw[kPsd]) / (1.0 + lambda.cwiseAbs().maxCoeff());
        }

        const Vec etz = c.E.transpose() * c.z;
        const Vec gx = model.grad_x(s.t, s.x);
        const double ztr = c.z.dot(c.r);
        const double gt = model.grad_t(s.t, s.x);
        if (!gx.allFinite() || !std::isfinite(gt)) {
            out.bad_coefficient = "grad H";
            out.finite = false;
            return out;
        }
        const double h_scale = std::abs(out.hamiltonian);
        out.raw[kGradX] = max_abs(Vec(gx - etz));
        out.scaled[kGradX] = out.raw[kGradX] / (1.0 + max_abs(etz) + (model.grad_H_x ? 0.0 : h_scale));
        out.raw[kGradT] = std::abs(gt - ztr);
        out.scaled[kGradT] = out.raw[kGradT] / (1.0 + std::abs(ztr) + (model.grad_H_t ? 0.0 : h_scale));
    } catch (...) {
        out.error = std::current_exception();
    }
    return out;
}

std::string describe_point(const Sample& s) {
    std::ostringstream os;
    os << std::setprecision(17) << "t=" << s.t << " x=[";
    for (Index i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << s.x[i];
    os << "]";
    return os.str();
}

ValidationReport merge(const PhdaeModel& model, const SampleBox& box, int count, std::uint64_t seed,
                       double tol, const std::vector<Sample>& samples,
                       const std::vector<SampleResult>& results) {
    ValidationReport report;
    report.count = count;
    report.seed = seed;
    report.box = box;
    report.min_hamiltonian = std::numeric_limits<double>::infinity();

    const double tolerances[kChecks] = {
        tol, tol, tol, model.grad_H_x ? tol : std::max(tol, kFiniteDifferenceTol),
        model.grad_H_t ? tol : std::max(tol, kFiniteDifferenceTol)};

    int best[kChecks] = {-1, -1, -1, -1, -1};
    for (std::size_t k = 0; k < results.size(); ++k) {
        const SampleResult& r = results[k];
        if (r.error) std::rethrow_exception(r.error);
        if (!r.finite) {
            report.failure = "non-finite " + r.bad_coefficient + " at " + describe_point(samples[k]);
            break;
        }
        report.min_hamiltonian = std::min(report.min_hamiltonian, r.hamiltonian);
        for (int c = 0; c < kChecks; ++c) {
            if (best[c] < 0) {
                best[c] = static_cast<int>(k);
                continue;
            }
            const SampleResult& b = results[static_cast<std::size_t>(best[c])];
            // Eigenvalue ties are broken towards the most negative raw value.
            const double rk = c == kPsd ? -r.raw[c] : r.raw[c];
            const double bk = c == kPsd ? -b.raw[c] : b.raw[c];
            if (r.scaled[c] > b.scaled[c] || (r.scaled[c] == b.scaled[c] && rk > bk)) {
                best[c] = static_cast<int>(k);
            }
        }
    }

    report.pass = !report.failure.has_value();
    for (int c = 0; c < kChecks; ++c) {
        ConditionCheck check;
        check.name = kNames[c];
        check.tolerance = tolerances[c];
        if (best[c] >= 0) {
            const auto k = static_cast<std::size_t>(best[c]);
            check.worst = results[k].raw[c];
            check.scaled = results[k].scaled[c];
            check.t = samples[k].t;
            check.x = samples[k].x;
        }
        check.ok = !report.failure && check.scaled <= check.tolerance;
        report.pass = report.pass && check.ok;
        report.checks.push_back(std::move(check));
    }
    return report;
}

void require_arguments(const PhdaeModel& model, const SampleBox& box, int count, double tol) {
    if (count < 1) throw Error("validate_structure: sample count must be at least 1");
    if (!(tol > 0.0)) throw Error("validate_structure: tolerance must be positive");
    if (box.x_lo.size() != model.n || box.x_hi.size() != model.n) {
        throw DimensionError("validate_structure: sample box dimension does not match the state");
    }
    if (box.t_hi < box.t_lo || (model.n > 0 && (box.x_hi - box.x_lo).minCoeff() < 0.0)) {
        throw Error("validate_structure: sample box is empty");
    }
}

}  // namespace

SampleBox SampleBox::uniform(Index n, double half_width, double t_lo, double t_hi) {
    return SampleBox{t_lo, t_hi, Vec::Constant(n, -half_width), Vec::Constant(n, half_width)};
}

const ConditionCheck& ValidationReport::check(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return c;
    }
    throw Error("no validation check named " + name);
}

std::string to_string(const ValidationReport& report) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "structure validation: " << (report.pass ? "PASS" : "FAIL") << " (" << report.count
       << " samples, seed " << report.seed << ", t in [" << report.box.t_lo << ", " << report.box.t_hi
       << "])\n";
    if (report.failure) os << "  error: " << *report.failure << "\n";
    for (const auto& c : report.checks) {
        os << "  " << std::left << std::setw(9) << c.name << (c.ok ? "ok   " : "FAIL ")
           << " worst=" << std::setw(13) << c.worst << " scaled=" << std::setw(13) << c.scaled
           << " tol=" << c.tolerance << " at t=" << c.t << "\n";
    }
    os << "  min sampled H (advisory): " << report.min_hamiltonian << "\n";
    return os.str();
}

ValidationReport validate_structure(const PhdaeModel& model, const SampleBox& box, int count,
                                    std::uint64_t seed, double tol) {
    require_arguments(model, box, count, tol);
    const std::vector<Sample> samples = draw_samples(model, box, count, seed);
    std::vector<SampleResult> results(samples.size());
    const auto total = static_cast<long>(samples.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < total; ++k) {
        results[static_cast<std::size_t>(k)] = evaluate_sample(model, samples[static_cast<std::size_t>(k)]);
    }
    return merge(model, box, count, seed, tol, samples, results);
}

ValidationReport validate_structure_serial(const PhdaeModel& model, const SampleBox& box, int count,
                                           std::uint64_t seed, double tol) {
    require_arguments(model, box, count, tol);
    const std::vector<Sample> samples = draw_samples(model, box, count, seed);
    std::vector<SampleResult> results;
    results.reserve(samples.size());
    for (const auto& s : samples) results.push_back(evaluate_sample(model, s));
    return merge(model, box, count, seed, tol, samples, results);
}

}  // namespace phdae

#include "varipade/benchmarks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "varipade/error.hpp"

namespace varipade {

namespace {

std::vector<FamilySpec> structures(std::initializer_list<const char*> names) {
    std::vector<FamilySpec> out;
    for (const char* n : names) out.push_back(parse_structure(n));
    return out;
}

BenchmarkCase make_case(int id, const char* name, const char* integrand, BoundaryCondition bc, Trajectory exact,
                        double j_exact, std::initializer_list<const char*> defaults) {
    BenchmarkCase c{id, Problem{name, parse_integrand(integrand), bc, std::move(exact), j_exact}, j_exact,
                    std::nullopt, structures(defaults)};
    return c;
}

}  // namespace

std::vector<BenchmarkCase> builtin_cases() {
    constexpr double pi = std::numbers::pi;
    std::vector<BenchmarkCase> cases;

    cases.push_back(make_case(
        1, "shortest-path", "sqrt(1 + dy^2)", {-1.0, 1.0, 0.0, 2.0},
        [](double x) { return std::pair{x + 1.0, 1.0}; }, 2.0 * std::numbers::sqrt2,
        {"Pade-[5/5]", "RBF-[8]", "MLP-[[8,sigmoid]]", "Leg-10", "Poly-10"}));

    cases.push_back(make_case(
        2, "minimum-drag", "y * dy^3", {0.0, 1.0, 0.0, 1.0},
        [](double x) { return std::pair{std::pow(x, 0.75), 0.75 * std::pow(x, -0.25)}; }, 27.0 / 64.0,
        {"Pade-[8/10]", "RBF-[8]", "MLP-[[16,sigmoid]]", "Leg-15", "Poly-15"}));

    // Integrating (1-x)^2/4 + x(1-x)/2 over [0, 1] gives 1/12 + 1/12 = 1/6.
    cases.push_back(make_case(
        3, "linear-drift", "dy^2 + x*dy", {0.0, 1.0, 0.0, 0.25},
        [](double x) { return std::pair{0.5 * x * (1.0 - 0.5 * x), 0.5 - 0.5 * x}; }, 1.0 / 6.0,
        {"Pade-[8/10]", "RBF-[16]", "MLP-[[16,sigmoid]]", "Leg-15"}));
    cases.back().j_reported = 5.0 / 3.0;

    cases.push_back(make_case(
        4, "cosine-load", "dy^2 - 2*y*cos(x + pi/2)", {-pi / 2, pi / 2, 0.0, 0.0},
        [](double x) { return std::pair{std::cos(x + pi / 2) + 2.0 / pi * x, -std::sin(x + pi / 2) + 2.0 / pi}; },
        4.0 / pi - pi / 2.0, {"Pade-[4/5]", "RBF-[16]", "MLP-[[16,sigmoid]]", "Leg-15"}));

    cases.push_back(make_case(
        5, "harmonic-load", "dy^2 - y^2 - 2*x*y", {0.0, 1.0, 0.0, 0.0},
        [](double x) { return std::pair{std::sin(x) / std::sin(1.0) - x, std::cos(x) / std::sin(1.0) - 1.0}; },
        1.0 / std::tan(1.0) - 2.0 / 3.0, {"Pade-[4/5]", "RBF-[16]", "MLP-[[16,sigmoid]]", "Leg-15"}));

    return cases;
}

std::optional<BenchmarkCase> find_case(const std::string& name_or_id) {
    for (auto& c : builtin_cases())
        if (c.problem.name == name_or_id || std::to_string(c.id) == name_or_id) return c;
    return std::nullopt;
}

std::string builtin_case_names() {
    std::string out;
    for (const auto& c : builtin_cases()) {
        if (!out.empty()) out += ", ";
        out += c.problem.name;
    }
    return out;
}

double relative_error(double j_exact, double j_net) {
    if (!(std::abs(j_exact) >= 1e-300)) throw DegenerateReference("relative error needs a nonzero reference value");
    return (j_exact - j_net) / j_exact;
}

bool MatrixReport::all_succeeded() const {
    return std::all_of(rows.begin(), rows.end(), [](const MatrixRow& r) { return r.status != TrainStatus::failed; });
}

std::vector<const MatrixRow*> MatrixReport::rows_for(int case_id) const {
    std::vector<const MatrixRow*> out;
    for (const auto& r : rows)
        if (r.case_id == case_id) out.push_back(&r);
    return out;
}

namespace {

struct Job {
    const BenchmarkCase* bench;
    FamilySpec spec;
};

MatrixRow run_pair(const Job& job, const MatrixOptions& options) {
    MatrixRow row;
    row.case_id = job.bench->id;
    row.structure = to_string(job.spec);
    row.n_params = param_count(job.spec);
    row.j_exact = job.bench->j_exact_analytic;

    std::vector<std::pair<double, TrainReport>> runs;
    for (int s = 0; s < options.seeds; ++s) {
        TrainConfig config = options.config;
        config.seed = options.config.seed + static_cast<std::uint64_t>(s);
        TrainReport report = train(job.bench->problem, job.spec, config);
        row.wall_time_ms += report.wall_time_ms;
        if (report.status == TrainStatus::failed) {
            if (row.failure_reason.empty())
                row.failure_reason = "seed " + std::to_string(config.seed) + ": " + report.failure_reason;
            if (runs.empty() && s == options.seeds - 1) row.curve = std::move(report);
            continue;
        }
        row.seed_j_finals.push_back(report.j_final);
        runs.emplace_back(report.j_final, std::move(report));
    }

    if (runs.empty()) {
        row.status = TrainStatus::failed;
        row.j_final = row.j_min = row.relative_error = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    // Lower median; stable so ties keep seed order.
    std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& median = runs[(runs.size() - 1) / 2];
    row.j_final = median.first;
    row.j_min = runs.front().first;
    row.relative_error = relative_error(row.j_exact, row.j_final);
    row.status = median.second.status;
    row.curve = std::move(median.second);
    return row;
}

MatrixReport run_jobs(const std::vector<Job>& jobs, const MatrixOptions& options) {
    if (options.seeds < 1) throw PreconditionError("seed count must be positive");
    validate(options.config);

    MatrixReport report;
    report.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) report.rows[i] = run_pair(jobs[i], options);
    };
    const int threads = std::clamp(options.parallel, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return report;
}

}  // namespace

MatrixReport run_matrix(const std::vector<BenchmarkCase>& cases, const std::vector<FamilySpec>& structures,
                        const MatrixOptions& options) {
    if (cases.empty()) throw PreconditionError("benchmark matrix needs at least one case");
    if (structures.empty()) throw PreconditionError("benchmark matrix needs at least one structure");
    std::vector<Job> jobs;
    for (const auto& c : cases)
        for (const auto& s : structures) jobs.push_back({&c, s});
    return run_jobs(jobs, options);
}

MatrixReport run_default_matrix(const std::vector<BenchmarkCase>& cases, const MatrixOptions& options) {
    if (cases.empty()) throw PreconditionError("benchmark matrix needs at least one case");
    std::vector<Job> jobs;
    for (const auto& c : cases) {
        if (c.default_structures.empty())
            throw PreconditionError("case " + std::to_string(c.id) + " has no default structures");
        for (const auto& s : c.default_structures) jobs.push_back({&c, s});
    }
    return run_jobs(jobs, options);
}

}  // namespace varipade

#include "varipade/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "varipade/benchmarks.hpp"
#include "varipade/error.hpp"
#include "varipade/report_io.hpp"

namespace varipade {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config files

namespace {

const char* to_string(Algorithm a) { return a == Algorithm::adam ? "adam" : "sgd"; }
const char* to_string(GridMode m) { return m == GridMode::midpoint ? "midpoint" : "random"; }

Algorithm parse_algorithm(const std::string& s) {
    if (s == "adam") return Algorithm::adam;
    if (s == "sgd") return Algorithm::sgd;
    throw PreconditionError("unknown algorithm '" + s + "' (expected adam or sgd)");
}

GridMode parse_grid_mode(const std::string& s) {
    if (s == "midpoint") return GridMode::midpoint;
    if (s == "random") return GridMode::random;
    throw PreconditionError("unknown grid mode '" + s + "' (expected midpoint or random)");
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("config field '") + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const TrainConfig& c) {
    return {{"algorithm", to_string(c.algorithm)},
            {"learning_rate", c.learning_rate},
            {"steps", c.steps},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_eps", c.adam_eps},
            {"grid_n", c.grid_n},
            {"grid_mode", to_string(c.grid_mode)},
            {"seed", c.seed},
            {"record_every", c.record_every},
            {"train_exponents", c.train_exponents},
            {"early_stop", c.early_stop},
            {"early_stop_tol", c.early_stop_tol},
            {"early_stop_window", c.early_stop_window}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
    if (!j.is_object()) throw PreconditionError("'train' must be an object");
    std::string algorithm = to_string(c.algorithm);
    std::string grid_mode = to_string(c.grid_mode);
    read_field(j, "algorithm", algorithm);
    read_field(j, "learning_rate", c.learning_rate);
    read_field(j, "steps", c.steps);
    read_field(j, "adam_beta1", c.adam_beta1);
    read_field(j, "adam_beta2", c.adam_beta2);
    read_field(j, "adam_eps", c.adam_eps);
    read_field(j, "grid_n", c.grid_n);
    read_field(j, "grid_mode", grid_mode);
    read_field(j, "seed", c.seed);
    read_field(j, "record_every", c.record_every);
    read_field(j, "train_exponents", c.train_exponents);
    read_field(j, "early_stop", c.early_stop);
    read_field(j, "early_stop_tol", c.early_stop_tol);
    read_field(j, "early_stop_window", c.early_stop_window);
    c.algorithm = parse_algorithm(algorithm);
    c.grid_mode = parse_grid_mode(grid_mode);
    validate(c);
    return c;
}

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw PreconditionError("run config must be a JSON object");
    RunConfig rc;
    rc.train.seed = default_seed();

    if (!j.contains("problem") || !j.at("problem").is_object())
        throw PreconditionError("run config needs a 'problem' object");
    const json& p = j.at("problem");
    const bool builtin = p.contains("builtin");
    const bool custom = p.contains("integrand");
    if (builtin == custom)
        throw PreconditionError("'problem' needs exactly one of 'builtin' or 'integrand'");
    if (builtin) {
        read_field(p, "builtin", rc.problem.builtin);
    } else {
        read_field(p, "integrand", rc.problem.integrand);
        for (const char* key : {"x_a", "x_b", "y_a", "y_b"})
            if (!p.contains(key)) throw PreconditionError(std::string("custom problem needs '") + key + "'");
        read_field(p, "x_a", rc.problem.bc.x_a);
        read_field(p, "x_b", rc.problem.bc.x_b);
        read_field(p, "y_a", rc.problem.bc.y_a);
        read_field(p, "y_b", rc.problem.bc.y_b);
        if (p.contains("j_exact") && !p.at("j_exact").is_null()) {
            double v = 0.0;
            read_field(p, "j_exact", v);
            rc.problem.j_exact = v;
        }
    }
    read_field(j, "structure", rc.structure);
    read_field(j, "output_dir", rc.output_dir);
    if (j.contains("train")) rc.train = train_config_from_json(j.at("train"), rc.train);
    return rc;
}

json to_json(const RunConfig& rc) {
    json problem;
    if (!rc.problem.builtin.empty()) {
        problem = {{"builtin", rc.problem.builtin}};
    } else {
        problem = {{"integrand", rc.problem.integrand},
                   {"x_a", rc.problem.bc.x_a},
                   {"x_b", rc.problem.bc.x_b},
                   {"y_a", rc.problem.bc.y_a},
                   {"y_b", rc.problem.bc.y_b}};
        if (rc.problem.j_exact) problem["j_exact"] = *rc.problem.j_exact;
    }
    return {{"problem", problem}, {"structure", rc.structure}, {"train", to_json(rc.train)},
            {"output_dir", rc.output_dir}};
}

Problem resolve_problem(const ProblemSource& source) {
    if (!source.builtin.empty()) {
        auto c = find_case(source.builtin);
        if (!c)
            throw PreconditionError("unknown builtin problem '" + source.builtin + "'; choose one of " +
                                    builtin_case_names());
        return c->problem;
    }
    validate(source.bc);
    return Problem{"custom", parse_integrand(source.integrand), source.bc, {}, source.j_exact};
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("VARIPADE_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
    }
    return 42;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct RunFlags {
    std::string config_path;
    std::string problem, integrand;
    double xa = 0, xb = 1, ya = 0, yb = 0, j_exact = 0;
    std::string structure, algorithm, grid;
    double lr = 0, beta1 = 0, beta2 = 0, eps = 0;
    int steps = 0, samples = 0, record_every = 0, retry = 0;
    std::uint64_t seed = 0;
    bool train_exponents = false, early_stop = false;
    std::string out;
};

struct BenchFlags {
    std::vector<std::string> cases, structures;
    int seeds = 1, parallel = 1;
    int steps = 0, samples = 0, record_every = 0;
    double lr = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
    bool train_exponents = false;
    std::string out = "bench";
};

struct PlotFlags {
    std::string curves, svg, title;
    bool logy = false, gap = false;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + path.string());
    f << content;
    if (!f) throw PreconditionError("failed writing " + path.string());
}

json summary_json(const RunConfig& rc, const Problem& problem, const FamilySpec& spec, const TrainReport& r) {
    json s;
    s["problem"] = problem.name;
    s["structure"] = to_string(spec);
    s["n_params"] = param_count(spec);
    s["j_final"] = nullable(r.j_final);
    s["j_exact"] = problem.j_exact ? json(*problem.j_exact) : json(nullptr);
    s["relative_error"] = problem.j_exact && std::abs(*problem.j_exact) >= 1e-300 && std::isfinite(r.j_final)
                              ? json(relative_error(*problem.j_exact, r.j_final))
                              : json(nullptr);
    if (!rc.problem.builtin.empty())
        if (auto c = find_case(rc.problem.builtin); c && c->j_reported)
            s["j_reported"] = *c->j_reported;
    s["status"] = to_string(r.status);
    if (r.status == TrainStatus::failed) s["failure_reason"] = r.failure_reason;
    s["wall_time_ms"] = r.wall_time_ms;
    s["final_params"] = r.final_params;
    s["final_exponents"] = {{"rho_a", r.final_exponents.rho_a}, {"rho_b", r.final_exponents.rho_b}};
    s["config"] = to_json(rc);
    return s;
}

int cmd_run(CLI::App& app, const RunFlags& f, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    rc.train.seed = default_seed();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw PreconditionError("cannot open config " + f.config_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw PreconditionError("config " + f.config_path + " is not valid JSON: " + e.what());
        }
        rc = run_config_from_json(j);
    }
    auto given = [&](const char* name) { return app.count(name) > 0; };

    if (given("--problem") && given("--integrand"))
        throw PreconditionError("--problem and --integrand are mutually exclusive");
    if (given("--problem")) rc.problem = ProblemSource{f.problem, {}, {}, {}};
    if (given("--integrand")) {
        rc.problem = ProblemSource{};
        rc.problem.integrand = f.integrand;
        rc.problem.bc = {f.xa, f.xb, f.ya, f.yb};
        if (given("--j-exact")) rc.problem.j_exact = f.j_exact;
    }
    if (rc.problem.builtin.empty() && rc.problem.integrand.empty())
        throw PreconditionError("no problem given; use --problem NAME (" + builtin_case_names() +
                                "), --integrand, or --config");
    if (given("--structure")) rc.structure = f.structure;
    if (given("--algorithm")) rc.train.algorithm = parse_algorithm(f.algorithm);
    if (given("--grid")) rc.train.grid_mode = parse_grid_mode(f.grid);
    if (given("--lr")) rc.train.learning_rate = f.lr;
    if (given("--beta1")) rc.train.adam_beta1 = f.beta1;
    if (given("--beta2")) rc.train.adam_beta2 = f.beta2;
    if (given("--eps")) rc.train.adam_eps = f.eps;
    if (given("--steps")) rc.train.steps = f.steps;
    if (given("--samples")) rc.train.grid_n = f.samples;
    if (given("--record-every")) rc.train.record_every = f.record_every;
    if (given("--seed")) rc.train.seed = f.seed;
    if (given("--train-exponents")) rc.train.train_exponents = f.train_exponents;
    if (given("--early-stop")) rc.train.early_stop = f.early_stop;
    if (given("--out")) rc.output_dir = f.out;
    validate(rc.train);

    const Problem problem = resolve_problem(rc.problem);
    const FamilySpec spec = parse_structure(rc.structure);

    TrainReport report = train(problem, spec, rc.train);
    for (int attempt = 0; attempt < f.retry && report.status == TrainStatus::failed; ++attempt) {
        err << "run failed (" << report.failure_reason << "); retrying with seed " << rc.train.seed + 1 << '\n';
        ++rc.train.seed;
        report = train(problem, spec, rc.train);
    }

    const fs::path dir(rc.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw PreconditionError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::ostringstream loss;
    write_loss_csv(loss, report, problem.j_exact);
    write_file(dir / "loss.csv", loss.str());
    write_file(dir / "summary.json", summary_json(rc, problem, spec, report).dump(2) + "\n");

    out << problem.name << ' ' << to_string(spec) << " (" << param_count(spec) << " params): J = "
        << format_real(report.j_final);
    if (problem.j_exact && std::abs(*problem.j_exact) >= 1e-300 && std::isfinite(report.j_final))
        out << ", exact " << format_real(*problem.j_exact) << ", relative error "
            << relative_error(*problem.j_exact, report.j_final);
    out << ", " << to_string(report.status) << ", " << report.wall_time_ms << " ms\n";
    if (report.status == TrainStatus::failed) {
        err << "training failed: " << report.failure_reason << '\n';
        return 2;
    }
    return 0;
}

int cmd_bench(CLI::App& app, const BenchFlags& f, std::ostream& out, std::ostream& err) {
    auto given = [&](const char* name) { return app.count(name) > 0; };

    MatrixOptions options;
    options.config.seed = default_seed();
    if (given("--seed")) options.config.seed = f.seed;
    if (given("--steps")) options.config.steps = f.steps;
    if (given("--samples")) options.config.grid_n = f.samples;
    if (given("--lr")) options.config.learning_rate = f.lr;
    if (given("--record-every")) options.config.record_every = f.record_every;
    if (given("--algorithm")) options.config.algorithm = parse_algorithm(f.algorithm);
    if (given("--train-exponents")) options.config.train_exponents = f.train_exponents;
    options.seeds = f.seeds;
    options.parallel = f.parallel;

    std::vector<BenchmarkCase> cases;
    if (f.cases.empty()) {
        cases = builtin_cases();
    } else {
        for (const auto& name : f.cases) {
            auto c = find_case(name);
            if (!c) throw PreconditionError("unknown case '" + name + "'; choose one of " + builtin_case_names());
            cases.push_back(std::move(*c));
        }
    }

    MatrixReport report;
    if (f.structures.empty()) {
        report = run_default_matrix(cases, options);
    } else {
        std::vector<FamilySpec> specs;
        for (const auto& s : f.structures) specs.push_back(parse_structure(s));
        report = run_matrix(cases, specs, options);
    }

    const fs::path dir(f.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw PreconditionError("cannot create output directory " + dir.string() + ": " + ec.message());

    json summary = json::array();
    for (const auto& c : cases) {
        const auto rows = report.rows_for(c.id);
        std::ostringstream table, curves;
        write_table_csv(table, rows);
        write_curves_csv(curves, rows);
        write_file(dir / ("table" + std::to_string(c.id) + ".csv"), table.str());
        write_file(dir / ("curves" + std::to_string(c.id) + ".csv"), curves.str());

        json entry = {{"case", c.id}, {"problem", c.problem.name}, {"j_exact", c.j_exact_analytic}};
        if (c.j_reported) entry["j_reported"] = *c.j_reported;
        json jr = json::array();
        out << "case " << c.id << " (" << c.problem.name << "), J_exact = " << format_real(c.j_exact_analytic);
        if (c.j_reported) out << " [reported value " << format_real(*c.j_reported) << " differs]";
        out << '\n';
        for (const MatrixRow* r : rows) {
            out << "  " << r->structure << "  params=" << r->n_params << "  J=" << format_real(r->j_final)
                << "  rel.err=" << r->relative_error << "  " << to_string(r->status) << '\n';
            if (r->status == TrainStatus::failed) err << "  " << r->structure << ": " << r->failure_reason << '\n';
            jr.push_back({{"structure", r->structure},
                          {"n_params", r->n_params},
                          {"j_final", nullable(r->j_final)},
                          {"relative_error", nullable(r->relative_error)},
                          {"seed_j_finals", r->seed_j_finals},
                          {"status", to_string(r->status)},
                          {"wall_time_ms", r->wall_time_ms}});
        }
        entry["rows"] = jr;
        summary.push_back(entry);
    }
    write_file(dir / "summary.json",
               json{{"config", to_json(options.config)}, {"seeds", options.seeds}, {"cases", summary}}.dump(2) + "\n");
    return report.all_succeeded() ? 0 : 2;
}

int cmd_plot(const PlotFlags& f, std::ostream& out, std::ostream& err) {
    std::ifstream in(f.curves);
    if (!in) throw PreconditionError("cannot open " + f.curves);
    const auto points = read_curves_csv(in);
    PlotOptions options;
    options.log_y = f.logy;
    options.plot_gap = f.gap;
    if (!f.title.empty()) options.title = f.title;
    write_file(f.svg, render_svg(points, options, err));
    out << "wrote " << f.svg << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fixed-endpoint variational problems solved with boundary-conforming approximators"};
    app.require_subcommand(1);

    RunFlags rf;
    CLI::App* run = app.add_subcommand("run", "train one structure on one problem");
    run->add_option("--config", rf.config_path, "JSON run config; flags override its fields");
    run->add_option("--problem", rf.problem, "builtin problem name or id (1-5)");
    run->add_option("--integrand", rf.integrand, "custom integrand F(x, y, dy)");
    run->add_option("--xa", rf.xa, "custom problem: left end");
    run->add_option("--xb", rf.xb, "custom problem: right end");
    run->add_option("--ya", rf.ya, "custom problem: y(x_a)");
    run->add_option("--yb", rf.yb, "custom problem: y(x_b)");
    run->add_option("--j-exact", rf.j_exact, "custom problem: known optimal J");
    run->add_option("--structure", rf.structure, "e.g. Pade-[5/5], MLP-[[8,sigmoid]], RBF-[8], Leg-10, Poly-10");
    run->add_option("--algorithm", rf.algorithm, "adam or sgd");
    run->add_option("--lr", rf.lr, "learning rate");
    run->add_option("--beta1", rf.beta1, "Adam beta1");
    run->add_option("--beta2", rf.beta2, "Adam beta2");
    run->add_option("--eps", rf.eps, "Adam epsilon");
    run->add_option("--steps", rf.steps, "optimizer steps");
    run->add_option("--samples", rf.samples, "quadrature points");
    run->add_option("--grid", rf.grid, "midpoint or random");
    run->add_option("--record-every", rf.record_every, "loss history stride");
    run->add_option("--seed", rf.seed, "initialization seed (default $VARIPADE_SEED or 42)");
    run->add_flag("--train-exponents,!--freeze-exponents", rf.train_exponents, "train the boundary exponents");
    run->add_flag("--early-stop", rf.early_stop, "stop when the loss stalls");
    run->add_option("--retry", rf.retry, "on failure, retry with seed+1 up to N times");
    run->add_option("--out", rf.out, "output directory");

    BenchFlags bf;
    CLI::App* bench = app.add_subcommand("bench", "train the benchmark matrix");
    bench->add_option("--cases", bf.cases, "case names or ids (default: all five)");
    bench->add_option("--structures", bf.structures, "structures (default: each case's own list)");
    bench->add_option("--seeds", bf.seeds, "seeds per pair; rows report the median J")->check(CLI::PositiveNumber);
    bench->add_option("--parallel", bf.parallel, "pairs trained concurrently")->check(CLI::PositiveNumber);
    bench->add_option("--steps", bf.steps, "optimizer steps");
    bench->add_option("--samples", bf.samples, "quadrature points");
    bench->add_option("--lr", bf.lr, "learning rate");
    bench->add_option("--algorithm", bf.algorithm, "adam or sgd");
    bench->add_option("--record-every", bf.record_every, "loss history stride");
    bench->add_option("--seed", bf.seed, "first seed (default $VARIPADE_SEED or 42)");
    bench->add_flag("--train-exponents,!--freeze-exponents", bf.train_exponents, "train the boundary exponents");
    bench->add_option("--out", bf.out, "output directory");

    PlotFlags pf;
    CLI::App* plot = app.add_subcommand("plot", "render a curves CSV as SVG");
    plot->add_option("curves", pf.curves, "curves CSV (structure,step,loss,j_gap)")->required();
    plot->add_option("svg", pf.svg, "output SVG path")->required();
    plot->add_flag("--logy", pf.logy, "log-scale loss axis");
    plot->add_flag("--gap", pf.gap, "plot loss - J_exact");
    plot->add_option("--title", pf.title, "plot title");

    std::vector<const char*> argv{"varipade"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(*run, rf, out, err);
        if (bench->parsed()) return cmd_bench(*bench, bf, out, err);
        return cmd_plot(pf, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace varipade

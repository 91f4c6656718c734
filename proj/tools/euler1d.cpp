#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "euler1d/characteristics.hpp"
#include "euler1d/monitors.hpp"
#include "euler1d/num_format.hpp"
#include "euler1d/run_io.hpp"
#include "euler1d/scenario.hpp"
#include "euler1d/solver.hpp"

namespace fs = std::filesystem;
using namespace euler1d;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;

Family family_from_string(const std::string& s) {
    if (s == "forward") return Family::Forward;
    if (s == "backward") return Family::Backward;
    throw std::invalid_argument("family must be 'forward' or 'backward', got '" + s + "'");
}

/// Columns x,u,eta,m on a uniform grid; fills the user_* scenario fields.
void load_user_fields(const fs::path& file, ScenarioSpec& spec) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("empty user field file " + file.string());
    std::vector<double> xs;
    spec.user_u.clear();
    spec.user_eta.clear();
    spec.user_m.clear();
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        double x, u, eta, m;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &u, &eta, &m) != 4)
            throw std::runtime_error("malformed row in " + file.string() + ": '" + line + "'");
        xs.push_back(x);
        spec.user_u.push_back(u);
        spec.user_eta.push_back(eta);
        spec.user_m.push_back(m);
    }
    if (xs.size() < 16) throw std::runtime_error("user field file needs at least 16 rows");
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * h)) > 1e-9 * std::abs(h))
            throw std::runtime_error("user field file must be sampled on a uniform grid");
    }
    spec.user_x_min = xs.front();
    spec.user_x_max = xs.back();
}

/// Adds a key to an existing run manifest (keeps every emitted file listed).
void append_manifest(const fs::path& dir, const std::string& key, const std::string& value) {
    KeyValueFile kv = KeyValueFile::parse_file(dir / "manifest.txt");
    kv.set(key, value);
    kv.write_file(dir / "manifest.txt");
}

struct SimulateOptions {
    std::string config_file;
    std::string scenario;
    double gamma = 0, K = 0, c_v = 0, amplitude = 0, width = 0, tau0 = 0, eta0 = 0;
    double entropy_amplitude = 0, entropy_width = 0, cycles = 0, epsilon = 0;
    std::string user_file;
    std::string system;
    double cfl = 0, t_end = 0;
    int stride = 0;
    double ux_blowup_factor = 0, rho_floor_factor = 0;
    long max_steps = 0;
    int n = 1024;
    std::string out;
};

int run_simulate(const CLI::App* cmd, const SimulateOptions& opt) {
    ScenarioSpec spec;
    SolverConfig config;
    int n = opt.n;
    std::string out = opt.out;

    if (!opt.config_file.empty()) {
        const KeyValueFile kv = KeyValueFile::parse_file(opt.config_file);
        spec = spec_from_keys(kv);
        config = config_from_keys(kv);
        if (kv.has("n")) n = static_cast<int>(kv.get_long("n"));
        if (kv.has("out")) out = kv.get("out");
        if (kv.has("user_file")) {
            fs::path p = kv.get("user_file");
            if (p.is_relative()) p = fs::path(opt.config_file).parent_path() / p;
            load_user_fields(p, spec);
        }
    }

    if (cmd->count("--scenario")) spec.name = opt.scenario;
    if (cmd->count("--gamma")) spec.gamma = opt.gamma;
    if (cmd->count("--K")) spec.K = opt.K;
    if (cmd->count("--c-v")) spec.c_v = opt.c_v;
    if (cmd->count("--amplitude")) spec.amplitude = opt.amplitude;
    if (cmd->count("--width")) spec.width = opt.width;
    if (cmd->count("--tau0")) spec.tau0 = opt.tau0;
    if (cmd->count("--eta0")) spec.eta0 = opt.eta0;
    if (cmd->count("--entropy-amplitude")) spec.entropy_amplitude = opt.entropy_amplitude;
    if (cmd->count("--entropy-width")) spec.entropy_width = opt.entropy_width;
    if (cmd->count("--cycles")) spec.cycles = opt.cycles;
    if (cmd->count("--epsilon")) spec.epsilon = opt.epsilon;
    if (cmd->count("--user-file")) load_user_fields(opt.user_file, spec);
    if (cmd->count("--system")) config.system = system_kind_from_string(opt.system);
    if (cmd->count("--cfl")) config.cfl = opt.cfl;
    if (cmd->count("--t-end")) config.t_end = opt.t_end;
    if (cmd->count("--stride")) config.stride = opt.stride;
    if (cmd->count("--ux-blowup-factor")) config.ux_blowup_factor = opt.ux_blowup_factor;
    if (cmd->count("--rho-floor-factor")) config.rho_floor_factor = opt.rho_floor_factor;
    if (cmd->count("--max-steps")) config.max_steps = opt.max_steps;
    if (cmd->count("--n")) n = opt.n;

    if (spec.epsilon != 0.0) require_valid_epsilon(spec.epsilon);
    config.validate();

    if (const char* env = std::getenv("EULER1D_OUT"); env != nullptr && *env != '\0') out = env;
    if (out.empty()) out = "runs/" + spec.name;

    const Scenario scenario(spec);
    const Grid1D grid = scenario.make_grid(config.t_end, n);
    const SolutionHistory history = run(scenario, grid, config);
    save_run(out, history, spec);

    std::cout << "scenario:    " << spec.name << " (gamma = " << g17(spec.gamma) << ")\n"
              << "grid:        n = " << grid.n << " over [" << g17(grid.x_min) << ", "
              << g17(grid.x_max) << "]\n"
              << "stop reason: " << to_string(history.stop_reason()) << " at t = "
              << g17(history.t_stop()) << " after " << history.steps_taken() << " steps\n"
              << "stored:      " << history.size() << " snapshots -> " << out << "\n";
    return kExitOk;
}

struct VerifyOptions {
    std::string dir;
    double epsilon = 0;
    double slack_gradient = MonitorSlack{}.gradient;
    double slack_density = MonitorSlack{}.density;
    double slack_slope = MonitorSlack{}.slope;
    double slack_upper = MonitorSlack{}.upper;
    double fit_from = 0, fit_to = 0;
};

int run_verify(const CLI::App* cmd, const VerifyOptions& opt) {
    if (cmd->count("--epsilon") && opt.epsilon != 0.0) require_valid_epsilon(opt.epsilon);

    RunMetadata meta;
    const SolutionHistory history = load_run(opt.dir, &meta);
    const double epsilon = cmd->count("--epsilon") ? opt.epsilon : meta.scenario.epsilon;
    if (epsilon != 0.0) require_valid_epsilon(epsilon);

    const TheoremConstants constants = theorem_constants(history.front(), epsilon);
    MonitorSlack slack;
    slack.gradient = opt.slack_gradient;
    slack.density = opt.slack_density;
    slack.slope = opt.slack_slope;
    slack.upper = opt.slack_upper;

    MonitorReport report = check_bounds(history, constants, slack);
    if (cmd->count("--fit-from") || cmd->count("--fit-to")) {
        report.fit = fit_decay_exponent(history, opt.fit_from, opt.fit_to);
        report.has_fit = true;
    }

    const fs::path dir = opt.dir;
    {
        std::ofstream os(dir / "monitor.csv");
        write_report_csv(os, report);
    }
    {
        std::ofstream os(dir / "report.txt");
        write_report_text(os, report, meta.scenario.name);
    }
    {
        std::ofstream os(dir / "summary.json");
        write_report_json(os, report, meta.scenario.name);
    }
    append_manifest(dir, "monitor_file", "monitor.csv");
    append_manifest(dir, "report_file", "report.txt");
    append_manifest(dir, "summary_file", "summary.json");

    write_report_text(std::cout, report, meta.scenario.name);
    return report.all_pass ? kExitOk : kExitVerificationFailed;
}

struct TraceOptionsCli {
    std::string dir;
    std::vector<double> seeds;
    double t0 = std::nan("");
    std::string family = "forward";
    bool reverse = false;
    double epsilon = 0;
    int substeps = 4;
    std::string out_dir;
};

int run_trace(const TraceOptionsCli& opt) {
    if (opt.epsilon != 0.0) require_valid_epsilon(opt.epsilon);
    const Family family = family_from_string(opt.family);

    const SolutionHistory history = load_run(opt.dir);
    const HistoryInterpolant interp(history);
    const double t0 = std::isnan(opt.t0) ? interp.t_min() : opt.t0;

    TraceOptions topt;
    topt.substeps_per_interval = opt.substeps;
    topt.epsilon = opt.epsilon;

    const fs::path out_dir = opt.out_dir.empty() ? fs::path(opt.dir) : fs::path(opt.out_dir);
    fs::create_directories(out_dir);

    for (size_t k = 0; k < opt.seeds.size(); ++k) {
        CharacteristicPath path = trace(interp, opt.seeds[k], t0, family, !opt.reverse, topt);
        if (history.config().system == SystemKind::PSystem)
            integrate_riccati_psystem(path, interp);
        else
            integrate_riccati_full(path, interp, opt.epsilon);

        const std::string name =
            "path_" + to_string(family) + "_" + std::to_string(k) + ".csv";
        std::ofstream os(out_dir / name);
        if (!os) throw std::runtime_error("cannot write " + (out_dir / name).string());
        write_path_csv(os, path);
        if (out_dir == fs::path(opt.dir))
            append_manifest(opt.dir, "path_file_" + std::to_string(k), name);

        std::cout << "seed x0 = " << g17(opt.seeds[k]) << ": " << path.samples.size()
                  << " samples over t in [" << g17(path.t_begin()) << ", " << g17(path.t_end())
                  << "] -> " << (out_dir / name).string() << "\n";
    }
    return kExitOk;
}

int run_fit(const std::string& dir, double from, double to) {
    const SolutionHistory history = load_run(dir);
    const DecayFit fit = fit_decay_exponent(history, from, to);
    nlohmann::json j;
    j["exponent"] = fit.exponent;
    j["max_residual"] = fit.max_residual;
    j["points"] = fit.points;
    j["from"] = from;
    j["to"] = to;
    std::cout << j.dump() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D Lagrangian gas dynamics laboratory: smooth-solution solver, "
                 "characteristic tracing, and invariant-domain / density-floor monitors"};
    app.require_subcommand(1);
    int rc = kExitOk;

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run a scenario and write a run directory");
    sim_cmd->add_option("--config", sim.config_file, "flat key = value config file");
    sim_cmd->add_option("--scenario", sim.scenario,
                        "initial-condition family (see list-scenarios)");
    sim_cmd->add_option("--gamma", sim.gamma, "adiabatic exponent (> 1)");
    sim_cmd->add_option("--K", sim.K, "pressure constant");
    sim_cmd->add_option("--c-v", sim.c_v, "specific heat");
    sim_cmd->add_option("--amplitude", sim.amplitude, "velocity amplitude A");
    sim_cmd->add_option("--width", sim.width, "velocity profile width");
    sim_cmd->add_option("--tau0", sim.tau0, "background specific volume");
    sim_cmd->add_option("--eta0", sim.eta0, "background eta (overrides tau0 when > 0)");
    sim_cmd->add_option("--entropy-amplitude", sim.entropy_amplitude, "entropy bump amplitude");
    sim_cmd->add_option("--entropy-width", sim.entropy_width, "entropy bump width");
    sim_cmd->add_option("--cycles", sim.cycles, "oscillation count of the sinusoidal bump");
    sim_cmd->add_option("--epsilon", sim.epsilon, "weighted-gradient exponent, 0 < eps < 1/4");
    sim_cmd->add_option("--user-file", sim.user_file, "CSV x,u,eta,m for user_defined");
    sim_cmd->add_option("--system", sim.system, "p_system or full_euler");
    sim_cmd->add_option("--cfl", sim.cfl, "CFL number");
    sim_cmd->add_option("--t-end", sim.t_end, "time horizon");
    sim_cmd->add_option("--stride", sim.stride, "store every this many steps");
    sim_cmd->add_option("--ux-blowup-factor", sim.ux_blowup_factor,
                        "stop when max |u_x| exceeds this factor times its initial scale");
    sim_cmd->add_option("--rho-floor-factor", sim.rho_floor_factor,
                        "stop when min density falls under this factor times its initial minimum");
    sim_cmd->add_option("--max-steps", sim.max_steps, "hard step limit");
    sim_cmd->add_option("--n", sim.n, "grid resolution");
    sim_cmd->add_option("--out", sim.out,
                        "output directory (EULER1D_OUT env overrides; default runs/<scenario>)");
    sim_cmd->callback([&] { rc = run_simulate(sim_cmd, sim); });

    VerifyOptions ver;
    CLI::App* ver_cmd =
        app.add_subcommand("verify", "check theorem bounds on a completed run directory");
    ver_cmd->add_option("run", ver.dir, "run directory")->required();
    ver_cmd->add_option("--epsilon", ver.epsilon,
                        "weighted-gradient exponent override, 0 < eps < 1/4");
    ver_cmd->add_option("--slack-gradient", ver.slack_gradient, "gradient-bound envelope");
    ver_cmd->add_option("--slack-density", ver.slack_density, "density-floor envelope");
    ver_cmd->add_option("--slack-slope", ver.slack_slope, "slope-bound envelope");
    ver_cmd->add_option("--slack-upper", ver.slack_upper, "upper-bound envelope");
    ver_cmd->add_option("--fit-from", ver.fit_from, "decay-fit window start (>= 1)");
    ver_cmd->add_option("--fit-to", ver.fit_to, "decay-fit window end (>= 10x start)");
    ver_cmd->callback([&] { rc = run_verify(ver_cmd, ver); });

    TraceOptionsCli tra;
    CLI::App* tra_cmd =
        app.add_subcommand("trace", "integrate characteristics and their Riccati data");
    tra_cmd->add_option("run", tra.dir, "run directory")->required();
    tra_cmd->add_option("--x0", tra.seeds, "seed position(s), repeatable")->required();
    tra_cmd->add_option("--t0", tra.t0, "start time (default: first stored time)");
    tra_cmd->add_option("--family", tra.family, "forward or backward");
    tra_cmd->add_flag("--reverse", tra.reverse, "trace backward in time");
    tra_cmd->add_option("--epsilon", tra.epsilon, "carry the weighted gradient, 0 < eps < 1/4");
    tra_cmd->add_option("--substeps", tra.substeps, "path RK4 steps per stored interval");
    tra_cmd->add_option("--out-dir", tra.out_dir, "where to write path CSVs (default: run dir)");
    tra_cmd->callback([&] { rc = run_trace(tra); });

    std::string fit_dir;
    double fit_from = 5.0, fit_to = 50.0;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "fit the decay exponent of min rho over a time window");
    fit_cmd->add_option("run", fit_dir, "run directory")->required();
    fit_cmd->add_option("--from", fit_from, "window start (>= 1)");
    fit_cmd->add_option("--to", fit_to, "window end (>= 10x start)");
    fit_cmd->callback([&] { rc = run_fit(fit_dir, fit_from, fit_to); });

    CLI::App* list_cmd = app.add_subcommand("list-scenarios", "print the built-in scenarios");
    list_cmd->callback([&] {
        for (const std::string& name : Scenario::builtin_names()) std::cout << name << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return rc;
}

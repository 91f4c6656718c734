#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "euler1d/characteristics.hpp"
#include "euler1d/run_io.hpp"
#include "euler1d/scenario.hpp"
#include "euler1d/solver.hpp"
#include "test_support.hpp"

using namespace euler1d;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory under the system temp dir, removed by the caller.
fs::path scratch_dir(const char* tag) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("euler1d_run_io_" + std::string(tag) + "_" + std::to_string(counter++) + "_" +
                    std::to_string(static_cast<long>(::getpid())));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const char* tag) : path(scratch_dir(tag)) {}
    ~ScratchDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

SolutionHistory small_rarefaction_run(ScenarioSpec* spec_out = nullptr) {
    ScenarioSpec spec;
    spec.name = "double_rarefaction";
    spec.gamma = 3.0;
    spec.amplitude = 0.5;
    const Scenario scenario(spec);
    SolverConfig config;
    config.system = SystemKind::PSystem;
    config.t_end = 0.5;
    config.stride = 2;
    if (spec_out != nullptr) *spec_out = spec;
    return run(scenario, scenario.make_grid(config.t_end, 192), config);
}

SolutionHistory small_entropy_run(ScenarioSpec* spec_out = nullptr) {
    ScenarioSpec spec;
    spec.name = "entropy_bump";
    spec.gamma = 1.4;
    spec.amplitude = 0.3;
    spec.entropy_amplitude = 0.1;
    spec.epsilon = 0.2;
    const Scenario scenario(spec);
    SolverConfig config;
    config.system = SystemKind::FullEuler;
    config.t_end = 0.2;
    config.stride = 4;
    if (spec_out != nullptr) *spec_out = spec;
    return run(scenario, scenario.make_grid(config.t_end, 96), config);
}

void require_bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

} // namespace

TEST_CASE("key-value files tolerate comments, blanks, and loose spacing") {
    std::istringstream is("# run configuration\n"
                          "\n"
                          "scenario = smooth_bump   \n"
                          "  gamma=1.4# ideal diatomic\n"
                          "steps_taken = 1200\n"
                          "cfl =0.4\n"
                          "cfl = 0.25\n");
    const KeyValueFile kv = KeyValueFile::parse(is);

    CHECK(kv.get("scenario") == "smooth_bump");
    CHECK(kv.get_double("gamma") == 1.4);
    CHECK(kv.get_long("steps_taken") == 1200);
    // Duplicate keys keep their first position but the last value wins.
    CHECK(kv.get_double("cfl") == 0.25);
    CHECK(kv.keys() == std::vector<std::string>{"scenario", "gamma", "steps_taken", "cfl"});

    CHECK(kv.has("gamma"));
    CHECK_FALSE(kv.has("width"));
    CHECK(kv.get_or("width", "default") == "default");
    CHECK_THROWS_AS((void)kv.get("width"), std::runtime_error);
}

TEST_CASE("key-value parse errors carry line numbers") {
    auto parse_text = [](const char* text) {
        std::istringstream is(text);
        return KeyValueFile::parse(is);
    };
    CHECK_THROWS_WITH((void)parse_text("gamma\n"),
                      doctest::Contains("expected 'key = value'"));
    CHECK_THROWS_WITH((void)parse_text("ok = 1\n = 3\n"), doctest::Contains("line 2"));

    std::istringstream is("gamma = fast\nstride = 2.5\n");
    const KeyValueFile kv = KeyValueFile::parse(is);
    CHECK_THROWS_WITH((void)kv.get_double("gamma"), doctest::Contains("malformed number"));
    CHECK_THROWS_WITH((void)kv.get_long("stride"), doctest::Contains("malformed integer"));

    CHECK_THROWS_WITH((void)KeyValueFile::parse_file("/nonexistent/euler1d.cfg"),
                      doctest::Contains("cannot open"));
}

TEST_CASE("key-value write/parse round trip preserves doubles bitwise") {
    KeyValueFile kv;
    kv.set("third", 1.0 / 3.0);
    kv.set("tiny", 1.0e-300);
    kv.set("planck", 6.62607015e-34);
    kv.set("negative", -2.5);
    kv.set("count", 123456789L);
    kv.set("label", std::string("double_rarefaction"));

    std::ostringstream os;
    kv.write(os);
    std::istringstream is(os.str());
    const KeyValueFile back = KeyValueFile::parse(is);

    CHECK(back.get_double("third") == 1.0 / 3.0);
    CHECK(back.get_double("tiny") == 1.0e-300);
    CHECK(back.get_double("planck") == 6.62607015e-34);
    CHECK(back.get_double("negative") == -2.5);
    CHECK(back.get_long("count") == 123456789L);
    CHECK(back.get("label") == "double_rarefaction");
    CHECK(back.keys() == kv.keys());

    // Writing the reparsed table reproduces the original text exactly.
    std::ostringstream os2;
    back.write(os2);
    CHECK(os2.str() == os.str());
}

TEST_CASE("snapshot CSV layout: header, row count, and exact cells") {
    ScenarioSpec spec;
    spec.name = "double_rarefaction";
    spec.gamma = 3.0;
    spec.amplitude = 0.5;
    const Scenario scenario(spec);
    const Grid1D grid(-4.0, 4.0, 64);
    const FieldSnapshot snap = scenario.initial_snapshot(grid);

    std::ostringstream os;
    write_snapshot_csv(os, snap, 0.0);
    const std::vector<std::string> lines = lines_of(os.str());
    REQUIRE(lines.size() == static_cast<size_t>(grid.n) + 1);
    CHECK(lines[0] == "x,u,eta,m,tau,rho,p,c,s,r,alpha,beta");

    const std::vector<std::string> row = split_csv(lines[1]);
    REQUIRE(row.size() == 12);
    CHECK(std::stod(row[0]) == grid.node(0));
    CHECK(std::stod(row[1]) == snap.u()[0]);
    CHECK(std::stod(row[2]) == snap.eta()[0]);
    CHECK(std::stod(row[3]) == snap.m()[0]);
    CHECK(std::stod(row[10]) == snap.derived().alpha[0]);
    CHECK(std::stod(row[11]) == snap.derived().beta[0]);

    // A positive weight exponent appends the scaled-gradient columns.
    std::ostringstream os_eps;
    write_snapshot_csv(os_eps, snap, 0.2);
    const std::vector<std::string> eps_lines = lines_of(os_eps.str());
    CHECK(eps_lines[0] == "x,u,eta,m,tau,rho,p,c,s,r,alpha,beta,alpha_eps,beta_eps");
    const std::vector<std::string> eps_row = split_csv(eps_lines[1]);
    REQUIRE(eps_row.size() == 14);
    const auto [alpha_eps, beta_eps] = snap.scaled_gradients(0.2);
    CHECK(std::stod(eps_row[12]) == alpha_eps[0]);
    CHECK(std::stod(eps_row[13]) == beta_eps[0]);
}

TEST_CASE("characteristic path CSV has one row per sample") {
    ScenarioSpec spec;
    spec.name = "smooth_periodicish_bump";
    spec.gamma = 3.0;
    spec.amplitude = 0.2;
    const Scenario scenario(spec);
    SolverConfig config;
    config.system = SystemKind::PSystem;
    config.t_end = 0.5;
    config.stride = 4;
    const SolutionHistory hist = run(scenario, scenario.make_grid(config.t_end, 128), config);
    const HistoryInterpolant interp(hist);
    const CharacteristicPath path = trace(interp, 0.1, 0.0, Family::Forward);
    REQUIRE(path.samples.size() > 2);

    std::ostringstream os;
    write_path_csv(os, path);
    const std::vector<std::string> lines = lines_of(os.str());
    REQUIRE(lines.size() == path.samples.size() + 1);
    CHECK(lines[0] == "t,x,eta,m,c,k1,k2,k1_eps,k2_eps,carried_value,field_value");

    const std::vector<std::string> row = split_csv(lines[1]);
    REQUIRE(row.size() == 11);
    CHECK(std::stod(row[0]) == path.samples[0].t);
    CHECK(std::stod(row[1]) == path.samples[0].x);
    CHECK(std::stod(row[5]) == path.samples[0].coeff.k1);
    // A plain trace records no carried Riccati value; the column must still
    // be present and parse (as a quiet NaN) so the layout never shifts.
    CHECK(std::isnan(std::stod(row[9])));
    CHECK(std::stod(row[10]) == path.samples[0].field_value);
}

TEST_CASE("a saved run reloads bit-identically") {
    ScenarioSpec spec;
    const SolutionHistory hist = small_rarefaction_run(&spec);
    REQUIRE(hist.size() > 2);

    const ScratchDir dir("roundtrip");
    save_run(dir.path, hist, spec);

    RunMetadata meta;
    const SolutionHistory back = load_run(dir.path, &meta);

    REQUIRE(back.size() == hist.size());
    CHECK(back.grid().x_min == hist.grid().x_min);
    CHECK(back.grid().x_max == hist.grid().x_max);
    CHECK(back.grid().n == hist.grid().n);
    for (size_t k = 0; k < hist.size(); ++k) {
        const FieldSnapshot& a = hist.at(k);
        const FieldSnapshot& b = back.at(k);
        REQUIRE(a.t() == b.t());
        require_bitwise_equal(a.u(), b.u());
        require_bitwise_equal(a.eta(), b.eta());
        require_bitwise_equal(a.m(), b.m());
        require_bitwise_equal(a.m_x(), b.m_x());
        // Derived quantities recompute from bit-equal inputs, so they agree
        // bitwise too; this is what makes verify-after-reload trustworthy.
        require_bitwise_equal(a.derived().alpha, b.derived().alpha);
        require_bitwise_equal(a.derived().beta, b.derived().beta);
    }
    // Entropy data is stored once and shared across all reloaded snapshots.
    CHECK(back.at(0).m_shared().get() == back.at(back.size() - 1).m_shared().get());
    CHECK(back.at(0).m_x_shared().get() == back.at(back.size() - 1).m_x_shared().get());

    CHECK(back.stop_reason() == hist.stop_reason());
    CHECK(back.steps_taken() == hist.steps_taken());
    CHECK(meta.stop_reason == hist.stop_reason());
    CHECK(meta.steps_taken == hist.steps_taken());
    CHECK(meta.scenario.name == spec.name);
    CHECK(meta.scenario.gamma == spec.gamma);
    CHECK(meta.scenario.amplitude == spec.amplitude);
    CHECK(meta.scenario.epsilon == spec.epsilon);
    CHECK(meta.config.system == SystemKind::PSystem);
    CHECK(meta.config.cfl == hist.config().cfl);
    CHECK(meta.config.t_end == hist.config().t_end);
    CHECK(meta.config.stride == hist.config().stride);
    CHECK(meta.config.max_steps == hist.config().max_steps);
    CHECK(back.far_field().u_left == hist.far_field().u_left);
    CHECK(back.far_field().eta_right == hist.far_field().eta_right);
}

TEST_CASE("manifest carries the format tag, theorem constants, and file index") {
    ScenarioSpec spec;
    const SolutionHistory hist = small_rarefaction_run(&spec);
    const ScratchDir dir("manifest");
    save_run(dir.path, hist, spec);

    const KeyValueFile kv = KeyValueFile::parse_file(dir.path / "manifest.txt");
    CHECK(kv.get("format") == "euler1d-run-1");
    CHECK(kv.get("scenario") == "double_rarefaction");
    CHECK(kv.get("system") == to_string(SystemKind::PSystem));
    CHECK(kv.get("stop_reason") == to_string(hist.stop_reason()));

    // The theorem constants are frozen into the manifest so a run directory
    // is self-describing.
    for (const char* key : {"const_M", "const_tau_max0", "const_K1", "const_N", "const_N0",
                            "const_M_s", "const_L1", "const_rho_bound"}) {
        CAPTURE(key);
        CHECK(kv.has(key));
    }
    CHECK(kv.get_double("const_M") > 0.0);

    REQUIRE(kv.get_long("snapshots") == static_cast<long>(hist.size()));
    CHECK(fs::exists(dir.path / kv.get("entropy_file")));
    for (size_t k = 0; k < hist.size(); ++k) {
        const std::string snap_key = "snapshot_" + std::to_string(k);
        const std::string t_key = "t_" + std::to_string(k);
        REQUIRE(kv.has(snap_key));
        CHECK(fs::exists(dir.path / kv.get(snap_key)));
        CHECK(kv.get_double(t_key) == hist.at(k).t());
    }
}

TEST_CASE("saving the same run twice produces identical bytes") {
    ScenarioSpec spec;
    const SolutionHistory hist = small_rarefaction_run(&spec);
    const ScratchDir a("bytes_a");
    const ScratchDir b("bytes_b");
    save_run(a.path, hist, spec);
    save_run(b.path, hist, spec);

    for (const auto& entry : fs::directory_iterator(a.path)) {
        const fs::path name = entry.path().filename();
        CAPTURE(name.string());
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
}

TEST_CASE("weighted full-system runs keep their scaled-gradient columns") {
    ScenarioSpec spec;
    const SolutionHistory hist = small_entropy_run(&spec);
    const ScratchDir dir("weighted");
    save_run(dir.path, hist, spec);

    const std::string first = slurp(dir.path / "snapshot_000000.csv");
    CHECK(lines_of(first)[0] == "x,u,eta,m,tau,rho,p,c,s,r,alpha,beta,alpha_eps,beta_eps");

    RunMetadata meta;
    const SolutionHistory back = load_run(dir.path, &meta);
    CHECK(meta.scenario.epsilon == 0.2);
    CHECK(meta.config.system == SystemKind::FullEuler);
    REQUIRE(back.size() == hist.size());
    const auto [a_eps, b_eps] = hist.back().scaled_gradients(0.2);
    const auto [a_eps2, b_eps2] = back.back().scaled_gradients(0.2);
    require_bitwise_equal(a_eps, a_eps2);
    require_bitwise_equal(b_eps, b_eps2);
    // The entropy field really varies here, and survives the trip exactly.
    CHECK(hist.front().m()[0] != hist.front().m()[hist.front().n() / 2]);
    require_bitwise_equal(hist.front().m(), back.front().m());
}

TEST_CASE("tampered run directories are rejected") {
    ScenarioSpec spec;
    const SolutionHistory hist = small_rarefaction_run(&spec);

    SUBCASE("empty history cannot be saved") {
        const ScratchDir dir("empty");
        const SolutionHistory empty(hist.model(), hist.grid(), hist.far_field(), hist.config());
        CHECK_THROWS_AS(save_run(dir.path, empty, spec), std::invalid_argument);
    }

    SUBCASE("missing directory") {
        CHECK_THROWS_WITH((void)load_run("/nonexistent/run_dir"),
                          doctest::Contains("cannot open"));
    }

    SUBCASE("unknown format tag") {
        const ScratchDir dir("format");
        save_run(dir.path, hist, spec);
        KeyValueFile kv = KeyValueFile::parse_file(dir.path / "manifest.txt");
        kv.set("format", std::string("euler1d-run-99"));
        kv.write_file(dir.path / "manifest.txt");
        CHECK_THROWS_WITH((void)load_run(dir.path), doctest::Contains("unrecognized run format"));
    }

    SUBCASE("snapshot header does not match the stored weight exponent") {
        const ScratchDir dir("header");
        save_run(dir.path, hist, spec);
        KeyValueFile kv = KeyValueFile::parse_file(dir.path / "manifest.txt");
        // Claiming epsilon > 0 makes the loader expect 14 columns.
        kv.set("epsilon", 0.2);
        kv.write_file(dir.path / "manifest.txt");
        CHECK_THROWS_WITH((void)load_run(dir.path),
                          doctest::Contains("unexpected snapshot header"));
    }

    SUBCASE("truncated snapshot rows") {
        const ScratchDir dir("truncate");
        save_run(dir.path, hist, spec);
        const fs::path victim = dir.path / "snapshot_000001.csv";
        const std::vector<std::string> lines = lines_of(slurp(victim));
        std::ofstream os(victim, std::ios::trunc);
        for (size_t i = 0; i + 2 < lines.size(); ++i) os << lines[i] << "\n";
        os.close();
        CHECK_THROWS_WITH((void)load_run(dir.path), doctest::Contains("wrong row count"));
    }

    SUBCASE("corrupted entropy header") {
        const ScratchDir dir("entropy");
        save_run(dir.path, hist, spec);
        const std::string body = slurp(dir.path / "entropy.csv");
        std::ofstream os(dir.path / "entropy.csv", std::ios::trunc);
        os << "x,s,s_x\n" << body.substr(body.find('\n') + 1);
        os.close();
        CHECK_THROWS_WITH((void)load_run(dir.path),
                          doctest::Contains("unexpected entropy header"));
    }

    SUBCASE("non-numeric cell") {
        const ScratchDir dir("cell");
        save_run(dir.path, hist, spec);
        const fs::path victim = dir.path / "snapshot_000000.csv";
        std::vector<std::string> lines = lines_of(slurp(victim));
        std::vector<std::string> row = split_csv(lines[3]);
        row[4] = "oops";
        std::string rebuilt = row[0];
        for (size_t i = 1; i < row.size(); ++i) rebuilt += "," + row[i];
        lines[3] = rebuilt;
        std::ofstream os(victim, std::ios::trunc);
        for (const std::string& line : lines) os << line << "\n";
        os.close();
        CHECK_THROWS_AS((void)load_run(dir.path), std::runtime_error);
    }
}

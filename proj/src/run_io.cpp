#include "euler1d/run_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "euler1d/monitors.hpp"
#include "euler1d/num_format.hpp"

namespace euler1d {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error("malformed number for " + what + ": '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error("malformed integer for " + what + ": '" + s + "'");
    return v;
}

std::vector<double> parse_csv_row(const std::string& line, size_t expect, const char* where) {
    std::vector<double> out;
    out.reserve(expect);
    const char* p = line.c_str();
    while (true) {
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(p, &end);
        if (end == p) throw std::runtime_error(std::string("malformed CSV row in ") + where);
        out.push_back(v);
        p = end;
        if (*p == ',') {
            ++p;
        } else if (*p == '\0' || *p == '\r') {
            break;
        } else {
            throw std::runtime_error(std::string("unexpected character in CSV row in ") + where);
        }
    }
    if (out.size() != expect)
        throw std::runtime_error(std::string("wrong column count in ") + where + ": got " +
                                 std::to_string(out.size()) + ", expected " +
                                 std::to_string(expect));
    return out;
}

std::string snapshot_header(double epsilon) {
    std::string h = "x,u,eta,m,tau,rho,p,c,s,r,alpha,beta";
    if (epsilon > 0.0) h += ",alpha_eps,beta_eps";
    return h;
}

} // namespace

KeyValueFile KeyValueFile::parse(std::istream& is) {
    KeyValueFile kv;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("line " + std::to_string(lineno) + ": empty key");
        kv.set(key, value);
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return parse(is);
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& KeyValueFile::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("missing key '" + key + "'");
    return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    return parse_double(get(key), key);
}

long KeyValueFile::get_long(const std::string& key) const { return parse_long(get(key), key); }

void KeyValueFile::set(const std::string& key, const std::string& value) {
    if (values_.count(key) == 0) order_.push_back(key);
    values_[key] = value;
}

void KeyValueFile::set(const std::string& key, double value) { set(key, g17(value)); }

void KeyValueFile::set(const std::string& key, long value) { set(key, std::to_string(value)); }

void KeyValueFile::write(std::ostream& os) const {
    for (const std::string& key : order_) os << key << " = " << values_.at(key) << "\n";
}

void KeyValueFile::write_file(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write(os);
}

void write_snapshot_csv(std::ostream& os, const FieldSnapshot& snap, double epsilon) {
    const DerivedFields& d = snap.derived();
    const Grid1D& grid = snap.grid();
    os << snapshot_header(epsilon) << "\n";
    std::pair<std::vector<double>, std::vector<double>> scaled;
    if (epsilon > 0.0) scaled = snap.scaled_gradients(epsilon);
    for (int i = 0; i < snap.n(); ++i) {
        const auto idx = static_cast<size_t>(i);
        os << g17(grid.node(i)) << ',' << g17(snap.u()[idx]) << ',' << g17(snap.eta()[idx]) << ','
           << g17(snap.m()[idx]) << ',' << g17(d.tau[idx]) << ',' << g17(d.rho[idx]) << ','
           << g17(d.p[idx]) << ',' << g17(d.c[idx]) << ',' << g17(d.s[idx]) << ','
           << g17(d.r[idx]) << ',' << g17(d.alpha[idx]) << ',' << g17(d.beta[idx]);
        if (epsilon > 0.0) os << ',' << g17(scaled.first[idx]) << ',' << g17(scaled.second[idx]);
        os << '\n';
    }
}

void write_path_csv(std::ostream& os, const CharacteristicPath& path) {
    os << "t,x,eta,m,c,k1,k2,k1_eps,k2_eps,carried_value,field_value\n";
    for (const PathSample& p : path.samples) {
        os << g17(p.t) << ',' << g17(p.x) << ',' << g17(p.eta) << ',' << g17(p.m) << ','
           << g17(p.c) << ',' << g17(p.coeff.k1) << ',' << g17(p.coeff.k2) << ','
           << g17(p.coeff.k1_eps) << ',' << g17(p.coeff.k2_eps) << ',' << g17(p.carried) << ','
           << g17(p.field_value) << '\n';
    }
}

void spec_to_keys(const ScenarioSpec& spec, KeyValueFile& kv) {
    kv.set("scenario", spec.name);
    kv.set("gamma", spec.gamma);
    kv.set("K", spec.K);
    kv.set("c_v", spec.c_v);
    kv.set("amplitude", spec.amplitude);
    kv.set("width", spec.width);
    kv.set("tau0", spec.tau0);
    kv.set("eta0", spec.eta0);
    kv.set("entropy_amplitude", spec.entropy_amplitude);
    kv.set("entropy_width", spec.entropy_width);
    kv.set("cycles", spec.cycles);
    kv.set("epsilon", spec.epsilon);
    if (spec.name == "user_defined") {
        kv.set("user_x_min", spec.user_x_min);
        kv.set("user_x_max", spec.user_x_max);
    }
}

ScenarioSpec spec_from_keys(const KeyValueFile& kv) {
    ScenarioSpec spec;
    spec.name = kv.get_or("scenario", spec.name);
    auto opt = [&kv](const char* key, double& field) {
        if (kv.has(key)) field = kv.get_double(key);
    };
    opt("gamma", spec.gamma);
    opt("K", spec.K);
    opt("c_v", spec.c_v);
    opt("amplitude", spec.amplitude);
    opt("width", spec.width);
    opt("tau0", spec.tau0);
    opt("eta0", spec.eta0);
    opt("entropy_amplitude", spec.entropy_amplitude);
    opt("entropy_width", spec.entropy_width);
    opt("cycles", spec.cycles);
    opt("epsilon", spec.epsilon);
    opt("user_x_min", spec.user_x_min);
    opt("user_x_max", spec.user_x_max);
    return spec;
}

void config_to_keys(const SolverConfig& config, KeyValueFile& kv) {
    kv.set("system", to_string(config.system));
    kv.set("cfl", config.cfl);
    kv.set("t_end", config.t_end);
    kv.set("stride", static_cast<long>(config.stride));
    kv.set("ux_blowup_factor", config.ux_blowup_factor);
    kv.set("rho_floor_factor", config.rho_floor_factor);
    kv.set("max_steps", config.max_steps);
}

SolverConfig config_from_keys(const KeyValueFile& kv) {
    SolverConfig config;
    if (kv.has("system")) config.system = system_kind_from_string(kv.get("system"));
    if (kv.has("cfl")) config.cfl = kv.get_double("cfl");
    if (kv.has("t_end")) config.t_end = kv.get_double("t_end");
    if (kv.has("stride")) config.stride = static_cast<int>(kv.get_long("stride"));
    if (kv.has("ux_blowup_factor")) config.ux_blowup_factor = kv.get_double("ux_blowup_factor");
    if (kv.has("rho_floor_factor")) config.rho_floor_factor = kv.get_double("rho_floor_factor");
    if (kv.has("max_steps")) config.max_steps = kv.get_long("max_steps");
    return config;
}

namespace {

std::string snapshot_filename(size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", k);
    return buf;
}

/// Records every theorem constant in the manifest so a run directory is
/// self-describing.
void constants_to_keys(const TheoremConstants& c, KeyValueFile& kv) {
    kv.set("const_M", c.M);
    kv.set("const_tau_max0", c.tau_max0);
    kv.set("const_M1", c.M1);
    kv.set("const_M2", c.M2);
    kv.set("const_K1", c.K1);
    kv.set("const_epsilon", c.epsilon);
    kv.set("const_delta", c.delta);
    kv.set("const_N", c.N);
    kv.set("const_N0", c.N0);
    kv.set("const_N1", c.N1);
    kv.set("const_N2", c.N2);
    kv.set("const_K1_hat", c.K1_hat);
    kv.set("const_K2_hat", c.K2_hat);
    kv.set("const_M_s", c.envelope.M_s);
    kv.set("const_M_r", c.envelope.M_r);
    kv.set("const_M_L", c.envelope.M_L);
    kv.set("const_M_U", c.envelope.M_U);
    kv.set("const_V", c.envelope.V);
    kv.set("const_L1", c.envelope.L1);
    kv.set("const_L2", c.envelope.L2);
    kv.set("const_u_bound", c.envelope.u_bound);
    kv.set("const_eta_bound", c.envelope.eta_bound);
    kv.set("const_c_bound", c.envelope.c_bound);
    kv.set("const_rho_bound", c.envelope.rho_bound);
}

/// Reads one snapshot CSV, returning the (u, eta) columns.
std::pair<std::vector<double>, std::vector<double>>
read_snapshot_csv(const std::filesystem::path& file, int n, double epsilon) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(is, line) || trim(line) != snapshot_header(epsilon))
        throw std::runtime_error("unexpected snapshot header in " + file.string());
    const size_t cols = epsilon > 0.0 ? 14 : 12;
    std::vector<double> u, eta;
    u.reserve(static_cast<size_t>(n));
    eta.reserve(static_cast<size_t>(n));
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const std::vector<double> row = parse_csv_row(line, cols, file.string().c_str());
        u.push_back(row[1]);
        eta.push_back(row[2]);
    }
    if (u.size() != static_cast<size_t>(n))
        throw std::runtime_error("wrong row count in " + file.string());
    return {std::move(u), std::move(eta)};
}

} // namespace

void save_run(const std::filesystem::path& dir, const SolutionHistory& history,
              const ScenarioSpec& spec) {
    if (history.size() == 0) throw std::invalid_argument("save_run: empty history");
    std::filesystem::create_directories(dir);

    KeyValueFile kv;
    kv.set("format", std::string("euler1d-run-1"));
    spec_to_keys(spec, kv);
    config_to_keys(history.config(), kv);
    const Grid1D& grid = history.grid();
    kv.set("x_min", grid.x_min);
    kv.set("x_max", grid.x_max);
    kv.set("n", static_cast<long>(grid.n));
    const FarField& far = history.far_field();
    kv.set("far_u_left", far.u_left);
    kv.set("far_eta_left", far.eta_left);
    kv.set("far_m_left", far.m_left);
    kv.set("far_u_right", far.u_right);
    kv.set("far_eta_right", far.eta_right);
    kv.set("far_m_right", far.m_right);
    kv.set("stop_reason", to_string(history.stop_reason()));
    kv.set("steps_taken", history.steps_taken());
    constants_to_keys(theorem_constants(history.front(), spec.epsilon), kv);
    kv.set("entropy_file", std::string("entropy.csv"));
    kv.set("snapshots", static_cast<long>(history.size()));
    for (size_t k = 0; k < history.size(); ++k) {
        kv.set("snapshot_" + std::to_string(k), snapshot_filename(k));
        kv.set("t_" + std::to_string(k), history.at(k).t());
    }

    {
        std::ofstream os(dir / "entropy.csv");
        if (!os) throw std::runtime_error("cannot write entropy.csv");
        os << "x,m,m_x\n";
        const FieldSnapshot& first = history.front();
        for (int i = 0; i < first.n(); ++i) {
            const auto idx = static_cast<size_t>(i);
            os << g17(grid.node(i)) << ',' << g17(first.m()[idx]) << ','
               << g17(first.m_x()[idx]) << '\n';
        }
    }

    for (size_t k = 0; k < history.size(); ++k) {
        std::ofstream os(dir / snapshot_filename(k));
        if (!os) throw std::runtime_error("cannot write " + snapshot_filename(k));
        write_snapshot_csv(os, history.at(k), spec.epsilon);
    }

    kv.write_file(dir / "manifest.txt");
}

SolutionHistory load_run(const std::filesystem::path& dir, RunMetadata* metadata) {
    const KeyValueFile kv = KeyValueFile::parse_file(dir / "manifest.txt");
    if (kv.get_or("format", "") != "euler1d-run-1")
        throw std::runtime_error("unrecognized run format in " + dir.string());

    const ScenarioSpec spec = spec_from_keys(kv);
    const SolverConfig config = config_from_keys(kv);
    const GasModel model(spec.K, spec.gamma, spec.c_v);
    const Grid1D grid(kv.get_double("x_min"), kv.get_double("x_max"),
                      static_cast<int>(kv.get_long("n")));
    FarField far;
    far.u_left = kv.get_double("far_u_left");
    far.eta_left = kv.get_double("far_eta_left");
    far.m_left = kv.get_double("far_m_left");
    far.u_right = kv.get_double("far_u_right");
    far.eta_right = kv.get_double("far_eta_right");
    far.m_right = kv.get_double("far_m_right");

    auto m = std::make_shared<std::vector<double>>();
    auto m_x = std::make_shared<std::vector<double>>();
    {
        const std::filesystem::path file = dir / kv.get_or("entropy_file", "entropy.csv");
        std::ifstream is(file);
        if (!is) throw std::runtime_error("cannot open " + file.string());
        std::string line;
        if (!std::getline(is, line) || trim(line) != "x,m,m_x")
            throw std::runtime_error("unexpected entropy header in " + file.string());
        while (std::getline(is, line)) {
            if (trim(line).empty()) continue;
            const std::vector<double> row = parse_csv_row(line, 3, file.string().c_str());
            m->push_back(row[1]);
            m_x->push_back(row[2]);
        }
        if (m->size() != static_cast<size_t>(grid.n))
            throw std::runtime_error("wrong row count in " + file.string());
    }

    SolutionHistory history(model, grid, far, config);
    const long count = kv.get_long("snapshots");
    for (long k = 0; k < count; ++k) {
        const std::string file = kv.get("snapshot_" + std::to_string(k));
        const double t = kv.get_double("t_" + std::to_string(k));
        auto [u, eta] = read_snapshot_csv(dir / file, grid.n, spec.epsilon);
        history.append(std::make_shared<FieldSnapshot>(t, grid, model, far, std::move(u),
                                                       std::move(eta), m, m_x));
    }
    history.set_stop(stop_reason_from_string(kv.get("stop_reason")));
    history.set_steps(kv.get_long("steps_taken"));

    if (metadata != nullptr) {
        metadata->scenario = spec;
        metadata->config = config;
        metadata->stop_reason = history.stop_reason();
        metadata->steps_taken = history.steps_taken();
    }
    return history;
}

} // namespace euler1d

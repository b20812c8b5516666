#include "kolmodamp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kolmodamp/io.hpp"

namespace kolmodamp {

namespace {

bool near_integer(double x) { return std::abs(x - std::nearbyint(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

void check_divides(double part, double whole, const std::string& what) {
    if (!(part > 0.0) || !near_integer(whole / part))
        fail(ErrorCode::config, what + ": " + std::to_string(part) + " must divide " +
                                    std::to_string(whole) + " so the force lattice tiles the box");
}

} // namespace

void ExperimentConfig::validate() const {
    grid.validate();
    model.validate();
    profile.validate();

    const double s = model.theta * model.ell0;
    check_divides(s, grid.box_len, "model.theta*ell0");
    check_divides(s, grid.box_len / 2.0, "model.theta*ell0 (half box)");
    if (!(force_ell > 0.0)) fail(ErrorCode::config, "force.ell must be positive");
    check_divides(force_ell, grid.box_len / 2.0, "force.ell");
    if (2.0 * force_ell + s > grid.box_len)
        fail(ErrorCode::lattice_overflow, "force.ell too large: 2*ell + theta*ell0 > box_len");
    for (double ell : sweep_ells) {
        check_divides(ell, grid.box_len / 2.0, "sweep ell");
        if (2.0 * ell + s > grid.box_len)
            fail(ErrorCode::lattice_overflow, "sweep ell too large for the box");
    }
    if (!sweep_dts.empty() && sweep_dts.size() != sweep_ells.size())
        fail(ErrorCode::config, "sweep dt_values must match ell_values in length");
    for (double dtv : sweep_dts)
        if (!(dtv > 0.0)) fail(ErrorCode::config, "sweep dt_values must be positive");
    averaging.validate(model.beta());
    if (initial.kind == InitialSpec::Kind::random && !(initial.l2 > 0.0))
        fail(ErrorCode::config, "initial.l2 must be positive for random initial data");
    if (!(tol_ledger > 0.0)) fail(ErrorCode::config, "model.tol_ledger must be positive");
}

namespace config {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RawConfig {
    // section -> key -> value, with provenance for error messages
    std::map<std::string, std::map<std::string, std::string>> kv;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = kv.find(sec);
        return s != kv.end() && s->second.count(key) > 0;
    }
    const std::string& get(const std::string& sec, const std::string& key) const {
        auto s = kv.find(sec);
        if (s == kv.end() || !s->second.count(key))
            fail(ErrorCode::config, "[" + sec + "] missing required key '" + key + "'");
        return s->second.at(key);
    }
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(ErrorCode::config, "line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                fail(ErrorCode::config, "line " + std::to_string(lineno) + ": empty section name");
            raw.kv[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::config, "line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            fail(ErrorCode::config, "line " + std::to_string(lineno) + ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(ErrorCode::config, "line " + std::to_string(lineno) + ": empty key or value");
        if (raw.kv[section].count(key))
            fail(ErrorCode::config, "[" + section + "] duplicate key '" + key + "'");
        raw.kv[section][key] = value;
    }
    return raw;
}

double parse_double(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        fail(ErrorCode::config, "[" + sec + "] " + key + ": not a number: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return u;
    } catch (const std::exception&) {
        fail(ErrorCode::config, "[" + sec + "] " + key + ": not a nonnegative integer: '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& sec, const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(ErrorCode::config, "[" + sec + "] " + key + ": empty list element");
        out.push_back(parse_double(sec, key, item));
    }
    if (out.empty()) fail(ErrorCode::config, "[" + sec + "] " + key + ": empty list");
    return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"grid", {"n", "box_len", "dealias_fraction"}},
        {"model",
         {"mode", "nu", "ell0", "theta", "dt", "t_end", "cfl_limit", "tol_ledger", "alpha", "kappa",
          "delta"}},
        {"force", {"ell", "amplitude", "bump_sharpness", "orientation", "seed"}},
        {"initial", {"kind", "l2", "xi_max", "seed"}},
        {"averaging", {"burn_in", "window", "stride", "envelope_c_max"}},
        {"io", {"snapshot_every", "checkpoint_every"}},
        {"sweep", {"ell_values", "dt_values"}},
    };
    return k;
}

} // namespace

ExperimentConfig parse(const std::string& text) {
    RawConfig raw = tokenize(text);
    for (const auto& [sec, entries] : raw.kv) {
        auto it = known_keys().find(sec);
        if (it == known_keys().end()) fail(ErrorCode::config, "unknown section [" + sec + "]");
        for (const auto& [key, value] : entries)
            if (!it->second.count(key))
                fail(ErrorCode::config, "[" + sec + "] unknown key '" + key + "'");
    }

    ExperimentConfig cfg;
    cfg.grid.n = static_cast<int>(parse_u64("grid", "n", raw.get("grid", "n")));
    cfg.grid.box_len = parse_double("grid", "box_len", raw.get("grid", "box_len"));
    if (raw.has("grid", "dealias_fraction"))
        cfg.grid.dealias_fraction =
            parse_double("grid", "dealias_fraction", raw.get("grid", "dealias_fraction"));

    const std::string mode_str = raw.get("model", "mode");
    auto mode = run_mode_from_name(mode_str);
    if (!mode)
        fail(ErrorCode::config,
             "[model] mode: '" + mode_str +
                 "' is not one of damped-default|damped-custom|classical|mollified");
    double nu = parse_double("model", "nu", raw.get("model", "nu"));
    double ell0 = parse_double("model", "ell0", raw.get("model", "ell0"));
    double theta = parse_double("model", "theta", raw.get("model", "theta"));

    auto reject = [&](const char* key, const char* why) {
        if (raw.has("model", key))
            fail(ErrorCode::config, std::string("[model] ") + key + ": " + why);
    };
    switch (*mode) {
        case RunMode::damped_default:
            cfg.model = ModelParams::paper_default(nu, ell0, theta);
            reject("alpha", "damped-default pins alpha = nu/ell0^2; overrides are rejected");
            reject("kappa", "damped-default pins kappa = 1/(20 theta ell0); overrides are rejected");
            reject("delta", "delta is only valid in mollified mode");
            break;
        case RunMode::mollified:
            cfg.model = ModelParams::paper_default(nu, ell0, theta);
            cfg.model.delta = parse_double("model", "delta", raw.get("model", "delta"));
            reject("alpha", "mollified mode pins alpha = nu/ell0^2; overrides are rejected");
            reject("kappa", "mollified mode pins kappa = 1/(20 theta ell0); overrides are rejected");
            break;
        case RunMode::classical:
            cfg.model.nu = nu;
            cfg.model.ell0 = ell0;
            cfg.model.theta = theta;
            cfg.model.alpha = 0.0;
            cfg.model.kappa = 0.0;
            reject("alpha", "classical mode means alpha = 0; overrides are rejected");
            reject("kappa", "classical mode has no damping band");
            reject("delta", "delta is only valid in mollified mode");
            break;
        case RunMode::damped_custom:
            cfg.model.nu = nu;
            cfg.model.ell0 = ell0;
            cfg.model.theta = theta;
            cfg.model.alpha = parse_double("model", "alpha", raw.get("model", "alpha"));
            cfg.model.kappa = parse_double("model", "kappa", raw.get("model", "kappa"));
            reject("delta", "delta is only valid in mollified mode");
            break;
    }
    cfg.model.mode = *mode;
    cfg.model.dt = parse_double("model", "dt", raw.get("model", "dt"));
    cfg.model.t_end = parse_double("model", "t_end", raw.get("model", "t_end"));
    if (raw.has("model", "cfl_limit"))
        cfg.model.cfl_limit = parse_double("model", "cfl_limit", raw.get("model", "cfl_limit"));
    if (raw.has("model", "tol_ledger"))
        cfg.tol_ledger = parse_double("model", "tol_ledger", raw.get("model", "tol_ledger"));

    cfg.force_ell = parse_double("force", "ell", raw.get("force", "ell"));
    if (raw.has("force", "amplitude"))
        cfg.force_amplitude = parse_double("force", "amplitude", raw.get("force", "amplitude"));
    if (raw.has("force", "bump_sharpness"))
        cfg.profile.bump_sharpness =
            parse_double("force", "bump_sharpness", raw.get("force", "bump_sharpness"));
    if (raw.has("force", "orientation")) {
        auto v = parse_list("force", "orientation", raw.get("force", "orientation"));
        if (v.size() != 3) fail(ErrorCode::config, "[force] orientation must have 3 components");
        cfg.profile.orientation = {v[0], v[1], v[2]};
    }
    if (raw.has("force", "seed")) cfg.profile.seed = parse_u64("force", "seed", raw.get("force", "seed"));
    cfg.profile.theta = theta;

    if (raw.kv.count("initial")) {
        const std::string kind = raw.get("initial", "kind");
        if (kind == "zero") {
            cfg.initial.kind = InitialSpec::Kind::zero;
        } else if (kind == "random") {
            cfg.initial.kind = InitialSpec::Kind::random;
            cfg.initial.l2 = parse_double("initial", "l2", raw.get("initial", "l2"));
            if (raw.has("initial", "xi_max"))
                cfg.initial.xi_max = parse_double("initial", "xi_max", raw.get("initial", "xi_max"));
            if (raw.has("initial", "seed"))
                cfg.initial.seed = parse_u64("initial", "seed", raw.get("initial", "seed"));
        } else {
            fail(ErrorCode::config, "[initial] kind must be zero or random");
        }
    }

    cfg.averaging.burn_in = parse_double("averaging", "burn_in", raw.get("averaging", "burn_in"));
    cfg.averaging.window = parse_double("averaging", "window", raw.get("averaging", "window"));
    if (raw.has("averaging", "stride"))
        cfg.averaging.stride =
            static_cast<int>(parse_u64("averaging", "stride", raw.get("averaging", "stride")));
    if (raw.has("averaging", "envelope_c_max"))
        cfg.averaging.envelope_c_max =
            parse_double("averaging", "envelope_c_max", raw.get("averaging", "envelope_c_max"));

    if (raw.kv.count("io")) {
        if (raw.has("io", "snapshot_every"))
            cfg.io.snapshot_every = parse_u64("io", "snapshot_every", raw.get("io", "snapshot_every"));
        if (raw.has("io", "checkpoint_every"))
            cfg.io.checkpoint_every =
                parse_u64("io", "checkpoint_every", raw.get("io", "checkpoint_every"));
    }

    if (raw.kv.count("sweep") && raw.has("sweep", "ell_values"))
        cfg.sweep_ells = parse_list("sweep", "ell_values", raw.get("sweep", "ell_values"));
    if (raw.kv.count("sweep") && raw.has("sweep", "dt_values")) {
        cfg.sweep_dts = parse_list("sweep", "dt_values", raw.get("sweep", "dt_values"));
        if (cfg.sweep_dts.size() != cfg.sweep_ells.size())
            fail(ErrorCode::config, "[sweep] dt_values must match ell_values in length");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string serialize(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[grid]\n";
    out << "n = " << cfg.grid.n << "\n";
    out << "box_len = " << fmt(cfg.grid.box_len) << "\n";
    out << "dealias_fraction = " << fmt(cfg.grid.dealias_fraction) << "\n";
    out << "\n[model]\n";
    out << "mode = " << run_mode_name(cfg.model.mode) << "\n";
    out << "nu = " << fmt(cfg.model.nu) << "\n";
    out << "ell0 = " << fmt(cfg.model.ell0) << "\n";
    out << "theta = " << fmt(cfg.model.theta) << "\n";
    if (cfg.model.mode == RunMode::damped_custom) {
        out << "alpha = " << fmt(cfg.model.alpha) << "\n";
        out << "kappa = " << fmt(cfg.model.kappa) << "\n";
    }
    if (cfg.model.mode == RunMode::mollified) out << "delta = " << fmt(cfg.model.delta) << "\n";
    out << "dt = " << fmt(cfg.model.dt) << "\n";
    out << "t_end = " << fmt(cfg.model.t_end) << "\n";
    out << "cfl_limit = " << fmt(cfg.model.cfl_limit) << "\n";
    out << "tol_ledger = " << fmt(cfg.tol_ledger) << "\n";
    out << "\n[force]\n";
    out << "ell = " << fmt(cfg.force_ell) << "\n";
    if (cfg.force_amplitude) out << "amplitude = " << fmt(*cfg.force_amplitude) << "\n";
    out << "bump_sharpness = " << fmt(cfg.profile.bump_sharpness) << "\n";
    out << "orientation = " << fmt(cfg.profile.orientation[0]) << "," << fmt(cfg.profile.orientation[1])
        << "," << fmt(cfg.profile.orientation[2]) << "\n";
    out << "seed = " << cfg.profile.seed << "\n";
    out << "\n[initial]\n";
    if (cfg.initial.kind == InitialSpec::Kind::zero) {
        out << "kind = zero\n";
    } else {
        out << "kind = random\n";
        out << "l2 = " << fmt(cfg.initial.l2) << "\n";
        out << "xi_max = " << fmt(cfg.initial.xi_max) << "\n";
        out << "seed = " << cfg.initial.seed << "\n";
    }
    out << "\n[averaging]\n";
    out << "burn_in = " << fmt(cfg.averaging.burn_in) << "\n";
    out << "window = " << fmt(cfg.averaging.window) << "\n";
    out << "stride = " << cfg.averaging.stride << "\n";
    out << "envelope_c_max = " << fmt(cfg.averaging.envelope_c_max) << "\n";
    out << "\n[io]\n";
    out << "snapshot_every = " << cfg.io.snapshot_every << "\n";
    out << "checkpoint_every = " << cfg.io.checkpoint_every << "\n";
    if (!cfg.sweep_ells.empty()) {
        out << "\n[sweep]\n";
        out << "ell_values = ";
        for (std::size_t i = 0; i < cfg.sweep_ells.size(); ++i)
            out << (i ? "," : "") << fmt(cfg.sweep_ells[i]);
        out << "\n";
        if (!cfg.sweep_dts.empty()) {
            out << "dt_values = ";
            for (std::size_t i = 0; i < cfg.sweep_dts.size(); ++i)
                out << (i ? "," : "") << fmt(cfg.sweep_dts[i]);
            out << "\n";
        }
    }
    return out.str();
}

std::string hash(const ExperimentConfig& cfg) { return io::sha256_hex(serialize(cfg)); }

std::vector<std::string> preset_names() { return {"smoke", "desk", "desk-envelope", "desk-classical", "desk-sweep"}; }

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.model.mode = RunMode::damped_default;
    if (name == "smoke") {
        // damped-custom with a wide damping band so beta is O(1) and the
        // full pipeline (burn-in, windows, verdicts) completes in seconds.
        cfg.grid = {16, 16.0};
        cfg.model.nu = 1.0;
        cfg.model.ell0 = 1.0;
        cfg.model.theta = 1.0;
        cfg.model.mode = RunMode::damped_custom;
        cfg.model.alpha = 1.0;
        cfg.model.kappa = 1.2;
        cfg.model.dt = 0.05;
        cfg.model.t_end = 25.0;
        cfg.force_ell = 2.0;
        cfg.averaging.burn_in = 4.0;
        cfg.averaging.window = 5.0;
        cfg.io.checkpoint_every = 100;
        cfg.tol_ledger = 0.05;
    } else if (name == "desk") {
        // spec default desk preset: 48^3, box 32 theta ell0
        cfg.grid = {48, 32.0};
        cfg.model = ModelParams::paper_default(1.0, 1.0, 1.0);
        cfg.model.dt = 0.02;
        cfg.model.t_end = 2200.0;
        cfg.model.cfl_limit = 0.5;
        cfg.force_ell = 4.0;
        cfg.averaging.burn_in = 2000.0;
        cfg.averaging.window = 50.0;
        cfg.averaging.stride = 5;
        cfg.io.checkpoint_every = 20000;
        cfg.tol_ledger = 0.05;
    } else if (name == "desk-envelope") {
        // decay-envelope check: short horizon, no long-time averages
        cfg.grid = {48, 84.0};
        cfg.model = ModelParams::paper_default(1.0, 1.0, 1.0);
        cfg.model.dt = 0.042;
        cfg.model.t_end = 400.0;
        cfg.model.cfl_limit = 0.5;
        cfg.force_ell = 6.0;
        cfg.averaging.burn_in = 2000.0;
        cfg.averaging.window = 30.0;
        cfg.averaging.stride = 4;
        cfg.tol_ledger = 0.05;
    } else if (name == "desk-classical") {
        cfg.grid = {48, 84.0};
        cfg.model.nu = 1.0;
        cfg.model.ell0 = 1.0;
        cfg.model.theta = 1.0;
        cfg.model.mode = RunMode::classical;
        cfg.model.alpha = 0.0;
        cfg.model.kappa = 0.0;
        cfg.model.dt = 0.042;
        cfg.model.t_end = 400.0;
        cfg.model.cfl_limit = 0.5;
        cfg.force_ell = 6.0;
        cfg.averaging.burn_in = 0.0;
        cfg.averaging.window = 30.0;
        cfg.averaging.stride = 4;
        cfg.tol_ledger = 0.05;
    } else if (name == "desk-sweep") {
        cfg.grid = {48, 84.0};
        cfg.model = ModelParams::paper_default(1.0, 1.0, 1.0);
        cfg.model.dt = 0.055;
        cfg.model.t_end = 2100.0;
        cfg.model.cfl_limit = 0.5;
        cfg.force_ell = 6.0;
        cfg.sweep_ells = {3.0, 6.0, 14.0, 21.0};
        cfg.sweep_dts = {0.055, 0.042, 0.033, 0.027};
        cfg.averaging.burn_in = 2000.0;
        cfg.averaging.window = 30.0;
        cfg.averaging.stride = 4;
        cfg.io.checkpoint_every = 20000;
        cfg.tol_ledger = 0.05;
    } else {
        fail(ErrorCode::config, "unknown preset '" + name + "'");
    }
    cfg.validate();
    return cfg;
}

} // namespace config
} // namespace kolmodamp

#include "kolmodamp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kolmodamp/version.hpp"

namespace kolmodamp::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string now_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string verdicts_tsv(const std::vector<Verdict>& verdicts) {
    std::string out = "name\tpass\tmeasured\ttolerance\tgating\tdetail\n";
    for (const auto& v : verdicts) {
        out += v.name;
        out += '\t';
        out += v.pass ? "pass" : "FAIL";
        out += '\t';
        out += fmt(v.measured);
        out += '\t';
        out += fmt(v.tolerance);
        out += '\t';
        out += v.gating ? "gating" : "info";
        out += '\t';
        out += v.detail;
        out += '\n';
    }
    return out;
}

struct ForceBundle {
    SpectralField profile;
    SpectralField force;
    ForceSpec fspec;
    BernsteinConstants consts;
    ForceNumbers numbers;
    NormSet fnorms;
    TheoreticalConstants theo;
};

ForceBundle build_force_side(const ExperimentConfig& cfg) {
    ForceBundle b;
    b.fspec = cfg.force_spec();
    b.profile = forcing::build_profile(cfg.profile, cfg.grid, cfg.model.ell0);
    b.force = forcing::assemble_force(b.fspec, cfg.grid);
    b.consts = forcing::calibrate_bernstein(b.profile, b.fspec);
    b.numbers = forcing::derive_numbers(b.force, b.fspec, b.consts);
    b.fnorms = spectral::norms(b.force);
    b.theo = diag::theoretical_constants(b.numbers, cfg.model.theta, b.numbers.G0);
    return b;
}

struct ReportBundle {
    DiagnosticsReport report;
    std::vector<Verdict> verdicts;
    std::string report_kv;
};

/* The report and verdicts are pure functions of (config, ledger rows,
   kinetic0): verify_run_dir recomputes them from the persisted inputs and
   expects byte-identical artifacts. */
ReportBundle build_report(const ExperimentConfig& cfg, const ForceBundle& fb,
                          const std::vector<EnergyLedgerRow>& rows, double kinetic0) {
    ReportBundle out;
    DiagnosticsReport& rep = out.report;
    const ModelParams& model = cfg.model;
    const double dt = model.dt;

    // ledger self-consistency
    double max_resid_ratio = 0.0;
    for (const auto& r : rows) {
        double denom = std::abs(r.injection) + r.dissipation + r.damping + 1e-30;
        max_resid_ratio = std::max(max_resid_ratio, std::abs(r.residual) / denom);
    }
    rep.verdicts.push_back({"ledger_residual", max_resid_ratio <= cfg.tol_ledger, max_resid_ratio,
                            cfg.tol_ledger, true,
                            "max |residual| / (|injection| + dissipation + damping)"});

    // cumulative energy inequality: kinetic + int(diss + damp) must stay
    // below kinetic0 + int(injection) + int|residual| at every output time
    double acc_diss = 0.0, acc_inj = 0.0, acc_abs_resid = 0.0;
    double worst_slack = -1e300;
    for (const auto& r : rows) {
        acc_diss += (r.dissipation + r.damping) * dt;
        acc_inj += r.injection * dt;
        acc_abs_resid += std::abs(r.residual) * dt;
        double lhs = r.kinetic + acc_diss;
        double rhs = kinetic0 + acc_inj + acc_abs_resid;
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        worst_slack = std::max(worst_slack, (lhs - rhs) / scale);
    }
    if (rows.empty()) worst_slack = 0.0;
    rep.verdicts.push_back({"energy_inequality_cumulative", worst_slack <= 1e-12, worst_slack, 1e-12,
                            true, "max (kinetic + int(diss+damp) - kinetic0 - int(inj) - int|resid|)"});

    // decay envelope (damped) / linear growth control (classical)
    rep.envelope_c = diag::envelope_check(rows, kinetic0, model, fb.fnorms);
    if (model.beta() > 0.0) {
        rep.verdicts.push_back({"envelope_c", rep.envelope_c <= cfg.averaging.envelope_c_max,
                                rep.envelope_c, cfg.averaging.envelope_c_max, true,
                                "minimal c in the L2 decay envelope"});
    } else {
        rep.verdicts.push_back({"linear_growth_control", rep.envelope_c <= 1.05, rep.envelope_c, 1.05,
                                true, "max (||u||^2 - ||u0||^2) nu / (t ||f||_Hm1^2)"});
    }

    // identity and calibration checks (force side, always available)
    double identity = fb.numbers.Gr * fb.numbers.c0 * std::pow(fb.numbers.gamma, 4.0) / fb.numbers.G0;
    rep.verdicts.push_back({"gr_identity", std::abs(identity - 1.0) <= 1e-10, std::abs(identity - 1.0),
                            1e-10, true, "Gr c0 gamma^4 / G0 = 1"});
    rep.verdicts.push_back({"gamma_le_1", fb.numbers.gamma <= 1.0, fb.numbers.gamma, 1.0, true, ""});
    rep.verdicts.push_back({"constants_ordered", !fb.theo.compat || fb.theo.a1 <= fb.theo.a2,
                            fb.theo.a2 > 0.0 ? fb.theo.a1 / fb.theo.a2 : 0.0, 1.0, true,
                            "a1 <= a2 whenever the compatibility condition holds"});

    // long-time averages
    try {
        diag::accumulate(rows, cfg.averaging, model, rep);
        diag::kolmogorov_and_taylor(rep, fb.numbers, model);
        auto bounds = diag::dissipation_bounds_check(rep, fb.numbers, model, fb.fnorms, cfg.grid.box_len);
        rep.verdicts.insert(rep.verdicts.end(), bounds.begin(), bounds.end());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::insufficient_horizon) throw;
        rep.insufficient_horizon = true;
    }

    out.verdicts = rep.verdicts;

    // flat key = value record
    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    add("code_version", code_version);
    add("config_hash", config::hash(cfg));
    add("mode", run_mode_name(model.mode));
    add("grid.n", std::to_string(cfg.grid.n));
    add("grid.box_len", fmt(cfg.grid.box_len));
    add("grid.dealias_fraction", fmt(cfg.grid.dealias_fraction));
    add("grid.keep_max", std::to_string(cfg.grid.keep_max()));
    add("model.nu", fmt(model.nu));
    add("model.ell0", fmt(model.ell0));
    add("model.theta", fmt(model.theta));
    add("model.alpha", fmt(model.alpha));
    add("model.kappa", fmt(model.kappa));
    add("model.delta", fmt(model.delta));
    add("model.beta", fmt(model.beta()));
    add("model.dt", fmt(model.dt));
    add("model.t_end", fmt(model.t_end));
    add("force.ell", fmt(fb.fspec.ell));
    add("force.amplitude", fmt(fb.fspec.amplitude));
    add("force.seed", std::to_string(cfg.profile.seed));
    add("force.bump_sharpness", fmt(cfg.profile.bump_sharpness));
    add("force.l2", fmt(fb.fnorms.l2));
    add("force.h1", fmt(fb.fnorms.h1));
    add("force.hm1", fmt(fb.fnorms.hm1));
    add("force.linf", fmt(fb.fnorms.linf));
    add("numbers.c0", fmt(fb.numbers.c0));
    add("numbers.c1", fmt(fb.numbers.c1));
    add("numbers.c2", fmt(fb.numbers.c2));
    add("numbers.c3", fmt(fb.numbers.c3));
    add("numbers.gamma", fmt(fb.numbers.gamma));
    add("numbers.L", fmt(fb.numbers.L));
    add("numbers.F", fmt(fb.numbers.F));
    add("numbers.G0", fmt(fb.numbers.G0));
    add("numbers.Gr", fmt(fb.numbers.Gr));
    add("constants.a1", fmt(fb.theo.a1));
    add("constants.a2", fmt(fb.theo.a2));
    add("constants.b1", fmt(fb.theo.b1));
    add("constants.b2", fmt(fb.theo.b2));
    add("constants.g0_condition", fb.theo.g0_condition ? "1" : "0");
    add("constants.compat", fb.theo.compat ? "1" : "0");
    add("constants.c3_below_half", fb.consts.c3_below_half ? "1" : "0");
    add("run.steps", std::to_string(rows.size()));
    add("run.kinetic0", fmt(kinetic0));
    add("run.kinetic_final", fmt(rows.empty() ? kinetic0 : rows.back().kinetic));
    add("diag.insufficient_horizon", rep.insufficient_horizon ? "1" : "0");
    add("diag.epsilon", fmt(rep.epsilon));
    add("diag.U", fmt(rep.U));
    add("diag.Re", fmt(rep.Re));
    add("diag.lT", fmt(rep.lT));
    add("diag.kolmogorov_ratio", fmt(rep.kolmogorov_ratio));
    add("diag.gr_re_ratio", fmt(rep.gr_re_ratio));
    add("diag.taylor_ratio", fmt(rep.taylor_ratio));
    add("diag.k41_taylor", fmt(rep.k41_taylor));
    add("diag.envelope_c", fmt(rep.envelope_c));
    add("diag.u2_drift", fmt(rep.u2_drift));
    add("diag.ledger_max_residual_ratio", fmt(max_resid_ratio));
    add("diag.energy_ineq_slack", fmt(worst_slack));
    out.report_kv = serialize_kv(kv);
    return out;
}

int aggregate_exit(const std::vector<Verdict>& verdicts, bool insufficient) {
    if (insufficient) return exit_insufficient_horizon;
    for (const auto& v : verdicts)
        if (v.gating && !v.pass) return exit_verdict_failed;
    return exit_ok;
}

void prepare_dir(const fs::path& dir) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) fail(ErrorCode::io, dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir)) fail(ErrorCode::io, dir.string() + " is not empty");
    }
    fs::create_directories(dir);
}

RunOutcome run_impl(const ExperimentConfig& cfg, const fs::path& out_dir,
                    const fs::path* checkpoint) {
    RunOutcome outcome;
    outcome.run_dir = out_dir;
    std::string wall_start = now_utc();

    cfg.validate();
    prepare_dir(out_dir);
    write_text(out_dir / "config.kv", config::serialize(cfg));

    ForceBundle fb = build_force_side(cfg);

    SimState state;
    if (checkpoint) {
        ModelParams stored;
        state = io::read_checkpoint(*checkpoint, &stored);
        if (state.u.grid() != cfg.grid)
            fail(ErrorCode::config, "checkpoint grid does not match the config");
        bool same = stored.nu == cfg.model.nu && stored.ell0 == cfg.model.ell0 &&
                    stored.theta == cfg.model.theta && stored.alpha == cfg.model.alpha &&
                    stored.kappa == cfg.model.kappa && stored.delta == cfg.model.delta &&
                    stored.dt == cfg.model.dt && stored.mode == cfg.model.mode;
        if (!same) fail(ErrorCode::config, "checkpoint model parameters do not match the config");
    } else {
        state.u = SpectralField(cfg.grid);
        if (cfg.initial.kind == InitialSpec::Kind::random)
            state.u = spectral::random_divergence_free(cfg.grid, cfg.initial.seed, cfg.initial.l2,
                                                       cfg.initial.xi_max);
    }
    double kinetic0 = spectral::l2_norm_sq(state.u);

    // assembled force in the snapshot format, for downstream tooling
    {
        SimState fsnap;
        fsnap.u = fb.force;
        io::write_snapshot(out_dir / "force.kdsnp", fsnap);
    }

    std::vector<EnergyLedgerRow> rows;
    io::LedgerWriter writer(out_dir / "ledger.ndjson", out_dir / "ledger.csv");
    if (cfg.io.snapshot_every) fs::create_directories(out_dir / "snapshots");
    if (cfg.io.checkpoint_every) fs::create_directories(out_dir / "checkpoints");

    dynamics::RunSinks sinks;
    sinks.on_row = [&](const EnergyLedgerRow& r) {
        rows.push_back(r);
        writer.append(r);
    };
    sinks.snapshot_every = cfg.io.snapshot_every;
    sinks.checkpoint_every = cfg.io.checkpoint_every;
    sinks.on_snapshot = [&](const SimState& s) {
        char name[64];
        std::snprintf(name, sizeof name, "snap_%010llu.kdsnp",
                      static_cast<unsigned long long>(s.step_index));
        io::write_snapshot(out_dir / "snapshots" / name, s);
    };
    sinks.on_checkpoint = [&](const SimState& s) {
        char name[64];
        std::snprintf(name, sizeof name, "chk_%010llu.kdchk",
                      static_cast<unsigned long long>(s.step_index));
        io::write_checkpoint(out_dir / "checkpoints" / name, s, cfg.model);
    };

    bool solver_failed = false;
    std::string solver_error;
    SimState final_state;
    try {
        final_state = dynamics::run(std::move(state), fb.force, cfg.model, sinks);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::cfl_violation && e.code() != ErrorCode::non_finite) throw;
        solver_failed = true;
        solver_error = e.what();
    }
    writer.flush();

    if (solver_failed) {
        write_text(out_dir / "error.kv",
                   serialize_kv({{"error", solver_error}, {"rows_flushed", std::to_string(rows.size())}}));
        io::RunManifest manifest;
        manifest.config_hash = config::hash(cfg);
        manifest.code_version = code_version;
        manifest.wall_start = wall_start;
        manifest.wall_end = now_utc();
        manifest.files = io::inventory_run_dir(out_dir);
        io::write_manifest(out_dir / "manifest.json", manifest);
        outcome.exit_code = exit_solver_error;
        outcome.error = solver_error;
        return outcome;
    }

    if (final_state.step_index > 0) {
        fs::create_directories(out_dir / "checkpoints");
        io::write_checkpoint(out_dir / "checkpoints" / "chk_final.kdchk", final_state, cfg.model);
    }

    ReportBundle rb = build_report(cfg, fb, rows, kinetic0);
    write_text(out_dir / "report.kv", rb.report_kv);
    write_text(out_dir / "verdicts.tsv", verdicts_tsv(rb.verdicts));

    io::RunManifest manifest;
    manifest.config_hash = config::hash(cfg);
    manifest.code_version = code_version;
    manifest.wall_start = wall_start;
    manifest.wall_end = now_utc();
    manifest.files = io::inventory_run_dir(out_dir);
    io::write_manifest(out_dir / "manifest.json", manifest);

    outcome.report = rb.report;
    outcome.numbers = fb.numbers;
    outcome.insufficient_horizon = rb.report.insufficient_horizon;
    outcome.exit_code = aggregate_exit(rb.verdicts, rb.report.insufficient_horizon);
    return outcome;
}

} // namespace

std::string serialize_kv(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string out;
    for (const auto& [k, v] : entries) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
    return run_impl(cfg, out_dir, nullptr);
}

RunOutcome resume_experiment(const ExperimentConfig& cfg, const fs::path& checkpoint,
                             const fs::path& out_dir) {
    return run_impl(cfg, out_dir, &checkpoint);
}

SweepOutcome sweep_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
    SweepOutcome outcome;
    cfg.validate();
    if (cfg.sweep_ells.size() < 4)
        fail(ErrorCode::insufficient_sweep, "sweep needs >= 4 ell values, got " +
                                                std::to_string(cfg.sweep_ells.size()));
    fs::create_directories(out_dir);

    std::vector<diag::SweepPoint> points;
    for (std::size_t i = 0; i < cfg.sweep_ells.size(); ++i) {
        double ell = cfg.sweep_ells[i];
        ExperimentConfig point_cfg = cfg;
        point_cfg.force_ell = ell;
        if (!cfg.sweep_dts.empty()) point_cfg.model.dt = cfg.sweep_dts[i];
        point_cfg.sweep_ells.clear();
        point_cfg.sweep_dts.clear();
        char name[64];
        std::snprintf(name, sizeof name, "point_%02zu_ell_%g", i, ell);
        fs::path pdir = out_dir / name;

        bool reused = false;
        if (fs::exists(pdir / "manifest.json") && fs::exists(pdir / "report.kv") &&
            fs::exists(pdir / "config.kv")) {
            try {
                auto stored_cfg = config::parse_file(pdir / "config.kv");
                if (config::hash(stored_cfg) == config::hash(point_cfg)) {
                    auto kv = parse_kv(read_text(pdir / "report.kv"));
                    if (kv.at("diag.insufficient_horizon") == "0") {
                        diag::SweepPoint p;
                        p.ell = ell;
                        p.numbers.c0 = std::stod(kv.at("numbers.c0"));
                        p.numbers.c1 = std::stod(kv.at("numbers.c1"));
                        p.numbers.c2 = std::stod(kv.at("numbers.c2"));
                        p.numbers.c3 = std::stod(kv.at("numbers.c3"));
                        p.numbers.gamma = std::stod(kv.at("numbers.gamma"));
                        p.numbers.L = std::stod(kv.at("numbers.L"));
                        p.numbers.F = std::stod(kv.at("numbers.F"));
                        p.numbers.G0 = std::stod(kv.at("numbers.G0"));
                        p.numbers.Gr = std::stod(kv.at("numbers.Gr"));
                        p.report.epsilon = std::stod(kv.at("diag.epsilon"));
                        p.report.U = std::stod(kv.at("diag.U"));
                        p.report.Re = std::stod(kv.at("diag.Re"));
                        p.report.lT = std::stod(kv.at("diag.lT"));
                        p.report.kolmogorov_ratio = std::stod(kv.at("diag.kolmogorov_ratio"));
                        p.report.gr_re_ratio = std::stod(kv.at("diag.gr_re_ratio"));
                        p.report.taylor_ratio = std::stod(kv.at("diag.taylor_ratio"));
                        points.push_back(p);
                        reused = true;
                    }
                }
            } catch (const std::exception&) {
                reused = false;
            }
        }
        if (reused) continue;

        if (fs::exists(pdir)) fs::remove_all(pdir);
        try {
            RunOutcome r = run_experiment(point_cfg, pdir);
            if (r.exit_code == exit_ok || r.exit_code == exit_verdict_failed) {
                diag::SweepPoint p;
                p.ell = ell;
                p.numbers = r.numbers;
                p.report = r.report;
                points.push_back(p);
            } else {
                outcome.point_errors.push_back(std::string(name) + ": exit " +
                                               std::to_string(r.exit_code) + " " + r.error);
            }
        } catch (const Error& e) {
            outcome.point_errors.push_back(std::string(name) + ": " + e.what());
        }
    }

    if (points.size() < 4) {
        outcome.exit_code = exit_insufficient_sweep;
        outcome.error = "only " + std::to_string(points.size()) + " sweep points survived";
        return outcome;
    }

    outcome.verdicts = diag::sweep_analysis(points);

    // plot-ready point table
    std::string csv =
        "ell[L],gamma,L[L],F[U/T],G0,Gr,epsilon[U2/T],U[U],Re,lT[L],kolmogorov_ratio,gr_re_ratio,"
        "taylor_ratio\n";
    for (const auto& p : points) {
        csv += fmt(p.ell);
        csv += ',';
        csv += fmt(p.numbers.gamma);
        csv += ',';
        csv += fmt(p.numbers.L);
        csv += ',';
        csv += fmt(p.numbers.F);
        csv += ',';
        csv += fmt(p.numbers.G0);
        csv += ',';
        csv += fmt(p.numbers.Gr);
        csv += ',';
        csv += fmt(p.report.epsilon);
        csv += ',';
        csv += fmt(p.report.U);
        csv += ',';
        csv += fmt(p.report.Re);
        csv += ',';
        csv += fmt(p.report.lT);
        csv += ',';
        csv += fmt(p.report.kolmogorov_ratio);
        csv += ',';
        csv += fmt(p.report.gr_re_ratio);
        csv += ',';
        csv += fmt(p.report.taylor_ratio);
        csv += '\n';
    }
    write_text(out_dir / "sweep_points.csv", csv);

    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("sweep.points", std::to_string(points.size()));
    kv.emplace_back("sweep.failed_points", std::to_string(outcome.point_errors.size()));
    for (std::size_t e = 0; e < outcome.point_errors.size(); ++e)
        kv.emplace_back("sweep.point_error." + std::to_string(e), outcome.point_errors[e]);
    kv.emplace_back("sweep.slope_gr", fmt(outcome.verdicts.slope_gr));
    kv.emplace_back("sweep.slope_u", fmt(outcome.verdicts.slope_u));
    kv.emplace_back("sweep.slope_eps", fmt(outcome.verdicts.slope_eps));
    kv.emplace_back("sweep.band_gr_re2", fmt(outcome.verdicts.band_gr_re2));
    kv.emplace_back("sweep.band_fl_u2", fmt(outcome.verdicts.band_fl_u2));
    kv.emplace_back("sweep.band_kolmogorov", fmt(outcome.verdicts.band_kolmogorov));
    kv.emplace_back("sweep.band_taylor", fmt(outcome.verdicts.band_taylor));
    kv.emplace_back("sweep.gr_span", fmt(outcome.verdicts.gr_span));
    kv.emplace_back("sweep.re_span", fmt(outcome.verdicts.re_span));
    write_text(out_dir / "sweep_report.kv", serialize_kv(kv));
    write_text(out_dir / "sweep_verdicts.tsv", verdicts_tsv(outcome.verdicts.verdicts));

    outcome.exit_code = aggregate_exit(outcome.verdicts.verdicts, false);
    return outcome;
}

int verify_run_dir(const fs::path& run_dir, std::ostream& log) {
    io::RunManifest manifest = io::read_manifest(run_dir / "manifest.json");
    auto actual = io::inventory_run_dir(run_dir);

    bool mismatch = false;
    std::map<std::string, const io::ManifestEntry*> stored;
    for (const auto& e : manifest.files) stored[e.path] = &e;
    std::map<std::string, const io::ManifestEntry*> found;
    for (const auto& e : actual) found[e.path] = &e;
    for (const auto& [path, e] : stored) {
        auto it = found.find(path);
        if (it == found.end()) {
            log << "verify: missing file " << path << "\n";
            mismatch = true;
        } else if (it->second->sha256 != e->sha256 || it->second->bytes != e->bytes) {
            log << "verify: digest mismatch in " << path << "\n";
            mismatch = true;
        }
    }
    for (const auto& [path, e] : found) {
        (void)e;
        if (!stored.count(path)) {
            log << "verify: unexpected file " << path << "\n";
            mismatch = true;
        }
    }
    if (mismatch) return exit_verify_mismatch;

    ExperimentConfig cfg = config::parse_file(run_dir / "config.kv");
    if (config::hash(cfg) != manifest.config_hash) {
        log << "verify: config hash mismatch\n";
        return exit_verify_mismatch;
    }

    if (!fs::exists(run_dir / "report.kv")) {
        log << "verify: run directory has no report (failed run); digests OK\n";
        return exit_ok;
    }

    auto rows = io::read_ledger(run_dir / "ledger.ndjson");
    auto stored_kv = parse_kv(read_text(run_dir / "report.kv"));
    double kinetic0 = std::stod(stored_kv.at("run.kinetic0"));

    ForceBundle fb = build_force_side(cfg);
    ReportBundle rb = build_report(cfg, fb, rows, kinetic0);

    std::string stored_report = read_text(run_dir / "report.kv");
    if (rb.report_kv != stored_report) {
        auto recomputed = parse_kv(rb.report_kv);
        for (const auto& [k, v] : recomputed) {
            auto it = stored_kv.find(k);
            if (it == stored_kv.end() || it->second != v)
                log << "verify: report mismatch at " << k << ": stored '"
                    << (it == stored_kv.end() ? "<absent>" : it->second) << "' recomputed '" << v
                    << "'\n";
        }
        return exit_verify_mismatch;
    }
    std::string stored_verdicts = read_text(run_dir / "verdicts.tsv");
    if (verdicts_tsv(rb.verdicts) != stored_verdicts) {
        log << "verify: verdicts.tsv does not match recomputation\n";
        return exit_verify_mismatch;
    }

    int agg = aggregate_exit(rb.verdicts, rb.report.insufficient_horizon);
    if (agg != exit_ok) {
        log << "verify: digests and recomputation OK, but run verdicts fail (exit " << agg << ")\n";
        return agg;
    }
    log << "verify: OK (" << manifest.files.size() << " files, " << rows.size() << " ledger rows)\n";
    return exit_ok;
}

int report_run_dir(const fs::path& run_dir, std::ostream& log) {
    log << read_text(run_dir / "report.kv");
    std::string verdicts = read_text(run_dir / "verdicts.tsv");
    log << "\n" << verdicts;
    auto kv = parse_kv(read_text(run_dir / "report.kv"));
    bool insufficient = kv.count("diag.insufficient_horizon") && kv.at("diag.insufficient_horizon") == "1";
    if (insufficient) return exit_insufficient_horizon;
    std::istringstream in(verdicts);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.find("\tFAIL\t") != std::string::npos && line.find("\tgating\t") != std::string::npos)
            return exit_verdict_failed;
    }
    return exit_ok;
}

} // namespace kolmodamp::harness

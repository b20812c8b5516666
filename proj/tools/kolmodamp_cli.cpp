// kolmodamp command-line runner. Links the C API only.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "kolmodamp.h"

namespace {

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    const char* env = std::getenv("KOLMODAMP_THREADS");
    if (env && *env) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;
}

int fail_with(kd_status status) {
    const char* msg = kd_last_error();
    if (msg && *msg) std::fprintf(stderr, "kolmodamp: %s [%s]\n", msg, kd_status_name(status));
    else std::fprintf(stderr, "kolmodamp: %s\n", kd_status_name(status));
    return static_cast<int>(status);
}

struct ConfigHandle {
    kd_config* ptr = nullptr;
    ~ConfigHandle() { kd_config_free(ptr); }
};

kd_status load_config(const std::string& config_path, const std::string& preset, ConfigHandle& out) {
    if (!config_path.empty()) return kd_config_from_file(config_path.c_str(), &out.ptr);
    return kd_config_from_preset(preset.c_str(), &out.ptr);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kolmodamp: damped Navier-Stokes periodic-box simulator and diagnostics"};
    app.set_version_flag("--version", std::string(kd_version()));
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, resume_path, run_dir;
    int threads = 0;

    auto add_config_opts = [&](CLI::App* cmd) {
        auto* c = cmd->add_option("--config", config_path, "experiment config file");
        auto* p = cmd->add_option("--preset", preset, "built-in preset name");
        c->excludes(p);
        cmd->add_option("--threads", threads, "worker threads (or KOLMODAMP_THREADS)");
    };

    CLI::App* run = app.add_subcommand("run", "execute one experiment");
    add_config_opts(run);
    run->add_option("--out", out_dir, "output run directory")->required();
    run->add_option("--resume", resume_path, "checkpoint file to resume from");

    CLI::App* sweep = app.add_subcommand("sweep", "run the configured ell sweep and aggregate");
    add_config_opts(sweep);
    sweep->add_option("--out", out_dir, "output sweep directory")->required();

    CLI::App* verify = app.add_subcommand("verify", "re-verify a finished run directory");
    verify->add_option("dir", run_dir, "run directory")->required();

    CLI::App* report = app.add_subcommand("report", "print the stored report and verdicts");
    report->add_option("dir", run_dir, "run directory")->required();

    CLI::App* presets = app.add_subcommand("presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    if (presets->parsed()) {
        for (size_t i = 0; i < kd_preset_count(); ++i) std::printf("%s\n", kd_preset_name(i));
        return 0;
    }
    if (verify->parsed()) {
        kd_status s = kd_verify(run_dir.c_str());
        return s == KD_OK ? 0 : fail_with(s);
    }
    if (report->parsed()) {
        kd_status s = kd_report(run_dir.c_str());
        return s == KD_OK ? 0 : fail_with(s);
    }

    if (config_path.empty() && preset.empty()) {
        std::fprintf(stderr, "kolmodamp: need --config or --preset\n");
        return static_cast<int>(KD_ERR_CONFIG);
    }
    kd_set_threads(resolve_threads(threads));

    ConfigHandle cfg;
    kd_status s = load_config(config_path, preset, cfg);
    if (s != KD_OK) return fail_with(s);

    if (run->parsed()) {
        s = resume_path.empty() ? kd_run(cfg.ptr, out_dir.c_str())
                                : kd_resume(cfg.ptr, resume_path.c_str(), out_dir.c_str());
    } else {
        s = kd_sweep(cfg.ptr, out_dir.c_str());
    }
    if (s == KD_OK) {
        std::printf("%s finished: %s\n", run->parsed() ? "run" : "sweep", out_dir.c_str());
        return 0;
    }
    return fail_with(s);
}

#include "kolmodamp.h"

#include <cstring>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kolmodamp/config.hpp"
#include "kolmodamp/harness.hpp"
#include "kolmodamp/version.hpp"

using namespace kolmodamp;

struct kd_config {
    ExperimentConfig cfg;
};

namespace {

thread_local std::string t_last_error;

kd_status status_from_error(const Error& e) {
    switch (e.code()) {
        case ErrorCode::config:
        case ErrorCode::lattice_overflow:
        case ErrorCode::unresolved_annulus: return KD_ERR_CONFIG;
        case ErrorCode::cfl_violation:
        case ErrorCode::non_finite: return KD_ERR_SOLVER;
        case ErrorCode::insufficient_horizon: return KD_ERR_INSUFFICIENT_HORIZON;
        case ErrorCode::insufficient_sweep: return KD_ERR_INSUFFICIENT_SWEEP;
        case ErrorCode::verify_mismatch: return KD_ERR_VERIFY_MISMATCH;
        case ErrorCode::io: return KD_ERR_IO;
        case ErrorCode::invalid_argument:
        case ErrorCode::gamma_exceeds_one:
        case ErrorCode::degenerate_run: return KD_ERR_INVALID_ARGUMENT;
        default: return KD_ERROR;
    }
}

template <typename F>
kd_status guarded(F&& f) {
    t_last_error.clear();
    try {
        return f();
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_from_error(e);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return KD_ERROR;
    } catch (...) {
        t_last_error = "unknown error";
        return KD_ERROR;
    }
}

kd_status from_exit_code(int code, const std::string& detail) {
    if (code == harness::exit_ok) return KD_OK;
    if (!detail.empty()) t_last_error = detail;
    switch (code) {
        case harness::exit_insufficient_horizon:
            if (detail.empty()) t_last_error = "run horizon too short for long-time averages";
            return KD_ERR_INSUFFICIENT_HORIZON;
        case harness::exit_verdict_failed:
            if (detail.empty()) t_last_error = "one or more inequality verdicts failed";
            return KD_ERR_VERDICT_FAILED;
        case harness::exit_config_error: return KD_ERR_CONFIG;
        case harness::exit_solver_error: return KD_ERR_SOLVER;
        case harness::exit_verify_mismatch: return KD_ERR_VERIFY_MISMATCH;
        case harness::exit_insufficient_sweep: return KD_ERR_INSUFFICIENT_SWEEP;
        default: return KD_ERROR;
    }
}

} // namespace

extern "C" {

const char* kd_version(void) { return version_string; }

const char* kd_status_name(kd_status s) {
    switch (s) {
        case KD_OK: return "ok";
        case KD_ERROR: return "error";
        case KD_ERR_INSUFFICIENT_HORIZON: return "insufficient-horizon";
        case KD_ERR_VERDICT_FAILED: return "verdict-failed";
        case KD_ERR_CONFIG: return "config-error";
        case KD_ERR_SOLVER: return "solver-error";
        case KD_ERR_VERIFY_MISMATCH: return "verify-mismatch";
        case KD_ERR_INSUFFICIENT_SWEEP: return "insufficient-sweep";
        case KD_ERR_IO: return "io-error";
        case KD_ERR_INVALID_ARGUMENT: return "invalid-argument";
    }
    return "?";
}

const char* kd_last_error(void) { return t_last_error.c_str(); }

void kd_set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

kd_status kd_config_from_file(const char* path, kd_config** out) {
    if (!path || !out) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        auto* handle = new kd_config{config::parse_file(path)};
        *out = handle;
        return KD_OK;
    });
}

kd_status kd_config_from_preset(const char* name, kd_config** out) {
    if (!name || !out) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        auto* handle = new kd_config{config::preset(name)};
        *out = handle;
        return KD_OK;
    });
}

void kd_config_free(kd_config* cfg) { delete cfg; }

kd_status kd_config_to_string(const kd_config* cfg, char* buf, size_t cap, size_t* needed) {
    if (!cfg) {
        t_last_error = "null config";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        std::string text = config::serialize(cfg->cfg);
        if (needed) *needed = text.size() + 1;
        if (buf && cap > 0) {
            size_t n = std::min(cap - 1, text.size());
            std::memcpy(buf, text.data(), n);
            buf[n] = '\0';
        }
        return KD_OK;
    });
}

kd_status kd_config_hash(const kd_config* cfg, char* buf, size_t cap) {
    if (!cfg || !buf) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    if (cap < 65) {
        t_last_error = "buffer too small for a sha256 hex digest";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        std::string h = config::hash(cfg->cfg);
        std::memcpy(buf, h.data(), 64);
        buf[64] = '\0';
        return KD_OK;
    });
}

size_t kd_preset_count(void) { return config::preset_names().size(); }

const char* kd_preset_name(size_t i) {
    static thread_local std::string name;
    auto names = config::preset_names();
    if (i >= names.size()) return nullptr;
    name = names[i];
    return name.c_str();
}

kd_status kd_run(const kd_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        auto outcome = harness::run_experiment(cfg->cfg, out_dir);
        return from_exit_code(outcome.exit_code, outcome.error);
    });
}

kd_status kd_resume(const kd_config* cfg, const char* checkpoint_path, const char* out_dir) {
    if (!cfg || !checkpoint_path || !out_dir) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        auto outcome = harness::resume_experiment(cfg->cfg, checkpoint_path, out_dir);
        return from_exit_code(outcome.exit_code, outcome.error);
    });
}

kd_status kd_sweep(const kd_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() {
        auto outcome = harness::sweep_experiment(cfg->cfg, out_dir);
        return from_exit_code(outcome.exit_code, outcome.error);
    });
}

kd_status kd_verify(const char* run_dir) {
    if (!run_dir) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() { return from_exit_code(harness::verify_run_dir(run_dir, std::cout), ""); });
}

kd_status kd_report(const char* run_dir) {
    if (!run_dir) {
        t_last_error = "null argument";
        return KD_ERR_INVALID_ARGUMENT;
    }
    return guarded([&]() { return from_exit_code(harness::report_run_dir(run_dir, std::cout), ""); });
}

} // extern "C"

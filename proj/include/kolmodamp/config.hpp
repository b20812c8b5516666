#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kolmodamp/diagnostics.hpp"
#include "kolmodamp/dynamics.hpp"
#include "kolmodamp/forcing.hpp"
#include "kolmodamp/grid.hpp"

namespace kolmodamp {

// Initial velocity field: zero (default) or a seeded random
// divergence-free field with the given L2 norm (modes below xi_max).
struct InitialSpec {
    enum class Kind { zero, random } kind = Kind::zero;
    double l2 = 0.0;
    double xi_max = 0.0; // 0 = all retained modes
    std::uint64_t seed = 1;
};

struct IoSpec {
    std::uint64_t snapshot_every = 0;   // steps, 0 disables
    std::uint64_t checkpoint_every = 0; // steps, 0 disables
};

/* Full experiment description, mirrored one-to-one by the sectioned
   key = value config text (grammar documented in the README). Parsing,
   canonical serialization and validation keep a round-trip fixed point:
   parse(serialize(c)) == c. */
struct ExperimentConfig {
    GridSpec grid;
    ModelParams model; // alpha/kappa/delta derived per mode at load
    ProfileSpec profile;
    double force_ell = 0.0;
    std::optional<double> force_amplitude; // absent = paper default nu^2/ell0^3
    InitialSpec initial;
    AveragingPolicy averaging;
    IoSpec io;
    double tol_ledger = 1e-7;
    std::vector<double> sweep_ells;
    std::vector<double> sweep_dts; // optional per-point dt overrides

    ForceSpec force_spec() const {
        ForceSpec f;
        f.profile = profile;
        f.ell0 = model.ell0;
        f.ell = force_ell;
        f.nu = model.nu;
        f.amplitude = force_amplitude ? *force_amplitude
                                      : model.nu * model.nu / (model.ell0 * model.ell0 * model.ell0);
        return f;
    }

    void validate() const;
};

namespace config {

// Parses the sectioned key=value text. Unknown keys, malformed values and
// mode-forbidden overrides (alpha/kappa in damped-default, ...) are
// field-level errors.
ExperimentConfig parse(const std::string& text);
ExperimentConfig parse_file(const std::filesystem::path& path);

// Canonical serialization: fixed section and key order, %.17g numbers.
std::string serialize(const ExperimentConfig& cfg);

// SHA-256 of the canonical serialization.
std::string hash(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

} // namespace config
} // namespace kolmodamp

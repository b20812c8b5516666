#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kolmodamp/dynamics.hpp"

namespace kolmodamp::io {

// --- digests -------------------------------------------------------------

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::filesystem::path& path);

// --- ledger --------------------------------------------------------------

/* Ledger rows are serialized once per step as NDJSON with %.17g doubles
   (lossless round-trip), plus a CSV mirror whose header carries the model
   units: velocity^2 * length^3 for kinetic, the same per time for the
   rate columns. */

std::string ledger_row_json(const EnergyLedgerRow& row);
std::string ledger_csv_header();
std::string ledger_row_csv(const EnergyLedgerRow& row);

class LedgerWriter {
  public:
    LedgerWriter(const std::filesystem::path& ndjson_path, const std::filesystem::path& csv_path);
    ~LedgerWriter();
    void append(const EnergyLedgerRow& row);
    void flush();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<EnergyLedgerRow> read_ledger(const std::filesystem::path& ndjson_path);

// --- field snapshots and checkpoints --------------------------------------

/* Binary formats, little-endian, versioned magic header. Coefficients are
   stored component-major, then x-major with the r2c-truncated z axis
   fastest; a SHA-256 of the payload trails the file.

   snapshot   = "KDMPSNP1" u32 version u32 order_tag
                u32 n  f64 box_len  f64 dealias_fraction  f64 t
                u64 ncomplex  payload  sha256[32]
   checkpoint = "KDMPCHK1" u32 version u32 order_tag
                u32 n  f64 box_len  f64 dealias_fraction
                u32 mode f64 nu ell0 theta alpha kappa delta dt t_end cfl
                f64 t  u64 step_index
                u64 ncomplex  payload  sha256[32] */

void write_snapshot(const std::filesystem::path& path, const SimState& state);
SpectralField read_snapshot(const std::filesystem::path& path, double* t_out = nullptr);

void write_checkpoint(const std::filesystem::path& path, const SimState& state,
                      const ModelParams& params);
SimState read_checkpoint(const std::filesystem::path& path, ModelParams* params_out = nullptr);

// --- run manifest ----------------------------------------------------------

struct ManifestEntry {
    std::string path; // run-dir relative
    std::uint64_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string wall_start;
    std::string wall_end;
    std::vector<ManifestEntry> files; // sorted by path
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

// Inventory of every regular file under run_dir (excluding the manifest
// itself), digested and sorted.
std::vector<ManifestEntry> inventory_run_dir(const std::filesystem::path& run_dir);

} // namespace kolmodamp::io

#include "kolmodamp/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace kolmodamp::io {

namespace fs = std::filesystem;
using nlohmann::json;

// --- digests -------------------------------------------------------------

namespace {

std::string to_hex(const unsigned char* digest, std::size_t len) {
    static const char* hex = "0123456789abcdef";
    std::string out(len * 2, '0');
    for (std::size_t i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

class Sha256Stream {
  public:
    Sha256Stream() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr); }
    ~Sha256Stream() { EVP_MD_CTX_free(ctx_); }
    void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx_, data, len); }
    std::string hex() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, digest, &len);
        return to_hex(digest, len);
    }

  private:
    EVP_MD_CTX* ctx_;
};

} // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
    Sha256Stream s;
    s.update(bytes.data(), bytes.size());
    return s.hex();
}

std::string sha256_hex(const std::string& text) {
    return sha256_hex(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    Sha256Stream s;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        s.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return s.hex();
}

// --- ledger --------------------------------------------------------------

namespace {

void fmt_double(char* buf, std::size_t cap, double v) { std::snprintf(buf, cap, "%.17g", v); }

} // namespace

std::string ledger_row_json(const EnergyLedgerRow& row) {
    char num[6][32];
    fmt_double(num[0], 32, row.t);
    fmt_double(num[1], 32, row.kinetic);
    fmt_double(num[2], 32, row.dissipation);
    fmt_double(num[3], 32, row.injection);
    fmt_double(num[4], 32, row.damping);
    fmt_double(num[5], 32, row.residual);
    std::string out;
    out.reserve(200);
    out += "{\"t\":";
    out += num[0];
    out += ",\"kinetic\":";
    out += num[1];
    out += ",\"dissipation\":";
    out += num[2];
    out += ",\"injection\":";
    out += num[3];
    out += ",\"damping\":";
    out += num[4];
    out += ",\"residual\":";
    out += num[5];
    out += "}\n";
    return out;
}

std::string ledger_csv_header() {
    return "t[T],kinetic[U2.L3],dissipation[U2.L3/T],injection[U2.L3/T],damping[U2.L3/T],"
           "residual[U2.L3/T]\n";
}

std::string ledger_row_csv(const EnergyLedgerRow& row) {
    char num[6][32];
    fmt_double(num[0], 32, row.t);
    fmt_double(num[1], 32, row.kinetic);
    fmt_double(num[2], 32, row.dissipation);
    fmt_double(num[3], 32, row.injection);
    fmt_double(num[4], 32, row.damping);
    fmt_double(num[5], 32, row.residual);
    std::string out;
    out.reserve(200);
    for (int i = 0; i < 6; ++i) {
        out += num[i];
        out += i == 5 ? '\n' : ',';
    }
    return out;
}

struct LedgerWriter::Impl {
    std::ofstream ndjson;
    std::ofstream csv;
};

LedgerWriter::LedgerWriter(const fs::path& ndjson_path, const fs::path& csv_path)
    : impl_(std::make_unique<Impl>()) {
    impl_->ndjson.open(ndjson_path, std::ios::binary);
    impl_->csv.open(csv_path, std::ios::binary);
    if (!impl_->ndjson || !impl_->csv)
        fail(ErrorCode::io, "cannot open ledger outputs in " + ndjson_path.parent_path().string());
    impl_->csv << ledger_csv_header();
}

LedgerWriter::~LedgerWriter() = default;

void LedgerWriter::append(const EnergyLedgerRow& row) {
    impl_->ndjson << ledger_row_json(row);
    impl_->csv << ledger_row_csv(row);
}

void LedgerWriter::flush() {
    impl_->ndjson.flush();
    impl_->csv.flush();
}

std::vector<EnergyLedgerRow> read_ledger(const fs::path& ndjson_path) {
    std::ifstream in(ndjson_path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + ndjson_path.string());
    std::vector<EnergyLedgerRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) fail(ErrorCode::io, "malformed ledger row in " + ndjson_path.string());
        EnergyLedgerRow r;
        r.t = j.at("t").get<double>();
        r.kinetic = j.at("kinetic").get<double>();
        r.dissipation = j.at("dissipation").get<double>();
        r.injection = j.at("injection").get<double>();
        r.damping = j.at("damping").get<double>();
        r.residual = j.at("residual").get<double>();
        rows.push_back(r);
    }
    return rows;
}

// --- binary field formats --------------------------------------------------

namespace {

constexpr char snapshot_magic[8] = {'K', 'D', 'M', 'P', 'S', 'N', 'P', '1'};
constexpr char checkpoint_magic[8] = {'K', 'D', 'M', 'P', 'C', 'H', 'K', '1'};
constexpr std::uint32_t format_version = 1;
constexpr std::uint32_t order_tag = 0x01020304u;

class BinWriter {
  public:
    explicit BinWriter(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
    }
    void bytes(const void* data, std::size_t len) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    }
    template <typename T>
    void pod(const T& v) {
        bytes(&v, sizeof v);
    }
    void payload(const void* data, std::size_t len) {
        bytes(data, len);
        payload_digest_.update(data, len);
    }
    void finish_with_payload_digest() {
        std::string hex = payload_digest_.hex();
        unsigned char raw[32];
        for (int i = 0; i < 32; ++i)
            raw[i] = static_cast<unsigned char>(std::stoi(hex.substr(2 * i, 2), nullptr, 16));
        out_.write(reinterpret_cast<const char*>(raw), 32);
        if (!out_) fail(ErrorCode::io, "short write");
    }

  private:
    std::ofstream out_;
    Sha256Stream payload_digest_;
};

class BinReader {
  public:
    explicit BinReader(const fs::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) fail(ErrorCode::io, "cannot open " + path.string());
    }
    void bytes(void* data, std::size_t len) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
        if (static_cast<std::size_t>(in_.gcount()) != len)
            fail(ErrorCode::io, "truncated file " + path_.string());
    }
    template <typename T>
    T pod() {
        T v;
        bytes(&v, sizeof v);
        return v;
    }
    void payload(void* data, std::size_t len) {
        bytes(data, len);
        payload_digest_.update(data, len);
    }
    void check_payload_digest() {
        unsigned char raw[32];
        bytes(raw, 32);
        std::string stored = to_hex(raw, 32);
        if (stored != payload_digest_.hex())
            fail(ErrorCode::verify_mismatch, "payload digest mismatch in " + path_.string());
    }

  private:
    std::ifstream in_;
    fs::path path_;
    Sha256Stream payload_digest_;
};

void check_header(BinReader& r, const char expect[8]) {
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, expect, 8) != 0) fail(ErrorCode::io, "bad magic");
    if (r.pod<std::uint32_t>() != format_version) fail(ErrorCode::io, "unsupported format version");
    if (r.pod<std::uint32_t>() != order_tag) fail(ErrorCode::io, "byte-order mismatch");
}

} // namespace

void write_snapshot(const fs::path& path, const SimState& state) {
    const GridSpec& g = state.u.grid();
    BinWriter w(path);
    w.bytes(snapshot_magic, 8);
    w.pod(format_version);
    w.pod(order_tag);
    w.pod(static_cast<std::uint32_t>(g.n));
    w.pod(g.box_len);
    w.pod(g.dealias_fraction);
    w.pod(state.t);
    std::uint64_t ncomplex = state.u.raw().size();
    w.pod(ncomplex);
    w.payload(state.u.raw().data(), ncomplex * sizeof(complexd));
    w.finish_with_payload_digest();
}

SpectralField read_snapshot(const fs::path& path, double* t_out) {
    BinReader r(path);
    check_header(r, snapshot_magic);
    GridSpec g;
    g.n = static_cast<int>(r.pod<std::uint32_t>());
    g.box_len = r.pod<double>();
    g.dealias_fraction = r.pod<double>();
    double t = r.pod<double>();
    SpectralField f(g);
    std::uint64_t ncomplex = r.pod<std::uint64_t>();
    if (ncomplex != f.raw().size()) fail(ErrorCode::io, "snapshot size mismatch");
    r.payload(f.raw().data(), ncomplex * sizeof(complexd));
    r.check_payload_digest();
    if (t_out) *t_out = t;
    return f;
}

void write_checkpoint(const fs::path& path, const SimState& state, const ModelParams& params) {
    const GridSpec& g = state.u.grid();
    BinWriter w(path);
    w.bytes(checkpoint_magic, 8);
    w.pod(format_version);
    w.pod(order_tag);
    w.pod(static_cast<std::uint32_t>(g.n));
    w.pod(g.box_len);
    w.pod(g.dealias_fraction);
    w.pod(static_cast<std::uint32_t>(params.mode));
    w.pod(params.nu);
    w.pod(params.ell0);
    w.pod(params.theta);
    w.pod(params.alpha);
    w.pod(params.kappa);
    w.pod(params.delta);
    w.pod(params.dt);
    w.pod(params.t_end);
    w.pod(params.cfl_limit);
    w.pod(state.t);
    w.pod(static_cast<std::uint64_t>(state.step_index));
    std::uint64_t ncomplex = state.u.raw().size();
    w.pod(ncomplex);
    w.payload(state.u.raw().data(), ncomplex * sizeof(complexd));
    w.finish_with_payload_digest();
}

SimState read_checkpoint(const fs::path& path, ModelParams* params_out) {
    BinReader r(path);
    check_header(r, checkpoint_magic);
    GridSpec g;
    g.n = static_cast<int>(r.pod<std::uint32_t>());
    g.box_len = r.pod<double>();
    g.dealias_fraction = r.pod<double>();
    ModelParams p;
    p.mode = static_cast<RunMode>(r.pod<std::uint32_t>());
    p.nu = r.pod<double>();
    p.ell0 = r.pod<double>();
    p.theta = r.pod<double>();
    p.alpha = r.pod<double>();
    p.kappa = r.pod<double>();
    p.delta = r.pod<double>();
    p.dt = r.pod<double>();
    p.t_end = r.pod<double>();
    p.cfl_limit = r.pod<double>();
    SimState state;
    state.t = r.pod<double>();
    state.step_index = r.pod<std::uint64_t>();
    state.u = SpectralField(g);
    std::uint64_t ncomplex = r.pod<std::uint64_t>();
    if (ncomplex != state.u.raw().size()) fail(ErrorCode::io, "checkpoint size mismatch");
    r.payload(state.u.raw().data(), ncomplex * sizeof(complexd));
    r.check_payload_digest();
    if (params_out) *params_out = p;
    return state;
}

// --- manifest ----------------------------------------------------------------

void write_manifest(const fs::path& path, const RunManifest& manifest) {
    json files = json::array();
    for (const auto& e : manifest.files)
        files.push_back({{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    json j = {{"format", 1},
              {"code_version", manifest.code_version},
              {"config_hash", manifest.config_hash},
              {"files", files},
              {"wall_start", manifest.wall_start},
              {"wall_end", manifest.wall_end}};
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

RunManifest read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::io, "malformed manifest " + path.string());
    RunManifest m;
    m.code_version = j.value("code_version", "");
    m.config_hash = j.value("config_hash", "");
    m.wall_start = j.value("wall_start", "");
    m.wall_end = j.value("wall_end", "");
    for (const auto& e : j.at("files")) {
        ManifestEntry entry;
        entry.path = e.at("path").get<std::string>();
        entry.bytes = e.at("bytes").get<std::uint64_t>();
        entry.sha256 = e.at("sha256").get<std::string>();
        m.files.push_back(entry);
    }
    return m;
}

std::vector<ManifestEntry> inventory_run_dir(const fs::path& run_dir) {
    std::vector<ManifestEntry> out;
    for (auto it = fs::recursive_directory_iterator(run_dir); it != fs::recursive_directory_iterator();
         ++it) {
        if (!it->is_regular_file()) continue;
        fs::path rel = fs::relative(it->path(), run_dir);
        if (rel == "manifest.json") continue;
        ManifestEntry e;
        e.path = rel.generic_string();
        e.bytes = static_cast<std::uint64_t>(fs::file_size(it->path()));
        e.sha256 = sha256_file(it->path());
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    return out;
}

} // namespace kolmodamp::io

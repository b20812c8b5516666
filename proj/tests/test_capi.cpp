#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "kolmodamp.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("kolmodamp_capi_" + tag);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_SUITE("capi") {

TEST_CASE("version, status names, presets enumerate") {
    CHECK(std::strlen(kd_version()) > 0);
    CHECK(std::string(kd_status_name(KD_OK)) == "ok");
    CHECK(std::string(kd_status_name(KD_ERR_CONFIG)) == "config-error");
    REQUIRE(kd_preset_count() >= 3);
    bool has_smoke = false;
    for (size_t i = 0; i < kd_preset_count(); ++i)
        if (std::string(kd_preset_name(i)) == "smoke") has_smoke = true;
    CHECK(has_smoke);
}

TEST_CASE("error paths set kd_last_error") {
    kd_config* cfg = nullptr;
    CHECK(kd_config_from_file("/nonexistent/path.kv", &cfg) == KD_ERR_IO);
    CHECK(std::strlen(kd_last_error()) > 0);
    CHECK(kd_config_from_preset("no-such-preset", &cfg) == KD_ERR_CONFIG);
    CHECK(kd_run(nullptr, "x") == KD_ERR_INVALID_ARGUMENT);
    CHECK(kd_verify("/nonexistent/dir") == KD_ERR_IO);
}

TEST_CASE("config handles: serialize, hash, file round trip") {
    kd_config* cfg = nullptr;
    REQUIRE(kd_config_from_preset("smoke", &cfg) == KD_OK);
    size_t needed = 0;
    REQUIRE(kd_config_to_string(cfg, nullptr, 0, &needed) == KD_OK);
    REQUIRE(needed > 0);
    std::string text(needed, '\0');
    REQUIRE(kd_config_to_string(cfg, text.data(), text.size(), &needed) == KD_OK);
    text.resize(needed - 1);
    CHECK(text.find("[grid]") != std::string::npos);

    char hash1[65];
    REQUIRE(kd_config_hash(cfg, hash1, sizeof hash1) == KD_OK);
    CHECK(std::strlen(hash1) == 64);

    auto dir = temp_dir("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "c.kv") << text;
    kd_config* cfg2 = nullptr;
    REQUIRE(kd_config_from_file((dir / "c.kv").string().c_str(), &cfg2) == KD_OK);
    char hash2[65];
    REQUIRE(kd_config_hash(cfg2, hash2, sizeof hash2) == KD_OK);
    CHECK(std::string(hash1) == hash2);
    kd_config_free(cfg);
    kd_config_free(cfg2);
    fs::remove_all(dir);
}

TEST_CASE("smoke run end to end: run, report, verify, corruption detection") {
    kd_config* cfg = nullptr;
    REQUIRE(kd_config_from_preset("smoke", &cfg) == KD_OK);
    auto dir = temp_dir("run");

    kd_status run_status = kd_run(cfg, dir.string().c_str());
    CHECK(run_status == KD_OK);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "report.kv"));
    CHECK(fs::exists(dir / "ledger.ndjson"));
    CHECK(fs::exists(dir / "ledger.csv"));
    CHECK(fs::exists(dir / "verdicts.tsv"));

    CHECK(kd_report(dir.string().c_str()) == run_status);
    CHECK(kd_verify(dir.string().c_str()) == KD_OK);

    // single flipped byte in the ledger must be caught
    {
        std::fstream fio(dir / "ledger.ndjson", std::ios::in | std::ios::out | std::ios::binary);
        fio.seekp(40, std::ios::beg);
        char b;
        fio.read(&b, 1);
        fio.seekp(40, std::ios::beg);
        b = b == '1' ? '2' : '1';
        fio.write(&b, 1);
    }
    CHECK(kd_verify(dir.string().c_str()) == KD_ERR_VERIFY_MISMATCH);

    // refuse to clobber a non-empty directory
    CHECK(kd_run(cfg, dir.string().c_str()) == KD_ERR_IO);

    kd_config_free(cfg);
    fs::remove_all(dir);
}

TEST_CASE("t_end = 0 run reports insufficient horizon with a distinct status") {
    kd_config* cfg = nullptr;
    REQUIRE(kd_config_from_preset("smoke", &cfg) == KD_OK);
    size_t needed = 0;
    kd_config_to_string(cfg, nullptr, 0, &needed);
    std::string text(needed, '\0');
    kd_config_to_string(cfg, text.data(), text.size(), &needed);
    text.resize(needed - 1);
    kd_config_free(cfg);

    auto pos = text.find("t_end = 25");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("t_end = 25").size(), "t_end = 0");
    auto dir = temp_dir("tend0");
    fs::create_directories(dir);
    std::ofstream(dir / "c.kv") << text;
    kd_config* zero = nullptr;
    REQUIRE(kd_config_from_file((dir / "c.kv").string().c_str(), &zero) == KD_OK);

    auto out = dir / "out";
    CHECK(kd_run(zero, out.string().c_str()) == KD_ERR_INSUFFICIENT_HORIZON);
    // ledger exists but is empty; report records the insufficient horizon
    std::ifstream ledger(out / "ledger.ndjson");
    std::string line;
    CHECK_FALSE(std::getline(ledger, line));
    std::ifstream report(out / "report.kv");
    std::string all((std::istreambuf_iterator<char>(report)), std::istreambuf_iterator<char>());
    CHECK(all.find("diag.insufficient_horizon = 1") != std::string::npos);
    kd_config_free(zero);
    fs::remove_all(dir);
}

} // TEST_SUITE

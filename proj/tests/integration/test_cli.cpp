#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "relnc/netcode.hpp"
#include "relnc/serialize.hpp"

using namespace relnc;
namespace fs = std::filesystem;

namespace {

const std::string kCli = RELNC_CLI_PATH;

struct Workdir {
    fs::path dir;
    Workdir() {
        dir = fs::temp_directory_path() / ("relnc_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Workdir() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("design produces a nonlinear table code end to end") {
    Workdir wd;
    const std::string code = wd.path("c4.json");
    const int rc = run_cli("design --preset omarc --n 2 --r 3 --rr 3 --scheme dnnc-c4 --snr-sd -3 --snr-sr 10 "
                           "--seed 7 --restarts 2 --out " + code);
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(code));
    REQUIRE(fs::exists(code + ".trace.csv"));

    const auto file = load_code_file(code);
    CHECK(file.metadata.scheme == "dnnc-c4");
    CHECK(file.metadata.seed == 7);
    const auto lin = is_linear(as_table(file.code));
    REQUIRE(lin.has_value());
    CHECK_FALSE(*lin);

    const std::string trace = slurp(code + ".trace.csv");
    CHECK(trace.find("temp_index,temperature,current_cost,best_cost") != std::string::npos);
}

TEST_CASE("dlnc records the winning coefficient tuple") {
    Workdir wd;
    const std::string code = wd.path("dlnc.json");
    REQUIRE(run_cli("design --preset omarc --n 2 --r 2 --rr 2 --scheme dlnc --snr-sd -3 --snr-sr 10 --out " +
                    code) == 0);
    const auto file = load_code_file(code);
    CHECK(code_form_name(file.code) == "linear");
    const auto& lc = std::get<LinearCode>(file.code);
    REQUIRE(lc.coefficients.size() == 2u);
    for (int c : lc.coefficients) CHECK(c != 0);
}

TEST_CASE("structured designs fill in the relay rate from the slot count") {
    Workdir wd;
    const std::string code = wd.path("structured.json");
    REQUIRE(run_cli("design --preset omcbr --n 3 --r 3 --scheme structured --snr-sd -3 --snr-sr 10 "
                    "--restarts 1 --max-temps 40 --out " + code) == 0);
    const auto file = load_code_file(code);
    CHECK(code_form_name(file.code) == "structured");
    CHECK(std::get<StructuredCode>(file.code).relay_rate == 5);
}

TEST_CASE("eval runs on a hand-written code file") {
    Workdir wd;
    CodeFile file;
    file.code = to_table(LinearCode{{2, 2}, 2, {1, 1}});
    file.num_sources = 2;
    file.decode_sets = {{0, 1}};
    file.metadata.source_variances = {1.0, 1.0};
    const std::string code = wd.path("xor.json");
    save_code_file(file, code);

    const std::string out = wd.path("eval.csv");
    REQUIRE(run_cli("eval --code " + code + " --snr-sd -1 --snr-sr 8 --snr-rd 6 --samples 5000 --seed 3 --out " +
                    out) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("snr_rd_db,rsnr_db,d_total") != std::string::npos);
}

TEST_CASE("sweeps rerun byte-identically under one config") {
    Workdir wd;
    CodeFile file;
    file.code = to_table(LinearCode{{2, 2}, 2, {1, 1}});
    file.num_sources = 2;
    file.decode_sets = {{0, 1}};
    file.metadata.source_variances = {1.0, 1.0};
    const std::string code = wd.path("xor.json");
    save_code_file(file, code);

    const std::string out_a = wd.path("sweep_a.csv"), out_b = wd.path("sweep_b.csv");
    const std::string args = "sweep --code " + code +
                             " --axis snr-rd --values -2:10:2 --snr-sd -1 --snr-sr 8 --samples 4000 --seed 11 "
                             "--mode hard --threads 3 --out ";
    REQUIRE(run_cli(args + out_a) == 0);
    REQUIRE(run_cli(args + out_b) == 0);
    CHECK(slurp(out_a) == slurp(out_b));
    CHECK(slurp(out_a).find("config_hash=") != std::string::npos);
}

TEST_CASE("bound emits a distortion column in the shared curve schema") {
    Workdir wd;
    const std::string out = wd.path("bound.csv");
    REQUIRE(run_cli("bound --preset otnbr23 --snr-sr 10 --snr-rd 7 --sweep snr-sd -6:12:2 --b 3 --out " + out) ==
            0);
    const std::string text = slurp(out);
    CHECK(text.find("snr_sd_db,rsnr_db,d_total,d_sources,d_network_est,stderr,n_samples,seed,rc_bits,lambda") !=
          std::string::npos);
    // distortion decreases along the sweep
    std::istringstream in(text);
    std::string line;
    double prev = 1e9;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 's') continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');  // axis
        std::getline(row, field, ',');  // rsnr
        std::getline(row, field, ',');  // d_total
        const double d = std::stod(field);
        CHECK(d < prev);
        prev = d;
        ++rows;
    }
    CHECK(rows == 10);
}

TEST_CASE("config files merge with explicit flags winning") {
    Workdir wd;
    const std::string cfg = wd.path("design.json");
    {
        std::ofstream out(cfg);
        out << R"({"preset":"omarc","n":2,"rate":2,"relay_rate":2,"scheme":"dlnc",)"
            << R"("design_snr":{"sd":-3,"sr":10},"seed":5,"out":")" << wd.path("from_config.json") << R"("})";
    }
    REQUIRE(run_cli("design --config " + cfg) == 0);
    REQUIRE(fs::exists(wd.path("from_config.json")));
    CHECK(load_code_file(wd.path("from_config.json")).metadata.scheme == "dlnc");

    // flag overrides the configured scheme
    REQUIRE(run_cli("design --config " + cfg + " --scheme dnnc-c4 --restarts 1 --max-temps 40 --out " +
                    wd.path("flag_wins.json")) == 0);
    CHECK(load_code_file(wd.path("flag_wins.json")).metadata.scheme == "dnnc-c4");
}

TEST_CASE("config errors exit with code 2") {
    Workdir wd;
    CHECK(run_cli("reproduce fig99") == 2);
    CHECK(run_cli("eval --code " + wd.path("missing.json")) == 2);
    CHECK(run_cli("design --preset nosuch") == 2);
    CHECK(run_cli("sweep --code x --axis bogus --values 1:2:1") == 2);
    CHECK(run_cli("design --preset omarc --n 0") == 2);

    // schema version mismatch
    const std::string bad = wd.path("bad.json");
    {
        std::ofstream out(bad);
        out << R"({"schema_version":99,"form":"table","num_sources":1,"decode_sets":[[0]],)"
            << R"("source_rates":[1],"relay_rate":1,"table":[0,1]})";
    }
    CHECK(run_cli("eval --code " + bad) == 2);
}

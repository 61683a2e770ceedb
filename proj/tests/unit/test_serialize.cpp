#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <fstream>

#include "relnc/distortion.hpp"
#include "relnc/serialize.hpp"

using namespace relnc;

namespace {

CodeFile table_file() {
    TableCode code;
    code.source_rates = {2, 2};
    code.relay_rate = 2;
    code.table = {0, 1, 2, 3, 1, 2, 3, 0, 2, 3, 0, 1, 3, 0, 1, 2};
    CodeFile file;
    file.code = code;
    file.num_sources = 2;
    file.decode_sets = {{0, 1}};
    file.metadata.scheme = "dnnc-c4";
    file.metadata.cost_variant = "c4";
    file.metadata.design_snr_sd_db = -3.0;
    file.metadata.design_snr_sr_db = 10.0;
    file.metadata.seed = 7;
    file.metadata.source_variances = {1.0, 1.0};
    file.metadata.tool_version = "test";
    return file;
}

}  // namespace

TEST_CASE("table codes round trip bit exactly") {
    const auto file = table_file();
    const auto loaded = code_from_json(code_to_json(file));
    CHECK(std::get<TableCode>(loaded.code).table == std::get<TableCode>(file.code).table);
    CHECK(loaded.decode_sets == file.decode_sets);
    CHECK(loaded.metadata.scheme == "dnnc-c4");
    CHECK(loaded.metadata.seed == 7);
    CHECK(loaded.metadata.design_snr_sd_db == -3.0);
}

TEST_CASE("linear and structured forms keep their payloads") {
    CodeFile file;
    file.code = LinearCode{{3, 3}, 3, {5, 2}};
    file.num_sources = 2;
    file.decode_sets = {{0}, {1}};
    auto loaded = code_from_json(code_to_json(file));
    CHECK(std::get<LinearCode>(loaded.code).coefficients == std::vector<int>{5, 2});

    StructuredCode s;
    s.source_rates = {3, 3};
    s.relay_rate = 3;
    s.a_slots = {3, 0};
    s.b_slots = {7, 5, 1, 6};
    s.e_slots = {2, 4};
    file.code = s;
    loaded = code_from_json(code_to_json(file));
    const auto& rs = std::get<StructuredCode>(loaded.code);
    CHECK(rs.a_slots == s.a_slots);
    CHECK(rs.b_slots == s.b_slots);
    CHECK(rs.e_slots == s.e_slots);
    CHECK(as_table(loaded.code).table == to_table(s).table);
}

TEST_CASE("unsupported schema versions and broken payloads are rejected") {
    auto file = table_file();
    std::string text = code_to_json(file);
    const auto pos = text.find("\"schema_version\": 1");
    REQUIRE(pos != std::string::npos);
    std::string bumped = text;
    bumped.replace(pos, 19, "\"schema_version\": 9");
    CHECK_THROWS(code_from_json(bumped));

    std::get<TableCode>(file.code).table[3] = 9;  // outside the relay alphabet
    CHECK_THROWS(code_from_json(code_to_json(file)));
}

TEST_CASE("a saved code evaluates identically after reload") {
    const auto file = table_file();
    const std::string path = "roundtrip_code_test.json";
    save_code_file(file, path);
    const auto loaded = load_code_file(path);
    std::remove(path.c_str());

    std::vector<ScalarQuantizer> qs;
    for (double v : file.metadata.source_variances) qs.push_back(ScalarQuantizer::design_lloyd_max(2, v));
    const LinkSnrs snrs{-1.0, 9.0, 6.0, {}, {}, {}};
    DecoderContext a(file.topology(), qs, std::get<TableCode>(file.code), snrs);
    DecoderContext b(loaded.topology(), qs, as_table(loaded.code), snrs);
    CHECK(total_distortion(a, CostVariant::Full).d_total == total_distortion(b, CostVariant::Full).d_total);
}

TEST_CASE("quantizer serialization carries the design") {
    const auto q = ScalarQuantizer::design_lloyd_max(3, 1.0);
    const std::string text = quantizer_to_json(q);
    CHECK(text.find("\"boundaries\"") != std::string::npos);
    CHECK(text.find("\"codebook\"") != std::string::npos);
    CHECK(text.find("\"total_distortion\"") != std::string::npos);
}

#include "relnc/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "relnc/version.hpp"

namespace relnc {

using nlohmann::json;

TableCode as_table(const AnyCode& code) {
    return std::visit(
        [](const auto& c) -> TableCode {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, TableCode>) return c;
            else return to_table(c);
        },
        code);
}

std::string code_form_name(const AnyCode& code) {
    switch (code.index()) {
        case 0: return "table";
        case 1: return "linear";
        default: return "structured";
    }
}

std::string code_to_json(const CodeFile& file) {
    json j;
    j["schema_version"] = kCodeFileSchemaVersion;
    j["form"] = code_form_name(file.code);
    j["num_sources"] = file.num_sources;
    j["decode_sets"] = file.decode_sets;

    std::visit(
        [&](const auto& c) {
            j["source_rates"] = c.source_rates;
            j["relay_rate"] = c.relay_rate;
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, TableCode>) {
                j["table"] = c.table;  // row-major, last source fastest
            } else if constexpr (std::is_same_v<T, LinearCode>) {
                j["coefficients"] = c.coefficients;
            } else {
                j["assignments"] = {{"a", c.a_slots}, {"b", c.b_slots}, {"e", c.e_slots}};
            }
        },
        file.code);

    j["metadata"] = {{"scheme", file.metadata.scheme},
                     {"cost_variant", file.metadata.cost_variant},
                     {"design_snr_sd_db", file.metadata.design_snr_sd_db},
                     {"design_snr_sr_db", file.metadata.design_snr_sr_db},
                     {"design_snr_rd_db", file.metadata.design_snr_rd_db},
                     {"design_cost", file.metadata.design_cost},
                     {"seed", file.metadata.seed},
                     {"source_variances", file.metadata.source_variances},
                     {"tool_version", file.metadata.tool_version}};
    return j.dump(2);
}

CodeFile code_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kCodeFileSchemaVersion)
        throw std::runtime_error("code file: unsupported schema version");

    CodeFile file;
    file.num_sources = j.at("num_sources").get<int>();
    file.decode_sets = j.at("decode_sets").get<std::vector<std::vector<int>>>();

    const std::string form = j.at("form").get<std::string>();
    const auto rates = j.at("source_rates").get<std::vector<int>>();
    const int relay_rate = j.at("relay_rate").get<int>();
    if (form == "table") {
        TableCode c{rates, relay_rate, j.at("table").get<std::vector<int>>()};
        file.code = std::move(c);
    } else if (form == "linear") {
        LinearCode c{rates, relay_rate, j.at("coefficients").get<std::vector<int>>()};
        file.code = std::move(c);
    } else if (form == "structured") {
        StructuredCode c;
        c.source_rates = rates;
        c.relay_rate = relay_rate;
        c.a_slots = j.at("assignments").at("a").get<std::vector<int>>();
        c.b_slots = j.at("assignments").at("b").get<std::vector<int>>();
        c.e_slots = j.at("assignments").at("e").get<std::vector<int>>();
        file.code = std::move(c);
    } else {
        throw std::runtime_error("code file: unknown form '" + form + "'");
    }

    const auto err = std::visit([](const auto& c) { return c.validate(); }, file.code);
    if (err) throw std::runtime_error("code file: " + *err);

    if (j.contains("metadata")) {
        const auto& m = j.at("metadata");
        file.metadata.scheme = m.value("scheme", "");
        file.metadata.cost_variant = m.value("cost_variant", "");
        file.metadata.design_snr_sd_db = m.value("design_snr_sd_db", 0.0);
        file.metadata.design_snr_sr_db = m.value("design_snr_sr_db", 0.0);
        file.metadata.design_snr_rd_db = m.value("design_snr_rd_db", 0.0);
        file.metadata.design_cost = m.value("design_cost", 0.0);
        file.metadata.seed = m.value("seed", std::uint64_t{0});
        file.metadata.source_variances = m.value("source_variances", std::vector<double>{});
        file.metadata.tool_version = m.value("tool_version", "");
    }
    return file;
}

void save_code_file(const CodeFile& file, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << code_to_json(file) << '\n';
}

CodeFile load_code_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open code file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return code_from_json(text);
}

std::string quantizer_to_json(const ScalarQuantizer& q) {
    json j;
    j["rate"] = q.rate();
    j["variance"] = q.variance();
    j["boundaries"] = std::vector<double>(q.boundaries().begin(), q.boundaries().end());
    j["codebook"] = std::vector<double>(q.codebook().begin(), q.codebook().end());
    j["priors"] = std::vector<double>(q.priors().begin(), q.priors().end());
    j["cell_distortion"] = std::vector<double>(q.cell_distortion().begin(), q.cell_distortion().end());
    j["total_distortion"] = q.total_distortion();
    return j.dump(2);
}

}  // namespace relnc

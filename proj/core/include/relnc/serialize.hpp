#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "relnc/netcode.hpp"
#include "relnc/quantizer.hpp"
#include "relnc/topology.hpp"

namespace relnc {

using AnyCode = std::variant<TableCode, LinearCode, StructuredCode>;

TableCode as_table(const AnyCode& code);
std::string code_form_name(const AnyCode& code);

struct CodeMetadata {
    std::string scheme;  // dnnc-c3 | dnnc-c4 | dnnc-full | structured | dlnc | manual
    std::string cost_variant;
    double design_snr_sd_db = 0.0;
    double design_snr_sr_db = 0.0;
    double design_snr_rd_db = 0.0;
    double design_cost = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> source_variances;
    std::string tool_version;
};

// The on-disk experiment artifact: a code plus the network it was designed
// for. Integer payloads round-trip bit exactly.
struct CodeFile {
    AnyCode code;
    int num_sources = 0;
    std::vector<std::vector<int>> decode_sets;
    CodeMetadata metadata;

    NetworkTopology topology() const { return NetworkTopology(num_sources, decode_sets); }
};

std::string code_to_json(const CodeFile& file);
CodeFile code_from_json(const std::string& text);  // rejects unknown schema versions
void save_code_file(const CodeFile& file, const std::string& path);
CodeFile load_code_file(const std::string& path);

std::string quantizer_to_json(const ScalarQuantizer& q);

}  // namespace relnc

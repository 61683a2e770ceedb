// Command line front end: code design, Monte Carlo evaluation and sweeps,
// cut-set distortion bounds, and canned experiment recipes (fig3..fig9).
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relnc/bounds.hpp"
#include "relnc/designer.hpp"
#include "relnc/rng.hpp"
#include "relnc/serialize.hpp"
#include "relnc/simulator.hpp"
#include "relnc/version.hpp"

using nlohmann::json;
using namespace relnc;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int default_threads() {
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return env_thread_count("RELNC_THREADS", hw > 0 ? hw : 1);
}

NetworkTopology topology_from(const std::string& preset, int n,
                              const std::vector<std::vector<int>>& explicit_sets) {
    if (!explicit_sets.empty()) {
        NetworkTopology t(n, explicit_sets);
        if (auto err = t.validate()) throw ConfigError("topology: " + *err);
        return t;
    }
    NetworkTopology t = preset == "omarc"     ? NetworkTopology::omarc(n)
                        : preset == "omcbr"   ? NetworkTopology::omcbr(n)
                        : preset == "otnbr23" ? NetworkTopology::otnbr23()
                                              : throw ConfigError("unknown preset '" + preset + "'");
    return t;
}

CostVariant cost_from(const std::string& name) {
    if (name == "c3") return CostVariant::C3;
    if (name == "c4") return CostVariant::C4;
    if (name == "full") return CostVariant::Full;
    throw ConfigError("unknown cost variant '" + name + "'");
}

std::string cost_name(CostVariant v) {
    switch (v) {
        case CostVariant::C3: return "c3";
        case CostVariant::C4: return "c4";
        default: return "full";
    }
}

// "lo:hi:step" or a comma list.
std::vector<double> parse_values(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi, step;
        char c1, c2;
        std::istringstream in(spec);
        if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
            throw ConfigError("bad range '" + spec + "', expected lo:hi:step");
        for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
        return out;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty value list");
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    return out;
}

void write_curve_csv(std::ostream& out, const json& config, const std::vector<CurvePoint>& curve,
                     const std::string& axis_name) {
    out << "# relnc " << kVersion << " config_hash=" << std::hex << fnv1a64(config.dump()) << std::dec << "\n";
    out << "# config " << config.dump() << "\n";
    out << axis_name << ",rsnr_db,d_total,d_sources,d_network_est,stderr,n_samples,seed\n";
    for (const auto& p : curve) {
        out << format_double(p.axis_value) << ',' << format_double(p.result.rsnr_db) << ','
            << format_double(p.result.d_total) << ',' << format_double(p.result.d_sources) << ','
            << format_double(p.result.d_network_est) << ',' << format_double(p.result.stderr_d) << ','
            << p.result.samples << ',' << p.result.seed << "\n";
    }
}

void write_trace_csv(const std::string& path, const json& config, const std::vector<TracePoint>& trace) {
    auto out = open_output(path);
    out << "# relnc " << kVersion << " config_hash=" << std::hex << fnv1a64(config.dump()) << std::dec << "\n";
    out << "temp_index,temperature,current_cost,best_cost\n";
    for (const auto& t : trace)
        out << t.temp_index << ',' << format_double(t.temperature) << ',' << format_double(t.current_cost) << ','
            << format_double(t.best_cost) << "\n";
}

// ----------------------------------------------------------------------
// design

struct DesignArgs {
    std::string config_path;
    std::string preset = "omarc";
    int n = 2;
    int rate = 3;
    int relay_rate = 0;  // 0 = auto
    std::string scheme = "dnnc-c3";
    std::string cost;  // optional override for structured/dlnc
    double snr_sd = -3.0, snr_sr = 10.0, snr_rd = 7.0;
    double variance = 1.0;
    std::uint64_t seed = 1;
    int restarts = 4;
    int threads = 0;
    bool include_zero_coeffs = false;
    AnnealSchedule schedule;
    std::string out = "code.json";
    std::string trace;
    std::vector<std::vector<int>> decode_sets;
};

json design_config_json(const DesignArgs& a) {
    json j;
    j["command"] = "design";
    j["preset"] = a.preset;
    j["n"] = a.n;
    j["rate"] = a.rate;
    j["relay_rate"] = a.relay_rate;
    j["scheme"] = a.scheme;
    j["cost"] = a.cost;
    j["design_snr"] = {{"sd", a.snr_sd}, {"sr", a.snr_sr}, {"rd", a.snr_rd}};
    j["variance"] = a.variance;
    j["seed"] = a.seed;
    j["restarts"] = a.restarts;
    j["include_zero_coeffs"] = a.include_zero_coeffs;
    j["schedule"] = {{"t0", a.schedule.t0},
                     {"alpha", a.schedule.alpha},
                     {"sweeps_per_temp", a.schedule.sweeps_per_temp},
                     {"max_temps", a.schedule.max_temps},
                     {"t_min", a.schedule.t_min},
                     {"stall_tol", a.schedule.stall_tol},
                     {"stall_levels", a.schedule.stall_levels}};
    if (!a.decode_sets.empty()) j["decode_sets"] = a.decode_sets;
    return j;
}

int cmd_design(DesignArgs a) {
    const NetworkTopology topology = topology_from(a.preset, a.n, a.decode_sets);
    const int n = topology.num_sources();

    if (a.relay_rate == 0) {
        if (a.scheme == "structured") {
            a.relay_rate = structured_relay_rate(n, a.rate);
            std::cerr << "note: relay rate not given, using the structured slot-count formula: R_r = "
                      << a.relay_rate << "\n";
        } else {
            a.relay_rate = a.rate;
            std::cerr << "note: relay rate not given, defaulting to R_r = R = " << a.relay_rate << "\n";
        }
    }

    std::vector<ScalarQuantizer> quantizers(static_cast<std::size_t>(n),
                                            ScalarQuantizer::design_lloyd_max(a.rate, a.variance));
    const DesignSetup setup{topology, quantizers, LinkSnrs{a.snr_sd, a.snr_sr, a.snr_rd, {}, {}, {}}};
    a.schedule.seed = a.seed;
    const int threads = a.threads > 0 ? a.threads : default_threads();

    CodeFile file;
    file.num_sources = n;
    file.decode_sets = topology.decode_sets();
    file.metadata.scheme = a.scheme;
    file.metadata.design_snr_sd_db = a.snr_sd;
    file.metadata.design_snr_sr_db = a.snr_sr;
    file.metadata.design_snr_rd_db = a.snr_rd;
    file.metadata.seed = a.seed;
    file.metadata.source_variances.assign(static_cast<std::size_t>(n), a.variance);
    file.metadata.tool_version = kVersion;

    std::vector<TracePoint> trace;
    double cost = 0.0;
    if (a.scheme == "dnnc-c3" || a.scheme == "dnnc-c4" || a.scheme == "dnnc-full") {
        const CostVariant variant = a.scheme == "dnnc-c3"   ? CostVariant::C3
                                    : a.scheme == "dnnc-c4" ? CostVariant::C4
                                                            : CostVariant::Full;
        auto result = design_sa_table_restarts(setup, a.relay_rate, variant, a.schedule, a.restarts, threads);
        cost = result.cost;
        trace = std::move(result.trace);
        file.code = std::move(result.code);
        file.metadata.cost_variant = cost_name(variant);
    } else if (a.scheme == "structured") {
        const CostVariant variant = a.cost.empty() ? CostVariant::Full : cost_from(a.cost);
        auto result = design_structured_restarts(setup, a.relay_rate, variant, a.schedule, a.restarts, threads);
        cost = result.cost;
        trace = std::move(result.trace);
        file.code = std::move(result.code);
        file.metadata.cost_variant = cost_name(variant);
    } else if (a.scheme == "dlnc") {
        const CostVariant variant = a.cost.empty() ? CostVariant::C3 : cost_from(a.cost);
        auto result = design_linear(setup, a.relay_rate, variant, a.include_zero_coeffs);
        cost = result.cost;
        trace.push_back({0, 0.0, cost, cost});
        file.code = std::move(result.code);
        file.metadata.cost_variant = cost_name(variant);
    } else {
        throw ConfigError("unknown scheme '" + a.scheme + "'");
    }
    file.metadata.design_cost = cost;

    save_code_file(file, a.out);
    const json config = design_config_json(a);
    write_trace_csv(a.trace.empty() ? a.out + ".trace.csv" : a.trace, config, trace);
    std::cout << "designed " << a.scheme << " code (" << code_form_name(file.code)
              << "), design cost = " << format_double(cost) << "\n";
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

// ----------------------------------------------------------------------
// eval / sweep

struct EvalArgs {
    std::string code_path;
    double snr_sd = -3.0, snr_sr = 10.0, snr_rd = 7.0;
    long long samples = 100000;
    std::uint64_t seed = 1;
    std::string mode = "soft";
    std::string out;
    std::string axis;    // sweep only
    std::string values;  // sweep only
    int threads = 0;
};

SystemInstance instance_from(const CodeFile& file, const EvalArgs& a) {
    SystemInstance inst{file.topology(), {}, as_table(file.code),
                        LinkSnrs{a.snr_sd, a.snr_sr, a.snr_rd, {}, {}, {}},
                        a.mode == "hard" ? ObservationMode::Hard : ObservationMode::Soft};
    if (a.mode != "hard" && a.mode != "soft") throw ConfigError("mode must be soft or hard");
    const auto& rates = inst.code.source_rates;
    for (std::size_t s = 0; s < rates.size(); ++s) {
        const double variance = s < file.metadata.source_variances.size() && file.metadata.source_variances[s] > 0.0
                                    ? file.metadata.source_variances[s]
                                    : 1.0;
        inst.quantizers.push_back(ScalarQuantizer::design_lloyd_max(rates[s], variance));
    }
    return inst;
}

CodeFile load_code_checked(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("code file not found: " + path);
    try {
        return load_code_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

json eval_config_json(const EvalArgs& a, const char* command) {
    json j;
    j["command"] = command;
    j["code"] = a.code_path;
    j["snr"] = {{"sd", a.snr_sd}, {"sr", a.snr_sr}, {"rd", a.snr_rd}};
    j["samples"] = a.samples;
    j["seed"] = a.seed;
    j["mode"] = a.mode;
    if (!a.axis.empty()) j["axis"] = a.axis;
    if (!a.values.empty()) j["values"] = a.values;
    return j;
}

int cmd_eval(const EvalArgs& a) {
    const CodeFile file = load_code_checked(a.code_path);
    const SystemInstance inst = instance_from(file, a);
    const SimResult res = run(inst, a.samples, a.seed);
    const std::vector<CurvePoint> row{{a.snr_rd, res}};
    const json config = eval_config_json(a, "eval");
    if (!a.out.empty()) {
        auto out = open_output(a.out);
        write_curve_csv(out, config, row, "snr_rd_db");
    } else {
        write_curve_csv(std::cout, config, row, "snr_rd_db");
    }
    std::cerr << "rsnr_db=" << format_double(res.rsnr_db) << " d_total=" << format_double(res.d_total)
              << " stderr=" << format_double(res.stderr_d) << "\n";
    return 0;
}

int cmd_sweep(const EvalArgs& a) {
    const CodeFile file = load_code_checked(a.code_path);
    const SystemInstance base = instance_from(file, a);
    SweepAxis axis;
    if (a.axis == "snr-rd") axis = SweepAxis::SnrRd;
    else if (a.axis == "snr-sd") axis = SweepAxis::SnrSd;
    else if (a.axis == "snr-sr") axis = SweepAxis::SnrSr;
    else if (a.axis == "rate")
        throw ConfigError("rate sweeps re-design the code per point; use `relnc reproduce fig7`");
    else
        throw ConfigError("unknown sweep axis '" + a.axis + "'");

    const auto values = parse_values(a.values);
    const int threads = a.threads > 0 ? a.threads : default_threads();
    const auto curve = sweep(base, axis, values, a.samples, a.seed, threads);
    const json config = eval_config_json(a, "sweep");
    const std::string axis_col = a.axis == "snr-rd" ? "snr_rd_db" : a.axis == "snr-sd" ? "snr_sd_db" : "snr_sr_db";
    if (!a.out.empty()) {
        auto out = open_output(a.out);
        write_curve_csv(out, config, curve, axis_col);
        std::cout << "wrote " << a.out << "\n";
    } else {
        write_curve_csv(std::cout, config, curve, axis_col);
    }
    return 0;
}

// ----------------------------------------------------------------------
// bound

struct BoundArgs {
    std::string preset = "otnbr23";
    int n = 2;
    double snr_sd = -3.0, snr_sr = 10.0, snr_rd = 7.0;
    std::vector<std::string> sweep;  // axis, range
    double b = 0.0;
    int rate = 3;
    int grid_points = 2001;
    double variance = 1.0;
    std::string out;
};

int cmd_bound(BoundArgs a) {
    const NetworkTopology topology = topology_from(a.preset, a.n, {});
    if (a.b <= 0.0) {
        a.b = a.rate;
        std::cerr << "note: --b not given, using b = R = " << a.b << " channel uses per sample\n";
    }
    std::string axis = "snr-sd";
    std::vector<double> values{a.snr_sd};
    if (!a.sweep.empty()) {
        if (a.sweep.size() != 2) throw ConfigError("--sweep needs an axis and a range");
        axis = a.sweep[0];
        values = parse_values(a.sweep[1]);
    }

    json config;
    config["command"] = "bound";
    config["preset"] = a.preset;
    config["n"] = a.n;
    config["snr"] = {{"sd", a.snr_sd}, {"sr", a.snr_sr}, {"rd", a.snr_rd}};
    config["axis"] = axis;
    config["b"] = a.b;
    config["grid_points"] = a.grid_points;

    std::ostringstream body;
    body << "# relnc " << kVersion << " config_hash=" << std::hex << fnv1a64(config.dump()) << std::dec << "\n";
    body << "# config " << config.dump() << "\n";
    const std::string axis_col = axis == "snr-rd" ? "snr_rd_db" : axis == "snr-sr" ? "snr_sr_db" : "snr_sd_db";
    body << axis_col << ",rsnr_db,d_total,d_sources,d_network_est,stderr,n_samples,seed,rc_bits,lambda\n";
    for (double v : values) {
        double sd = a.snr_sd, sr = a.snr_sr, rd = a.snr_rd;
        if (axis == "snr-sd") sd = v;
        else if (axis == "snr-sr") sr = v;
        else if (axis == "snr-rd") rd = v;
        else throw ConfigError("unknown bound sweep axis '" + axis + "'");
        const auto budget = GaussianLinkBudget::symmetric(topology, sd, sr, rd);
        const SymmetricRate rc = a.preset == "otnbr23" ? max_symmetric_rate(budget, a.grid_points)
                                                       : max_symmetric_rate_general(topology, budget, a.grid_points);
        const double d = distortion_power_bound(rc.rate, a.b, a.variance);
        body << format_double(v) << ',' << format_double(10.0 * std::log10(a.variance / d)) << ','
             << format_double(d) << ",0,0,0,0,0," << format_double(rc.rate) << ',' << format_double(rc.lambda)
             << "\n";
    }
    if (!a.out.empty()) {
        auto out = open_output(a.out);
        out << body.str();
        std::cout << "wrote " << a.out << "\n";
    } else {
        std::cout << body.str();
    }
    return 0;
}

// ----------------------------------------------------------------------
// reproduce

struct ReproduceArgs {
    std::string figure;
    std::string out_dir = "out";
    long long samples = 50000;
    std::uint64_t seed = 1;
    int restarts = 4;
    int threads = 0;
};

struct Recipe {
    NetworkTopology topology;
    int rate;
    int relay_rate;
    double design_sd, snr_sr, fixed_sd, fixed_rd;
};

int cmd_reproduce(const ReproduceArgs& a) {
    const int threads = a.threads > 0 ? a.threads : default_threads();
    const std::string dir = a.out_dir + "/" + a.figure;
    std::filesystem::create_directories(dir);

    const auto design_one = [&](const NetworkTopology& topology, int rate, int relay_rate,
                                const std::string& scheme, double sd, double sr, double rd) {
        DesignArgs d;
        d.preset = "custom";
        d.decode_sets = topology.decode_sets();
        d.n = topology.num_sources();
        d.rate = rate;
        d.relay_rate = relay_rate;
        d.scheme = scheme;
        d.snr_sd = sd;
        d.snr_sr = sr;
        d.snr_rd = rd;
        d.seed = a.seed;
        d.restarts = a.restarts;
        d.threads = threads;
        d.out = dir + "/" + scheme + "_r" + std::to_string(rate) + "_rr" + std::to_string(relay_rate) + ".json";
        d.trace = d.out + ".trace.csv";
        cmd_design(d);
        return load_code_checked(d.out);
    };

    const auto sweep_code = [&](const CodeFile& file, const std::string& name, double sd, double sr,
                                const std::vector<double>& rd_values) {
        EvalArgs e;
        e.code_path = name;
        e.snr_sd = sd;
        e.snr_sr = sr;
        e.samples = a.samples;
        e.seed = a.seed;
        const SystemInstance base = instance_from(file, e);
        const auto curve = sweep(base, SweepAxis::SnrRd, rd_values, a.samples, a.seed, threads);
        auto out = open_output(dir + "/" + name + ".csv");
        write_curve_csv(out, eval_config_json(e, "reproduce"), curve, "snr_rd_db");
    };

    std::vector<double> rd_axis;
    for (double v = -4.0; v <= 16.0 + 1e-9; v += 1.0) rd_axis.push_back(v);

    if (a.figure == "fig3" || a.figure == "fig4" || a.figure == "fig5") {
        const double sd = a.figure == "fig5" ? 1.0 : -3.0;
        const NetworkTopology topology =
            a.figure == "fig3" ? NetworkTopology::omcbr(2) : NetworkTopology::omarc(2);
        for (const std::string scheme : {"dnnc-c3", "dnnc-c4", "structured", "dlnc"}) {
            const auto file = design_one(topology, 3, 3, scheme, sd, 10.0, 7.0);
            sweep_code(file, scheme, sd, 10.0, rd_axis);
        }
        // design/operation mismatch companion curve
        const auto mismatch = design_one(topology, 3, 3, "dnnc-c3", sd == -3.0 ? 1.0 : -3.0, 10.0, 7.0);
        sweep_code(mismatch, "dnnc-c3-mismatch", sd, 10.0, rd_axis);
    } else if (a.figure == "fig6") {
        const auto topology = NetworkTopology::omcbr(3);
        for (int rr : {5, 3}) {
            for (const std::string scheme : {"dnnc-c3", "dnnc-c4", "dlnc"}) {
                const auto file = design_one(topology, 3, rr, scheme, -3.0, 10.0, 7.0);
                sweep_code(file, scheme + "_rr" + std::to_string(rr), -3.0, 10.0, rd_axis);
            }
        }
        const auto structured = design_one(topology, 3, 5, "structured", -3.0, 10.0, 7.0);
        sweep_code(structured, "structured_rr5", -3.0, 10.0, rd_axis);
    } else if (a.figure == "fig7" || a.figure == "fig8") {
        const NetworkTopology topology =
            a.figure == "fig7" ? NetworkTopology::omarc(2) : NetworkTopology::otnbr23();
        for (const std::string scheme : {"dnnc-c3", "structured", "dlnc"}) {
            std::vector<CurvePoint> curve;
            for (int rate : {2, 3, 4}) {
                const auto file = design_one(topology, rate, rate, scheme, -3.0, 10.0, 7.0);
                EvalArgs e;
                e.snr_sd = -3.0;
                e.snr_sr = 10.0;
                e.snr_rd = 7.0;
                e.samples = a.samples;
                e.seed = a.seed;
                const SystemInstance inst = instance_from(file, e);
                curve.push_back({static_cast<double>(rate), run(inst, a.samples, splitmix64(a.seed ^ rate))});
            }
            auto out = open_output(dir + "/" + scheme + "_vs_rate.csv");
            json config;
            config["command"] = "reproduce";
            config["figure"] = a.figure;
            config["scheme"] = scheme;
            write_curve_csv(out, config, curve, "rate_bits");
        }
    } else if (a.figure == "fig9") {
        const auto topology = NetworkTopology::otnbr23();
        std::vector<double> sd_axis;
        for (double v = -6.0; v <= 12.0 + 1e-9; v += 1.0) sd_axis.push_back(v);
        for (const std::string scheme : {"structured", "dlnc"}) {
            const auto file = design_one(topology, 3, 3, scheme, -3.0, 10.0, 7.0);
            EvalArgs e;
            e.snr_sr = 10.0;
            e.snr_rd = 7.0;
            e.samples = a.samples;
            e.seed = a.seed;
            const SystemInstance base = instance_from(file, e);
            const auto curve = sweep(base, SweepAxis::SnrSd, sd_axis, a.samples, a.seed, threads);
            auto out = open_output(dir + "/" + scheme + "_vs_snr_sd.csv");
            write_curve_csv(out, eval_config_json(e, "reproduce"), curve, "snr_sd_db");
        }
        BoundArgs b;
        b.preset = "otnbr23";
        b.snr_sr = 10.0;
        b.snr_rd = 7.0;
        b.sweep = {"snr-sd", "-6:12:1"};
        b.rate = 3;
        b.out = dir + "/bound_vs_snr_sd.csv";
        cmd_bound(b);
    } else {
        throw ConfigError("unknown figure id '" + a.figure + "' (fig3..fig9)");
    }
    std::cout << "wrote " << dir << "/\n";
    return 0;
}

// ----------------------------------------------------------------------

void add_schedule_flags(CLI::App* cmd, AnnealSchedule& s) {
    cmd->add_option("--t0", s.t0, "initial temperature (0 = calibrate)");
    cmd->add_option("--alpha", s.alpha, "geometric cooling factor");
    cmd->add_option("--sweeps", s.sweeps_per_temp, "sweeps per temperature level");
    cmd->add_option("--max-temps", s.max_temps, "maximum temperature levels");
    cmd->add_option("--t-min", s.t_min, "temperature floor (0 = 1e-6 t0)");
    cmd->add_option("--stall-tol", s.stall_tol, "relative cost change counted as movement");
    cmd->add_option("--stall-levels", s.stall_levels, "frozen levels before stopping");
}

void apply_design_config(const json& j, DesignArgs& a) {
    a.preset = j.value("preset", a.preset);
    a.n = j.value("n", a.n);
    a.rate = j.value("rate", a.rate);
    a.relay_rate = j.value("relay_rate", a.relay_rate);
    a.scheme = j.value("scheme", a.scheme);
    a.cost = j.value("cost", a.cost);
    if (j.contains("design_snr")) {
        a.snr_sd = j["design_snr"].value("sd", a.snr_sd);
        a.snr_sr = j["design_snr"].value("sr", a.snr_sr);
        a.snr_rd = j["design_snr"].value("rd", a.snr_rd);
    }
    a.variance = j.value("variance", a.variance);
    a.seed = j.value("seed", a.seed);
    a.restarts = j.value("restarts", a.restarts);
    a.include_zero_coeffs = j.value("include_zero_coeffs", a.include_zero_coeffs);
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        a.schedule.t0 = s.value("t0", a.schedule.t0);
        a.schedule.alpha = s.value("alpha", a.schedule.alpha);
        a.schedule.sweeps_per_temp = s.value("sweeps_per_temp", a.schedule.sweeps_per_temp);
        a.schedule.max_temps = s.value("max_temps", a.schedule.max_temps);
        a.schedule.t_min = s.value("t_min", a.schedule.t_min);
        a.schedule.stall_tol = s.value("stall_tol", a.schedule.stall_tol);
        a.schedule.stall_levels = s.value("stall_levels", a.schedule.stall_levels);
    }
    if (j.contains("decode_sets")) a.decode_sets = j["decode_sets"].get<std::vector<std::vector<int>>>();
    a.out = j.value("out", a.out);
    a.trace = j.value("trace", a.trace);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlinear network code design and evaluation for orthogonal two-hop relay networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    DesignArgs da;
    auto* design = app.add_subcommand("design", "design a relay network code and write it to a JSON file");
    design->add_option("--config", da.config_path, "JSON config file; explicit flags win");
    design->add_option("--preset", da.preset, "topology preset: omarc | omcbr | otnbr23");
    design->add_option("--n", da.n, "number of sources for parameterized presets");
    design->add_option("--r", da.rate, "quantizer rate per source, bits");
    design->add_option("--rr", da.relay_rate, "relay rate, bits (0 = auto)");
    design->add_option("--scheme", da.scheme, "dnnc-c3 | dnnc-c4 | dnnc-full | structured | dlnc");
    design->add_option("--cost", da.cost, "cost variant override for structured/dlnc (c3|c4|full)");
    design->add_option("--snr-sd", da.snr_sd, "design source-destination SNR, dB");
    design->add_option("--snr-sr", da.snr_sr, "design source-relay SNR, dB");
    design->add_option("--snr-rd", da.snr_rd, "design relay-destination SNR, dB");
    design->add_option("--variance", da.variance, "source variance");
    design->add_option("--seed", da.seed, "design seed");
    design->add_option("--restarts", da.restarts, "independent annealing restarts");
    design->add_option("--threads", da.threads, "worker threads (0 = RELNC_THREADS or hardware)");
    design->add_flag("--include-zero-coeffs", da.include_zero_coeffs, "allow zero coefficients in dlnc search");
    design->add_option("--out", da.out, "output code file");
    design->add_option("--trace", da.trace, "design trace CSV (default <out>.trace.csv)");
    add_schedule_flags(design, da.schedule);

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Monte Carlo evaluation of a stored code at one operating point");
    eval->add_option("--code", ea.code_path, "code JSON file")->required();
    eval->add_option("--snr-sd", ea.snr_sd, "operating source-destination SNR, dB");
    eval->add_option("--snr-sr", ea.snr_sr, "operating source-relay SNR, dB");
    eval->add_option("--snr-rd", ea.snr_rd, "operating relay-destination SNR, dB");
    eval->add_option("--samples", ea.samples, "Monte Carlo samples");
    eval->add_option("--seed", ea.seed, "simulation seed");
    eval->add_option("--mode", ea.mode, "observation mode: soft | hard");
    eval->add_option("--out", ea.out, "output CSV (default stdout)");

    EvalArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one SNR axis and write a curve CSV");
    sweep_cmd->add_option("--code", sa.code_path, "code JSON file")->required();
    sweep_cmd->add_option("--axis", sa.axis, "snr-rd | snr-sd | snr-sr")->required();
    sweep_cmd->add_option("--values", sa.values, "lo:hi:step or comma list")->required();
    sweep_cmd->add_option("--snr-sd", sa.snr_sd, "fixed source-destination SNR, dB");
    sweep_cmd->add_option("--snr-sr", sa.snr_sr, "fixed source-relay SNR, dB");
    sweep_cmd->add_option("--snr-rd", sa.snr_rd, "fixed relay-destination SNR, dB");
    sweep_cmd->add_option("--samples", sa.samples, "Monte Carlo samples per point");
    sweep_cmd->add_option("--seed", sa.seed, "master seed (per-point substreams)");
    sweep_cmd->add_option("--mode", sa.mode, "observation mode: soft | hard");
    sweep_cmd->add_option("--threads", sa.threads, "worker threads");
    sweep_cmd->add_option("--out", sa.out, "output CSV (default stdout)");

    BoundArgs ba;
    auto* bound = app.add_subcommand("bound", "separate source/channel-network coding distortion bound");
    bound->add_option("--preset", ba.preset, "topology preset: otnbr23 | omarc | omcbr");
    bound->add_option("--n", ba.n, "number of sources for parameterized presets");
    bound->add_option("--snr-sd", ba.snr_sd, "source-destination SNR, dB");
    bound->add_option("--snr-sr", ba.snr_sr, "source-relay SNR, dB");
    bound->add_option("--snr-rd", ba.snr_rd, "relay-destination SNR, dB");
    bound->add_option("--sweep", ba.sweep, "axis and range, e.g. --sweep snr-sd -6:12:1")->expected(2);
    bound->add_option("--b", ba.b, "channel uses per source sample (0 = use --r)");
    bound->add_option("--r", ba.rate, "quantizer rate backing the default b");
    bound->add_option("--grid", ba.grid_points, "time-share grid points");
    bound->add_option("--variance", ba.variance, "source variance");
    bound->add_option("--out", ba.out, "output CSV (default stdout)");

    ReproduceArgs ra;
    auto* repro = app.add_subcommand("reproduce", "run a canned experiment recipe (fig3..fig9)");
    repro->add_option("figure", ra.figure, "figure id: fig3 | fig4 | fig5 | fig6 | fig7 | fig8 | fig9")->required();
    repro->add_option("--out-dir", ra.out_dir, "output directory");
    repro->add_option("--samples", ra.samples, "Monte Carlo samples per point");
    repro->add_option("--seed", ra.seed, "master seed");
    repro->add_option("--restarts", ra.restarts, "annealing restarts per design");
    repro->add_option("--threads", ra.threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (design->parsed()) {
            if (!da.config_path.empty()) {
                std::ifstream in(da.config_path);
                if (!in) throw ConfigError("cannot open config file: " + da.config_path);
                DesignArgs merged;
                apply_design_config(json::parse(in), merged);
                // precedence: start from the config document, overlay the
                // flags that were actually given
                DesignArgs flags = da;
                da = merged;
                if (design->count("--preset")) da.preset = flags.preset;
                if (design->count("--n")) da.n = flags.n;
                if (design->count("--r")) da.rate = flags.rate;
                if (design->count("--rr")) da.relay_rate = flags.relay_rate;
                if (design->count("--scheme")) da.scheme = flags.scheme;
                if (design->count("--cost")) da.cost = flags.cost;
                if (design->count("--snr-sd")) da.snr_sd = flags.snr_sd;
                if (design->count("--snr-sr")) da.snr_sr = flags.snr_sr;
                if (design->count("--snr-rd")) da.snr_rd = flags.snr_rd;
                if (design->count("--variance")) da.variance = flags.variance;
                if (design->count("--seed")) da.seed = flags.seed;
                if (design->count("--restarts")) da.restarts = flags.restarts;
                if (design->count("--threads")) da.threads = flags.threads;
                if (design->count("--include-zero-coeffs")) da.include_zero_coeffs = flags.include_zero_coeffs;
                if (design->count("--out")) da.out = flags.out;
                if (design->count("--trace")) da.trace = flags.trace;
                if (design->count("--t0")) da.schedule.t0 = flags.schedule.t0;
                if (design->count("--alpha")) da.schedule.alpha = flags.schedule.alpha;
                if (design->count("--sweeps")) da.schedule.sweeps_per_temp = flags.schedule.sweeps_per_temp;
                if (design->count("--max-temps")) da.schedule.max_temps = flags.schedule.max_temps;
                if (design->count("--t-min")) da.schedule.t_min = flags.schedule.t_min;
                if (design->count("--stall-tol")) da.schedule.stall_tol = flags.schedule.stall_tol;
                if (design->count("--stall-levels")) da.schedule.stall_levels = flags.schedule.stall_levels;
            }
            return cmd_design(da);
        }
        if (eval->parsed()) return cmd_eval(ea);
        if (sweep_cmd->parsed()) return cmd_sweep(sa);
        if (bound->parsed()) return cmd_bound(ba);
        if (repro->parsed()) return cmd_reproduce(ra);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "relnc/decoder.hpp"
#include "relnc/distortion.hpp"

namespace relnc {

// A complete operating point: network, quantizers, relay code, link SNRs
// and whether destinations (and the relay) work from soft or hard-decided
// observations.
struct SystemInstance {
    NetworkTopology topology;
    std::vector<ScalarQuantizer> quantizers;
    TableCode code;
    LinkSnrs snrs;
    ObservationMode mode = ObservationMode::Soft;
};

struct SimResult {
    double d_total = 0.0;
    double d_sources = 0.0;      // exact, from the quantizers
    double d_network_est = 0.0;  // d_total - d_sources
    double rsnr_db = 0.0;        // (1/N) sum_s var_s / D, in dB
    double stderr_d = 0.0;       // standard error of d_total
    long long samples = 0;
    std::uint64_t seed = 0;
    struct PathMse {
        int destination;
        int source;
        double mse;
    };
    std::vector<PathMse> per_path;
};

// End-to-end Monte Carlo: quantize, transmit to relay and destinations,
// relay MAP-decode and re-encode, destination conditional-mean decode.
// Deterministic given the seed.
SimResult run(const SystemInstance& instance, long long num_samples, std::uint64_t seed);

enum class SweepAxis { SnrRd, SnrSd, SnrSr, Rate };

struct CurvePoint {
    double axis_value;
    SimResult result;
};

// One run per axis value with independent substreams; results are ordered
// by value index regardless of worker completion order. Rate sweeps need
// per-value instances, use sweep_with.
std::vector<CurvePoint> sweep(const SystemInstance& base, SweepAxis axis, std::span<const double> values,
                              long long num_samples, std::uint64_t seed, int threads = 1);

std::vector<CurvePoint> sweep_with(const std::function<SystemInstance(double)>& instance_for,
                                   std::span<const double> values, long long num_samples, std::uint64_t seed,
                                   int threads = 1);

}  // namespace relnc

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "relnc/distortion.hpp"

namespace relnc {

// Geometric cooling schedule. t0 = 0 requests calibration from probe
// perturbations so that the initial uphill acceptance ratio is >= 0.8;
// t_min = 0 defaults to 1e-6 * t0.
struct AnnealSchedule {
    double t0 = 0.0;
    double alpha = 0.97;
    int sweeps_per_temp = 1;
    int max_temps = 1000;
    double t_min = 0.0;
    double stall_tol = 1e-12;  // relative cost change counted as movement
    int stall_levels = 10;
    // Pure neighbor-donor proposals lose alphabet values irreversibly (a
    // value absent from the table can never be copied back), so chains
    // coalesce toward constant tables. A small uniform-value mutation rate
    // keeps the chain ergodic; donor moves stay dominant.
    double mutation_prob = 0.1;
    std::uint64_t seed = 1;
};

struct TracePoint {
    int temp_index;
    double temperature;
    double current_cost;
    double best_cost;
};

struct SaResult {
    TableCode code;
    double cost = 0.0;
    std::vector<TracePoint> trace;
};

// Metropolis acceptance: downhill always, uphill with probability
// exp(-delta / temperature) tested against the supplied uniform draw.
bool sa_accept(double delta, double temperature, double uniform_draw);

// Returns a copy of the table with the entry at flat_pos replaced by the
// value held by a uniformly chosen axis neighbor (non-wrapping).
TableCode perturb(const TableCode& code, std::size_t flat_pos, std::mt19937_64& rng);

// Annealed lookup-table design. Elements are perturbed in row-major order;
// the best code encountered is returned, not the final state. Fully
// reproducible from the schedule seed.
SaResult design_sa_table(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                         const AnnealSchedule& schedule);

// Independent seeded restarts; returns the best result.
SaResult design_sa_table_restarts(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                                  const AnnealSchedule& schedule, int restarts, int threads = 1);

struct LinearDesignResult {
    LinearCode code;
    double cost = 0.0;
};

// Exhaustive scan over GF(2^relay_rate) coefficient tuples; ties break to
// the lexicographically smallest tuple. Zero coefficients discard a source
// and are excluded unless requested.
LinearDesignResult design_linear(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                                 bool include_zero_coeffs = false);

struct StructuredDesignResult {
    StructuredCode code;
    double cost = 0.0;
    std::vector<TracePoint> trace;
};

// Annealed assignment of distinct relay indices to the structured
// partition slots; a move swaps two positions of the assignment
// permutation (unused indices live in a pool past the slot block).
StructuredDesignResult design_structured(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                                         const AnnealSchedule& schedule);

StructuredDesignResult design_structured_restarts(const DesignSetup& setup, int relay_rate,
                                                  CostVariant cost_variant, const AnnealSchedule& schedule,
                                                  int restarts, int threads = 1);

}  // namespace relnc

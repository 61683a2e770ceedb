#pragma once

#include <span>
#include <vector>

#include "relnc/decoder.hpp"

namespace relnc {

// Which network-distortion expression drives an evaluation or a design:
//   Full  exact hard-decision pipeline, all links noisy
//   C3    noiseless relay channels (relay index observed exactly)
//   C4    additionally very noisy source-destination channels
enum class CostVariant { Full, C3, C4 };

struct DistortionReport {
    double d_total = 0.0;
    double d_sources = 0.0;
    double d_network = 0.0;
    struct Path {
        int destination;
        int source;
        double network;
        double total;
    };
    std::vector<Path> breakdown;
};

// Exact network distortion of the hard-decision pipeline; integrals of the
// soft formulation are replaced by sums over hard indices.
double network_distortion(const DecoderContext& ctx, CostVariant variant);

DistortionReport total_distortion(const DecoderContext& ctx, CostVariant variant);

// Direct evaluation of the end-to-end MSE without the source/network
// decomposition: enumerates true indices, relay decisions and hard
// observations, integrating the source variable exactly per cell.
// Guarded to ~1e7 enumeration terms.
double brute_force_distortion(const DecoderContext& ctx);

// The cross term of the decomposition, evaluated explicitly by the same
// enumeration; analytically zero.
double brute_force_cross_term(const DecoderContext& ctx);

// Design-time problem statement: everything but the code.
struct DesignSetup {
    NetworkTopology topology;
    std::vector<ScalarQuantizer> quantizers;
    LinkSnrs snrs;
};

double network_distortion_for(const DesignSetup& setup, const TableCode& code, CostVariant variant);

// Incremental cost oracle for annealing: tracks the network distortion of a
// mutable table code under single-cell moves. C4 updates per-class moment
// sums in O(N); C3 updates observation buckets and recomputes the two
// affected preimage classes; Full recomputes from scratch.
class NetworkDistortionEvaluator {
public:
    NetworkDistortionEvaluator(const DesignSetup& setup, CostVariant variant, TableCode initial);

    double cost() const { return cost_; }
    const TableCode& code() const { return code_; }

    // Cost after hypothetically writing `value` at flat table position.
    double cost_with(std::size_t flat, int value);
    void apply(std::size_t flat, int value);
    // From-scratch recompute; call periodically to shed float drift from
    // incremental updates.
    void rebuild();

private:
    struct DestState {
        std::vector<int> sources;              // decode set
        IndexGrid vgrid;                       // joint hard-observation grid
        std::vector<DiscreteChannel> wmats;    // per decode-set source
        std::vector<double> den;               // [v * relay_levels + r]
        std::vector<std::vector<double>> num;  // [k][v * relay_levels + r]
        std::vector<double> contrib;           // per relay class
    };

    void apply_c4(std::size_t flat, int value);
    void apply_c3(std::size_t flat, int value);
    double class_term_c4(int r) const;
    double class_contrib_c3(const DestState& dest, int r) const;
    double full_cost() const;

    NetworkTopology topology_;
    std::vector<ScalarQuantizer> quantizers_;
    LinkSnrs snrs_;
    CostVariant variant_;
    TableCode code_;
    IndexGrid grid_;
    int relay_levels_ = 0;
    double weight_norm_ = 0.0;
    std::vector<double> cell_prior_;
    std::vector<double> source_weight_;
    double cost_ = 0.0;

    // C4 per-class moment sums.
    std::vector<double> class_mass_;
    std::vector<std::vector<double>> class_wsum_;
    std::vector<std::vector<double>> class_wsq_;
    std::vector<double> class_term_;

    // C3 buckets and membership.
    std::vector<DestState> dests_;
    std::vector<std::vector<std::size_t>> class_members_;
    std::vector<std::size_t> member_pos_;
};

}  // namespace relnc

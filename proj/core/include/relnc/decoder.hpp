#pragma once

#include <map>
#include <span>
#include <vector>

#include "relnc/channel.hpp"
#include "relnc/common.hpp"
#include "relnc/netcode.hpp"
#include "relnc/quantizer.hpp"
#include "relnc/topology.hpp"

namespace relnc {

enum class ObservationMode { Soft, Hard };

// Operating SNRs per link class, with optional per-edge overrides.
struct LinkSnrs {
    double sd_db = 0.0;
    double sr_db = 0.0;
    double rd_db = 0.0;
    std::map<std::pair<int, int>, double> sd_overrides;  // keyed by (source, destination)
    std::map<int, double> sr_overrides;                  // keyed by source
    std::map<int, double> rd_overrides;                  // keyed by destination

    double sd(int s, int d) const;
    double sr(int s) const;
    double rd(int d) const;
};

// P(relay index | true indices of one destination's decode set), cached per
// destination. Rows run over the joint decode-set index grid.
struct RelayConditional {
    IndexGrid rows;
    int relay_levels = 0;
    std::vector<double> p;

    double at(std::size_t row, int relay_index) const {
        return p[row * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(relay_index)];
    }
};

// Everything a destination needs to decode, precomputed once: equivalent
// source-relay channels, their output marginals, relay conditionals, hard
// link matrices, joint priors and preimage centroids.
//
// The cached relay conditional always models the hard-decision relay
// pipeline (exact); with soft observations the relay's true soft-MAP
// decision regions have no closed form, so soft-mode decoding reuses the
// hard-pipeline table.
class DecoderContext {
public:
    DecoderContext(NetworkTopology topology, std::vector<ScalarQuantizer> quantizers, TableCode code,
                   LinkSnrs snrs);

    const NetworkTopology& topology() const { return topology_; }
    const ScalarQuantizer& quantizer(int s) const { return quantizers_[static_cast<std::size_t>(s)]; }
    std::span<const ScalarQuantizer> quantizers() const { return quantizers_; }
    const TableCode& code() const { return code_; }
    const LinkSnrs& snrs() const { return snrs_; }

    AwgnBpskLink sd_link(int s, int d) const { return {snrs_.sd(s, d), code_.source_rates[static_cast<std::size_t>(s)]}; }
    AwgnBpskLink sr_link(int s) const { return {snrs_.sr(s), code_.source_rates[static_cast<std::size_t>(s)]}; }
    AwgnBpskLink rd_link(int d) const { return {snrs_.rd(d), code_.relay_rate}; }

    // Hard-decision matrix of the link from the k-th decode-set source to d.
    const DiscreteChannel& sd_hard(int d, int k) const { return sd_hard_[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)]; }
    const DiscreteChannel& rd_hard(int d) const { return rd_hard_[static_cast<std::size_t>(d)]; }

    // Equivalent discrete source-relay channel P(decoded | sent) and its
    // output marginal P(decoded index).
    const DiscreteChannel& relay_equivalent(int s) const { return relay_equivalent_[static_cast<std::size_t>(s)]; }
    std::span<const double> relay_index_marginal(int s) const { return relay_marginal_[static_cast<std::size_t>(s)]; }
    // Relay MAP decision per hard vector for the hard pipeline.
    std::span<const int> relay_decision(int s) const { return relay_decision_[static_cast<std::size_t>(s)]; }

    const RelayConditional& relay_conditional(int d) const { return relay_conditional_[static_cast<std::size_t>(d)]; }

    // Joint prior over the decode-set grid of d, and over the full grid.
    std::span<const double> joint_priors(int d) const { return joint_priors_[static_cast<std::size_t>(d)]; }
    std::span<const double> full_joint_priors() const { return full_joint_priors_; }
    const IndexGrid& full_grid() const { return full_grid_; }

    // Preimage centroid g2_s per relay index (prior mean 0 if unreachable)
    // and the preimage probability mass.
    std::span<const double> preimage_centroid(int s) const { return preimage_centroid_[static_cast<std::size_t>(s)]; }
    std::span<const double> preimage_mass() const { return preimage_mass_; }

private:
    NetworkTopology topology_;
    std::vector<ScalarQuantizer> quantizers_;
    TableCode code_;
    LinkSnrs snrs_;
    IndexGrid full_grid_;
    std::vector<std::vector<DiscreteChannel>> sd_hard_;
    std::vector<DiscreteChannel> rd_hard_;
    std::vector<DiscreteChannel> relay_equivalent_;
    std::vector<std::vector<double>> relay_marginal_;
    std::vector<std::vector<int>> relay_decision_;
    std::vector<RelayConditional> relay_conditional_;
    std::vector<std::vector<double>> joint_priors_;
    std::vector<double> full_joint_priors_;
    std::vector<std::vector<double>> preimage_centroid_;
    std::vector<double> preimage_mass_;
};

// Conditional-mean estimates for the decode-set sources of destination d,
// in decode-set order. Weights are prior times likelihood times the cached
// relay conditional; soft likelihoods go through the log domain.
std::vector<double> mmse_full(const DecoderContext& ctx, int d, std::span<const std::vector<double>> y_sources,
                              std::span<const double> y_relay);
std::vector<double> mmse_full_hard(const DecoderContext& ctx, int d, std::span<const int> v_sources, int v_relay);

struct ReducedEstimate {
    std::vector<double> estimates;
    bool unreachable_relay_index = false;
};

// Noiseless-relay-channels estimator: the relay index is observed exactly.
ReducedEstimate mmse_c1(const DecoderContext& ctx, int d, std::span<const std::vector<double>> y_sources,
                          int relay_index);
ReducedEstimate mmse_c1_hard(const DecoderContext& ctx, int d, std::span<const int> v_sources, int relay_index);

// Additionally very noisy source-destination channels: preimage centroids,
// destination independent; one estimate per source.
ReducedEstimate mmse_c2(const DecoderContext& ctx, int relay_index);

}  // namespace relnc

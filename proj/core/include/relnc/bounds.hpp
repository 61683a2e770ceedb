#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "relnc/topology.hpp"

namespace relnc {

// Transmit powers and per-link noise variances of the Gaussian network.
struct GaussianLinkBudget {
    std::vector<double> source_powers;              // P_s
    double relay_power = 1.0;                       // P_r
    std::map<std::pair<int, int>, double> sd_noise;  // sigma^2 keyed by (source, destination)
    std::vector<double> sr_noise;                   // per source
    std::vector<double> rd_noise;                   // per destination

    // Unit powers, common noise per link class from SNRs in dB.
    static GaussianLinkBudget symmetric(const NetworkTopology& topology, double snr_sd_db, double snr_sr_db,
                                        double snr_rd_db);

    double sd_snr(int s, int d) const;
    double sr_snr(int s) const;
    double rd_snr(int d) const;
};

struct CutsetDetail {
    double c1 = 0.0;
    std::uint32_t active_a_mask = 0;  // 0 when the C1 cut is active
    bool no_valid_a = false;
};

// Max-flow min-cut sum-rate bound for the source subset F (bitmask) at the
// given time shares: the minimum of the source-side cut and every
// destination-group cut A within D_F that jointly covers F. Time shares
// must be nonnegative with sum at most 1.
double cutset_bound(const NetworkTopology& topology, const GaussianLinkBudget& budget, std::uint32_t f_mask,
                    std::span<const double> lambdas, CutsetDetail* detail = nullptr);

struct RateBoundResult {
    struct Entry {
        std::uint32_t f_mask;
        double bound;
        std::uint32_t active_a_mask;  // 0 when C1 active
        bool no_valid_a;
    };
    std::vector<Entry> entries;     // all nonempty F in mask order
    std::vector<double> lambdas;
};

RateBoundResult bound_all_subsets(const NetworkTopology& topology, const GaussianLinkBudget& budget,
                                  std::span<const double> lambdas);

struct SymmetricRate {
    double rate = 0.0;    // bits per channel use, per source
    double lambda = 0.0;  // maximizing common time share
};

// Closed two-term specialization for the symmetric two-source,
// three-destination network: grid scan over the common time share in
// [0, 1/2] refined by one golden-section pass.
SymmetricRate max_symmetric_rate(const GaussianLinkBudget& budget, int grid_points = 2001);

// General route to the same quantity: per-source rate from the full cut
// enumeration with a common time share, maximized the same way. Limited to
// small networks (subset scans over sources and destinations).
SymmetricRate max_symmetric_rate_general(const NetworkTopology& topology, const GaussianLinkBudget& budget,
                                         int grid_points = 2001);

// Separate source/channel-network distortion bound sigma^2 2^(-2 b Rc);
// b is channel uses per source sample.
double distortion_power_bound(double rate, double channel_uses_per_sample, double variance);

}  // namespace relnc

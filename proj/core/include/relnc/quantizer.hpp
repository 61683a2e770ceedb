#pragma once

#include <span>
#include <vector>

#include "relnc/topology.hpp"

namespace relnc {

// Partial moments of a zero-mean Gaussian over the interval [lo, hi];
// lo/hi may be +-infinity.
struct GaussianCellMoments {
    double p;   // P(lo < X <= hi)
    double m1;  // E[X 1{lo < X <= hi}]
    double m2;  // E[X^2 1{lo < X <= hi}]
};
GaussianCellMoments gaussian_cell_moments(double variance, double lo, double hi);

// Lloyd-Max scalar quantizer for a zero-mean Gaussian source. Immutable
// after design; cells are indexed 0..2^rate-1 from the most negative up.
class ScalarQuantizer {
public:
    // Fixed-point Lloyd iteration with exact Gaussian cell moments,
    // converged to 1e-10 relative distortion change. rate in [1, 8].
    static ScalarQuantizer design_lloyd_max(int rate_bits, double variance);

    int rate() const { return rate_; }
    int levels() const { return static_cast<int>(codebook_.size()); }
    double variance() const { return variance_; }

    std::span<const double> boundaries() const { return boundaries_; }
    std::span<const double> codebook() const { return codebook_; }
    std::span<const double> priors() const { return priors_; }
    // Conditional MSE within each cell, E[(X - C_I)^2 | I].
    std::span<const double> cell_distortion() const { return cell_distortion_; }

    // Sum_I P(I) E[(X - C_I)^2 | I].
    double total_distortion() const;

    // Cell containing x; a value exactly on a boundary goes to the
    // higher-index cell.
    int quantize(double x) const;

    // Deserialization path; performs only shape checks.
    static ScalarQuantizer from_parts(int rate, double variance, std::vector<double> boundaries,
                                      std::vector<double> codebook, std::vector<double> priors,
                                      std::vector<double> cell_distortion);

private:
    ScalarQuantizer() = default;
    int rate_ = 0;
    double variance_ = 0.0;
    std::vector<double> boundaries_;
    std::vector<double> codebook_;
    std::vector<double> priors_;
    std::vector<double> cell_distortion_;
};

// Quantization-only component of the average distortion: each source
// counted once per destination that decodes it, normalized by Sum_d |S_d|.
double source_distortion(const NetworkTopology& topology, std::span<const ScalarQuantizer> quantizers);

}  // namespace relnc

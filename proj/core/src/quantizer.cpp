#include "relnc/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double gauss_pdf(double x, double sigma) {
    if (std::isinf(x)) return 0.0;
    const double z = x / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

double gauss_cdf(double x, double sigma) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

}  // namespace

GaussianCellMoments gaussian_cell_moments(double variance, double lo, double hi) {
    const double sigma = std::sqrt(variance);
    const double pdf_lo = gauss_pdf(lo, sigma);
    const double pdf_hi = gauss_pdf(hi, sigma);
    GaussianCellMoments m;
    m.p = gauss_cdf(hi, sigma) - gauss_cdf(lo, sigma);
    m.m1 = variance * (pdf_lo - pdf_hi);
    const double lo_term = std::isinf(lo) ? 0.0 : lo * pdf_lo;
    const double hi_term = std::isinf(hi) ? 0.0 : hi * pdf_hi;
    m.m2 = variance * m.p + variance * (lo_term - hi_term);
    return m;
}

ScalarQuantizer ScalarQuantizer::design_lloyd_max(int rate_bits, double variance) {
    if (rate_bits < 1 || rate_bits > 8) throw std::invalid_argument("design_lloyd_max: rate must be in [1, 8]");
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw std::invalid_argument("design_lloyd_max: variance must be positive and finite");

    const int levels = 1 << rate_bits;
    const double sigma = std::sqrt(variance);
    const double inf = std::numeric_limits<double>::infinity();

    // Symmetric uniform start over +-4 sigma; symmetry is preserved by the
    // iteration up to rounding.
    std::vector<double> codebook(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) codebook[static_cast<std::size_t>(i)] = sigma * (-4.0 + 8.0 * (i + 0.5) / levels);

    std::vector<double> boundaries(static_cast<std::size_t>(levels - 1));
    std::vector<double> priors(static_cast<std::size_t>(levels));
    std::vector<double> m1(static_cast<std::size_t>(levels));

    double prev_distortion = variance;
    constexpr int kMaxIterations = 100000;
    bool converged = false;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        for (int i = 0; i + 1 < levels; ++i)
            boundaries[static_cast<std::size_t>(i)] =
                0.5 * (codebook[static_cast<std::size_t>(i)] + codebook[static_cast<std::size_t>(i + 1)]);

        double second_moment_of_codebook = 0.0;
        for (int i = 0; i < levels; ++i) {
            const double lo = (i == 0) ? -inf : boundaries[static_cast<std::size_t>(i - 1)];
            const double hi = (i == levels - 1) ? inf : boundaries[static_cast<std::size_t>(i)];
            const auto mom = gaussian_cell_moments(variance, lo, hi);
            priors[static_cast<std::size_t>(i)] = mom.p;
            m1[static_cast<std::size_t>(i)] = mom.m1;
            codebook[static_cast<std::size_t>(i)] = mom.m1 / mom.p;
            second_moment_of_codebook +=
                mom.p * codebook[static_cast<std::size_t>(i)] * codebook[static_cast<std::size_t>(i)];
        }

        const double distortion = variance - second_moment_of_codebook;
        if (iter > 0 && std::abs(prev_distortion - distortion) <= 1e-10 * distortion) {
            converged = true;
            prev_distortion = distortion;
            break;
        }
        prev_distortion = distortion;
    }
    if (!converged) throw std::runtime_error("design_lloyd_max: Lloyd iteration did not converge");

    ScalarQuantizer q;
    q.rate_ = rate_bits;
    q.variance_ = variance;
    q.boundaries_ = boundaries;
    q.codebook_ = codebook;
    q.priors_ = priors;
    q.cell_distortion_.resize(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        const double lo = (i == 0) ? -inf : boundaries[static_cast<std::size_t>(i - 1)];
        const double hi = (i == levels - 1) ? inf : boundaries[static_cast<std::size_t>(i)];
        const auto mom = gaussian_cell_moments(variance, lo, hi);
        // E[(X - C)^2 | I] with C = m1/p.
        q.cell_distortion_[static_cast<std::size_t>(i)] = (mom.m2 - mom.m1 * mom.m1 / mom.p) / mom.p;
    }
    return q;
}

double ScalarQuantizer::total_distortion() const {
    double d = 0.0;
    for (std::size_t i = 0; i < priors_.size(); ++i) d += priors_[i] * cell_distortion_[i];
    return d;
}

int ScalarQuantizer::quantize(double x) const {
    // upper_bound counts boundaries <= x, so a value exactly on a boundary
    // lands in the higher cell.
    const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
    return static_cast<int>(it - boundaries_.begin());
}

ScalarQuantizer ScalarQuantizer::from_parts(int rate, double variance, std::vector<double> boundaries,
                                            std::vector<double> codebook, std::vector<double> priors,
                                            std::vector<double> cell_distortion) {
    const std::size_t levels = 1ull << rate;
    if (codebook.size() != levels || priors.size() != levels || cell_distortion.size() != levels ||
        boundaries.size() + 1 != levels)
        throw std::invalid_argument("ScalarQuantizer::from_parts: inconsistent sizes");
    ScalarQuantizer q;
    q.rate_ = rate;
    q.variance_ = variance;
    q.boundaries_ = std::move(boundaries);
    q.codebook_ = std::move(codebook);
    q.priors_ = std::move(priors);
    q.cell_distortion_ = std::move(cell_distortion);
    return q;
}

double source_distortion(const NetworkTopology& topology, std::span<const ScalarQuantizer> quantizers) {
    if (static_cast<int>(quantizers.size()) != topology.num_sources())
        throw std::invalid_argument("source_distortion: one quantizer per source required");
    double acc = 0.0;
    for (int s = 0; s < topology.num_sources(); ++s)
        acc += static_cast<double>(topology.dest_set(s).size()) * quantizers[static_cast<std::size_t>(s)].total_distortion();
    return acc / static_cast<double>(topology.decode_set_weight());
}

}  // namespace relnc

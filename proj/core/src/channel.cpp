#include "relnc/channel.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

int hamming(int a, int b) { return std::popcount(static_cast<unsigned>(a ^ b)); }

void check_priors(std::span<const double> priors, int levels) {
    if (static_cast<int>(priors.size()) != levels)
        throw std::invalid_argument("priors size does not match the codeword alphabet");
}

}  // namespace

double AwgnBpskLink::gamma() const { return std::pow(10.0, snr_db / 10.0); }

double AwgnBpskLink::noise_sigma() const { return std::sqrt(0.5 / gamma()); }

std::optional<std::string> DiscreteChannel::validate() const {
    for (int i = 0; i < in_; ++i) {
        double sum = 0.0;
        for (int j = 0; j < out_; ++j) {
            const double v = (*this)(i, j);
            if (v < 0.0) return "negative transition probability";
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) return "row " + std::to_string(i) + " does not sum to 1";
    }
    return std::nullopt;
}

double bit_error_prob(double snr_db) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("bit_error_prob: snr_db must be finite");
    // Q(sqrt(2 gamma)) = erfc(sqrt(gamma)) / 2
    return 0.5 * std::erfc(std::sqrt(std::pow(10.0, snr_db / 10.0)));
}

DiscreteChannel hard_matrix(const AwgnBpskLink& link) {
    const int levels = 1 << link.bits;
    const double p = bit_error_prob(link.snr_db);
    DiscreteChannel ch(levels, levels);
    for (int i = 0; i < levels; ++i) {
        for (int j = 0; j < levels; ++j) {
            const int d = hamming(i, j);
            ch.at(i, j) = std::pow(p, d) * std::pow(1.0 - p, link.bits - d);
        }
    }
    return ch;
}

std::vector<double> sample(const AwgnBpskLink& link, int index, std::mt19937_64& rng) {
    if (index < 0 || index >= (1 << link.bits)) throw std::out_of_range("sample: index outside codeword alphabet");
    const double sigma = link.noise_sigma();
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> y(static_cast<std::size_t>(link.bits));
    for (int b = 0; b < link.bits; ++b) {
        const double symbol = ((index >> b) & 1) ? -1.0 : 1.0;
        y[static_cast<std::size_t>(b)] = symbol + noise(rng);
    }
    return y;
}

int hard_decide(const AwgnBpskLink& link, std::span<const double> y) {
    if (static_cast<int>(y.size()) != link.bits) throw std::invalid_argument("hard_decide: length mismatch");
    int v = 0;
    for (int b = 0; b < link.bits; ++b)
        if (y[static_cast<std::size_t>(b)] < 0.0) v |= 1 << b;
    return v;
}

void log_soft_likelihoods(const AwgnBpskLink& link, std::span<const double> y, std::span<double> out) {
    if (static_cast<int>(y.size()) != link.bits) throw std::invalid_argument("soft likelihood: length mismatch");
    const int levels = 1 << link.bits;
    if (static_cast<int>(out.size()) != levels) throw std::invalid_argument("soft likelihood: output size mismatch");
    const double sigma2 = 0.5 / link.gamma();
    const double log_norm = -0.5 * std::log(2.0 * kPi * sigma2);
    // Per-bit terms; the codeword log-likelihood is their sum.
    for (int i = 0; i < levels; ++i) {
        double acc = 0.0;
        for (int b = 0; b < link.bits; ++b) {
            const double symbol = ((i >> b) & 1) ? -1.0 : 1.0;
            const double r = y[static_cast<std::size_t>(b)] - symbol;
            acc += log_norm - 0.5 * r * r / sigma2;
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

double soft_likelihood(const AwgnBpskLink& link, std::span<const double> y, int index) {
    const int levels = 1 << link.bits;
    if (index < 0 || index >= levels) throw std::out_of_range("soft_likelihood: index outside alphabet");
    std::vector<double> logs(static_cast<std::size_t>(levels));
    log_soft_likelihoods(link, y, logs);
    return std::exp(logs[static_cast<std::size_t>(index)]);
}

int relay_map_decode(const AwgnBpskLink& link, std::span<const double> y, std::span<const double> priors) {
    const int levels = 1 << link.bits;
    check_priors(priors, levels);
    std::vector<double> logs(static_cast<std::size_t>(levels));
    log_soft_likelihoods(link, y, logs);
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < levels; ++i) {
        if (priors[static_cast<std::size_t>(i)] <= 0.0) continue;
        const double score = std::log(priors[static_cast<std::size_t>(i)]) + logs[static_cast<std::size_t>(i)];
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

std::vector<int> map_decision_table(const AwgnBpskLink& link, std::span<const double> priors) {
    const int levels = 1 << link.bits;
    check_priors(priors, levels);
    const double p = bit_error_prob(link.snr_db);
    std::vector<int> decision(static_cast<std::size_t>(levels));
    if (p <= 0.0) {
        // Noiseless bits: the observation is the codeword.
        for (int v = 0; v < levels; ++v) decision[static_cast<std::size_t>(v)] = v;
        return decision;
    }
    const double log_p = std::log(p);
    const double log_q = std::log(1.0 - p);
    for (int v = 0; v < levels; ++v) {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < levels; ++i) {
            if (priors[static_cast<std::size_t>(i)] <= 0.0) continue;
            const int d = hamming(v, i);
            const double score = std::log(priors[static_cast<std::size_t>(i)]) + d * log_p + (link.bits - d) * log_q;
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        decision[static_cast<std::size_t>(v)] = best;
    }
    return decision;
}

DiscreteChannel equivalent_relay_channel(const AwgnBpskLink& link, std::span<const double> priors) {
    const int levels = 1 << link.bits;
    check_priors(priors, levels);
    const std::vector<int> decision = map_decision_table(link, priors);
    const DiscreteChannel hard = hard_matrix(link);
    DiscreteChannel eq(levels, levels);
    for (int i = 0; i < levels; ++i)
        for (int v = 0; v < levels; ++v) eq.at(i, decision[static_cast<std::size_t>(v)]) += hard(i, v);
    return eq;
}

}  // namespace relnc

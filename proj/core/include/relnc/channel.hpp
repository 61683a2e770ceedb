#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace relnc {

// One BPSK/AWGN link carrying `bits`-bit codewords. snr_db is Es/N0 per
// BPSK symbol; unit symbol energy, noise variance N0/2 = 1/(2*gamma).
// Bit b of an index is its b-th least significant bit; bit 0 maps to +1,
// bit 1 to -1.
struct AwgnBpskLink {
    double snr_db = 0.0;
    int bits = 1;

    double gamma() const;        // linear Es/N0
    double noise_sigma() const;  // sqrt(N0/2)
};

// Row-stochastic transition matrix over index alphabets.
class DiscreteChannel {
public:
    DiscreteChannel(int in_size, int out_size)
        : in_(in_size), out_(out_size), p_(static_cast<std::size_t>(in_size) * static_cast<std::size_t>(out_size), 0.0) {}

    int in_size() const { return in_; }
    int out_size() const { return out_; }
    double operator()(int i, int j) const { return p_[static_cast<std::size_t>(i) * out_ + j]; }
    double& at(int i, int j) { return p_[static_cast<std::size_t>(i) * out_ + j]; }
    std::span<const double> row(int i) const { return {p_.data() + static_cast<std::size_t>(i) * out_, static_cast<std::size_t>(out_)}; }

    std::optional<std::string> validate() const;

private:
    int in_;
    int out_;
    std::vector<double> p_;
};

// Q(sqrt(2*gamma)) for the hard BPSK bit decision.
double bit_error_prob(double snr_db);

// Hard-decision codeword channel: P(j|i) = p^d(i,j) (1-p)^(R-d(i,j)) with
// d the Hamming distance of the natural-binary labels.
DiscreteChannel hard_matrix(const AwgnBpskLink& link);

// One noisy observation of the codeword of `index`.
std::vector<double> sample(const AwgnBpskLink& link, int index, std::mt19937_64& rng);

// Per-bit sign decision of a received vector, packed into an index.
int hard_decide(const AwgnBpskLink& link, std::span<const double> y);

// Product of per-symbol Gaussian densities, and its log over all indices.
double soft_likelihood(const AwgnBpskLink& link, std::span<const double> y, int index);
void log_soft_likelihoods(const AwgnBpskLink& link, std::span<const double> y, std::span<double> out);

// MAP symbol decision from a soft observation; ties to the smallest index.
int relay_map_decode(const AwgnBpskLink& link, std::span<const double> y, std::span<const double> priors);

// MAP decision from an already hard-decided vector under the BSC product
// likelihood; table[v] is the decoded index. Ties to the smallest index.
std::vector<int> map_decision_table(const AwgnBpskLink& link, std::span<const double> priors);

// Exact transition law P(decoded | sent) of the hard-decision pipeline:
// enumerate all hard vectors, weight by hard_matrix, decode by MAP.
DiscreteChannel equivalent_relay_channel(const AwgnBpskLink& link, std::span<const double> priors);

}  // namespace relnc

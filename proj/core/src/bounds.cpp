#include "relnc/bounds.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnc {

namespace {

// lambda/2 log2(1 + snr_sum/lambda), continuously extended to 0 at lambda=0.
double rate_term(double lambda, double snr_sum) {
    if (lambda <= 0.0 || snr_sum <= 0.0) return 0.0;
    return 0.5 * lambda * std::log2(1.0 + snr_sum / lambda);
}

// Golden-section maximization of a unimodal f on [a, b].
template <typename F>
double golden_max(F&& f, double a, double b, double* arg = nullptr) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    const double mid = 0.5 * (a + b);
    if (arg) *arg = mid;
    return f(mid);
}

template <typename F>
SymmetricRate grid_then_golden(F&& f, double lo, double hi, int grid_points) {
    if (grid_points < 3) throw std::invalid_argument("max_symmetric_rate: need at least 3 grid points");
    double best_x = lo, best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double h = (hi - lo) / static_cast<double>(grid_points - 1);
    SymmetricRate out;
    out.rate = golden_max(f, std::max(lo, best_x - h), std::min(hi, best_x + h), &out.lambda);
    return out;
}

}  // namespace

GaussianLinkBudget GaussianLinkBudget::symmetric(const NetworkTopology& topology, double snr_sd_db,
                                                 double snr_sr_db, double snr_rd_db) {
    GaussianLinkBudget b;
    const int n = topology.num_sources();
    const int m = topology.num_destinations();
    b.source_powers.assign(static_cast<std::size_t>(n), 1.0);
    b.relay_power = 1.0;
    b.sr_noise.assign(static_cast<std::size_t>(n), std::pow(10.0, -snr_sr_db / 10.0));
    b.rd_noise.assign(static_cast<std::size_t>(m), std::pow(10.0, -snr_rd_db / 10.0));
    const double sd_var = std::pow(10.0, -snr_sd_db / 10.0);
    for (int s = 0; s < n; ++s)
        for (int d : topology.dest_set(s)) b.sd_noise[{s, d}] = sd_var;
    return b;
}

double GaussianLinkBudget::sd_snr(int s, int d) const {
    const auto it = sd_noise.find({s, d});
    if (it == sd_noise.end()) throw std::invalid_argument("budget: missing source-destination noise variance");
    return source_powers[static_cast<std::size_t>(s)] / it->second;
}

double GaussianLinkBudget::sr_snr(int s) const {
    return source_powers[static_cast<std::size_t>(s)] / sr_noise[static_cast<std::size_t>(s)];
}

double GaussianLinkBudget::rd_snr(int d) const { return relay_power / rd_noise[static_cast<std::size_t>(d)]; }

double cutset_bound(const NetworkTopology& topology, const GaussianLinkBudget& budget, std::uint32_t f_mask,
                    std::span<const double> lambdas, CutsetDetail* detail) {
    const int n = topology.num_sources();
    const int m = topology.num_destinations();
    if (f_mask == 0 || f_mask >= (1u << n)) throw std::invalid_argument("cutset_bound: invalid source subset");
    if (static_cast<int>(lambdas.size()) != n) throw std::invalid_argument("cutset_bound: one time share per source");
    double lambda_sum = 0.0;
    for (double l : lambdas) {
        if (l < 0.0) throw std::invalid_argument("cutset_bound: time shares must be nonnegative");
        lambda_sum += l;
    }
    if (lambda_sum > 1.0 + 1e-12) throw std::invalid_argument("cutset_bound: time shares exceed 1");
    const double relay_share = std::max(0.0, 1.0 - lambda_sum);

    // C1: everything leaving the sources of F.
    double c1 = 0.0;
    for (int s = 0; s < n; ++s) {
        if (!(f_mask & (1u << s))) continue;
        double snr = budget.sr_snr(s);
        for (int d : topology.dest_set(s)) snr += budget.sd_snr(s, d);
        c1 += rate_term(lambdas[static_cast<std::size_t>(s)], snr);
    }

    // Destination groups within D_F that jointly cover F.
    std::uint32_t df_mask = 0;
    for (int s = 0; s < n; ++s)
        if (f_mask & (1u << s))
            for (int d : topology.dest_set(s)) df_mask |= 1u << d;

    double best = c1;
    std::uint32_t best_a = 0;
    bool any_a = false;
    for (std::uint32_t a = 1; a < (1u << m); ++a) {
        if ((a & df_mask) != a) continue;
        std::uint32_t covered = 0;
        for (int d = 0; d < m; ++d)
            if (a & (1u << d))
                for (int s : topology.decode_set(d)) covered |= 1u << s;
        if ((covered & f_mask) != f_mask) continue;
        any_a = true;

        double c2 = 0.0;
        for (int s = 0; s < n; ++s) {
            if (!(f_mask & (1u << s))) continue;
            double snr = 0.0;
            for (int d : topology.dest_set(s))
                if (a & (1u << d)) snr += budget.sd_snr(s, d);
            c2 += rate_term(lambdas[static_cast<std::size_t>(s)], snr);
        }
        double relay_snr = 0.0;
        for (int d = 0; d < m; ++d)
            if (a & (1u << d)) relay_snr += budget.rd_snr(d);
        c2 += rate_term(relay_share, relay_snr);

        if (c2 < best) {
            best = c2;
            best_a = a;
        }
    }

    if (detail) {
        detail->c1 = c1;
        detail->active_a_mask = best_a;
        detail->no_valid_a = !any_a;
    }
    return best;
}

RateBoundResult bound_all_subsets(const NetworkTopology& topology, const GaussianLinkBudget& budget,
                                  std::span<const double> lambdas) {
    const int n = topology.num_sources();
    if (n > 6 || topology.num_destinations() > 6)
        throw std::invalid_argument("bound_all_subsets: subset scan limited to 6 sources/destinations");
    RateBoundResult result;
    result.lambdas.assign(lambdas.begin(), lambdas.end());
    for (std::uint32_t f = 1; f < (1u << n); ++f) {
        CutsetDetail detail;
        const double b = cutset_bound(topology, budget, f, lambdas, &detail);
        result.entries.push_back({f, b, detail.active_a_mask, detail.no_valid_a});
    }
    return result;
}

SymmetricRate max_symmetric_rate(const GaussianLinkBudget& budget, int grid_points) {
    if (budget.source_powers.size() != 2 || budget.rd_noise.size() != 3)
        throw std::invalid_argument("max_symmetric_rate: expects the two-source three-destination network");
    const double g_sd = budget.sd_snr(0, 0);
    const double g_sr = budget.sr_snr(0);
    const double g_rd = budget.rd_snr(0);

    const auto objective = [&](double lambda) {
        const double t1 = rate_term(lambda, 2.0 * g_sd + g_sr);
        const double t2 = rate_term(lambda, g_sd) + 0.5 * rate_term(1.0 - 2.0 * lambda, g_rd);
        return std::min(t1, t2);
    };
    return grid_then_golden(objective, 0.0, 0.5, grid_points);
}

SymmetricRate max_symmetric_rate_general(const NetworkTopology& topology, const GaussianLinkBudget& budget,
                                         int grid_points) {
    const int n = topology.num_sources();
    const auto objective = [&](double lambda) {
        std::vector<double> lambdas(static_cast<std::size_t>(n), lambda);
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t f = 1; f < (1u << n); ++f) {
            const int size = std::popcount(f);
            best = std::min(best, cutset_bound(topology, budget, f, lambdas) / static_cast<double>(size));
        }
        return best;
    };
    return grid_then_golden(objective, 0.0, 1.0 / static_cast<double>(n), grid_points);
}

double distortion_power_bound(double rate, double channel_uses_per_sample, double variance) {
    if (rate < 0.0 || channel_uses_per_sample <= 0.0)
        throw std::invalid_argument("distortion_power_bound: rate must be nonnegative, b positive");
    return variance * std::pow(2.0, -2.0 * channel_uses_per_sample * rate);
}

}  // namespace relnc

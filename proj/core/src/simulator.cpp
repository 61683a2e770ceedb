#include "relnc/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "relnc/rng.hpp"

namespace relnc {

namespace {

int flip_bits(int index, int bits, double p, std::mt19937_64& rng) {
    if (p <= 0.0) return index;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int b = 0; b < bits; ++b)
        if (unit(rng) < p) index ^= 1 << b;
    return index;
}

}  // namespace

SimResult run(const SystemInstance& instance, long long num_samples, std::uint64_t seed) {
    if (num_samples < 1) throw std::invalid_argument("run: need at least one sample");
    DecoderContext ctx(instance.topology, instance.quantizers, instance.code, instance.snrs);
    const auto& topology = ctx.topology();
    const int n = topology.num_sources();
    const int m = topology.num_destinations();
    const double weight = static_cast<double>(topology.decode_set_weight());
    const bool hard = instance.mode == ObservationMode::Hard;

    auto rng = make_rng(seed);
    std::normal_distribution<double> std_norm(0.0, 1.0);
    std::vector<double> sigmas(static_cast<std::size_t>(n));
    std::vector<double> sr_flip(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        sigmas[static_cast<std::size_t>(s)] = std::sqrt(ctx.quantizer(s).variance());
        sr_flip[static_cast<std::size_t>(s)] = bit_error_prob(instance.snrs.sr(s));
    }
    std::vector<double> rd_flip(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> sd_flip(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
        rd_flip[static_cast<std::size_t>(d)] = bit_error_prob(instance.snrs.rd(d));
        for (int s : topology.decode_set(d))
            sd_flip[static_cast<std::size_t>(d)].push_back(bit_error_prob(instance.snrs.sd(s, d)));
    }

    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<int> true_idx(static_cast<std::size_t>(n)), relay_idx(static_cast<std::size_t>(n));
    std::vector<double> path_sq(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0.0);

    // Batched partials, folded pairwise at the end.
    constexpr long long kBatch = 4096;
    std::vector<double> batch_e, batch_e2;
    double acc_e = 0.0, acc_e2 = 0.0;

    for (long long it = 0; it < num_samples; ++it) {
        for (int s = 0; s < n; ++s) {
            x[static_cast<std::size_t>(s)] = sigmas[static_cast<std::size_t>(s)] * std_norm(rng);
            true_idx[static_cast<std::size_t>(s)] = ctx.quantizer(s).quantize(x[static_cast<std::size_t>(s)]);
        }
        // Relay decodes each source, then re-encodes.
        for (int s = 0; s < n; ++s) {
            if (hard) {
                const int v = flip_bits(true_idx[static_cast<std::size_t>(s)], ctx.quantizer(s).rate(),
                                        sr_flip[static_cast<std::size_t>(s)], rng);
                relay_idx[static_cast<std::size_t>(s)] = ctx.relay_decision(s)[static_cast<std::size_t>(v)];
            } else {
                const auto y = sample(ctx.sr_link(s), true_idx[static_cast<std::size_t>(s)], rng);
                relay_idx[static_cast<std::size_t>(s)] = relay_map_decode(ctx.sr_link(s), y, ctx.quantizer(s).priors());
            }
        }
        const int relay_index = ctx.code().table[ctx.full_grid().flatten(relay_idx)];

        double pooled = 0.0;
        for (int d = 0; d < m; ++d) {
            const auto& sd_set = topology.decode_set(d);
            std::vector<double> estimates;
            if (hard) {
                std::vector<int> v(sd_set.size());
                for (std::size_t k = 0; k < sd_set.size(); ++k)
                    v[k] = flip_bits(true_idx[static_cast<std::size_t>(sd_set[k])], ctx.quantizer(sd_set[k]).rate(),
                                     sd_flip[static_cast<std::size_t>(d)][k], rng);
                const int vr = flip_bits(relay_index, ctx.code().relay_rate, rd_flip[static_cast<std::size_t>(d)], rng);
                estimates = mmse_full_hard(ctx, d, v, vr);
            } else {
                std::vector<std::vector<double>> y(sd_set.size());
                for (std::size_t k = 0; k < sd_set.size(); ++k)
                    y[k] = sample(ctx.sd_link(sd_set[k], d), true_idx[static_cast<std::size_t>(sd_set[k])], rng);
                const auto yr = sample(ctx.rd_link(d), relay_index, rng);
                estimates = mmse_full(ctx, d, y, yr);
            }
            for (std::size_t k = 0; k < sd_set.size(); ++k) {
                const double err = x[static_cast<std::size_t>(sd_set[k])] - estimates[k];
                const double sq = err * err;
                path_sq[static_cast<std::size_t>(d) * static_cast<std::size_t>(n) + static_cast<std::size_t>(sd_set[k])] += sq;
                pooled += sq;
            }
        }
        const double e = pooled / weight;
        acc_e += e;
        acc_e2 += e * e;
        if ((it + 1) % kBatch == 0 || it + 1 == num_samples) {
            batch_e.push_back(acc_e);
            batch_e2.push_back(acc_e2);
            acc_e = 0.0;
            acc_e2 = 0.0;
        }
    }

    SimResult res;
    res.samples = num_samples;
    res.seed = seed;
    const double inv_n = 1.0 / static_cast<double>(num_samples);
    res.d_total = pairwise_sum(batch_e) * inv_n;
    const double mean_e2 = pairwise_sum(batch_e2) * inv_n;
    const double var = std::max(0.0, mean_e2 - res.d_total * res.d_total);
    res.stderr_d = std::sqrt(var * inv_n);
    res.d_sources = source_distortion(topology, ctx.quantizers());
    res.d_network_est = res.d_total - res.d_sources;

    double rsnr = 0.0;
    for (int s = 0; s < n; ++s) rsnr += ctx.quantizer(s).variance() / res.d_total;
    rsnr /= static_cast<double>(n);
    res.rsnr_db = 10.0 * std::log10(rsnr);

    for (int d = 0; d < m; ++d)
        for (int s : topology.decode_set(d))
            res.per_path.push_back(
                {d, s, path_sq[static_cast<std::size_t>(d) * static_cast<std::size_t>(n) + static_cast<std::size_t>(s)] * inv_n});
    return res;
}

std::vector<CurvePoint> sweep(const SystemInstance& base, SweepAxis axis, std::span<const double> values,
                              long long num_samples, std::uint64_t seed, int threads) {
    if (axis == SweepAxis::Rate)
        throw std::invalid_argument("sweep: rate sweeps need per-value instances, use sweep_with");
    return sweep_with(
        [&](double v) {
            SystemInstance inst = base;
            switch (axis) {
                case SweepAxis::SnrRd: inst.snrs.rd_db = v; break;
                case SweepAxis::SnrSd: inst.snrs.sd_db = v; break;
                case SweepAxis::SnrSr: inst.snrs.sr_db = v; break;
                case SweepAxis::Rate: break;
            }
            return inst;
        },
        values, num_samples, seed, threads);
}

std::vector<CurvePoint> sweep_with(const std::function<SystemInstance(double)>& instance_for,
                                   std::span<const double> values, long long num_samples, std::uint64_t seed,
                                   int threads) {
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    std::vector<CurvePoint> curve(values.size());
    parallel_for(values.size(), threads, [&](std::size_t i) {
        const std::uint64_t point_seed = splitmix64(seed ^ splitmix64(i + 1));
        curve[i] = {values[i], run(instance_for(values[i]), num_samples, point_seed)};
    });
    return curve;
}

}  // namespace relnc

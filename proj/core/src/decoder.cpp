#include "relnc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnc {

namespace {

std::vector<double> exp_normalized(std::span<const double> logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logs) m = std::max(m, v);
    std::vector<double> out(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) out[i] = std::exp(logs[i] - m);
    return out;
}

}  // namespace

double LinkSnrs::sd(int s, int d) const {
    const auto it = sd_overrides.find({s, d});
    return it == sd_overrides.end() ? sd_db : it->second;
}

double LinkSnrs::sr(int s) const {
    const auto it = sr_overrides.find(s);
    return it == sr_overrides.end() ? sr_db : it->second;
}

double LinkSnrs::rd(int d) const {
    const auto it = rd_overrides.find(d);
    return it == rd_overrides.end() ? rd_db : it->second;
}

DecoderContext::DecoderContext(NetworkTopology topology, std::vector<ScalarQuantizer> quantizers, TableCode code,
                               LinkSnrs snrs)
    : topology_(std::move(topology)), quantizers_(std::move(quantizers)), code_(std::move(code)), snrs_(snrs) {
    if (auto err = topology_.validate()) throw std::invalid_argument("DecoderContext: " + *err);
    if (auto err = code_.validate()) throw std::invalid_argument("DecoderContext: " + *err);
    const int n = topology_.num_sources();
    const int m = topology_.num_destinations();
    if (static_cast<int>(quantizers_.size()) != n)
        throw std::invalid_argument("DecoderContext: one quantizer per source required");
    if (static_cast<int>(code_.source_rates.size()) != n)
        throw std::invalid_argument("DecoderContext: code arity does not match topology");
    for (int s = 0; s < n; ++s) {
        if (quantizers_[static_cast<std::size_t>(s)].rate() != code_.source_rates[static_cast<std::size_t>(s)])
            throw std::invalid_argument("DecoderContext: quantizer rate does not match code alphabet");
    }

    full_grid_ = code_.grid();
    const int relay_levels = 1 << code_.relay_rate;

    // Source-relay equivalent channels, marginals and relay decisions.
    relay_equivalent_.reserve(static_cast<std::size_t>(n));
    relay_marginal_.resize(static_cast<std::size_t>(n));
    relay_decision_.resize(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        const auto& q = quantizers_[static_cast<std::size_t>(s)];
        relay_equivalent_.push_back(equivalent_relay_channel(sr_link(s), q.priors()));
        relay_decision_[static_cast<std::size_t>(s)] = map_decision_table(sr_link(s), q.priors());
        const auto& eq = relay_equivalent_.back();
        auto& marg = relay_marginal_[static_cast<std::size_t>(s)];
        marg.assign(static_cast<std::size_t>(eq.out_size()), 0.0);
        for (int i = 0; i < eq.in_size(); ++i)
            for (int j = 0; j < eq.out_size(); ++j) marg[static_cast<std::size_t>(j)] += q.priors()[static_cast<std::size_t>(i)] * eq(i, j);
    }

    // Hard matrices of destination links.
    sd_hard_.resize(static_cast<std::size_t>(m));
    rd_hard_.reserve(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
        for (int s : topology_.decode_set(d)) sd_hard_[static_cast<std::size_t>(d)].push_back(hard_matrix(sd_link(s, d)));
        rd_hard_.push_back(hard_matrix(rd_link(d)));
    }

    // Full-grid joint prior.
    full_joint_priors_.resize(full_grid_.size());
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (std::size_t flat = 0; flat < full_grid_.size(); ++flat) {
        full_grid_.unflatten(flat, idx);
        double p = 1.0;
        for (int s = 0; s < n; ++s) p *= quantizers_[static_cast<std::size_t>(s)].priors()[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
        full_joint_priors_[flat] = p;
    }

    // Preimage centroids and masses.
    preimage_mass_.assign(static_cast<std::size_t>(relay_levels), 0.0);
    std::vector<std::vector<double>> weighted(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(relay_levels), 0.0));
    for (std::size_t flat = 0; flat < full_grid_.size(); ++flat) {
        full_grid_.unflatten(flat, idx);
        const int ir = code_.table[flat];
        const double p = full_joint_priors_[flat];
        preimage_mass_[static_cast<std::size_t>(ir)] += p;
        for (int s = 0; s < n; ++s)
            weighted[static_cast<std::size_t>(s)][static_cast<std::size_t>(ir)] +=
                p * quantizers_[static_cast<std::size_t>(s)].codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
    }
    preimage_centroid_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(relay_levels), 0.0));
    for (int s = 0; s < n; ++s)
        for (int r = 0; r < relay_levels; ++r)
            if (preimage_mass_[static_cast<std::size_t>(r)] > 0.0)
                preimage_centroid_[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] =
                    weighted[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] / preimage_mass_[static_cast<std::size_t>(r)];

    // Joint priors over decode-set grids and the relay conditionals.
    joint_priors_.resize(static_cast<std::size_t>(m));
    relay_conditional_.resize(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
        const auto& sd_set = topology_.decode_set(d);
        std::vector<int> dims;
        dims.reserve(sd_set.size());
        for (int s : sd_set) dims.push_back(1 << code_.source_rates[static_cast<std::size_t>(s)]);
        RelayConditional rc;
        rc.rows = IndexGrid(dims);
        rc.relay_levels = relay_levels;
        rc.p.assign(rc.rows.size() * static_cast<std::size_t>(relay_levels), 0.0);

        auto& jp = joint_priors_[static_cast<std::size_t>(d)];
        jp.resize(rc.rows.size());
        std::vector<int> row_idx(sd_set.size());
        for (std::size_t row = 0; row < rc.rows.size(); ++row) {
            rc.rows.unflatten(row, row_idx);
            double p = 1.0;
            for (std::size_t k = 0; k < sd_set.size(); ++k)
                p *= quantizers_[static_cast<std::size_t>(sd_set[k])].priors()[static_cast<std::size_t>(row_idx[k])];
            jp[row] = p;

            // P(relay index | row) via the equivalent channels of decoded
            // sources and the marginals of the complement.
            for (std::size_t flat = 0; flat < full_grid_.size(); ++flat) {
                full_grid_.unflatten(flat, idx);
                double w = 1.0;
                std::size_t k = 0;
                for (int s = 0; s < n; ++s) {
                    if (k < sd_set.size() && sd_set[k] == s) {
                        w *= relay_equivalent_[static_cast<std::size_t>(s)](row_idx[k], idx[static_cast<std::size_t>(s)]);
                        ++k;
                    } else {
                        w *= relay_marginal_[static_cast<std::size_t>(s)][static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
                    }
                }
                rc.p[row * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(code_.table[flat])] += w;
            }
        }
        relay_conditional_[static_cast<std::size_t>(d)] = std::move(rc);
    }
}

namespace {

// Shared weighting core of the full estimator: per-source likelihood
// vectors (linear domain, any common scale) plus a relay likelihood vector.
std::vector<double> mmse_weighted(const DecoderContext& ctx, int d,
                                  std::span<const std::vector<double>> source_lik,
                                  std::span<const double> relay_lik) {
    const auto& sd_set = ctx.topology().decode_set(d);
    const auto& rc = ctx.relay_conditional(d);
    const auto jp = ctx.joint_priors(d);
    const int relay_levels = rc.relay_levels;

    std::vector<double> num(sd_set.size(), 0.0);
    double den = 0.0;
    std::vector<int> row_idx(sd_set.size());
    for (std::size_t row = 0; row < rc.rows.size(); ++row) {
        rc.rows.unflatten(row, row_idx);
        double w = jp[row];
        for (std::size_t k = 0; k < sd_set.size(); ++k) w *= source_lik[k][static_cast<std::size_t>(row_idx[k])];
        if (w == 0.0) continue;
        double relay_factor = 0.0;
        for (int r = 0; r < relay_levels; ++r) relay_factor += relay_lik[static_cast<std::size_t>(r)] * rc.at(row, r);
        w *= relay_factor;
        if (w == 0.0) continue;
        den += w;
        for (std::size_t k = 0; k < sd_set.size(); ++k)
            num[k] += w * ctx.quantizer(sd_set[k]).codebook()[static_cast<std::size_t>(row_idx[k])];
    }
    if (den <= 0.0) return std::vector<double>(sd_set.size(), 0.0);  // prior mean
    for (double& v : num) v /= den;
    return num;
}

}  // namespace

std::vector<double> mmse_full(const DecoderContext& ctx, int d, std::span<const std::vector<double>> y_sources,
                              std::span<const double> y_relay) {
    const auto& sd_set = ctx.topology().decode_set(d);
    if (y_sources.size() != sd_set.size()) throw std::invalid_argument("mmse_full: one observation per decoded source");
    std::vector<std::vector<double>> lik(sd_set.size());
    for (std::size_t k = 0; k < sd_set.size(); ++k) {
        const AwgnBpskLink link = ctx.sd_link(sd_set[k], d);
        std::vector<double> logs(static_cast<std::size_t>(1) << link.bits);
        log_soft_likelihoods(link, y_sources[k], logs);
        lik[k] = exp_normalized(logs);
    }
    const AwgnBpskLink rlink = ctx.rd_link(d);
    std::vector<double> rlogs(static_cast<std::size_t>(1) << rlink.bits);
    log_soft_likelihoods(rlink, y_relay, rlogs);
    const std::vector<double> rlik = exp_normalized(rlogs);
    return mmse_weighted(ctx, d, lik, rlik);
}

std::vector<double> mmse_full_hard(const DecoderContext& ctx, int d, std::span<const int> v_sources, int v_relay) {
    const auto& sd_set = ctx.topology().decode_set(d);
    if (v_sources.size() != sd_set.size()) throw std::invalid_argument("mmse_full_hard: one observation per decoded source");
    std::vector<std::vector<double>> lik(sd_set.size());
    for (std::size_t k = 0; k < sd_set.size(); ++k) {
        const auto& w = ctx.sd_hard(d, static_cast<int>(k));
        lik[k].resize(static_cast<std::size_t>(w.in_size()));
        for (int i = 0; i < w.in_size(); ++i) lik[k][static_cast<std::size_t>(i)] = w(i, v_sources[k]);
    }
    const auto& wr = ctx.rd_hard(d);
    std::vector<double> rlik(static_cast<std::size_t>(wr.in_size()));
    for (int r = 0; r < wr.in_size(); ++r) rlik[static_cast<std::size_t>(r)] = wr(r, v_relay);
    return mmse_weighted(ctx, d, lik, rlik);
}

namespace {

ReducedEstimate mmse_c1_core(const DecoderContext& ctx, int d, std::span<const std::vector<double>> source_lik,
                               int relay_index) {
    const auto& sd_set = ctx.topology().decode_set(d);
    const auto& grid = ctx.full_grid();
    const auto priors = ctx.full_joint_priors();
    const int n = ctx.topology().num_sources();

    ReducedEstimate out;
    out.estimates.assign(sd_set.size(), 0.0);
    if (ctx.preimage_mass()[static_cast<std::size_t>(relay_index)] <= 0.0) {
        out.unreachable_relay_index = true;
        return out;
    }

    std::vector<double> num(sd_set.size(), 0.0);
    double den = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        if (ctx.code().table[flat] != relay_index) continue;
        grid.unflatten(flat, idx);
        double w = priors[flat];
        for (std::size_t k = 0; k < sd_set.size(); ++k)
            w *= source_lik[k][static_cast<std::size_t>(idx[static_cast<std::size_t>(sd_set[k])])];
        if (w == 0.0) continue;
        den += w;
        for (std::size_t k = 0; k < sd_set.size(); ++k)
            num[k] += w * ctx.quantizer(sd_set[k]).codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(sd_set[k])])];
    }
    if (den > 0.0)
        for (std::size_t k = 0; k < sd_set.size(); ++k) out.estimates[k] = num[k] / den;
    return out;
}

}  // namespace

ReducedEstimate mmse_c1(const DecoderContext& ctx, int d, std::span<const std::vector<double>> y_sources,
                          int relay_index) {
    const auto& sd_set = ctx.topology().decode_set(d);
    if (y_sources.size() != sd_set.size()) throw std::invalid_argument("mmse_c1: one observation per decoded source");
    std::vector<std::vector<double>> lik(sd_set.size());
    for (std::size_t k = 0; k < sd_set.size(); ++k) {
        const AwgnBpskLink link = ctx.sd_link(sd_set[k], d);
        std::vector<double> logs(static_cast<std::size_t>(1) << link.bits);
        log_soft_likelihoods(link, y_sources[k], logs);
        lik[k] = exp_normalized(logs);
    }
    return mmse_c1_core(ctx, d, lik, relay_index);
}

ReducedEstimate mmse_c1_hard(const DecoderContext& ctx, int d, std::span<const int> v_sources, int relay_index) {
    const auto& sd_set = ctx.topology().decode_set(d);
    if (v_sources.size() != sd_set.size()) throw std::invalid_argument("mmse_c1_hard: one observation per decoded source");
    std::vector<std::vector<double>> lik(sd_set.size());
    for (std::size_t k = 0; k < sd_set.size(); ++k) {
        const auto& w = ctx.sd_hard(d, static_cast<int>(k));
        lik[k].resize(static_cast<std::size_t>(w.in_size()));
        for (int i = 0; i < w.in_size(); ++i) lik[k][static_cast<std::size_t>(i)] = w(i, v_sources[k]);
    }
    return mmse_c1_core(ctx, d, lik, relay_index);
}

ReducedEstimate mmse_c2(const DecoderContext& ctx, int relay_index) {
    const int n = ctx.topology().num_sources();
    ReducedEstimate out;
    out.estimates.resize(static_cast<std::size_t>(n));
    out.unreachable_relay_index = ctx.preimage_mass()[static_cast<std::size_t>(relay_index)] <= 0.0;
    for (int s = 0; s < n; ++s) out.estimates[static_cast<std::size_t>(s)] = ctx.preimage_centroid(s)[static_cast<std::size_t>(relay_index)];
    return out;
}

}  // namespace relnc

#include "relnc/distortion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnc {

namespace {

std::vector<int> obs_dims(const DecoderContext& ctx, int d) {
    std::vector<int> dims;
    for (int s : ctx.topology().decode_set(d)) dims.push_back(1 << ctx.code().source_rates[static_cast<std::size_t>(s)]);
    return dims;
}

std::vector<DistortionReport::Path> network_c4(const DecoderContext& ctx) {
    const auto& grid = ctx.full_grid();
    const int n = ctx.topology().num_sources();
    std::vector<double> per_source(static_cast<std::size_t>(n), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        grid.unflatten(flat, idx);
        const double p = ctx.full_joint_priors()[flat];
        const int ir = ctx.code().table[flat];
        for (int s = 0; s < n; ++s) {
            const double c = ctx.quantizer(s).codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
            const double diff = c - ctx.preimage_centroid(s)[static_cast<std::size_t>(ir)];
            per_source[static_cast<std::size_t>(s)] += p * diff * diff;
        }
    }
    std::vector<DistortionReport::Path> paths;
    for (int d = 0; d < ctx.topology().num_destinations(); ++d)
        for (int s : ctx.topology().decode_set(d)) paths.push_back({d, s, per_source[static_cast<std::size_t>(s)], 0.0});
    return paths;
}

std::vector<DistortionReport::Path> network_c3(const DecoderContext& ctx) {
    const auto& grid = ctx.full_grid();
    const int n = ctx.topology().num_sources();
    const int relay_levels = 1 << ctx.code().relay_rate;
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<DistortionReport::Path> paths;

    for (int d = 0; d < ctx.topology().num_destinations(); ++d) {
        const auto& sd_set = ctx.topology().decode_set(d);
        const std::size_t nk = sd_set.size();
        const IndexGrid vgrid{obs_dims(ctx, d)};
        std::vector<int> vidx(nk);

        // Conditional-mean tables given (observation, relay index).
        std::vector<double> den(vgrid.size() * static_cast<std::size_t>(relay_levels), 0.0);
        std::vector<std::vector<double>> num(nk, den);
        for (std::size_t flat = 0; flat < grid.size(); ++flat) {
            grid.unflatten(flat, idx);
            const double p = ctx.full_joint_priors()[flat];
            const int ir = ctx.code().table[flat];
            for (std::size_t v = 0; v < vgrid.size(); ++v) {
                vgrid.unflatten(v, vidx);
                double base = p;
                for (std::size_t k = 0; k < nk; ++k)
                    base *= ctx.sd_hard(d, static_cast<int>(k))(idx[static_cast<std::size_t>(sd_set[k])], vidx[k]);
                const std::size_t cell = v * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(ir);
                den[cell] += base;
                for (std::size_t k = 0; k < nk; ++k)
                    num[k][cell] += base * ctx.quantizer(sd_set[k]).codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(sd_set[k])])];
            }
        }

        std::vector<double> acc(nk, 0.0);
        for (std::size_t flat = 0; flat < grid.size(); ++flat) {
            grid.unflatten(flat, idx);
            const double p = ctx.full_joint_priors()[flat];
            const int ir = ctx.code().table[flat];
            for (std::size_t v = 0; v < vgrid.size(); ++v) {
                vgrid.unflatten(v, vidx);
                double base = p;
                for (std::size_t k = 0; k < nk; ++k)
                    base *= ctx.sd_hard(d, static_cast<int>(k))(idx[static_cast<std::size_t>(sd_set[k])], vidx[k]);
                if (base == 0.0) continue;
                const std::size_t cell = v * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(ir);
                for (std::size_t k = 0; k < nk; ++k) {
                    const double g = den[cell] > 0.0 ? num[k][cell] / den[cell] : 0.0;
                    const double diff =
                        ctx.quantizer(sd_set[k]).codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(sd_set[k])])] - g;
                    acc[k] += base * diff * diff;
                }
            }
        }
        for (std::size_t k = 0; k < nk; ++k) paths.push_back({d, sd_set[k], acc[k], 0.0});
    }
    return paths;
}

std::vector<DistortionReport::Path> network_full(const DecoderContext& ctx) {
    const int relay_levels = 1 << ctx.code().relay_rate;
    std::vector<DistortionReport::Path> paths;

    for (int d = 0; d < ctx.topology().num_destinations(); ++d) {
        const auto& sd_set = ctx.topology().decode_set(d);
        const std::size_t nk = sd_set.size();
        const auto& rc = ctx.relay_conditional(d);
        const auto jp = ctx.joint_priors(d);
        const IndexGrid vgrid{obs_dims(ctx, d)};
        const auto& rdw = ctx.rd_hard(d);

        // T(row, vr) = sum_r P(vr | r) P(r | row)
        std::vector<double> t(rc.rows.size() * static_cast<std::size_t>(relay_levels), 0.0);
        for (std::size_t row = 0; row < rc.rows.size(); ++row)
            for (int vr = 0; vr < relay_levels; ++vr) {
                double acc = 0.0;
                for (int r = 0; r < relay_levels; ++r) acc += rdw(r, vr) * rc.at(row, r);
                t[row * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr)] = acc;
            }

        const std::size_t obs_cells = vgrid.size() * static_cast<std::size_t>(relay_levels);
        std::vector<double> den(obs_cells, 0.0);
        std::vector<std::vector<double>> num(nk, den);
        std::vector<int> ridx(nk), vidx(nk);
        for (std::size_t row = 0; row < rc.rows.size(); ++row) {
            rc.rows.unflatten(row, ridx);
            for (std::size_t v = 0; v < vgrid.size(); ++v) {
                vgrid.unflatten(v, vidx);
                double base = jp[row];
                for (std::size_t k = 0; k < nk; ++k) base *= ctx.sd_hard(d, static_cast<int>(k))(ridx[k], vidx[k]);
                if (base == 0.0) continue;
                for (int vr = 0; vr < relay_levels; ++vr) {
                    const double w = base * t[row * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr)];
                    const std::size_t cell = v * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr);
                    den[cell] += w;
                    for (std::size_t k = 0; k < nk; ++k)
                        num[k][cell] += w * ctx.quantizer(sd_set[k]).codebook()[static_cast<std::size_t>(ridx[k])];
                }
            }
        }

        std::vector<double> acc(nk, 0.0);
        for (std::size_t row = 0; row < rc.rows.size(); ++row) {
            rc.rows.unflatten(row, ridx);
            for (std::size_t v = 0; v < vgrid.size(); ++v) {
                vgrid.unflatten(v, vidx);
                double base = jp[row];
                for (std::size_t k = 0; k < nk; ++k) base *= ctx.sd_hard(d, static_cast<int>(k))(ridx[k], vidx[k]);
                if (base == 0.0) continue;
                for (int vr = 0; vr < relay_levels; ++vr) {
                    const double w = base * t[row * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr)];
                    if (w == 0.0) continue;
                    const std::size_t cell = v * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr);
                    for (std::size_t k = 0; k < nk; ++k) {
                        const double g = den[cell] > 0.0 ? num[k][cell] / den[cell] : 0.0;
                        const double diff = ctx.quantizer(sd_set[k]).codebook()[static_cast<std::size_t>(ridx[k])] - g;
                        acc[k] += w * diff * diff;
                    }
                }
            }
        }
        for (std::size_t k = 0; k < nk; ++k) paths.push_back({d, sd_set[k], acc[k], 0.0});
    }
    return paths;
}

std::vector<DistortionReport::Path> network_paths(const DecoderContext& ctx, CostVariant variant) {
    switch (variant) {
        case CostVariant::C4: return network_c4(ctx);
        case CostVariant::C3: return network_c3(ctx);
        case CostVariant::Full: return network_full(ctx);
    }
    throw std::logic_error("unknown cost variant");
}

}  // namespace

double network_distortion(const DecoderContext& ctx, CostVariant variant) {
    double acc = 0.0;
    for (const auto& path : network_paths(ctx, variant)) acc += path.network;
    return acc / static_cast<double>(ctx.topology().decode_set_weight());
}

DistortionReport total_distortion(const DecoderContext& ctx, CostVariant variant) {
    DistortionReport report;
    report.breakdown = network_paths(ctx, variant);
    double net = 0.0;
    for (auto& path : report.breakdown) {
        path.total = path.network + ctx.quantizer(path.source).total_distortion();
        net += path.network;
    }
    report.d_network = net / static_cast<double>(ctx.topology().decode_set_weight());
    report.d_sources = source_distortion(ctx.topology(), ctx.quantizers());
    report.d_total = report.d_sources + report.d_network;
    return report;
}

namespace {

// Shared enumeration of the direct hard-pipeline averages; integrand picks the
// per-cell source integral given the estimate.
template <typename CellIntegral>
double brute_force_accumulate(const DecoderContext& ctx, CellIntegral&& cell_integral) {
    const auto& grid = ctx.full_grid();
    const int n = ctx.topology().num_sources();
    const int relay_levels = 1 << ctx.code().relay_rate;

    // Enumeration size guard.
    double terms = 0.0;
    for (int d = 0; d < ctx.topology().num_destinations(); ++d) {
        const IndexGrid vgrid{obs_dims(ctx, d)};
        terms += static_cast<double>(grid.size()) * static_cast<double>(grid.size()) *
                 static_cast<double>(vgrid.size()) * static_cast<double>(relay_levels);
    }
    if (terms > 1e7) throw std::invalid_argument("brute_force_distortion: instance too large to enumerate");

    // Cell moments recomputed from the quantizer boundaries.
    std::vector<std::vector<GaussianCellMoments>> moments(static_cast<std::size_t>(n));
    const double inf = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        const auto& q = ctx.quantizer(s);
        for (int i = 0; i < q.levels(); ++i) {
            const double lo = (i == 0) ? -inf : q.boundaries()[static_cast<std::size_t>(i - 1)];
            const double hi = (i == q.levels() - 1) ? inf : q.boundaries()[static_cast<std::size_t>(i)];
            moments[static_cast<std::size_t>(s)].push_back(gaussian_cell_moments(q.variance(), lo, hi));
        }
    }

    double acc = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n)), hidx(static_cast<std::size_t>(n));
    for (int d = 0; d < ctx.topology().num_destinations(); ++d) {
        const auto& sd_set = ctx.topology().decode_set(d);
        const std::size_t nk = sd_set.size();
        const IndexGrid vgrid{obs_dims(ctx, d)};
        std::vector<int> vidx(nk);
        const auto& rdw = ctx.rd_hard(d);

        // Destination estimates per hard observation tuple.
        std::vector<std::vector<double>> est(vgrid.size() * static_cast<std::size_t>(relay_levels));
        std::vector<int> vs(nk);
        for (std::size_t v = 0; v < vgrid.size(); ++v) {
            vgrid.unflatten(v, vs);
            for (int vr = 0; vr < relay_levels; ++vr)
                est[v * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr)] =
                    mmse_full_hard(ctx, d, vs, vr);
        }

        for (std::size_t flat = 0; flat < grid.size(); ++flat) {
            grid.unflatten(flat, idx);
            const double joint_p = ctx.full_joint_priors()[flat];
            for (std::size_t hflat = 0; hflat < grid.size(); ++hflat) {
                grid.unflatten(hflat, hidx);
                double qw = 1.0;
                for (int s = 0; s < n; ++s)
                    qw *= ctx.relay_equivalent(s)(idx[static_cast<std::size_t>(s)], hidx[static_cast<std::size_t>(s)]);
                if (qw == 0.0) continue;
                const int ir = ctx.code().table[hflat];
                for (std::size_t v = 0; v < vgrid.size(); ++v) {
                    vgrid.unflatten(v, vidx);
                    double wv = qw;
                    for (std::size_t k = 0; k < nk; ++k)
                        wv *= ctx.sd_hard(d, static_cast<int>(k))(idx[static_cast<std::size_t>(sd_set[k])], vidx[k]);
                    if (wv == 0.0) continue;
                    for (int vr = 0; vr < relay_levels; ++vr) {
                        const double w = wv * rdw(ir, vr);
                        if (w == 0.0) continue;
                        const auto& xhat = est[v * static_cast<std::size_t>(relay_levels) + static_cast<std::size_t>(vr)];
                        for (std::size_t k = 0; k < nk; ++k) {
                            const int s = sd_set[k];
                            const int cell = idx[static_cast<std::size_t>(s)];
                            const auto& mom = moments[static_cast<std::size_t>(s)][static_cast<std::size_t>(cell)];
                            const double rest_p = joint_p / ctx.quantizer(s).priors()[static_cast<std::size_t>(cell)];
                            acc += rest_p * w * cell_integral(s, cell, mom, xhat[k]);
                        }
                    }
                }
            }
        }
    }
    return acc / static_cast<double>(ctx.topology().decode_set_weight());
}

}  // namespace

double brute_force_distortion(const DecoderContext& ctx) {
    return brute_force_accumulate(ctx, [](int, int, const GaussianCellMoments& mom, double xhat) {
        return mom.m2 - 2.0 * xhat * mom.m1 + xhat * xhat * mom.p;
    });
}

double brute_force_cross_term(const DecoderContext& ctx) {
    return brute_force_accumulate(ctx, [&](int s, int cell, const GaussianCellMoments& mom, double xhat) {
        const double c = ctx.quantizer(s).codebook()[static_cast<std::size_t>(cell)];
        return 2.0 * (mom.m1 - c * mom.p) * (c - xhat);
    });
}

double network_distortion_for(const DesignSetup& setup, const TableCode& code, CostVariant variant) {
    DecoderContext ctx(setup.topology, setup.quantizers, code, setup.snrs);
    return network_distortion(ctx, variant);
}

NetworkDistortionEvaluator::NetworkDistortionEvaluator(const DesignSetup& setup, CostVariant variant,
                                                       TableCode initial)
    : topology_(setup.topology),
      quantizers_(setup.quantizers),
      snrs_(setup.snrs),
      variant_(variant),
      code_(std::move(initial)),
      grid_(code_.grid()),
      relay_levels_(1 << code_.relay_rate) {
    if (auto err = code_.validate()) throw std::invalid_argument("NetworkDistortionEvaluator: " + *err);
    const int n = topology_.num_sources();
    if (static_cast<int>(quantizers_.size()) != n || static_cast<int>(code_.source_rates.size()) != n)
        throw std::invalid_argument("NetworkDistortionEvaluator: arity mismatch");

    weight_norm_ = static_cast<double>(topology_.decode_set_weight());
    source_weight_.resize(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) source_weight_[static_cast<std::size_t>(s)] = static_cast<double>(topology_.dest_set(s).size());

    cell_prior_.resize(grid_.size());
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
        grid_.unflatten(flat, idx);
        double p = 1.0;
        for (int s = 0; s < n; ++s) p *= quantizers_[static_cast<std::size_t>(s)].priors()[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
        cell_prior_[flat] = p;
    }

    if (variant_ == CostVariant::C3) {
        dests_.resize(static_cast<std::size_t>(topology_.num_destinations()));
        for (int d = 0; d < topology_.num_destinations(); ++d) {
            auto& dest = dests_[static_cast<std::size_t>(d)];
            dest.sources = topology_.decode_set(d);
            std::vector<int> dims;
            for (int s : dest.sources) {
                dims.push_back(1 << code_.source_rates[static_cast<std::size_t>(s)]);
                dest.wmats.push_back(hard_matrix({snrs_.sd(s, d), code_.source_rates[static_cast<std::size_t>(s)]}));
            }
            dest.vgrid = IndexGrid(std::move(dims));
        }
    }
    rebuild();
}

void NetworkDistortionEvaluator::rebuild() {
    const int n = topology_.num_sources();
    std::vector<int> idx(static_cast<std::size_t>(n));

    if (variant_ == CostVariant::Full) {
        cost_ = network_distortion_for({topology_, quantizers_, snrs_}, code_, CostVariant::Full);
        return;
    }

    if (variant_ == CostVariant::C4) {
        class_mass_.assign(static_cast<std::size_t>(relay_levels_), 0.0);
        class_wsum_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(relay_levels_), 0.0));
        class_wsq_ = class_wsum_;
        for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
            grid_.unflatten(flat, idx);
            const double p = cell_prior_[flat];
            const int r = code_.table[flat];
            class_mass_[static_cast<std::size_t>(r)] += p;
            for (int s = 0; s < n; ++s) {
                const double c = quantizers_[static_cast<std::size_t>(s)].codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
                class_wsum_[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] += p * c;
                class_wsq_[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] += p * c * c;
            }
        }
        class_term_.resize(static_cast<std::size_t>(relay_levels_));
        cost_ = 0.0;
        for (int r = 0; r < relay_levels_; ++r) {
            class_term_[static_cast<std::size_t>(r)] = class_term_c4(r);
            cost_ += class_term_[static_cast<std::size_t>(r)];
        }
        cost_ /= weight_norm_;
        return;
    }

    // C3
    class_members_.assign(static_cast<std::size_t>(relay_levels_), {});
    member_pos_.assign(grid_.size(), 0);
    for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
        const int r = code_.table[flat];
        member_pos_[flat] = class_members_[static_cast<std::size_t>(r)].size();
        class_members_[static_cast<std::size_t>(r)].push_back(flat);
    }
    for (auto& dest : dests_) {
        const std::size_t cells = dest.vgrid.size() * static_cast<std::size_t>(relay_levels_);
        dest.den.assign(cells, 0.0);
        dest.num.assign(dest.sources.size(), std::vector<double>(cells, 0.0));
        std::vector<int> vidx(dest.sources.size());
        for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
            grid_.unflatten(flat, idx);
            const int r = code_.table[flat];
            for (std::size_t v = 0; v < dest.vgrid.size(); ++v) {
                dest.vgrid.unflatten(v, vidx);
                double base = cell_prior_[flat];
                for (std::size_t k = 0; k < dest.sources.size(); ++k)
                    base *= dest.wmats[k](idx[static_cast<std::size_t>(dest.sources[k])], vidx[k]);
                const std::size_t cell = v * static_cast<std::size_t>(relay_levels_) + static_cast<std::size_t>(r);
                dest.den[cell] += base;
                for (std::size_t k = 0; k < dest.sources.size(); ++k)
                    dest.num[k][cell] +=
                        base * quantizers_[static_cast<std::size_t>(dest.sources[k])].codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(dest.sources[k])])];
            }
        }
        dest.contrib.resize(static_cast<std::size_t>(relay_levels_));
        for (int r = 0; r < relay_levels_; ++r) dest.contrib[static_cast<std::size_t>(r)] = class_contrib_c3(dest, r);
    }
    cost_ = 0.0;
    for (const auto& dest : dests_)
        for (double c : dest.contrib) cost_ += c;
    cost_ /= weight_norm_;
}

double NetworkDistortionEvaluator::class_term_c4(int r) const {
    const double mass = class_mass_[static_cast<std::size_t>(r)];
    if (mass <= 0.0) return 0.0;
    double term = 0.0;
    for (int s = 0; s < topology_.num_sources(); ++s) {
        const double a = class_wsum_[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)];
        const double b = class_wsq_[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)];
        term += source_weight_[static_cast<std::size_t>(s)] * (b - a * a / mass);
    }
    return term;
}

double NetworkDistortionEvaluator::class_contrib_c3(const DestState& dest, int r) const {
    const auto& members = class_members_[static_cast<std::size_t>(r)];
    if (members.empty()) return 0.0;
    const std::size_t nk = dest.sources.size();
    std::vector<int> idx(static_cast<std::size_t>(topology_.num_sources())), vidx(nk);
    double contrib = 0.0;
    for (std::size_t flat : members) {
        grid_.unflatten(flat, idx);
        for (std::size_t v = 0; v < dest.vgrid.size(); ++v) {
            dest.vgrid.unflatten(v, vidx);
            double base = cell_prior_[flat];
            for (std::size_t k = 0; k < nk; ++k)
                base *= dest.wmats[k](idx[static_cast<std::size_t>(dest.sources[k])], vidx[k]);
            if (base == 0.0) continue;
            const std::size_t cell = v * static_cast<std::size_t>(relay_levels_) + static_cast<std::size_t>(r);
            for (std::size_t k = 0; k < nk; ++k) {
                const double g = dest.den[cell] > 0.0 ? dest.num[k][cell] / dest.den[cell] : 0.0;
                const double diff =
                    quantizers_[static_cast<std::size_t>(dest.sources[k])].codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(dest.sources[k])])] - g;
                contrib += base * diff * diff;
            }
        }
    }
    return contrib;
}

double NetworkDistortionEvaluator::cost_with(std::size_t flat, int value) {
    const int old = code_.table[flat];
    if (value == old) return cost_;
    apply(flat, value);
    const double candidate = cost_;
    apply(flat, old);
    return candidate;
}

void NetworkDistortionEvaluator::apply(std::size_t flat, int value) {
    const int old = code_.table[flat];
    if (value == old) return;
    switch (variant_) {
        case CostVariant::C4: apply_c4(flat, value); break;
        case CostVariant::C3: apply_c3(flat, value); break;
        case CostVariant::Full:
            code_.table[flat] = value;
            cost_ = network_distortion_for({topology_, quantizers_, snrs_}, code_, CostVariant::Full);
            break;
    }
}

void NetworkDistortionEvaluator::apply_c4(std::size_t flat, int value) {
    const int n = topology_.num_sources();
    const int old = code_.table[flat];
    const double p = cell_prior_[flat];
    cost_ = cost_ * weight_norm_ - class_term_[static_cast<std::size_t>(old)] - class_term_[static_cast<std::size_t>(value)];
    class_mass_[static_cast<std::size_t>(old)] -= p;
    class_mass_[static_cast<std::size_t>(value)] += p;
    for (int s = 0; s < n; ++s) {
        const double c = quantizers_[static_cast<std::size_t>(s)].codebook()[static_cast<std::size_t>(grid_.coord(flat, s))];
        class_wsum_[static_cast<std::size_t>(s)][static_cast<std::size_t>(old)] -= p * c;
        class_wsum_[static_cast<std::size_t>(s)][static_cast<std::size_t>(value)] += p * c;
        class_wsq_[static_cast<std::size_t>(s)][static_cast<std::size_t>(old)] -= p * c * c;
        class_wsq_[static_cast<std::size_t>(s)][static_cast<std::size_t>(value)] += p * c * c;
    }
    code_.table[flat] = value;
    class_term_[static_cast<std::size_t>(old)] = class_term_c4(old);
    class_term_[static_cast<std::size_t>(value)] = class_term_c4(value);
    cost_ = (cost_ + class_term_[static_cast<std::size_t>(old)] + class_term_[static_cast<std::size_t>(value)]) / weight_norm_;
}

void NetworkDistortionEvaluator::apply_c3(std::size_t flat, int value) {
    const int n = topology_.num_sources();
    const int old = code_.table[flat];
    std::vector<int> idx(static_cast<std::size_t>(n));
    grid_.unflatten(flat, idx);

    double removed = 0.0;
    for (const auto& dest : dests_) {
        removed += dest.contrib[static_cast<std::size_t>(old)];
        removed += dest.contrib[static_cast<std::size_t>(value)];
    }

    // Move the cell's terms between the two observation buckets.
    for (auto& dest : dests_) {
        const std::size_t nk = dest.sources.size();
        std::vector<int> vidx(nk);
        for (std::size_t v = 0; v < dest.vgrid.size(); ++v) {
            dest.vgrid.unflatten(v, vidx);
            double base = cell_prior_[flat];
            for (std::size_t k = 0; k < nk; ++k)
                base *= dest.wmats[k](idx[static_cast<std::size_t>(dest.sources[k])], vidx[k]);
            const std::size_t cell_old = v * static_cast<std::size_t>(relay_levels_) + static_cast<std::size_t>(old);
            const std::size_t cell_new = v * static_cast<std::size_t>(relay_levels_) + static_cast<std::size_t>(value);
            dest.den[cell_old] -= base;
            dest.den[cell_new] += base;
            for (std::size_t k = 0; k < nk; ++k) {
                const double cv =
                    base * quantizers_[static_cast<std::size_t>(dest.sources[k])].codebook()[static_cast<std::size_t>(idx[static_cast<std::size_t>(dest.sources[k])])];
                dest.num[k][cell_old] -= cv;
                dest.num[k][cell_new] += cv;
            }
        }
    }

    // Swap-pop membership update.
    auto& old_members = class_members_[static_cast<std::size_t>(old)];
    const std::size_t pos = member_pos_[flat];
    old_members[pos] = old_members.back();
    member_pos_[old_members.back()] = pos;
    old_members.pop_back();
    auto& new_members = class_members_[static_cast<std::size_t>(value)];
    member_pos_[flat] = new_members.size();
    new_members.push_back(flat);
    code_.table[flat] = value;

    double added = 0.0;
    for (auto& dest : dests_) {
        dest.contrib[static_cast<std::size_t>(old)] = class_contrib_c3(dest, old);
        dest.contrib[static_cast<std::size_t>(value)] = class_contrib_c3(dest, value);
        added += dest.contrib[static_cast<std::size_t>(old)];
        added += dest.contrib[static_cast<std::size_t>(value)];
    }
    cost_ += (added - removed) / weight_norm_;
}

}  // namespace relnc

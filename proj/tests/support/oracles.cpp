#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnc::oracle {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// 10-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNodes[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                0.8650633666889845, 0.9739065285171717};
constexpr double kGlWeights[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                  0.1494513491505806, 0.0666713443086881};

template <typename F>
double gl_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
        acc += kGlWeights[i] * f(mid + half * kGlNodes[i]);
        acc += kGlWeights[i] * f(mid - half * kGlNodes[i]);
    }
    return acc * half;
}

template <typename F>
double integrate(F&& f, double a, double b, int panels) {
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + (b - a) * k / panels;
        const double hi = a + (b - a) * (k + 1) / panels;
        acc += gl_panel(f, lo, hi);
    }
    return acc;
}

double bsc(double p, int bits, int a, int b) {
    const int d = std::popcount(static_cast<unsigned>(a ^ b));
    return std::pow(p, d) * std::pow(1.0 - p, bits - d);
}

}  // namespace

QuadLloyd lloyd_max_quadrature(int rate, double variance) {
    const int levels = 1 << rate;
    const double sigma = std::sqrt(variance);
    const double lo_support = -10.0 * sigma, hi_support = 10.0 * sigma;
    const auto pdf = [&](double x) { return std::exp(-0.5 * x * x / variance) / (sigma * std::sqrt(2.0 * kPi)); };

    QuadLloyd q;
    q.codebook.resize(levels);
    for (int i = 0; i < levels; ++i) q.codebook[i] = sigma * (-4.0 + 8.0 * (i + 0.5) / levels);
    q.boundaries.assign(levels - 1, 0.0);

    double prev = variance;
    for (int iter = 0; iter < 200000; ++iter) {
        for (int i = 0; i + 1 < levels; ++i) q.boundaries[i] = 0.5 * (q.codebook[i] + q.codebook[i + 1]);
        double distortion = 0.0;
        for (int i = 0; i < levels; ++i) {
            const double a = i == 0 ? lo_support : q.boundaries[i - 1];
            const double b = i == levels - 1 ? hi_support : q.boundaries[i];
            const int panels = std::max(24, static_cast<int>((b - a) / sigma * 8.0));
            const double mass = integrate(pdf, a, b, panels);
            const double mean = integrate([&](double x) { return x * pdf(x); }, a, b, panels);
            q.codebook[i] = mean / mass;
            const double c = q.codebook[i];
            distortion += integrate([&](double x) { return (x - c) * (x - c) * pdf(x); }, a, b, panels);
        }
        if (iter > 0 && std::abs(prev - distortion) <= 1e-12 * distortion) {
            q.distortion = distortion;
            return q;
        }
        prev = distortion;
    }
    throw std::runtime_error("lloyd_max_quadrature did not converge");
}

double lloyd_max_grid_distortion(int rate, double variance, int grid_points) {
    const int levels = 1 << rate;
    const double sigma = std::sqrt(variance);
    std::vector<double> xs(grid_points), ws(grid_points);
    double total = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        xs[i] = -8.0 * sigma + 16.0 * sigma * (i + 0.5) / grid_points;
        ws[i] = std::exp(-0.5 * xs[i] * xs[i] / variance);
        total += ws[i];
    }
    for (double& w : ws) w /= total;

    std::vector<double> centroids(levels);
    for (int i = 0; i < levels; ++i) centroids[i] = sigma * (-4.0 + 8.0 * (i + 0.5) / levels);

    double prev = variance;
    for (int iter = 0; iter < 20000; ++iter) {
        std::vector<double> mass(levels, 0.0), mean(levels, 0.0);
        double distortion = 0.0;
        int cell = 0;
        for (int i = 0; i < grid_points; ++i) {
            while (cell + 1 < levels && xs[i] >= 0.5 * (centroids[cell] + centroids[cell + 1])) ++cell;
            mass[cell] += ws[i];
            mean[cell] += ws[i] * xs[i];
            distortion += ws[i] * (xs[i] - centroids[cell]) * (xs[i] - centroids[cell]);
        }
        for (int c = 0; c < levels; ++c)
            if (mass[c] > 0.0) centroids[c] = mean[c] / mass[c];
        if (iter > 0 && std::abs(prev - distortion) <= 1e-13) return distortion;
        prev = distortion;
    }
    return prev;
}

int gf_mul_polynomial(int x, int y, int m, int poly) {
    int acc = 0;
    while (y != 0) {
        if (y & 1) acc ^= x;
        y >>= 1;
        x <<= 1;
        if (x & (1 << m)) x ^= poly;
    }
    return acc;
}

namespace {

// Independent relay MAP decision on a hard vector, ties to smallest index.
int relay_decision(const HardInstance& inst, int s, int w) {
    const int bits = inst.code.source_rates[static_cast<std::size_t>(s)];
    const int levels = 1 << bits;
    int best = 0;
    double best_score = -1.0;
    for (int j = 0; j < levels; ++j) {
        const double score = inst.priors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] *
                             bsc(inst.p_sr[static_cast<std::size_t>(s)], bits, j, w);
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

template <typename Visit>
void enumerate_joint(const HardInstance& inst, int d, Visit&& visit) {
    // visit(I_S flat+tuple, relay index, joint channel weight to the relay)
    const IndexGrid grid = inst.code.grid();
    const int n = static_cast<int>(inst.code.source_rates.size());
    std::vector<int> idx(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    (void)d;
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        grid.unflatten(flat, idx);
        double pI = 1.0;
        for (int s = 0; s < n; ++s) pI *= inst.priors[static_cast<std::size_t>(s)][static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
        for (std::size_t wflat = 0; wflat < grid.size(); ++wflat) {
            grid.unflatten(wflat, w);
            double srw = 1.0;
            std::vector<int> decoded(static_cast<std::size_t>(n));
            for (int s = 0; s < n; ++s) {
                srw *= bsc(inst.p_sr[static_cast<std::size_t>(s)], inst.code.source_rates[static_cast<std::size_t>(s)],
                           idx[static_cast<std::size_t>(s)], w[static_cast<std::size_t>(s)]);
                decoded[static_cast<std::size_t>(s)] = relay_decision(inst, s, w[static_cast<std::size_t>(s)]);
            }
            if (srw == 0.0) continue;
            const int ir = inst.code.table[grid.flatten(decoded)];
            visit(idx, pI, srw, ir);
        }
    }
}

}  // namespace

std::vector<double> conditional_mean(const HardInstance& inst, int d, std::span<const int> v_sources, int v_relay) {
    const auto& sd_set = inst.topology.decode_set(d);
    std::vector<double> num(sd_set.size(), 0.0);
    double den = 0.0;
    enumerate_joint(inst, d, [&](const std::vector<int>& idx, double pI, double srw, int ir) {
        double wgt = pI * srw;
        for (std::size_t k = 0; k < sd_set.size(); ++k)
            wgt *= bsc(inst.p_sd[static_cast<std::size_t>(d)][k], inst.code.source_rates[static_cast<std::size_t>(sd_set[k])],
                       idx[static_cast<std::size_t>(sd_set[k])], v_sources[k]);
        wgt *= bsc(inst.p_rd[static_cast<std::size_t>(d)], inst.code.relay_rate, ir, v_relay);
        den += wgt;
        for (std::size_t k = 0; k < sd_set.size(); ++k)
            num[k] += wgt * inst.codebook[static_cast<std::size_t>(sd_set[k])][static_cast<std::size_t>(idx[static_cast<std::size_t>(sd_set[k])])];
    });
    if (den <= 0.0) return std::vector<double>(sd_set.size(), 0.0);
    for (double& v : num) v /= den;
    return num;
}

double average_distortion(const HardInstance& inst, const std::vector<std::vector<CellMoments>>& moments) {
    const int m = inst.topology.num_destinations();
    double acc = 0.0;
    for (int d = 0; d < m; ++d) {
        const auto& sd_set = inst.topology.decode_set(d);
        std::vector<int> vdims;
        for (int s : sd_set) vdims.push_back(1 << inst.code.source_rates[static_cast<std::size_t>(s)]);
        const IndexGrid vgrid(vdims);
        const int relay_obs = 1 << inst.code.relay_rate;

        // Estimates per observation tuple.
        std::vector<std::vector<double>> est(vgrid.size() * static_cast<std::size_t>(relay_obs));
        std::vector<int> vidx(sd_set.size());
        for (std::size_t v = 0; v < vgrid.size(); ++v) {
            vgrid.unflatten(v, vidx);
            for (int vr = 0; vr < relay_obs; ++vr)
                est[v * static_cast<std::size_t>(relay_obs) + static_cast<std::size_t>(vr)] =
                    conditional_mean(inst, d, vidx, vr);
        }

        enumerate_joint(inst, d, [&](const std::vector<int>& idx, double pI, double srw, int ir) {
            for (std::size_t v = 0; v < vgrid.size(); ++v) {
                vgrid.unflatten(v, vidx);
                double sdw = 1.0;
                for (std::size_t k = 0; k < sd_set.size(); ++k)
                    sdw *= bsc(inst.p_sd[static_cast<std::size_t>(d)][k],
                               inst.code.source_rates[static_cast<std::size_t>(sd_set[k])],
                               idx[static_cast<std::size_t>(sd_set[k])], vidx[k]);
                if (sdw == 0.0) continue;
                for (int vr = 0; vr < relay_obs; ++vr) {
                    const double w = srw * sdw * bsc(inst.p_rd[static_cast<std::size_t>(d)], inst.code.relay_rate, ir, vr);
                    if (w == 0.0) continue;
                    const auto& xhat = est[v * static_cast<std::size_t>(relay_obs) + static_cast<std::size_t>(vr)];
                    for (std::size_t k = 0; k < sd_set.size(); ++k) {
                        const int s = sd_set[k];
                        const int cell = idx[static_cast<std::size_t>(s)];
                        const auto& mom = moments[static_cast<std::size_t>(s)][static_cast<std::size_t>(cell)];
                        const double rest =
                            pI / inst.priors[static_cast<std::size_t>(s)][static_cast<std::size_t>(cell)];
                        acc += rest * w * (mom.m2 - 2.0 * xhat[k] * mom.m1 + xhat[k] * xhat[k] * mom.p);
                    }
                }
            }
        });
    }
    return acc / static_cast<double>(inst.topology.decode_set_weight());
}

std::vector<double> map_then_centroid(const DecoderContext& ctx, int d, std::span<const int> v_sources, int v_relay) {
    const auto& sd_set = ctx.topology().decode_set(d);
    const auto& rc = ctx.relay_conditional(d);
    const auto jp = ctx.joint_priors(d);
    const auto& rdw = ctx.rd_hard(d);

    std::vector<std::vector<double>> post(sd_set.size());
    for (std::size_t k = 0; k < sd_set.size(); ++k)
        post[k].assign(static_cast<std::size_t>(1) << ctx.quantizer(sd_set[k]).rate(), 0.0);

    std::vector<int> row_idx(sd_set.size());
    for (std::size_t row = 0; row < rc.rows.size(); ++row) {
        rc.rows.unflatten(row, row_idx);
        double w = jp[row];
        for (std::size_t k = 0; k < sd_set.size(); ++k)
            w *= ctx.sd_hard(d, static_cast<int>(k))(row_idx[k], v_sources[k]);
        double relay_factor = 0.0;
        for (int r = 0; r < rc.relay_levels; ++r) relay_factor += rdw(r, v_relay) * rc.at(row, r);
        w *= relay_factor;
        for (std::size_t k = 0; k < sd_set.size(); ++k) post[k][static_cast<std::size_t>(row_idx[k])] += w;
    }

    std::vector<double> out(sd_set.size());
    for (std::size_t k = 0; k < sd_set.size(); ++k) {
        const std::size_t arg =
            static_cast<std::size_t>(std::max_element(post[k].begin(), post[k].end()) - post[k].begin());
        out[k] = ctx.quantizer(sd_set[k]).codebook()[arg];
    }
    return out;
}

}  // namespace relnc::oracle

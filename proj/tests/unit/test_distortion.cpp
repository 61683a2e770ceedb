#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "relnc/distortion.hpp"
#include "relnc/rng.hpp"

using namespace relnc;

namespace {

constexpr double kTwoOverPi = 0.63661977236758134;

std::vector<ScalarQuantizer> quantizers_for(std::vector<int> rates) {
    std::vector<ScalarQuantizer> qs;
    for (int r : rates) qs.push_back(ScalarQuantizer::design_lloyd_max(r, 1.0));
    return qs;
}

TableCode random_code(std::vector<int> rates, int relay_rate, std::mt19937_64& rng) {
    TableCode code;
    code.source_rates = std::move(rates);
    code.relay_rate = relay_rate;
    code.table.resize(code.grid().size());
    std::uniform_int_distribution<int> entry(0, (1 << relay_rate) - 1);
    for (auto& e : code.table) e = entry(rng);
    return code;
}

struct RandomInstance {
    NetworkTopology topology;
    std::vector<ScalarQuantizer> quantizers;
    TableCode code;
    LinkSnrs snrs;
};

RandomInstance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> rate(1, 2), topo(0, 2);
    std::uniform_real_distribution<double> snr(-5.0, 14.0);
    const int pick = topo(rng);
    NetworkTopology topology = pick == 0   ? NetworkTopology::omarc(2)
                               : pick == 1 ? NetworkTopology::omcbr(2)
                                           : NetworkTopology::otnbr23();
    std::vector<int> rates{rate(rng), rate(rng)};
    auto qs = quantizers_for(rates);
    auto code = random_code(rates, rate(rng), rng);
    LinkSnrs snrs{snr(rng), snr(rng), snr(rng), {}, {}, {}};
    return {std::move(topology), std::move(qs), std::move(code), snrs};
}

oracle::HardInstance to_oracle(const DecoderContext& ctx) {
    oracle::HardInstance inst{ctx.topology(), {}, {}, ctx.code(), {}, {}, {}};
    for (int s = 0; s < ctx.topology().num_sources(); ++s) {
        inst.priors.emplace_back(ctx.quantizer(s).priors().begin(), ctx.quantizer(s).priors().end());
        inst.codebook.emplace_back(ctx.quantizer(s).codebook().begin(), ctx.quantizer(s).codebook().end());
        inst.p_sr.push_back(bit_error_prob(ctx.snrs().sr(s)));
    }
    for (int d = 0; d < ctx.topology().num_destinations(); ++d) {
        std::vector<double> ps;
        for (int s : ctx.topology().decode_set(d)) ps.push_back(bit_error_prob(ctx.snrs().sd(s, d)));
        inst.p_sd.push_back(ps);
        inst.p_rd.push_back(bit_error_prob(ctx.snrs().rd(d)));
    }
    return inst;
}

}  // namespace

TEST_CASE("distortion decomposes into source and network parts") {
    auto rng = make_rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_instance(rng);
        DecoderContext ctx(inst.topology, inst.quantizers, inst.code, inst.snrs);
        const double direct = brute_force_distortion(ctx);
        const auto report = total_distortion(ctx, CostVariant::Full);
        CHECK(std::abs(direct - report.d_total) < 1e-9);
        CHECK(std::abs(report.d_total - report.d_sources - report.d_network) < 1e-12);
        CHECK(std::abs(brute_force_cross_term(ctx)) < 1e-12);
        CHECK(report.d_network >= -1e-15);
    }
}

TEST_CASE("the direct average matches a fully independent enumeration") {
    auto rng = make_rng(77);
    for (int trial = 0; trial < 4; ++trial) {
        const auto inst = random_instance(rng);
        DecoderContext ctx(inst.topology, inst.quantizers, inst.code, inst.snrs);
        const auto hard = to_oracle(ctx);

        std::vector<std::vector<oracle::CellMoments>> moments;
        const double inf = std::numeric_limits<double>::infinity();
        for (int s = 0; s < ctx.topology().num_sources(); ++s) {
            std::vector<oracle::CellMoments> cells;
            const auto& q = ctx.quantizer(s);
            for (int i = 0; i < q.levels(); ++i) {
                const double lo = i == 0 ? -inf : q.boundaries()[static_cast<std::size_t>(i - 1)];
                const double hi = i == q.levels() - 1 ? inf : q.boundaries()[static_cast<std::size_t>(i)];
                const auto m = gaussian_cell_moments(1.0, lo, hi);
                cells.push_back({m.p, m.m1, m.m2});
            }
            moments.push_back(std::move(cells));
        }
        const double want = oracle::average_distortion(hard, moments);
        const double got = brute_force_distortion(ctx);
        CHECK(std::abs(got - want) < 1e-10);
    }
}

TEST_CASE("a noiseless single-source chain leaves only quantization error") {
    TableCode identity;
    identity.source_rates = {2};
    identity.relay_rate = 2;
    identity.table = {0, 1, 2, 3};
    const auto qs = quantizers_for({2});
    LinkSnrs clean{100.0, 100.0, 100.0, {}, {}, {}};
    DecoderContext ctx(NetworkTopology::omarc(1), qs, identity, clean);
    const auto report = total_distortion(ctx, CostVariant::Full);
    CHECK(report.d_network == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report.d_total == doctest::Approx(qs[0].total_distortion()).epsilon(1e-10));
    CHECK(brute_force_distortion(ctx) == doctest::Approx(qs[0].total_distortion()).epsilon(1e-10));
}

TEST_CASE("the parity example pins the very-noisy-link cost") {
    const auto code = to_table(LinearCode{{1, 1}, 1, {1, 1}});
    LinkSnrs snrs{-3.0, 10.0, 7.0, {}, {}, {}};
    DecoderContext ctx(NetworkTopology::omarc(2), quantizers_for({1, 1}), code, snrs);
    const auto report = total_distortion(ctx, CostVariant::C4);
    // preimage centroids are zero, so the network part is E[C^2] = 2/pi
    CHECK(report.d_network == doctest::Approx(kTwoOverPi).epsilon(1e-9));
    // and the total collapses to the source variance
    CHECK(report.d_total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("c4 cost is invariant to relay index relabeling") {
    auto rng = make_rng(1001);
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = random_instance(rng);
        DecoderContext ctx(inst.topology, inst.quantizers, inst.code, inst.snrs);
        const double base = network_distortion(ctx, CostVariant::C4);

        std::vector<int> relabel(static_cast<std::size_t>(1) << inst.code.relay_rate);
        std::iota(relabel.begin(), relabel.end(), 0);
        std::shuffle(relabel.begin(), relabel.end(), rng);
        TableCode permuted = inst.code;
        for (auto& e : permuted.table) e = relabel[static_cast<std::size_t>(e)];
        DecoderContext pctx(inst.topology, inst.quantizers, permuted, inst.snrs);
        CHECK(std::abs(network_distortion(pctx, CostVariant::C4) - base) < 1e-12);
    }
}

TEST_CASE("improving any single link never hurts the matched full cost") {
    auto rng = make_rng(7);
    const auto inst = random_instance(rng);
    const auto evaluate = [&](LinkSnrs snrs) {
        DecoderContext ctx(inst.topology, inst.quantizers, inst.code, snrs);
        return network_distortion(ctx, CostVariant::Full);
    };
    const LinkSnrs base{-1.0, 4.0, 2.0, {}, {}, {}};
    for (double bump : {2.0, 6.0, 12.0}) {
        LinkSnrs sd = base, sr = base, rd = base;
        sd.sd_db += bump;
        sr.sr_db += bump;
        rd.rd_db += bump;
        const double d0 = evaluate(base);
        CHECK(evaluate(sd) <= d0 + 1e-12);
        CHECK(evaluate(sr) <= d0 + 1e-12);
        CHECK(evaluate(rd) <= d0 + 1e-12);
    }
}

TEST_CASE("evaluators agree with the reference formulas and track moves") {
    auto rng = make_rng(99);
    for (CostVariant variant : {CostVariant::C4, CostVariant::C3, CostVariant::Full}) {
        const auto inst = random_instance(rng);
        const DesignSetup setup{inst.topology, inst.quantizers, inst.snrs};
        NetworkDistortionEvaluator eval(setup, variant, inst.code);

        DecoderContext ctx(inst.topology, inst.quantizers, inst.code, inst.snrs);
        CHECK(eval.cost() == doctest::Approx(network_distortion(ctx, variant)).epsilon(1e-12));

        std::uniform_int_distribution<std::size_t> pos(0, inst.code.table.size() - 1);
        std::uniform_int_distribution<int> value(0, (1 << inst.code.relay_rate) - 1);
        TableCode current = inst.code;
        for (int move = 0; move < 25; ++move) {
            const std::size_t p = pos(rng);
            const int v = value(rng);
            const double predicted = eval.cost_with(p, v);
            eval.apply(p, v);
            current.table[p] = v;
            CHECK(eval.cost() == doctest::Approx(predicted).epsilon(1e-12));
            CHECK(eval.code().table == current.table);
            const double fresh = network_distortion_for(setup, current, variant);
            CHECK(eval.cost() == doctest::Approx(fresh).epsilon(1e-9));
        }
        eval.rebuild();
        const double fresh = network_distortion_for(setup, current, variant);
        CHECK(eval.cost() == doctest::Approx(fresh).epsilon(1e-12));
    }
}

TEST_CASE("source distortion is independent of code and channel state") {
    auto rng = make_rng(31);
    const auto qs = quantizers_for({2, 2});
    const auto t = NetworkTopology::omarc(2);
    const auto code_a = random_code({2, 2}, 2, rng);
    const auto code_b = random_code({2, 2}, 2, rng);
    DecoderContext a(t, qs, code_a, LinkSnrs{0.0, 5.0, 5.0, {}, {}, {}});
    DecoderContext b(t, qs, code_b, LinkSnrs{9.0, -2.0, 1.0, {}, {}, {}});
    CHECK(total_distortion(a, CostVariant::Full).d_sources ==
          doctest::Approx(total_distortion(b, CostVariant::Full).d_sources).epsilon(1e-15));
}

TEST_CASE("the enumeration guard rejects oversized instances") {
    auto rng = make_rng(5);
    const auto code = random_code({5, 5}, 5, rng);
    DecoderContext ctx(NetworkTopology::omarc(2), quantizers_for({5, 5}), code,
                       LinkSnrs{0.0, 5.0, 5.0, {}, {}, {}});
    CHECK_THROWS_AS(brute_force_distortion(ctx), std::invalid_argument);
}

#include <benchmark/benchmark.h>

#include "relnc/bounds.hpp"
#include "relnc/designer.hpp"
#include "relnc/rng.hpp"
#include "relnc/simulator.hpp"

using namespace relnc;

namespace {

std::vector<ScalarQuantizer> quantizers_for(int n, int rate) {
    return std::vector<ScalarQuantizer>(static_cast<std::size_t>(n), ScalarQuantizer::design_lloyd_max(rate, 1.0));
}

TableCode random_code(int n, int rate, int relay_rate, std::uint64_t seed) {
    auto rng = make_rng(seed);
    TableCode code;
    code.source_rates.assign(static_cast<std::size_t>(n), rate);
    code.relay_rate = relay_rate;
    code.table.resize(code.grid().size());
    std::uniform_int_distribution<int> entry(0, (1 << relay_rate) - 1);
    for (auto& e : code.table) e = entry(rng);
    return code;
}

void BM_LloydDesign(benchmark::State& state) {
    const int rate = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ScalarQuantizer::design_lloyd_max(rate, 1.0));
}
BENCHMARK(BM_LloydDesign)->Arg(3)->Arg(8);

void BM_EquivalentRelayChannel(benchmark::State& state) {
    const int bits = static_cast<int>(state.range(0));
    const auto q = ScalarQuantizer::design_lloyd_max(bits, 1.0);
    const AwgnBpskLink link{3.0, bits};
    for (auto _ : state) benchmark::DoNotOptimize(equivalent_relay_channel(link, q.priors()));
}
BENCHMARK(BM_EquivalentRelayChannel)->Arg(3)->Arg(6);

void BM_MmseFullSoft(benchmark::State& state) {
    const auto topology = NetworkTopology::omarc(2);
    DecoderContext ctx(topology, quantizers_for(2, 3), random_code(2, 3, 3, 5),
                       LinkSnrs{-3.0, 10.0, 7.0, {}, {}, {}});
    auto rng = make_rng(7);
    const auto y0 = sample(ctx.sd_link(0, 0), 3, rng);
    const auto y1 = sample(ctx.sd_link(1, 0), 5, rng);
    const auto yr = sample(ctx.rd_link(0), 2, rng);
    const std::vector<std::vector<double>> ys{y0, y1};
    for (auto _ : state) benchmark::DoNotOptimize(mmse_full(ctx, 0, ys, yr));
}
BENCHMARK(BM_MmseFullSoft);

void BM_CostEvaluatorMove(benchmark::State& state) {
    const CostVariant variant = state.range(0) == 0 ? CostVariant::C4 : CostVariant::C3;
    const DesignSetup setup{NetworkTopology::omarc(2), quantizers_for(2, 3),
                            LinkSnrs{-3.0, 10.0, 7.0, {}, {}, {}}};
    NetworkDistortionEvaluator eval(setup, variant, random_code(2, 3, 3, 11));
    auto rng = make_rng(13);
    std::uniform_int_distribution<std::size_t> pos(0, 63);
    std::uniform_int_distribution<int> value(0, 7);
    for (auto _ : state) {
        const std::size_t p = pos(rng);
        const int v = value(rng);
        benchmark::DoNotOptimize(eval.cost_with(p, v));
        eval.apply(p, v);
    }
}
BENCHMARK(BM_CostEvaluatorMove)->Arg(0)->Arg(1);

void BM_SaDesignSmall(benchmark::State& state) {
    const DesignSetup setup{NetworkTopology::omarc(2), quantizers_for(2, 2),
                            LinkSnrs{-3.0, 10.0, 7.0, {}, {}, {}}};
    AnnealSchedule schedule;
    for (auto _ : state) {
        schedule.seed += 1;
        benchmark::DoNotOptimize(design_sa_table(setup, 2, CostVariant::C4, schedule));
    }
}
BENCHMARK(BM_SaDesignSmall);

void BM_SimulatorRun(benchmark::State& state) {
    const SystemInstance inst{NetworkTopology::omarc(2), quantizers_for(2, 3), random_code(2, 3, 3, 17),
                              LinkSnrs{-3.0, 10.0, 7.0, {}, {}, {}}, ObservationMode::Soft};
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run(inst, 1000, ++seed));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulatorRun);

void BM_MaxSymmetricRate(benchmark::State& state) {
    const auto budget = GaussianLinkBudget::symmetric(NetworkTopology::otnbr23(), -3.0, 10.0, 7.0);
    for (auto _ : state) benchmark::DoNotOptimize(max_symmetric_rate(budget, 2001));
}
BENCHMARK(BM_MaxSymmetricRate);

}  // namespace

BENCHMARK_MAIN();

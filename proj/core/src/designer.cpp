#include "relnc/designer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "relnc/rng.hpp"

namespace relnc {

namespace {

std::vector<int> source_rates_of(const DesignSetup& setup) {
    std::vector<int> rates;
    rates.reserve(setup.quantizers.size());
    for (const auto& q : setup.quantizers) rates.push_back(q.rate());
    return rates;
}

std::vector<std::size_t> neighbor_positions(const IndexGrid& grid, std::size_t flat) {
    std::vector<int> idx(static_cast<std::size_t>(grid.rank()));
    grid.unflatten(flat, idx);
    std::vector<std::size_t> out;
    for (int axis = 0; axis < grid.rank(); ++axis) {
        for (int step : {-1, +1}) {
            const int c = idx[static_cast<std::size_t>(axis)] + step;
            if (c < 0 || c >= grid.dim(axis)) continue;
            auto moved = idx;
            moved[static_cast<std::size_t>(axis)] = c;
            out.push_back(grid.flatten(moved));
        }
    }
    return out;
}

TableCode random_table(const std::vector<int>& source_rates, int relay_rate, std::mt19937_64& rng) {
    TableCode code;
    code.source_rates = source_rates;
    code.relay_rate = relay_rate;
    code.table.resize(code.grid().size());
    std::uniform_int_distribution<int> pick(0, (1 << relay_rate) - 1);
    // A constant table is absorbing under neighbor-donor moves; resample.
    do {
        for (auto& v : code.table) v = pick(rng);
    } while (code.table.size() > 1 && relay_rate >= 1 &&
             std::all_of(code.table.begin(), code.table.end(), [&](int v) { return v == code.table[0]; }));
    return code;
}

double calibrate_t0(NetworkDistortionEvaluator& eval, const IndexGrid& grid, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick_pos(0, grid.size() - 1);
    double uphill_sum = 0.0;
    int uphill_count = 0;
    for (int probe = 0; probe < 200; ++probe) {
        const std::size_t flat = pick_pos(rng);
        const auto neighbors = neighbor_positions(grid, flat);
        std::uniform_int_distribution<std::size_t> pick(0, neighbors.size() - 1);
        const std::size_t donor = neighbors[pick(rng)];
        const double delta = eval.cost_with(flat, eval.code().table[donor]) - eval.cost();
        if (delta > 0.0) {
            uphill_sum += delta;
            ++uphill_count;
        }
    }
    if (uphill_count == 0) return std::max(1e-12, 0.25 * eval.cost());
    // exp(-mean/t0) = 0.8 puts the average uphill acceptance at >= 0.8.
    return (uphill_sum / uphill_count) / std::log(1.0 / 0.8);
}

// Shared annealing chain over an abstract proposal/apply interface.
template <typename ProposeFn, typename CostOfProposalFn, typename ApplyFn, typename SnapshotFn>
std::vector<TracePoint> anneal(const AnnealSchedule& schedule, std::size_t positions, double t0, double& cost,
                               std::mt19937_64& rng, ProposeFn&& propose, CostOfProposalFn&& cost_of,
                               ApplyFn&& apply_move, SnapshotFn&& snapshot_best) {
    if (!(schedule.alpha > 0.0 && schedule.alpha < 1.0)) throw std::invalid_argument("anneal: alpha must be in (0,1)");
    if (schedule.sweeps_per_temp < 1) throw std::invalid_argument("anneal: sweeps_per_temp must be >= 1");
    const double t_min = schedule.t_min > 0.0 ? schedule.t_min : 1e-6 * t0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double best = cost;
    snapshot_best();
    std::vector<TracePoint> trace;
    int stall = 0;
    double temperature = t0;
    for (int level = 0; level < schedule.max_temps; ++level) {
        bool moved = false;
        for (int sweep = 0; sweep < schedule.sweeps_per_temp; ++sweep) {
            for (std::size_t pos = 0; pos < positions; ++pos) {
                auto proposal = propose(pos);
                const double candidate = cost_of(proposal);
                const double delta = candidate - cost;
                if (sa_accept(delta, temperature, unit(rng))) {
                    apply_move(proposal);
                    if (std::abs(delta) > schedule.stall_tol * std::max(std::abs(cost), 1e-300)) moved = true;
                    cost = candidate;
                    if (cost < best) {
                        best = cost;
                        snapshot_best();
                    }
                }
            }
            trace.push_back({level, temperature, cost, best});
        }
        // The chain is considered frozen once accepted moves stop changing
        // the cost materially.
        stall = moved ? 0 : stall + 1;
        temperature *= schedule.alpha;
        if (temperature < t_min || stall >= schedule.stall_levels) break;
    }
    cost = best;
    return trace;
}

}  // namespace

bool sa_accept(double delta, double temperature, double uniform_draw) {
    if (delta < 0.0) return true;
    if (temperature <= 0.0) return delta <= 0.0;
    return uniform_draw < std::exp(-delta / temperature);
}

TableCode perturb(const TableCode& code, std::size_t flat_pos, std::mt19937_64& rng) {
    const IndexGrid grid = code.grid();
    if (flat_pos >= grid.size()) throw std::out_of_range("perturb: position outside the table");
    const auto neighbors = neighbor_positions(grid, flat_pos);
    std::uniform_int_distribution<std::size_t> pick(0, neighbors.size() - 1);
    TableCode out = code;
    out.table[flat_pos] = code.table[neighbors[pick(rng)]];
    return out;
}

SaResult design_sa_table(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                         const AnnealSchedule& schedule) {
    auto rng = make_rng(schedule.seed);
    const auto rates = source_rates_of(setup);
    TableCode initial = random_table(rates, relay_rate, rng);
    const IndexGrid grid = initial.grid();
    NetworkDistortionEvaluator eval(setup, cost_variant, std::move(initial));

    const double t0 = schedule.t0 > 0.0 ? schedule.t0 : calibrate_t0(eval, grid, rng);

    SaResult result;
    double cost = eval.cost();

    struct Move {
        std::size_t flat;
        int value;
    };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    result.trace = anneal(
        schedule, grid.size(), t0, cost, rng,
        [&](std::size_t pos) {
            if (schedule.mutation_prob > 0.0 && unit(rng) < schedule.mutation_prob) {
                std::uniform_int_distribution<int> any(0, (1 << relay_rate) - 1);
                return Move{pos, any(rng)};
            }
            const auto neighbors = neighbor_positions(grid, pos);
            std::uniform_int_distribution<std::size_t> pick(0, neighbors.size() - 1);
            return Move{pos, eval.code().table[neighbors[pick(rng)]]};
        },
        [&](const Move& mv) { return eval.cost_with(mv.flat, mv.value); },
        [&](const Move& mv) { eval.apply(mv.flat, mv.value); },
        [&] { result.code = eval.code(); });
    result.cost = cost;
    return result;
}

SaResult design_sa_table_restarts(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                                  const AnnealSchedule& schedule, int restarts, int threads) {
    if (restarts < 1) throw std::invalid_argument("design_sa_table_restarts: need at least one restart");
    std::vector<SaResult> results(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), threads, [&](std::size_t i) {
        AnnealSchedule s = schedule;
        s.seed = splitmix64(schedule.seed ^ splitmix64(i));
        results[i] = design_sa_table(setup, relay_rate, cost_variant, s);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].cost < results[best].cost) best = i;
    return std::move(results[best]);
}

LinearDesignResult design_linear(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                                 bool include_zero_coeffs) {
    const auto rates = source_rates_of(setup);
    for (int r : rates)
        if (r > relay_rate)
            throw std::invalid_argument("design_linear: source rate exceeds the relay field width");
    const int n = static_cast<int>(rates.size());
    const int field = 1 << relay_rate;
    const int lo = include_zero_coeffs ? 0 : 1;

    LinearDesignResult best;
    bool first = true;
    std::vector<int> coeffs(static_cast<std::size_t>(n), lo);
    for (;;) {
        LinearCode candidate{rates, relay_rate, coeffs};
        const double cost = network_distortion_for(setup, to_table(candidate), cost_variant);
        if (first || cost < best.cost) {
            best = {candidate, cost};
            first = false;
        }
        // Lexicographic successor; scanning in order keeps ties on the
        // smallest tuple.
        int pos = n - 1;
        while (pos >= 0 && coeffs[static_cast<std::size_t>(pos)] == field - 1) {
            coeffs[static_cast<std::size_t>(pos)] = lo;
            --pos;
        }
        if (pos < 0) break;
        ++coeffs[static_cast<std::size_t>(pos)];
    }
    return best;
}

namespace {

StructuredCode assignment_to_code(const std::vector<int>& rates, int relay_rate,
                                  const std::vector<int>& assignment) {
    StructuredCode code;
    code.source_rates = rates;
    code.relay_rate = relay_rate;
    const std::size_t na = StructuredCode::a_grid(rates).size();
    const std::size_t nb = StructuredCode::b_grid(rates).size();
    code.a_slots.assign(assignment.begin(), assignment.begin() + static_cast<std::ptrdiff_t>(na));
    code.b_slots.assign(assignment.begin() + static_cast<std::ptrdiff_t>(na),
                        assignment.begin() + static_cast<std::ptrdiff_t>(na + nb));
    code.e_slots.assign(assignment.begin() + static_cast<std::ptrdiff_t>(na + nb),
                        assignment.begin() + static_cast<std::ptrdiff_t>(na + nb + na));
    return code;
}

}  // namespace

StructuredDesignResult design_structured(const DesignSetup& setup, int relay_rate, CostVariant cost_variant,
                                         const AnnealSchedule& schedule) {
    const auto rates = source_rates_of(setup);
    if (rates.size() < 2 || rates[0] < 2)
        throw std::invalid_argument("design_structured: needs >= 2 sources with first rate >= 2");
    const int slots = StructuredCode::slot_count(rates);
    const int field = 1 << relay_rate;
    if (slots > field)
        throw std::invalid_argument("design_structured: relay rate too small for distinct slot indices");

    auto rng = make_rng(schedule.seed);
    std::vector<int> assignment(static_cast<std::size_t>(field));
    std::iota(assignment.begin(), assignment.end(), 0);
    std::shuffle(assignment.begin(), assignment.end(), rng);

    auto cost_of_assignment = [&](const std::vector<int>& a) {
        return network_distortion_for(setup, to_table(assignment_to_code(rates, relay_rate, a)), cost_variant);
    };
    double cost = cost_of_assignment(assignment);

    // Probe swaps for the starting temperature.
    double t0 = schedule.t0;
    if (t0 <= 0.0) {
        std::uniform_int_distribution<std::size_t> pick(0, assignment.size() - 1);
        double uphill_sum = 0.0;
        int uphill_count = 0;
        for (int probe = 0; probe < 200; ++probe) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            auto trial = assignment;
            std::swap(trial[i], trial[j]);
            const double delta = cost_of_assignment(trial) - cost;
            if (delta > 0.0) {
                uphill_sum += delta;
                ++uphill_count;
            }
        }
        t0 = uphill_count == 0 ? std::max(1e-12, 0.25 * cost) : (uphill_sum / uphill_count) / std::log(1.0 / 0.8);
    }

    StructuredDesignResult result;
    struct Swap {
        std::size_t i, j;
        double cost;
    };
    result.trace = anneal(
        schedule, assignment.size(), t0, cost, rng,
        [&](std::size_t pos) {
            std::uniform_int_distribution<std::size_t> pick(0, assignment.size() - 1);
            std::size_t j = pick(rng);
            if (j == pos) j = (j + 1) % assignment.size();
            auto trial = assignment;
            std::swap(trial[pos], trial[j]);
            return Swap{pos, j, cost_of_assignment(trial)};
        },
        [&](const Swap& sw) { return sw.cost; },
        [&](const Swap& sw) { std::swap(assignment[sw.i], assignment[sw.j]); },
        [&] { result.code = assignment_to_code(rates, relay_rate, assignment); });
    result.cost = cost;
    return result;
}

StructuredDesignResult design_structured_restarts(const DesignSetup& setup, int relay_rate,
                                                  CostVariant cost_variant, const AnnealSchedule& schedule,
                                                  int restarts, int threads) {
    if (restarts < 1) throw std::invalid_argument("design_structured_restarts: need at least one restart");
    std::vector<StructuredDesignResult> results(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), threads, [&](std::size_t i) {
        AnnealSchedule s = schedule;
        s.seed = splitmix64(schedule.seed ^ splitmix64(i));
        results[i] = design_structured(setup, relay_rate, cost_variant, s);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].cost < results[best].cost) best = i;
    return std::move(results[best]);
}

}  // namespace relnc

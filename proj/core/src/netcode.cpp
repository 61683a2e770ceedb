#include "relnc/netcode.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "relnc/gf.hpp"

namespace relnc {

namespace {

std::vector<int> alphabet_dims(std::span<const int> source_rates) {
    std::vector<int> dims;
    dims.reserve(source_rates.size());
    for (int r : source_rates) dims.push_back(1 << r);
    return dims;
}

void check_indices(std::span<const int> source_rates, std::span<const int> indices) {
    if (indices.size() != source_rates.size()) throw std::invalid_argument("encode: wrong number of source indices");
    for (std::size_t s = 0; s < indices.size(); ++s) {
        if (indices[s] < 0 || indices[s] >= (1 << source_rates[s]))
            throw std::out_of_range("encode: source index out of alphabet");
    }
}

int top_bit(int value, int rate) { return value >= (1 << (rate - 1)) ? 1 : 0; }

}  // namespace

IndexGrid TableCode::grid() const { return IndexGrid(alphabet_dims(source_rates)); }

int TableCode::encode(std::span<const int> indices) const {
    check_indices(source_rates, indices);
    return table[grid().flatten(indices)];
}

std::optional<std::string> TableCode::validate() const {
    if (source_rates.empty()) return "table code has no sources";
    if (relay_rate < 1) return "relay rate must be at least 1";
    for (int r : source_rates)
        if (r < 1) return "source rates must be at least 1";
    if (table.size() != grid().size()) return "table size does not match source alphabet grid";
    for (int v : table)
        if (v < 0 || v >= (1 << relay_rate)) return "table entry outside relay alphabet";
    return std::nullopt;
}

int LinearCode::encode(std::span<const int> indices) const {
    check_indices(source_rates, indices);
    int acc = 0;
    for (std::size_t s = 0; s < indices.size(); ++s)
        acc = gf::add(acc, gf::mul(coefficients[s], indices[s], relay_rate));
    return acc;
}

std::optional<std::string> LinearCode::validate() const {
    if (source_rates.empty()) return "linear code has no sources";
    if (relay_rate < 1 || relay_rate > 8) return "relay rate must be in [1, 8]";
    if (coefficients.size() != source_rates.size()) return "one coefficient per source required";
    for (int r : source_rates)
        if (r > relay_rate) return "source rate exceeds relay field width";
    for (int c : coefficients)
        if (c < 0 || c >= (1 << relay_rate)) return "coefficient outside the relay field";
    return std::nullopt;
}

IndexGrid StructuredCode::a_grid(std::span<const int> source_rates) {
    std::vector<int> dims(source_rates.size() - 1, 2);
    return IndexGrid(std::move(dims));
}

IndexGrid StructuredCode::b_grid(std::span<const int> source_rates) {
    const int r1 = source_rates[0];
    std::vector<int> dims;
    dims.push_back(std::max(0, ((1 << r1) - 4) / 4));
    for (std::size_t s = 1; s < source_rates.size(); ++s) dims.push_back(4);
    return IndexGrid(std::move(dims));
}

int StructuredCode::slot_count(std::span<const int> source_rates) {
    return static_cast<int>(2 * a_grid(source_rates).size() + b_grid(source_rates).size());
}

bool StructuredCode::band_degenerate() const { return source_rates[0] == 2; }

int StructuredCode::encode(std::span<const int> indices) const {
    check_indices(source_rates, indices);
    const int i1 = indices[0];
    const int r1 = source_rates[0];
    if (i1 < 2 || i1 >= (1 << r1) - 2) {
        std::vector<int> key(source_rates.size() - 1);
        for (std::size_t s = 1; s < source_rates.size(); ++s)
            key[s - 1] = top_bit(indices[s], source_rates[s]);
        const std::size_t flat = a_grid(source_rates).flatten(key);
        return i1 < 2 ? a_slots[flat] : e_slots[flat];
    }
    std::vector<int> key(source_rates.size());
    key[0] = (i1 - 2) / 4;
    for (std::size_t s = 1; s < source_rates.size(); ++s)
        key[s] = indices[s] >> (source_rates[s] - 2);
    return b_slots[b_grid(source_rates).flatten(key)];
}

std::optional<std::string> StructuredCode::validate() const {
    if (source_rates.size() < 2) return "structured code needs at least two sources";
    if (source_rates[0] < 2) return "structured code needs first source rate >= 2";
    const bool has_mid_band = (1 << source_rates[0]) > 4;
    for (std::size_t s = 1; s < source_rates.size(); ++s) {
        if (source_rates[s] < (has_mid_band ? 2 : 1))
            return "structured code needs source rates >= 2 when the mid band is nonempty";
    }
    if (a_slots.size() != a_grid(source_rates).size()) return "a slot array has wrong shape";
    if (e_slots.size() != a_grid(source_rates).size()) return "e slot array has wrong shape";
    if (b_slots.size() != b_grid(source_rates).size()) return "b slot array has wrong shape";
    std::set<int> seen;
    for (const auto* slots : {&a_slots, &b_slots, &e_slots}) {
        for (int v : *slots) {
            if (v < 0 || v >= (1 << relay_rate)) return "slot index outside relay alphabet";
            if (!seen.insert(v).second) return "slot indices must be pairwise distinct";
        }
    }
    return std::nullopt;
}

namespace {

template <typename Code>
TableCode render_table(const Code& code) {
    TableCode t;
    t.source_rates = code.source_rates;
    t.relay_rate = code.relay_rate;
    const IndexGrid grid{alphabet_dims(code.source_rates)};
    t.table.resize(grid.size());
    std::vector<int> idx(code.source_rates.size());
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        grid.unflatten(flat, idx);
        t.table[flat] = code.encode(idx);
    }
    return t;
}

}  // namespace

TableCode to_table(const LinearCode& code) { return render_table(code); }
TableCode to_table(const StructuredCode& code) { return render_table(code); }

std::optional<bool> is_linear(const TableCode& code) {
    for (int r : code.source_rates)
        if (r != code.relay_rate) return std::nullopt;
    const IndexGrid grid = code.grid();
    const std::size_t n = grid.size();
    std::vector<int> a(code.source_rates.size()), b(code.source_rates.size()), c(code.source_rates.size());
    for (std::size_t i = 0; i < n; ++i) {
        grid.unflatten(i, a);
        for (std::size_t j = i; j < n; ++j) {
            grid.unflatten(j, b);
            for (std::size_t s = 0; s < c.size(); ++s) c[s] = a[s] ^ b[s];
            if ((code.table[i] ^ code.table[j]) != code.table[grid.flatten(c)]) return false;
        }
    }
    return true;
}

double network_code_rate(std::span<const int> source_rates, int relay_rate) {
    int total = 0;
    for (int r : source_rates) total += r;
    if (total <= 0) throw std::invalid_argument("network_code_rate: source rates must be positive");
    return static_cast<double>(relay_rate) / static_cast<double>(total);
}

int structured_relay_rate(int num_sources, int rate) {
    if (num_sources < 2 || rate < 2) throw std::invalid_argument("structured_relay_rate: need N >= 2 and rate >= 2");
    // 4*2^(N-2) + (2^R - 4)*4^(N-2)
    const long long a_and_e = 4ll << (num_sources - 2);
    const long long b = ((1ll << rate) - 4) << (2 * (num_sources - 2));
    const long long slots = a_and_e + b;
    int bits = 0;
    while ((1ll << bits) < slots) ++bits;
    return bits;
}

}  // namespace relnc

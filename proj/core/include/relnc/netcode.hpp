#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relnc/common.hpp"

namespace relnc {

// Relay mapping as an explicit lookup table over the source index grid,
// row-major with the last source varying fastest.
struct TableCode {
    std::vector<int> source_rates;  // R_s bits per source
    int relay_rate = 0;             // R_r bits
    std::vector<int> table;         // entries in [0, 2^relay_rate)

    IndexGrid grid() const;
    int encode(std::span<const int> indices) const;
    std::optional<std::string> validate() const;
};

// GF(2^relay_rate) linear combination of the source indices. Source indices
// with R_s < relay_rate are zero-padded (high bits zero) into the field.
struct LinearCode {
    std::vector<int> source_rates;
    int relay_rate = 0;
    std::vector<int> coefficients;  // one field element per source

    int encode(std::span<const int> indices) const;
    std::optional<std::string> validate() const;
};

// Fixed three-band partition of the source index grid; the design assigns
// a distinct relay index to every partition class (slot).
//
// Bands over the first source index i1 (rates R1, Rs):
//   low   i1 in [0, 2)              -> a slot, keyed by the top bit of each other index
//   mid   i1 in [2, 2^R1 - 2)       -> b slot, keyed by (i1-2)/4 and the top two bits of the others
//   high  i1 in [2^R1 - 2, 2^R1)    -> e slot, keyed like the low band
struct StructuredCode {
    std::vector<int> source_rates;
    int relay_rate = 0;
    std::vector<int> a_slots;  // 2^(N-1) entries
    std::vector<int> b_slots;  // (2^(R1-2)-1) * 4^(N-1) entries (empty when R1 == 2)
    std::vector<int> e_slots;  // 2^(N-1) entries

    int encode(std::span<const int> indices) const;
    std::optional<std::string> validate() const;
    // The mid band is empty when R1 == 2; such designs work but collapse
    // to a two-band partition.
    bool band_degenerate() const;

    // Slot grid shapes for the given rates.
    static IndexGrid a_grid(std::span<const int> source_rates);
    static IndexGrid b_grid(std::span<const int> source_rates);
    static int slot_count(std::span<const int> source_rates);
};

TableCode to_table(const LinearCode& code);
TableCode to_table(const StructuredCode& code);

// Exhaustive pairwise linearity check over GF(2^relay_rate); requires all
// source rates equal to the relay rate, otherwise nullopt (not applicable).
std::optional<bool> is_linear(const TableCode& code);

// Relay bits divided by total source bits.
double network_code_rate(std::span<const int> source_rates, int relay_rate);

// Smallest relay rate holding the structured code's distinct slot indices
// for N equal-rate sources: ceil(log2(4*2^(N-2) + (2^rate-4)*4^(N-2))).
int structured_relay_rate(int num_sources, int rate);

}  // namespace relnc

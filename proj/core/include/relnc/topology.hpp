#pragma once

#include <optional>
#include <string>
#include <vector>

namespace relnc {

// A directed link of the two-hop network. The relay is not a source or a
// destination, so edges are tagged by kind instead of sharing an id space.
struct Edge {
    enum class Kind { SourceToDest, SourceToRelay, RelayToDest };
    Kind kind;
    int from;  // source id, or destination id for RelayToDest targets
    int to;
};

inline bool operator==(const Edge& a, const Edge& b) {
    return a.kind == b.kind && a.from == b.from && a.to == b.to;
}

// Connectivity of an orthogonal two-hop network with one broadcasting relay:
// N sources, M destinations, destination d decodes the source subset S_d.
// All indices are 0-based.
class NetworkTopology {
public:
    NetworkTopology(int num_sources, std::vector<std::vector<int>> decode_sets);

    // Single destination decoding every source (multiple access relay channel).
    static NetworkTopology omarc(int num_sources);
    // Paired sources and destinations: destination d decodes source d only.
    static NetworkTopology omcbr(int num_sources);
    // Two sources, three destinations; destination 2 decodes both sources.
    static NetworkTopology otnbr23();

    int num_sources() const { return num_sources_; }
    int num_destinations() const { return static_cast<int>(decode_sets_.size()); }

    // S_d, sorted ascending.
    const std::vector<int>& decode_set(int d) const { return decode_sets_[d]; }
    const std::vector<std::vector<int>>& decode_sets() const { return decode_sets_; }
    // D_s = {d : s in S_d}, sorted ascending.
    const std::vector<int>& dest_set(int s) const { return dest_sets_[s]; }

    // Sum_d |S_d|, the normalizer of the average-distortion weighting.
    int decode_set_weight() const;

    std::vector<Edge> edges() const;

    // Checks the type invariants; returns the first violation, if any.
    std::optional<std::string> validate() const;

private:
    int num_sources_ = 0;
    std::vector<std::vector<int>> decode_sets_;
    std::vector<std::vector<int>> dest_sets_;
};

}  // namespace relnc

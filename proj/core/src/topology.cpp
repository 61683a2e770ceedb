#include "relnc/topology.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace relnc {

NetworkTopology::NetworkTopology(int num_sources, std::vector<std::vector<int>> decode_sets)
    : num_sources_(num_sources), decode_sets_(std::move(decode_sets)) {
    for (auto& sd : decode_sets_) {
        std::sort(sd.begin(), sd.end());
        sd.erase(std::unique(sd.begin(), sd.end()), sd.end());
    }
    dest_sets_.assign(static_cast<std::size_t>(std::max(num_sources_, 0)), {});
    for (int d = 0; d < num_destinations(); ++d) {
        for (int s : decode_sets_[d]) {
            if (s >= 0 && s < num_sources_) dest_sets_[s].push_back(d);
        }
    }
}

NetworkTopology NetworkTopology::omarc(int num_sources) {
    if (num_sources < 1) throw std::invalid_argument("omarc: need at least one source");
    std::vector<int> all(static_cast<std::size_t>(num_sources));
    std::iota(all.begin(), all.end(), 0);
    return NetworkTopology(num_sources, {all});
}

NetworkTopology NetworkTopology::omcbr(int num_sources) {
    if (num_sources < 1) throw std::invalid_argument("omcbr: need at least one source");
    std::vector<std::vector<int>> sets;
    sets.reserve(static_cast<std::size_t>(num_sources));
    for (int s = 0; s < num_sources; ++s) sets.push_back({s});
    return NetworkTopology(num_sources, std::move(sets));
}

NetworkTopology NetworkTopology::otnbr23() {
    return NetworkTopology(2, {{0}, {1}, {0, 1}});
}

int NetworkTopology::decode_set_weight() const {
    int w = 0;
    for (const auto& sd : decode_sets_) w += static_cast<int>(sd.size());
    return w;
}

std::vector<Edge> NetworkTopology::edges() const {
    std::vector<Edge> g;
    for (int s = 0; s < num_sources_; ++s)
        for (int d : dest_sets_[s]) g.push_back({Edge::Kind::SourceToDest, s, d});
    for (int d = 0; d < num_destinations(); ++d) g.push_back({Edge::Kind::RelayToDest, d, d});
    for (int s = 0; s < num_sources_; ++s) g.push_back({Edge::Kind::SourceToRelay, s, s});
    return g;
}

std::optional<std::string> NetworkTopology::validate() const {
    if (num_sources_ < 1) return "topology needs at least one source";
    if (decode_sets_.empty()) return "topology needs at least one destination";
    for (int d = 0; d < num_destinations(); ++d) {
        if (decode_sets_[d].empty()) return "empty decode set for destination " + std::to_string(d);
        for (int s : decode_sets_[d]) {
            if (s < 0 || s >= num_sources_)
                return "index out of range: source " + std::to_string(s) + " in decode set of destination " +
                       std::to_string(d);
        }
    }
    for (int s = 0; s < num_sources_; ++s) {
        if (dest_sets_[s].empty()) return "source " + std::to_string(s) + " is decoded by no destination";
    }
    return std::nullopt;
}

}  // namespace relnc

#include <doctest.h>

#include <stdexcept>

#include "relnc/topology.hpp"

using namespace relnc;

TEST_CASE("presets match the defining decode sets") {
    const auto t23 = NetworkTopology::otnbr23();
    CHECK(t23.num_sources() == 2);
    CHECK(t23.num_destinations() == 3);
    CHECK(t23.decode_set(0) == std::vector<int>{0});
    CHECK(t23.decode_set(1) == std::vector<int>{1});
    CHECK(t23.decode_set(2) == std::vector<int>{0, 1});
    CHECK(t23.dest_set(0) == std::vector<int>{0, 2});
    CHECK(t23.dest_set(1) == std::vector<int>{1, 2});

    const auto marc = NetworkTopology::omarc(3);
    CHECK(marc.num_destinations() == 1);
    CHECK(marc.decode_set(0) == std::vector<int>{0, 1, 2});

    const auto mc = NetworkTopology::omcbr(4);
    CHECK(mc.num_destinations() == 4);
    for (int d = 0; d < 4; ++d) CHECK(mc.decode_set(d) == std::vector<int>{d});

    for (const auto& t : {t23, marc, mc}) CHECK_FALSE(t.validate().has_value());
}

TEST_CASE("presets reject an empty network") {
    CHECK_THROWS_AS(NetworkTopology::omarc(0), std::invalid_argument);
    CHECK_THROWS_AS(NetworkTopology::omcbr(0), std::invalid_argument);
}

TEST_CASE("validate reports the first violated invariant") {
    const NetworkTopology empty_set(2, {{0, 1}, {}});
    REQUIRE(empty_set.validate().has_value());
    CHECK(empty_set.validate()->find("empty decode set") != std::string::npos);

    const NetworkTopology out_of_range(2, {{5}});
    REQUIRE(out_of_range.validate().has_value());
    CHECK(out_of_range.validate()->find("out of range") != std::string::npos);

    const NetworkTopology orphan(2, {{0}});
    REQUIRE(orphan.validate().has_value());
    CHECK(orphan.validate()->find("decoded by no destination") != std::string::npos);
}

TEST_CASE("edge sets have the expected size and composition") {
    // |G| = sum_s |D_s| + M + N
    const auto mc = NetworkTopology::omcbr(3);
    CHECK(mc.edges().size() == 3u + 3u + 3u);
    const auto marc = NetworkTopology::omarc(3);
    CHECK(marc.edges().size() == 3u + 1u + 3u);
    const auto t23 = NetworkTopology::otnbr23();
    CHECK(t23.edges().size() == 4u + 3u + 2u);
    CHECK(t23.decode_set_weight() == 4);

    int sd = 0, sr = 0, rd = 0;
    for (const auto& e : t23.edges()) {
        if (e.kind == Edge::Kind::SourceToDest) ++sd;
        if (e.kind == Edge::Kind::SourceToRelay) ++sr;
        if (e.kind == Edge::Kind::RelayToDest) ++rd;
    }
    CHECK(sd == 4);
    CHECK(sr == 2);
    CHECK(rd == 3);
}

TEST_CASE("user-defined topologies are accepted") {
    const NetworkTopology custom(3, {{0, 1}, {1, 2}});
    CHECK_FALSE(custom.validate().has_value());
    CHECK(custom.dest_set(1) == std::vector<int>{0, 1});
}

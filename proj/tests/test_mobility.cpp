#include "vcc/mobility.hpp"

#include <doctest.h>

#include <sstream>
#include <stdexcept>

using namespace vcc;

namespace {

RoadGrid paper_like_grid() { return RoadGrid{2, 5, 40.0, 10.0, 100.0, {0.0, 0.0}}; }

VehicleState vehicle(std::size_t id, std::size_t road, double offset, double speed)
{
    VehicleState v;
    v.id = id;
    v.road = road;
    v.offset_m = offset;
    v.speed_mps = speed;
    return v;
}

} // namespace

TEST_CASE("zone geometry")
{
    const RoadGrid g = paper_like_grid();
    CHECK(g.zone_count() == 10);
    CHECK(g.zone_index(1, 2) == 7);
    CHECK(g.zone_center(7).x == doctest::Approx(100.0));
    CHECK(g.zone_center(7).y == doctest::Approx(105.0));
    CHECK(g.nearest_zone({101.0, 104.0}) == 7);
    CHECK(g.nearest_zone({-50.0, 0.0}) == 0);
}

TEST_CASE("advancing vehicles")
{
    const RoadGrid g = paper_like_grid();
    SyntheticMobility m(g, {vehicle(0, 0, 5.0, 10.0), vehicle(1, 1, 195.0, 2.5)});
    const auto s0 = m.snapshot(0.0);
    CHECK(s0[0].zone == 0);
    CHECK(s0[1].zone == 9);

    std::vector<VehicleState> v = s0;
    advance_vehicles(v, 0.0, g);
    CHECK(v[0].offset_m == s0[0].offset_m);
    CHECK(v[0].zone == s0[0].zone);

    // 10 m/s for 4 s covers exactly one 40 m zone.
    advance_vehicles(v, 4.0, g);
    CHECK(v[0].offset_m == doctest::Approx(45.0));
    CHECK(v[0].zone == 1);
    // Wraps at the end of the road.
    CHECK(v[1].offset_m == doctest::Approx(5.0));
    CHECK(v[1].zone == 5);
    CHECK_THROWS_AS(advance_vehicles(v, -1.0, g), std::invalid_argument);

    const auto s4 = m.snapshot(4.0);
    CHECK(s4[0].offset_m == doctest::Approx(45.0));
    CHECK(m.locate(1, 4.0)->zone == 5);
    CHECK_FALSE(m.locate(7, 1.0).has_value());
}

TEST_CASE("synthetic placement respects the speed limits")
{
    const RoadGrid g = paper_like_grid();
    std::mt19937_64 rng(4);
    SyntheticMobility m(g, 50, {10.0, 20.0}, 0.7, rng);
    for (const auto& v : m.snapshot(3.3)) {
        const double limit = v.road == 0 ? 10.0 : 20.0;
        CHECK(v.speed_mps <= limit);
        CHECK(v.speed_mps >= 0.7 * limit);
        CHECK(v.zone / g.segments == v.road);
        CHECK(v.offset_m >= 0.0);
        CHECK(v.offset_m < g.road_length_m());
    }
}

TEST_CASE("trace parsing and replay")
{
    std::istringstream csv("time_s,vehicle_id,x_m,y_m\n"
                           "# comment\n"
                           "0,3,10,5\n"
                           "2,3,30,5\n"
                           "4,3,90,105\n"
                           "1,8,150,5\n");
    const auto samples = read_trace_csv(csv);
    REQUIRE(samples.size() == 4);
    const RoadGrid g = paper_like_grid();
    TraceMobility m(g, samples);
    CHECK(m.vehicle_count() == 2);

    // Sample instants are reproduced verbatim.
    const auto a = m.locate(3, 2.0);
    CHECK(a->position.x == 30.0);
    CHECK(a->position.y == 5.0);
    CHECK(a->zone == 0);
    // Positions are interpolated in between.
    const auto b = m.locate(3, 1.0);
    CHECK(b->position.x == doctest::Approx(20.0));
    CHECK(b->speed_mps == doctest::Approx(10.0));
    const auto c = m.locate(3, 3.0);
    CHECK(c->position.x == doctest::Approx(60.0));
    CHECK(c->position.y == doctest::Approx(55.0));
    // After the trace ends the last position holds.
    CHECK(m.locate(3, 50.0)->zone == g.nearest_zone({90.0, 105.0}));
    CHECK_FALSE(m.locate(4, 1.0).has_value());

    // Vehicle 8 has a single sample, so it is present only at t = 1.
    CHECK(m.snapshot(0.5).size() == 1);
    CHECK(m.snapshot(1.0).size() == 2);
    CHECK(m.snapshot(1.5).size() == 1);
}

TEST_CASE("malformed traces are rejected")
{
    std::istringstream bad("0,1,abc,3\n");
    CHECK_THROWS_AS(read_trace_csv(bad), std::runtime_error);
    std::istringstream short_row("0,1,2\n");
    CHECK_THROWS_AS(read_trace_csv(short_row), std::runtime_error);
}

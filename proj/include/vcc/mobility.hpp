#pragma once

#include "vcc/channel.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace vcc {

/// A set of parallel straight roads, each cut into equal-length zones.
/// Road a runs along +x at y = origin.y + a * road_spacing_m; zone (a, b) has
/// flat index a * segments + b.
struct RoadGrid {
    std::size_t roads = 3;
    std::size_t segments = 3;
    double zone_length_m = 40.0;
    double zone_width_m = 10.0;
    double road_spacing_m = 250.0;
    Point2 origin{};

    void validate() const;
    std::size_t zone_count() const { return roads * segments; }
    std::size_t zone_index(std::size_t road, std::size_t segment) const { return road * segments + segment; }
    double road_length_m() const { return static_cast<double>(segments) * zone_length_m; }
    Point2 zone_center(std::size_t zone) const;
    std::vector<Point2> zone_centers() const;
    /// Point at `offset_m` along road `road`, on the lane center.
    Point2 point_on_road(std::size_t road, double offset_m) const;
    /// Zone whose center is nearest to `p` (lowest index on ties).
    std::size_t nearest_zone(const Point2& p) const;
};

struct VehicleState {
    std::size_t id = 0;
    std::size_t road = 0;
    double offset_m = 0.0; // distance travelled along the road, in [0, road length)
    double speed_mps = 0.0;
    Point2 position{};
    std::size_t zone = 0;
};

/// Constant-speed lane following with wrap-around at the end of the road.
void advance_vehicles(std::vector<VehicleState>& vehicles, double dt_s, const RoadGrid& grid);

/// Source of vehicle positions as a continuous function of time.
class Mobility {
public:
    virtual ~Mobility() = default;
    virtual std::size_t vehicle_count() const = 0;
    /// Vehicles present at `time_s`.
    virtual std::vector<VehicleState> snapshot(double time_s) const = 0;
    /// State of one vehicle at `time_s`; the last known sample if it has left the trace.
    virtual std::optional<VehicleState> locate(std::size_t vehicle, double time_s) const = 0;
};

class SyntheticMobility final : public Mobility {
public:
    /// Places `count` vehicles uniformly on the roads. Each drives at its road's
    /// speed limit times a factor drawn uniformly from [factor_min, 1].
    SyntheticMobility(const RoadGrid& grid, std::size_t count, const std::vector<double>& speed_limits_mps,
                      double factor_min, std::mt19937_64& rng);
    SyntheticMobility(const RoadGrid& grid, std::vector<VehicleState> initial);

    std::size_t vehicle_count() const override { return initial_.size(); }
    std::vector<VehicleState> snapshot(double time_s) const override;
    std::optional<VehicleState> locate(std::size_t vehicle, double time_s) const override;

private:
    RoadGrid grid_;
    std::vector<VehicleState> initial_;
};

struct TraceSample {
    double time_s = 0.0;
    std::size_t vehicle = 0;
    Point2 position{};
};

/// Parses CSV rows `time_s,vehicle_id,x_m,y_m`. A header line and lines
/// starting with '#' are skipped. Throws std::runtime_error on malformed rows.
std::vector<TraceSample> read_trace_csv(std::istream& in);

/// Replays recorded positions. Between samples positions are interpolated
/// linearly; at sample times they are returned verbatim.
class TraceMobility final : public Mobility {
public:
    TraceMobility(const RoadGrid& grid, std::vector<TraceSample> samples);

    std::size_t vehicle_count() const override { return tracks_.size(); }
    std::vector<VehicleState> snapshot(double time_s) const override;
    std::optional<VehicleState> locate(std::size_t vehicle, double time_s) const override;

private:
    VehicleState at(std::size_t slot, double time_s) const;

    RoadGrid grid_;
    std::vector<std::size_t> ids_;
    std::vector<std::vector<TraceSample>> tracks_; // sorted by time
};

} // namespace vcc

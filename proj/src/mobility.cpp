#include "vcc/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vcc {

void RoadGrid::validate() const
{
    if (roads < 1 || segments < 1)
        throw std::invalid_argument("road grid needs at least one road and one segment");
    if (!(zone_length_m > 0.0) || !(zone_width_m > 0.0))
        throw std::invalid_argument("zone dimensions must be positive");
    if (!(road_spacing_m >= 0.0))
        throw std::invalid_argument("road spacing must be non-negative");
}

Point2 RoadGrid::point_on_road(std::size_t road, double offset_m) const
{
    return {origin.x + offset_m, origin.y + static_cast<double>(road) * road_spacing_m + 0.5 * zone_width_m};
}

Point2 RoadGrid::zone_center(std::size_t zone) const
{
    const std::size_t a = zone / segments;
    const std::size_t b = zone % segments;
    return point_on_road(a, (static_cast<double>(b) + 0.5) * zone_length_m);
}

std::vector<Point2> RoadGrid::zone_centers() const
{
    std::vector<Point2> centers(zone_count());
    for (std::size_t z = 0; z < centers.size(); ++z)
        centers[z] = zone_center(z);
    return centers;
}

std::size_t RoadGrid::nearest_zone(const Point2& p) const
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < zone_count(); ++z) {
        const double d = distance_m(p, zone_center(z));
        if (d < best_d) {
            best_d = d;
            best = z;
        }
    }
    return best;
}

namespace {

void place_on_road(VehicleState& v, const RoadGrid& grid)
{
    const double length = grid.road_length_m();
    v.offset_m = std::fmod(v.offset_m, length);
    if (v.offset_m < 0.0)
        v.offset_m += length;
    v.position = grid.point_on_road(v.road, v.offset_m);
    auto segment = static_cast<std::size_t>(v.offset_m / grid.zone_length_m);
    v.zone = grid.zone_index(v.road, std::min(segment, grid.segments - 1));
}

} // namespace

void advance_vehicles(std::vector<VehicleState>& vehicles, double dt_s, const RoadGrid& grid)
{
    if (dt_s < 0.0)
        throw std::invalid_argument("cannot advance vehicles backwards in time");
    if (dt_s == 0.0)
        return;
    for (auto& v : vehicles) {
        v.offset_m += v.speed_mps * dt_s;
        place_on_road(v, grid);
    }
}

SyntheticMobility::SyntheticMobility(const RoadGrid& grid, std::size_t count,
                                     const std::vector<double>& speed_limits_mps, double factor_min,
                                     std::mt19937_64& rng)
    : grid_(grid)
{
    grid_.validate();
    if (speed_limits_mps.size() != grid.roads)
        throw std::invalid_argument("expected one speed limit per road");
    std::uniform_int_distribution<std::size_t> pick_road(0, grid.roads - 1);
    std::uniform_real_distribution<double> pick_offset(0.0, grid.road_length_m());
    std::uniform_real_distribution<double> pick_factor(factor_min, 1.0);
    initial_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        VehicleState& v = initial_[i];
        v.id = i;
        v.road = pick_road(rng);
        v.offset_m = pick_offset(rng);
        v.speed_mps = speed_limits_mps[v.road] * pick_factor(rng);
        place_on_road(v, grid_);
    }
}

SyntheticMobility::SyntheticMobility(const RoadGrid& grid, std::vector<VehicleState> initial)
    : grid_(grid), initial_(std::move(initial))
{
    grid_.validate();
    for (auto& v : initial_)
        place_on_road(v, grid_);
}

std::vector<VehicleState> SyntheticMobility::snapshot(double time_s) const
{
    std::vector<VehicleState> out(initial_);
    advance_vehicles(out, time_s, grid_);
    return out;
}

std::optional<VehicleState> SyntheticMobility::locate(std::size_t vehicle, double time_s) const
{
    if (vehicle >= initial_.size())
        return std::nullopt;
    std::vector<VehicleState> one{initial_[vehicle]};
    advance_vehicles(one, time_s, grid_);
    return one.front();
}

std::vector<TraceSample> read_trace_csv(std::istream& in)
{
    std::vector<TraceSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        if (line_no == 1 && line.find("time") != std::string::npos)
            continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 4)
            throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected 4 columns");
        try {
            TraceSample s;
            s.time_s = std::stod(cells[0]);
            s.vehicle = static_cast<std::size_t>(std::stoull(cells[1]));
            s.position = {std::stod(cells[2]), std::stod(cells[3])};
            samples.push_back(s);
        } catch (const std::logic_error&) {
            throw std::runtime_error("trace line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return samples;
}

TraceMobility::TraceMobility(const RoadGrid& grid, std::vector<TraceSample> samples) : grid_(grid)
{
    grid_.validate();
    std::map<std::size_t, std::vector<TraceSample>> by_id;
    for (const auto& s : samples)
        by_id[s.vehicle].push_back(s);
    for (auto& [id, track] : by_id) {
        std::stable_sort(track.begin(), track.end(),
                         [](const TraceSample& a, const TraceSample& b) { return a.time_s < b.time_s; });
        ids_.push_back(id);
        tracks_.push_back(std::move(track));
    }
}

VehicleState TraceMobility::at(std::size_t slot, double time_s) const
{
    const auto& track = tracks_[slot];
    VehicleState v;
    v.id = ids_[slot];
    auto it = std::lower_bound(track.begin(), track.end(), time_s,
                               [](const TraceSample& s, double t) { return s.time_s < t; });
    if (it == track.end()) {
        v.position = track.back().position;
    } else if (it == track.begin()) {
        v.position = it->position;
        if (track.size() > 1 && track[1].time_s > it->time_s)
            v.speed_mps = distance_m(it->position, track[1].position) / (track[1].time_s - it->time_s);
    } else {
        const auto& lo = *(it - 1);
        const auto& hi = *it;
        const double dt = hi.time_s - lo.time_s;
        if (hi.time_s == time_s || dt <= 0.0) {
            v.position = hi.position;
        } else {
            const double w = (time_s - lo.time_s) / dt;
            v.position = {lo.position.x + w * (hi.position.x - lo.position.x),
                          lo.position.y + w * (hi.position.y - lo.position.y)};
        }
        if (dt > 0.0)
            v.speed_mps = distance_m(lo.position, hi.position) / dt;
    }
    v.zone = grid_.nearest_zone(v.position);
    v.road = v.zone / grid_.segments;
    return v;
}

std::vector<VehicleState> TraceMobility::snapshot(double time_s) const
{
    std::vector<VehicleState> out;
    for (std::size_t k = 0; k < tracks_.size(); ++k)
        if (tracks_[k].front().time_s <= time_s && time_s <= tracks_[k].back().time_s)
            out.push_back(at(k, time_s));
    return out;
}

std::optional<VehicleState> TraceMobility::locate(std::size_t vehicle, double time_s) const
{
    auto it = std::lower_bound(ids_.begin(), ids_.end(), vehicle);
    if (it == ids_.end() || *it != vehicle)
        return std::nullopt;
    return at(static_cast<std::size_t>(it - ids_.begin()), time_s);
}

} // namespace vcc

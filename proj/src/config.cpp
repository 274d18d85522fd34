#include "vcc/config.hpp"

#include <cstdio>
#include <fstream>

namespace vcc {

Json load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

void apply_override(Json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }
    std::string pointer = "/";
    for (char ch : key)
        pointer += ch == '.' ? '/' : ch;
    try {
        doc[Json::json_pointer(pointer)] = value;
    } catch (const Json::exception& e) {
        throw ConfigError("cannot apply override " + assignment + ": " + e.what());
    }
}

std::string config_hash(const Json& doc)
{
    const std::string text = doc.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

template <class T>
void read(const Json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

Point2 point(const Json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("points are written as [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

Scenario scenario_from_json(const Json& j)
{
    if (!j.is_object())
        throw ConfigError("scenario must be a JSON object");
    Scenario s = desk_scenario();
    if (j.contains("preset")) {
        const auto preset = j.at("preset").get<std::string>();
        if (preset == "paper")
            s = paper_scenario();
        else if (preset != "desk")
            throw ConfigError("unknown scenario preset '" + preset + "'");
    }
    try {
        if (j.contains("grid")) {
            const Json& g = j.at("grid");
            read(g, "roads", s.grid.roads);
            read(g, "segments", s.grid.segments);
            read(g, "zone_length_m", s.grid.zone_length_m);
            read(g, "zone_width_m", s.grid.zone_width_m);
            read(g, "road_spacing_m", s.grid.road_spacing_m);
            if (g.contains("origin"))
                s.grid.origin = point(g.at("origin"));
        }
        if (j.contains("rsus")) {
            s.rsus.clear();
            for (const auto& p : j.at("rsus"))
                s.rsus.push_back(point(p));
        }
        if (j.contains("radio")) {
            const Json& r = j.at("radio");
            read(r, "carrier_freq_mhz", s.radio.carrier_freq_mhz);
            read(r, "antenna_height_m", s.radio.antenna_height_m);
            read(r, "vehicle_tx_power_dbm", s.radio.vehicle_tx_power_dbm);
            read(r, "rsu_tx_power_dbm", s.radio.rsu_tx_power_dbm);
            read(r, "noise_power_v2i_dbm", s.radio.noise_power_v2i_dbm);
            read(r, "noise_power_r2r_dbm", s.radio.noise_power_r2r_dbm);
            read(r, "zone_bandwidth_hz", s.radio.zone_bandwidth_hz);
            read(r, "rsu_bandwidth_hz", s.radio.rsu_bandwidth_hz);
            read(r, "snr_offload_threshold_db", s.radio.snr_offload_threshold_db);
            read(r, "snr_deliver_threshold_db", s.radio.snr_deliver_threshold_db);
            read(r, "min_distance_m", s.radio.min_distance_m);
        }
        if (j.contains("compute")) {
            const Json& c = j.at("compute");
            if (c.contains("rsu_capacity_gcps")) {
                const Json& cap = c.at("rsu_capacity_gcps");
                s.compute.rsu_capacity.clear();
                if (cap.is_array()) {
                    for (const auto& v : cap)
                        s.compute.rsu_capacity.push_back(v.get<double>() * 1e9);
                } else {
                    s.compute.rsu_capacity.assign(s.rsus.size(), cap.get<double>() * 1e9);
                }
            } else if (s.compute.rsu_capacity.size() != s.rsus.size()) {
                const double c0 = s.compute.rsu_capacity.empty() ? 4.0e9 : s.compute.rsu_capacity.front();
                s.compute.rsu_capacity.assign(s.rsus.size(), c0);
            }
            read(c, "cycles_per_bit", s.compute.cycles_per_bit);
            read(c, "slot_length_s", s.compute.slot_length_s);
        } else if (s.compute.rsu_capacity.size() != s.rsus.size() && !s.compute.rsu_capacity.empty()) {
            s.compute.rsu_capacity.assign(s.rsus.size(), s.compute.rsu_capacity.front());
        }
        if (j.contains("traffic")) {
            const Json& t = j.at("traffic");
            read(t, "vehicles", s.traffic.vehicles);
            read(t, "speed_limits_mps", s.traffic.speed_limits_mps);
            read(t, "speed_factor_min", s.traffic.speed_factor_min);
            read(t, "arrival_rate", s.traffic.arrival_rate);
            double mbit = s.traffic.task_min_bits / 1e6;
            read(t, "task_min_mbit", mbit);
            s.traffic.task_min_bits = mbit * 1e6;
            mbit = s.traffic.task_max_bits / 1e6;
            read(t, "task_max_mbit", mbit);
            s.traffic.task_max_bits = mbit * 1e6;
            read(t, "trace_file", s.traffic.trace_file);
        }
        double lambda = s.penalty_per_bit * 1e6;
        read(j, "penalty_per_mbit", lambda);
        s.penalty_per_bit = lambda / 1e6;
        read(j, "horizon", s.horizon);
        read(j, "seed", s.seed);
        if (j.contains("tpsa"))
            read(j.at("tpsa"), "score_as_printed", s.tpsa.score_as_printed);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return s;
}

Json scenario_to_json(const Scenario& s)
{
    Json j;
    j["grid"] = {{"roads", s.grid.roads},
                 {"segments", s.grid.segments},
                 {"zone_length_m", s.grid.zone_length_m},
                 {"zone_width_m", s.grid.zone_width_m},
                 {"road_spacing_m", s.grid.road_spacing_m},
                 {"origin", {s.grid.origin.x, s.grid.origin.y}}};
    j["rsus"] = Json::array();
    for (const auto& p : s.rsus)
        j["rsus"].push_back({p.x, p.y});
    const auto& r = s.radio;
    j["radio"] = {{"carrier_freq_mhz", r.carrier_freq_mhz},
                  {"antenna_height_m", r.antenna_height_m},
                  {"vehicle_tx_power_dbm", r.vehicle_tx_power_dbm},
                  {"rsu_tx_power_dbm", r.rsu_tx_power_dbm},
                  {"noise_power_v2i_dbm", r.noise_power_v2i_dbm},
                  {"noise_power_r2r_dbm", r.noise_power_r2r_dbm},
                  {"zone_bandwidth_hz", r.zone_bandwidth_hz},
                  {"rsu_bandwidth_hz", r.rsu_bandwidth_hz},
                  {"snr_offload_threshold_db", r.snr_offload_threshold_db},
                  {"snr_deliver_threshold_db", r.snr_deliver_threshold_db},
                  {"min_distance_m", r.min_distance_m}};
    Json caps = Json::array();
    for (double c : s.compute.rsu_capacity)
        caps.push_back(c / 1e9);
    j["compute"] = {{"rsu_capacity_gcps", caps},
                    {"cycles_per_bit", s.compute.cycles_per_bit},
                    {"slot_length_s", s.compute.slot_length_s}};
    j["traffic"] = {{"vehicles", s.traffic.vehicles},
                    {"speed_limits_mps", s.traffic.speed_limits_mps},
                    {"speed_factor_min", s.traffic.speed_factor_min},
                    {"arrival_rate", s.traffic.arrival_rate},
                    {"task_min_mbit", s.traffic.task_min_bits / 1e6},
                    {"task_max_mbit", s.traffic.task_max_bits / 1e6},
                    {"trace_file", s.traffic.trace_file}};
    j["penalty_per_mbit"] = s.penalty_per_bit * 1e6;
    j["horizon"] = s.horizon;
    j["seed"] = s.seed;
    j["tpsa"] = {{"score_as_printed", s.tpsa.score_as_printed}};
    return j;
}

DdpgConfig ddpg_from_json(const Json& j)
{
    DdpgConfig c;
    if (j.is_null())
        return c;
    if (!j.is_object())
        throw ConfigError("ddpg section must be a JSON object");
    try {
        read(j, "discount", c.discount);
        read(j, "actor_lr", c.actor_lr);
        read(j, "critic_lr", c.critic_lr);
        read(j, "lr_decay", c.lr_decay);
        read(j, "lr_decay_every", c.lr_decay_every);
        if (j.contains("optimizer")) {
            const auto name = j.at("optimizer").get<std::string>();
            if (name == "sgd")
                c.optimizer = nn::Optimizer::Kind::Sgd;
            else if (name == "adam")
                c.optimizer = nn::Optimizer::Kind::Adam;
            else
                throw ConfigError("unknown optimizer '" + name + "'");
        }
        read(j, "tau", c.tau);
        read(j, "noise_initial", c.noise_initial);
        read(j, "noise_decay", c.noise_decay);
        read(j, "noise_floor", c.noise_floor);
        read(j, "train_every", c.train_every);
        read(j, "train_steps", c.train_steps);
        read(j, "episodes", c.episodes);
        read(j, "buffer_capacity", c.buffer_capacity);
        read(j, "batch_size", c.batch_size);
        read(j, "cost_scale", c.cost_scale);
        read(j, "action_channels", c.action_channels);
        read(j, "paper_shapes", c.paper_shapes);
        read(j, "norm_momentum", c.norm_momentum);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("ddpg: ") + e.what());
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("ddpg: ") + e.what());
    }
    return c;
}

Json ddpg_to_json(const DdpgConfig& c)
{
    return {{"discount", c.discount},
            {"actor_lr", c.actor_lr},
            {"critic_lr", c.critic_lr},
            {"lr_decay", c.lr_decay},
            {"lr_decay_every", c.lr_decay_every},
            {"optimizer", c.optimizer == nn::Optimizer::Kind::Adam ? "adam" : "sgd"},
            {"tau", c.tau},
            {"noise_initial", c.noise_initial},
            {"noise_decay", c.noise_decay},
            {"noise_floor", c.noise_floor},
            {"train_every", c.train_every},
            {"train_steps", c.train_steps},
            {"episodes", c.episodes},
            {"buffer_capacity", c.buffer_capacity},
            {"batch_size", c.batch_size},
            {"cost_scale", c.cost_scale},
            {"action_channels", c.action_channels},
            {"paper_shapes", c.paper_shapes},
            {"norm_momentum", c.norm_momentum}};
}

} // namespace vcc

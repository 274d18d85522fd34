#pragma once

#include "vcc/agents.hpp"
#include "vcc/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcc {

/// Malformed or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

/// Reads a JSON configuration file. Throws ConfigError.
Json load_config_file(const std::string& path);

/// Applies `dotted.key=value`. The value is parsed as JSON when possible and
/// kept as a string otherwise. Throws ConfigError on a missing '='.
void apply_override(Json& doc, const std::string& assignment);

/// Hex FNV-1a hash of the canonical (sorted-key) JSON text.
std::string config_hash(const Json& doc);

/// Scenario keys (all optional, defaults from desk_scenario()):
///   grid.{roads,segments,zone_length_m,zone_width_m,road_spacing_m,origin}
///   rsus: [[x, y], ...]
///   radio.{carrier_freq_mhz,antenna_height_m,vehicle_tx_power_dbm,rsu_tx_power_dbm,
///          noise_power_v2i_dbm,noise_power_r2r_dbm,zone_bandwidth_hz,rsu_bandwidth_hz,
///          snr_offload_threshold_db,snr_deliver_threshold_db,min_distance_m}
///   compute.{rsu_capacity_gcps (number or list),cycles_per_bit,slot_length_s}
///   traffic.{vehicles,speed_limits_mps,speed_factor_min,arrival_rate,
///            task_min_mbit,task_max_mbit,trace_file}
///   penalty_per_mbit, horizon, seed, tpsa.score_as_printed
///   preset: "desk" | "paper" selects the base before the keys above apply.
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);

/// ddpg.{discount,actor_lr,critic_lr,lr_decay,lr_decay_every,optimizer ("sgd"|"adam"),
///       tau,noise_initial,noise_decay,noise_floor,train_every,train_steps,episodes,
///       buffer_capacity,batch_size,cost_scale,action_channels,paper_shapes,norm_momentum}
DdpgConfig ddpg_from_json(const Json& j);
Json ddpg_to_json(const DdpgConfig& c);

} // namespace vcc

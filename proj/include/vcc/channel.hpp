#pragma once

#include <cstddef>
#include <vector>

namespace vcc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance_m(const Point2& a, const Point2& b);

/// Radio constants for the V2I (vehicle to RSU) and R2R (RSU to RSU) links.
/// Powers and noise are in dBm, thresholds in dB, bandwidths in Hz.
struct RadioParams {
    double carrier_freq_mhz = 2800.0;
    double antenna_height_m = 10.0;
    double vehicle_tx_power_dbm = 27.0;
    double rsu_tx_power_dbm = 37.0;
    double noise_power_v2i_dbm = -93.0;
    double noise_power_r2r_dbm = -93.0;
    double zone_bandwidth_hz = 1.0e6;
    double rsu_bandwidth_hz = 2.0e6;
    double snr_offload_threshold_db = 7.0;
    double snr_deliver_threshold_db = 7.0;
    // Link distances below this are clamped; the path-loss model diverges at 0.
    double min_distance_m = 1.0;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

struct Geometry {
    std::vector<Point2> zone_centers;
    std::vector<Point2> rsu_positions;

    void validate() const;
    std::size_t zone_count() const { return zone_centers.size(); }
    std::size_t rsu_count() const { return rsu_positions.size(); }
};

// dB <-> linear conversions. Every conversion in the library goes through these.
double db_to_linear(double db);
double linear_to_db(double linear);

/// Urban macro path loss in dB for a link of `distance_km`.
/// Throws std::domain_error for non-positive distances.
double path_loss_db(double distance_km, const RadioParams& params);

/// Received SNR in dB: transmit power minus loss minus noise.
double snr_db(double tx_power_dbm, double loss_db, double noise_dbm);
double snr_linear(double tx_power_dbm, double loss_db, double noise_dbm);

/// Shannon rate in bit/s for a given bandwidth and linear SNR.
double shannon_rate(double bandwidth_hz, double snr);

/// Path loss between two points, with the distance clamped to min_distance_m.
double link_loss_db(const Point2& a, const Point2& b, const RadioParams& params);

/// Offload rate from the vehicles of `zone` to `rsu`.
double rate_v2i(std::size_t zone, std::size_t rsu, const Geometry& geom, const RadioParams& params);

/// Forwarding rate between two RSUs. The self link has infinite rate.
double rate_r2r(std::size_t r, std::size_t r_prime, const Geometry& geom, const RadioParams& params);

/// Shared SNR gate: true when tx - loss - noise >= threshold (all in dB).
bool link_feasible(double tx_power_dbm, double noise_dbm, double threshold_db, double loss_db);

bool offload_feasible(std::size_t zone, std::size_t rsu, const Geometry& geom, const RadioParams& params);
bool forward_feasible(std::size_t r, std::size_t r_prime, const Geometry& geom, const RadioParams& params);
/// Result delivery from `rsu` to a vehicle located in `zone`.
bool deliver_feasible(std::size_t zone, std::size_t rsu, const Geometry& geom, const RadioParams& params);

/// Index of the RSU with the highest V2I SNR for `zone` (lowest index on ties).
std::size_t strongest_rsu(std::size_t zone, const Geometry& geom, const RadioParams& params);

} // namespace vcc

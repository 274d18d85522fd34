#include "vcc/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vcc {

double distance_m(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void RadioParams::validate() const
{
    const double values[] = {carrier_freq_mhz,  antenna_height_m,    vehicle_tx_power_dbm, rsu_tx_power_dbm,
                             noise_power_v2i_dbm, noise_power_r2r_dbm, zone_bandwidth_hz,    rsu_bandwidth_hz,
                             snr_offload_threshold_db, snr_deliver_threshold_db, min_distance_m};
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("radio parameters must be finite");
    if (carrier_freq_mhz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    if (antenna_height_m <= 0.0 || antenna_height_m >= 250.0)
        throw std::invalid_argument("antenna height must lie in (0, 250) m");
    if (zone_bandwidth_hz <= 0.0 || rsu_bandwidth_hz <= 0.0)
        throw std::invalid_argument("bandwidths must be positive");
    if (min_distance_m <= 0.0)
        throw std::invalid_argument("minimum link distance must be positive");
}

void Geometry::validate() const
{
    if (rsu_positions.empty())
        throw std::invalid_argument("geometry needs at least one RSU");
    for (const auto* pts : {&zone_centers, &rsu_positions})
        for (const auto& p : *pts)
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw std::invalid_argument("geometry coordinates must be finite");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double path_loss_db(double distance_km, const RadioParams& params)
{
    if (!(distance_km > 0.0))
        throw std::domain_error("path loss needs a positive distance, got " + std::to_string(distance_km));
    const double hb = params.antenna_height_m;
    return 40.0 * (1.0 - 4.0e-3 * hb) * std::log10(distance_km) - 18.0 * std::log10(hb)
           + 21.0 * std::log10(params.carrier_freq_mhz) + 80.0;
}

double snr_db(double tx_power_dbm, double loss_db, double noise_dbm) { return tx_power_dbm - loss_db - noise_dbm; }

double snr_linear(double tx_power_dbm, double loss_db, double noise_dbm)
{
    return db_to_linear(snr_db(tx_power_dbm, loss_db, noise_dbm));
}

double shannon_rate(double bandwidth_hz, double snr) { return bandwidth_hz * std::log2(1.0 + snr); }

double link_loss_db(const Point2& a, const Point2& b, const RadioParams& params)
{
    const double d = std::max(distance_m(a, b), params.min_distance_m);
    return path_loss_db(d / 1000.0, params);
}

double rate_v2i(std::size_t zone, std::size_t rsu, const Geometry& geom, const RadioParams& params)
{
    const double loss = link_loss_db(geom.zone_centers.at(zone), geom.rsu_positions.at(rsu), params);
    return shannon_rate(params.zone_bandwidth_hz,
                        snr_linear(params.vehicle_tx_power_dbm, loss, params.noise_power_v2i_dbm));
}

double rate_r2r(std::size_t r, std::size_t r_prime, const Geometry& geom, const RadioParams& params)
{
    if (r == r_prime)
        return std::numeric_limits<double>::infinity();
    const double loss = link_loss_db(geom.rsu_positions.at(r), geom.rsu_positions.at(r_prime), params);
    return shannon_rate(params.rsu_bandwidth_hz, snr_linear(params.rsu_tx_power_dbm, loss, params.noise_power_r2r_dbm));
}

bool link_feasible(double tx_power_dbm, double noise_dbm, double threshold_db, double loss_db)
{
    return snr_db(tx_power_dbm, loss_db, noise_dbm) >= threshold_db;
}

bool offload_feasible(std::size_t zone, std::size_t rsu, const Geometry& geom, const RadioParams& params)
{
    const double loss = link_loss_db(geom.zone_centers.at(zone), geom.rsu_positions.at(rsu), params);
    return link_feasible(params.vehicle_tx_power_dbm, params.noise_power_v2i_dbm, params.snr_offload_threshold_db, loss);
}

bool forward_feasible(std::size_t r, std::size_t r_prime, const Geometry& geom, const RadioParams& params)
{
    if (r == r_prime)
        return true;
    const double loss = link_loss_db(geom.rsu_positions.at(r), geom.rsu_positions.at(r_prime), params);
    return link_feasible(params.rsu_tx_power_dbm, params.noise_power_r2r_dbm, params.snr_offload_threshold_db, loss);
}

bool deliver_feasible(std::size_t zone, std::size_t rsu, const Geometry& geom, const RadioParams& params)
{
    const double loss = link_loss_db(geom.zone_centers.at(zone), geom.rsu_positions.at(rsu), params);
    return link_feasible(params.rsu_tx_power_dbm, params.noise_power_r2r_dbm, params.snr_deliver_threshold_db, loss);
}

std::size_t strongest_rsu(std::size_t zone, const Geometry& geom, const RadioParams& params)
{
    std::size_t best = 0;
    double best_snr = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < geom.rsu_count(); ++r) {
        const double loss = link_loss_db(geom.zone_centers.at(zone), geom.rsu_positions[r], params);
        const double s = snr_db(params.vehicle_tx_power_dbm, loss, params.noise_power_v2i_dbm);
        if (s > best_snr) {
            best_snr = s;
            best = r;
        }
    }
    return best;
}

} // namespace vcc

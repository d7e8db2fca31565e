// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sixdmhs/channel.hpp"
#include "sixdmhs/idet.hpp"
#include "sixdmhs/rhs.hpp"
#include "sixdmhs/sensing.hpp"

namespace sixdmhs {

enum class SchemeId : uint8_t {
    Proposed,
    Fpa,
    RotationOnly,
    TranslationOnly,
    LsSensing,
    PerfectCsi,
    LosOnly,
};

const char* scheme_name(SchemeId s);
SchemeId scheme_from_name(const std::string& name);

struct OverheadModel {
    double t_c = 120.0;
    double alpha = 0.32;
    double s = 1.0;  // pilot blocks per path

    double ts_equivalent(int k, int b, int q) const {  // T_s,1
        return alpha * k * s * std::log2(static_cast<double>(b) * q);
    }
    double ts_full_csi(int k, int b, int m) const {  // T_s,2
        return alpha * k * s * std::log2(static_cast<double>(b) * m);
    }
    double factor(double ts) const { return std::max(0.0, (t_c - ts) / t_c); }
};

// Full experiment configuration; loads from / saves to a documented JSON
// schema. All powers are dBm at the interface and watts internally.
struct Scenario {
    // carrier
    double f_c = 30e9;

    // surface
    int m_x = 16;
    int m_y = 16;
    double element_spacing_wl = 0.5;
    int n_feeds = 1;
    double efficiency = 1.0;
    double refractive = 3.0;
    double feed_min_dist_wl = 0.5;

    // fleet
    int n_surfaces = 3;  // B = K

    // translation slots
    int n_slots = 20;
    double slot_radius = 1.0;
    double slot_z_min = 0.0;
    double slot_z_max = 1.0;

    // power
    double p_tx_dbm = 40.0;
    double sigma0_dbm = -100.0;
    double sigma_cov_dbm = -50.0;

    // channel; the desk-scale annulus keeps receivers inside the EH
    // activation range of a 16x16 surface
    double rician_k = 10.0;
    int n_nlos = 3;
    double pathloss_exponent = 2.0;
    MaskMode mask_mode = MaskMode::Position;
    double rx_range_min = 4.0;
    double rx_range_max = 8.0;
    double rx_height = 3.0;
    double rx_azimuth_min_deg = -180.0;
    double rx_azimuth_max_deg = 180.0;

    // sensing
    int sense_n_x = 32;
    int sense_n_y = 32;
    double sense_spacing_wl = 0.5;
    double p_sense_dbm = 10.0;
    double sense_noise_dbm = -100.0;
    double sigma1 = 0.5;
    double reference_gain = 1e6;  // A = reference_gain * P_S * Omega
    int zero_pad = 4;
    BinMapping bin_mapping = BinMapping::Standard;
    int ls_snapshots = 16;

    // EH curve
    EhCurve eh_curve;

    // constraints
    double d_min = 0.1;

    // downlink optimization
    double r0 = 2.0;
    double epsilon = 1e-4;
    double csi_noise_var = 0.0;
    int subgradient_iters = 2000;

    // feed search
    uint64_t search_seed = 1;
    int search_restarts = 24;

    // overhead model
    OverheadModel overhead;

    // experiment
    int trials = 50;
    uint64_t master_seed = 1;
    double rmse_injection = -1.0;  // >= 0 replaces sensing by perturbed truth
    std::vector<SchemeId> schemes = {SchemeId::Proposed};

    double wavelength() const { return kSpeedOfLight / f_c; }
    double element_spacing() const { return element_spacing_wl * wavelength(); }
    double sense_spacing() const { return sense_spacing_wl * wavelength(); }
    double p_tx() const { return dbm_to_watt(p_tx_dbm); }
    double sigma0_sq() const { return dbm_to_watt(sigma0_dbm); }
    double sigma_cov_sq() const { return dbm_to_watt(sigma_cov_dbm); }
    double p_sense() const { return dbm_to_watt(p_sense_dbm); }
    double sense_noise_var() const { return dbm_to_watt(sense_noise_dbm); }

    ChannelParams channel_params() const;
    SensingLayout sensing_layout() const;

    // paper-scale preset: M = 32x32, M1 = 50
    void apply_paper_scale();

    std::string to_json() const;
    static Scenario from_json(const std::string& text);
    static Scenario load(const std::string& path);
    void save(const std::string& path) const;

    // FNV-1a hash of the canonical JSON dump, for the run manifest
    uint64_t config_hash() const;
};

}  // namespace sixdmhs

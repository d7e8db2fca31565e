// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sixdmhs {

using nlohmann::json;

const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::Proposed: return "proposed";
        case SchemeId::Fpa: return "fpa";
        case SchemeId::RotationOnly: return "rotation_only";
        case SchemeId::TranslationOnly: return "translation_only";
        case SchemeId::LsSensing: return "ls_sensing";
        case SchemeId::PerfectCsi: return "perfect_csi";
        case SchemeId::LosOnly: return "los_only";
    }
    return "unknown";
}

SchemeId scheme_from_name(const std::string& name) {
    for (auto s : {SchemeId::Proposed, SchemeId::Fpa, SchemeId::RotationOnly,
                   SchemeId::TranslationOnly, SchemeId::LsSensing, SchemeId::PerfectCsi,
                   SchemeId::LosOnly})
        if (name == scheme_name(s)) return s;
    throw std::invalid_argument("unknown scheme: " + name);
}

ChannelParams Scenario::channel_params() const {
    ChannelParams p;
    p.f_c = f_c;
    p.rician_k = rician_k;
    p.n_nlos = n_nlos;
    p.pathloss_exponent = pathloss_exponent;
    p.mask_mode = mask_mode;
    p.rx_range_min = rx_range_min;
    p.rx_range_max = rx_range_max;
    p.rx_height = rx_height;
    p.rx_azimuth_min = rx_azimuth_min_deg * kPi / 180.0;
    p.rx_azimuth_max = rx_azimuth_max_deg * kPi / 180.0;
    return p;
}

SensingLayout Scenario::sensing_layout() const {
    SensingLayout s;
    s.n_x = sense_n_x;
    s.n_y = sense_n_y;
    s.d_s = sense_spacing();
    return s;
}

void Scenario::apply_paper_scale() {
    m_x = 32;
    m_y = 32;
    n_slots = 50;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

std::string Scenario::to_json() const {
    json j;
    j["carrier_hz"] = f_c;
    j["surface"] = {{"m_x", m_x},
                    {"m_y", m_y},
                    {"element_spacing_wl", element_spacing_wl},
                    {"n_feeds", n_feeds},
                    {"efficiency", efficiency},
                    {"refractive", refractive},
                    {"feed_min_dist_wl", feed_min_dist_wl}};
    j["n_surfaces"] = n_surfaces;
    j["slots"] = {{"count", n_slots},
                  {"radius_m", slot_radius},
                  {"z_min", slot_z_min},
                  {"z_max", slot_z_max}};
    j["power"] = {{"p_tx_dbm", p_tx_dbm},
                  {"sigma0_dbm", sigma0_dbm},
                  {"sigma_cov_dbm", sigma_cov_dbm}};
    j["channel"] = {{"rician_k", rician_k},
                    {"n_nlos", n_nlos},
                    {"pathloss_exponent", pathloss_exponent},
                    {"mask_mode", mask_mode == MaskMode::Position ? "position" : "normal"},
                    {"rx_range_min_m", rx_range_min},
                    {"rx_range_max_m", rx_range_max},
                    {"rx_height_m", rx_height},
                    {"rx_azimuth_min_deg", rx_azimuth_min_deg},
                    {"rx_azimuth_max_deg", rx_azimuth_max_deg}};
    j["sensing"] = {{"n_x", sense_n_x},
                    {"n_y", sense_n_y},
                    {"spacing_wl", sense_spacing_wl},
                    {"p_sense_dbm", p_sense_dbm},
                    {"noise_dbm", sense_noise_dbm},
                    {"sigma1", sigma1},
                    {"reference_gain", reference_gain},
                    {"zero_pad", zero_pad},
                    {"bin_mapping", bin_mapping == BinMapping::Standard ? "standard" : "paper"},
                    {"ls_snapshots", ls_snapshots}};
    j["eh_curve"] = {{"xi", eh_curve.xi},
                     {"nu", eh_curve.nu},
                     {"e0_w", eh_curve.e0},
                     {"em_w", eh_curve.em}};
    j["constraints"] = {{"d_min_m", d_min}};
    j["idet"] = {{"r0", r0},
                 {"epsilon", epsilon},
                 {"csi_noise_var", csi_noise_var},
                 {"subgradient_iters", subgradient_iters}};
    j["search"] = {{"seed", search_seed}, {"restarts", search_restarts}};
    j["overhead"] = {{"t_c", overhead.t_c}, {"alpha", overhead.alpha}, {"s", overhead.s}};
    j["trials"] = trials;
    j["master_seed"] = master_seed;
    j["rmse_injection"] = rmse_injection;
    json sch = json::array();
    for (auto s : schemes) sch.push_back(scheme_name(s));
    j["schemes"] = sch;
    return j.dump(2);
}

Scenario Scenario::from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario s;
    read(j, "carrier_hz", s.f_c);
    if (j.contains("surface")) {
        const json& t = j["surface"];
        read(t, "m_x", s.m_x);
        read(t, "m_y", s.m_y);
        read(t, "element_spacing_wl", s.element_spacing_wl);
        read(t, "n_feeds", s.n_feeds);
        read(t, "efficiency", s.efficiency);
        read(t, "refractive", s.refractive);
        read(t, "feed_min_dist_wl", s.feed_min_dist_wl);
    }
    read(j, "n_surfaces", s.n_surfaces);
    if (j.contains("slots")) {
        const json& t = j["slots"];
        read(t, "count", s.n_slots);
        read(t, "radius_m", s.slot_radius);
        read(t, "z_min", s.slot_z_min);
        read(t, "z_max", s.slot_z_max);
    }
    if (j.contains("power")) {
        const json& t = j["power"];
        read(t, "p_tx_dbm", s.p_tx_dbm);
        read(t, "sigma0_dbm", s.sigma0_dbm);
        read(t, "sigma_cov_dbm", s.sigma_cov_dbm);
    }
    if (j.contains("channel")) {
        const json& t = j["channel"];
        read(t, "rician_k", s.rician_k);
        read(t, "n_nlos", s.n_nlos);
        read(t, "pathloss_exponent", s.pathloss_exponent);
        if (t.contains("mask_mode"))
            s.mask_mode = t["mask_mode"].get<std::string>() == "normal" ? MaskMode::Normal
                                                                        : MaskMode::Position;
        read(t, "rx_range_min_m", s.rx_range_min);
        read(t, "rx_range_max_m", s.rx_range_max);
        read(t, "rx_height_m", s.rx_height);
        read(t, "rx_azimuth_min_deg", s.rx_azimuth_min_deg);
        read(t, "rx_azimuth_max_deg", s.rx_azimuth_max_deg);
    }
    if (j.contains("sensing")) {
        const json& t = j["sensing"];
        read(t, "n_x", s.sense_n_x);
        read(t, "n_y", s.sense_n_y);
        read(t, "spacing_wl", s.sense_spacing_wl);
        read(t, "p_sense_dbm", s.p_sense_dbm);
        read(t, "noise_dbm", s.sense_noise_dbm);
        read(t, "sigma1", s.sigma1);
        read(t, "reference_gain", s.reference_gain);
        read(t, "zero_pad", s.zero_pad);
        if (t.contains("bin_mapping"))
            s.bin_mapping = t["bin_mapping"].get<std::string>() == "paper" ? BinMapping::Paper
                                                                           : BinMapping::Standard;
        read(t, "ls_snapshots", s.ls_snapshots);
    }
    if (j.contains("eh_curve")) {
        const json& t = j["eh_curve"];
        read(t, "xi", s.eh_curve.xi);
        read(t, "nu", s.eh_curve.nu);
        read(t, "e0_w", s.eh_curve.e0);
        read(t, "em_w", s.eh_curve.em);
    }
    if (j.contains("constraints")) read(j["constraints"], "d_min_m", s.d_min);
    if (j.contains("idet")) {
        const json& t = j["idet"];
        read(t, "r0", s.r0);
        read(t, "epsilon", s.epsilon);
        read(t, "csi_noise_var", s.csi_noise_var);
        read(t, "subgradient_iters", s.subgradient_iters);
    }
    if (j.contains("search")) {
        const json& t = j["search"];
        read(t, "seed", s.search_seed);
        read(t, "restarts", s.search_restarts);
    }
    if (j.contains("overhead")) {
        const json& t = j["overhead"];
        read(t, "t_c", s.overhead.t_c);
        read(t, "alpha", s.overhead.alpha);
        read(t, "s", s.overhead.s);
    }
    read(j, "trials", s.trials);
    read(j, "master_seed", s.master_seed);
    read(j, "rmse_injection", s.rmse_injection);
    if (j.contains("schemes")) {
        s.schemes.clear();
        for (const auto& name : j["schemes"]) s.schemes.push_back(scheme_from_name(name));
    }
    return s;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void Scenario::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << to_json() << "\n";
}

uint64_t Scenario::config_hash() const {
    std::string dump = to_json();
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace sixdmhs

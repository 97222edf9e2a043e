#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "tipcue/model.hpp"
#include "tipcue/orbit.hpp"
#include "tipcue/tips.hpp"

namespace fixture {

using namespace tipcue;

inline Satellite overhead_sat(std::string id, GeoPoint target, double t_pass, double alt_km = 500.0,
                              double agility_deg = 30.0, double slew = 5.0, double dwell = 1.0,
                              bool ascending = true) {
    Satellite s;
    s.id = std::move(id);
    s.ephemeris = overhead_pass(target, t_pass, alt_km, 97.4, ascending);
    s.sensor_type = SensorType::EO;
    s.gsd_nadir_cm = 50.0;
    s.slew_rate_deg_s = slew;
    s.dwell_time_s = dwell;
    s.max_off_nadir_deg = agility_deg;
    return s;
}

inline Cue square_cue(std::string id, GeoPoint center, double side_m, double s, double t_peak, double sigma_s) {
    return build_static_cue(std::move(id), center, side_m, side_m, s, t_peak, sigma_s);
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("tipcue_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path source_dir() { return TIPCUE_SOURCE_DIR; }

}  // namespace fixture

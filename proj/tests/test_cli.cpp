#include <doctest.h>

#include <fmt/core.h>

#include <iostream>
#include <json.hpp>
#include <sstream>

#include "support.hpp"
#include "tipcue/cli.hpp"
#include "tipcue/scenario.hpp"

using namespace tipcue;
namespace fs = std::filesystem;

namespace {

struct Captured {
    int code{};
    std::string out;
    std::string err;
};

Captured run(std::vector<std::string> args) {
    args.insert(args.begin(), "tipcue");
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = run_cli(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

std::string default_scenario() { return (fixture::source_dir() / "scenarios" / "default.json").string(); }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("windows on the default scenario") {
    const auto dir = fixture::temp_dir("cli_windows");
    const auto r = run({"windows", "--scenario", default_scenario(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto out = lines(r.out);
    REQUIRE(out.size() == 4);
    for (int k = 0; k < 3; ++k) {
        CHECK(out[k].find(" - ") == std::string::npos);
        CHECK(std::count(out[k].begin(), out[k].end(), '(') == 1);
    }
    CHECK(out[3].rfind("feasible_cues=", 0) == 0);
    CHECK(fixture::read_text(dir / "windows.csv").rfind("cue_id,satellite_id,start,end\n", 0) == 0);
}

TEST_CASE("empty horizon gives empty output") {
    const auto dir = fixture::temp_dir("cli_empty");
    auto text = fixture::read_text(default_scenario());
    text.replace(text.find("[66600, 86340]"), 14, "[70000, 70000]");
    const auto predictions = fixture::source_dir() / "scenarios" / "default_predictions.csv";
    text.replace(text.find("\"default_predictions.csv\""), 25, "\"" + predictions.string() + "\"");
    fixture::write_text(dir / "s.json", text);
    const auto r = run({"windows", "--scenario", (dir / "s.json").string(), "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(fixture::read_text(dir / "windows.csv") == "cue_id,satellite_id,start,end\n");
}

TEST_CASE("exit codes") {
    const auto dir = fixture::temp_dir("cli_codes");
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"schedule"}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"schedule", "--scenario", (dir / "nope.json").string()}).code == 2);

    fixture::write_text(dir / "eph.json", R"({"satellites": [{"id": "X", "sensor": "EO", "gsd_nadir_cm": 50,
        "slew_rate_deg_s": 5, "dwell_time_s": 1, "orbit": {"ephemeris_csv": "gone.csv"}}]})");
    const auto missing = run({"windows", "--scenario", (dir / "eph.json").string(), "--out", dir.string()});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("gone.csv") != std::string::npos);

    // a table that ends long before the horizon fails at run time
    fixture::write_text(dir / "short.csv", "t,lat_deg,lon_deg,alt_km\n0,40,-73,500\n10,40.5,-73,500\n");
    fixture::write_text(dir / "short.json", R"({"static": {"count": 3}, "satellites": [{"id": "X", "sensor": "EO",
        "gsd_nadir_cm": 50, "slew_rate_deg_s": 5, "dwell_time_s": 1, "orbit": {"ephemeris_csv": "short.csv"}}]})");
    const auto runtime = run({"windows", "--scenario", (dir / "short.json").string(), "--out", dir.string()});
    CHECK(runtime.code == 1);
    CHECK(runtime.err.find("ephemeris out of range") != std::string::npos);
}

TEST_CASE("schedule output round-trips and validates") {
    const auto dir = fixture::temp_dir("cli_schedule");
    const auto r = run({"schedule", "--scenario", default_scenario(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(fixture::read_text(dir / "schedule.json"));
    CHECK(doc["binary_search"].get<std::size_t>() + doc["refinement"].get<std::size_t>() ==
          doc["scheduled"].get<std::size_t>());
    CHECK(r.out.find(fmt::format("scheduled={} binary={} refine={}", doc["scheduled"].get<std::size_t>(),
                                 doc["binary_search"].get<std::size_t>(), doc["refinement"].get<std::size_t>())) == 0);

    const auto schedule = parse_schedule_json(fixture::read_text(dir / "schedule.json"));
    const auto spec = load_scenario(default_scenario());
    const auto cues = generate_cues(spec);
    std::vector<WindowSet> windows;
    auto sc = spec.sampling;
    for (const auto& c : cues) windows.push_back(compute_windows(c, spec.satellites, sc));
    CHECK_NOTHROW(validate_schedule(schedule, cues, windows, spec.satellites));
    CHECK(fixture::read_text(dir / "loss_trace.csv").rfind("evaluation,k,feasible,iteration,loss\n", 0) == 0);
}

TEST_CASE("lambda boundaries change the rank order") {
    const auto d0 = fixture::temp_dir("cli_l0"), d1 = fixture::temp_dir("cli_l1");
    REQUIRE(run({"schedule", "--scenario", default_scenario(), "--out", d0.string(), "--lambda", "0"}).code == 0);
    REQUIRE(run({"schedule", "--scenario", default_scenario(), "--out", d1.string(), "--lambda", "1"}).code == 0);
    const auto a = nlohmann::json::parse(fixture::read_text(d0 / "schedule.json"));
    const auto b = nlohmann::json::parse(fixture::read_text(d1 / "schedule.json"));
    CHECK(a["rank_order"] != b["rank_order"]);
    CHECK(a["lambda"].get<double>() == 0.0);
    CHECK(b["lambda"].get<double>() == 1.0);
}

TEST_CASE("fixed seed gives byte-identical output") {
    const auto d0 = fixture::temp_dir("cli_det0"), d1 = fixture::temp_dir("cli_det1");
    for (const auto& d : {d0, d1}) {
        REQUIRE(run({"schedule", "--scenario", default_scenario(), "--out", d.string(), "--seed", "17"}).code == 0);
    }
    CHECK(fixture::read_text(d0 / "schedule.json") == fixture::read_text(d1 / "schedule.json"));
    CHECK(fixture::read_text(d0 / "loss_trace.csv") == fixture::read_text(d1 / "loss_trace.csv"));
}

TEST_CASE("sweep writes one row per lambda") {
    const auto dir = fixture::temp_dir("cli_sweep");
    const auto r = run({"sweep", "--scenario", default_scenario(), "--out", dir.string(), "--lambdas", "0,1"});
    REQUIRE(r.code == 0);
    const auto rows = lines(fixture::read_text(dir / "sweep.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(fs::exists(dir / "schedule_lambda_0.json"));
    CHECK(fs::exists(dir / "schedule_lambda_1.json"));
    CHECK(run({"sweep", "--scenario", default_scenario(), "--out", dir.string(), "--lambdas", "0,x"}).code == 2);
}

TEST_CASE("tips command") {
    const auto dir = fixture::temp_dir("cli_tips");
    const auto predictions = (fixture::source_dir() / "scenarios" / "default_predictions.csv").string();
    const auto all = run({"tips", "--predictions", predictions, "--out", dir.string()});
    CHECK(all.out.find("tips=5") != std::string::npos);
    // the scenario's cutoff drops the row after 18:30
    const auto r = run({"tips", "--predictions", predictions, "--scenario", default_scenario(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("tips=4") != std::string::npos);
    const auto rows = lines(fixture::read_text(dir / "tips.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "time,lat,lon,error_km,score");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double score = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
    }

    fixture::write_text(dir / "empty.csv", "mmsi,t,pred_lat,pred_lon,act_lat,act_lon\n");
    const auto e = run({"tips", "--predictions", (dir / "empty.csv").string(), "--out", dir.string()});
    CHECK(e.code == 0);
    CHECK(fixture::read_text(dir / "tips.csv") == "time,lat,lon,error_km,score\n");

    fixture::write_text(dir / "bad.csv", "mmsi,t,pred_lat,pred_lon,act_lat,act_lon\n1,2,3\n");
    const auto bad = run({"tips", "--predictions", (dir / "bad.csv").string(), "--out", dir.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("2") != std::string::npos);
}

}

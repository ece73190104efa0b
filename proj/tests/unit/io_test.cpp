#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "recdr/io.hpp"
#include "support/fixtures.hpp"

using namespace recdr;
using namespace recdr::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("recdr_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal = R"({
  "grid": {"slots": 4, "slot_minutes": 15},
  "entities": [{"id": "A", "capacity_kwh": 2, "max_charge_kwh": 1, "max_discharge_kwh": 1,
                "eta_c": 0.95, "eta_d": 0.95, "soc_initial_kwh": 0, "soc_final_kwh": 0,
                "storage_cost_eur_per_kwh": 0.01,
                "price_inline": [0.1, 0.2, 0.3, 0.2], "forecast_inline": [1, 1, 0, 0]}],
  "dr": {"alpha": 0.85, "requests": [{"start": "00:30", "end": 4, "e_lo_kwh": 0, "e_hi_kwh": 2, "gamma_max_eur": 5}]}
})";

}  // namespace

TEST_CASE("minimal inline scenario", "[io]") {
  const Scenario s = io::parse_scenario(kMinimal, ".", "2024-01-01");
  CHECK(s.date == "2024-01-01");
  CHECK(s.grid.slot_count == 4);
  CHECK(s.grid.slot_hours == 0.25);
  CHECK(s.entities.size() == 1);
  CHECK(s.loads.values == std::vector<double>(4, 0.0));
  CHECK(s.program.requests[0].interval == Interval{2, 4});
}

TEST_CASE("clock strings in requests", "[io]") {
  std::string text = kMinimal;
  text.replace(text.find("\"slots\": 4"), 10, "\"slots\": 96");
  for (const char* key : {"price_inline", "forecast_inline"}) {
    const auto at = text.find(key);
    const auto open = text.find('[', at);
    const auto close = text.find(']', open);
    std::string series = "[";
    for (int t = 0; t < 96; ++t) series += (t ? ",0.1" : "0.1");
    text.replace(open, close - open + 1, series + "]");
  }
  text.replace(text.find("\"00:30\""), 7, "\"08:00\"");
  text.replace(text.find("\"end\": 4"), 8, "\"end\": \"09:00\"");
  const Scenario s = io::parse_scenario(text, ".", "d");
  CHECK(s.program.requests[0].interval == Interval{32, 36});
}

TEST_CASE("parse errors carry position or field", "[io]") {
  try {
    io::parse_scenario("{\"grid\": {\"slots\": 4,, }}", ".", "d");
    FAIL("expected ParseError");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  std::string bad = kMinimal;
  bad.replace(bad.find("\"eta_c\": 0.95"), 13, "\"eta_c\": \"x\"");
  try {
    io::parse_scenario(bad, ".", "d");
    FAIL("expected ParseError");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("entities[0].eta_c") != std::string::npos);
  }
}

TEST_CASE("missing CSV names the path", "[io]") {
  const fs::path dir = scratch("missing");
  std::string text = kMinimal;
  text.replace(text.find("\"price_inline\": [0.1, 0.2, 0.3, 0.2]"), 36, "\"price_csv\": \"nowhere.csv\"");
  std::ofstream(dir / "day.json") << text;
  try {
    io::load_scenario(dir / "day.json");
    FAIL("expected ParseError");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("nowhere.csv") != std::string::npos);
  }
}

TEST_CASE("CSV series layout", "[io]") {
  const fs::path dir = scratch("csv");
  std::ofstream(dir / "good.csv") << "slot,value_kwh\n0,1.5\n1,2\n";
  CHECK(io::load_series_csv(dir / "good.csv", 2, Unit::Kwh).values == std::vector<double>{1.5, 2.0});
  std::ofstream(dir / "short.csv") << "slot,value_kwh\n0,1.5\n";
  CHECK_THROWS_AS(io::load_series_csv(dir / "short.csv", 2, Unit::Kwh), io::ParseError);
  std::ofstream(dir / "order.csv") << "slot,value_kwh\n1,1.5\n0,2\n";
  CHECK_THROWS_AS(io::load_series_csv(dir / "order.csv", 2, Unit::Kwh), io::ParseError);
  std::ofstream(dir / "header.csv") << "slot,value_eur_per_kwh\n0,1.5\n1,2\n";
  CHECK_THROWS_AS(io::load_series_csv(dir / "header.csv", 2, Unit::Kwh), io::ParseError);
  CHECK(io::load_series_csv(dir / "header.csv", 2, Unit::EurPerKwh).values.size() == 2);
}

TEST_CASE("validation errors abort loading", "[io]") {
  const fs::path dir = scratch("invalid");
  std::string text = kMinimal;
  text.replace(text.find("\"eta_c\": 0.95"), 13, "\"eta_c\": 1.5");
  std::ofstream(dir / "day.json") << text;
  try {
    io::load_scenario(dir / "day.json");
    FAIL("expected ScenarioInvalid");
  } catch (const io::ScenarioInvalid& e) {
    REQUIRE(e.findings().size() == 1);
    CHECK(e.findings()[0].rule == "efficiency outside (0,1]");
  }
}

TEST_CASE("scenario round trip", "[io][property]") {
  const fs::path dir = scratch("roundtrip");
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Scenario s = synthetic_community(3, 96, seed);
    s.date = "day" + std::to_string(seed);
    io::write_scenario(s, dir / (s.date + ".json"));
    const Scenario back = io::load_scenario(dir / (s.date + ".json"));
    CHECK(back == s);
  }
}

TEST_CASE("report tables", "[io]") {
  const fs::path dir = scratch("report");
  io::DayReport d;
  d.date = "2024-06-11";
  d.objective = "entities";
  d.j0 = 150;
  d.rho = 0.1;
  d.sum_delta = 15;
  d.entities = {{"A", 100, 90, 20, 110, 10, false}, {"B", 50, 55, -0.0, 55, 5, false}};
  d.schedules = {EntitySchedule::zeros(2), EntitySchedule::zeros(2)};
  d.net_injection = {0, 0};
  io::write_report(std::span(&d, 1), dir, io::Format::Csv, true);
  CHECK(slurp(dir / "summary.csv") == "date,objective,J0,sum_delta,sum_gamma,rho\n2024-06-11,entities,150.0000,15.0000,0.0000,0.10000000\n");
  CHECK(slurp(dir / "entities.csv") ==
        "date,entity,J_u0,psi,xi,J_u,delta\n2024-06-11,A,100.0000,90.0000,20.0000,110.0000,10.0000\n"
        "2024-06-11,B,50.0000,55.0000,0.0000,55.0000,5.0000\n");
  CHECK(slurp(dir / "requests.csv") == "date,request,e_dr,gamma,regime\n");
  CHECK(slurp(dir / "trajectories.csv").starts_with("slot,entity,e_grid,e_charge,e_discharge,soc,net_injection\n"));

  const fs::path jdir = scratch("report_json");
  io::write_report(std::span(&d, 1), jdir, io::Format::Json, true);
  CHECK(fs::exists(jdir / "report.json"));
  CHECK(io::format_fixed(-0.00001, 4) == "0.0000");
}

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include <fhsim/csv.hpp>
#include <fhsim/sim.hpp>

using namespace fhsim;

namespace {

CellConfig table_cell(const std::string& name, int bw_mhz, int ports) {
  CellConfig c;
  c.name = name;
  c.bandwidth_mhz = bw_mhz;
  c.gnb_ports = ports;
  return c;
}

Scenario table_scenario() {
  Scenario sc;
  sc.catalog.configs = {table_cell("config1", 200, 4), table_cell("config2", 100, 4),
                        table_cell("config3", 100, 8)};
  sc.capacity = CapacityProfile::constant(3'500'000'000, 3'500'000'000);
  return sc;  // traffic default: 1000 Mbps DL, 0 UL
}

}  // namespace

TEST_CASE("constant capacity gives a steady run at full rate") {
  const Scenario sc = table_scenario();
  const TimeSeries ts = run(sc);
  REQUIRE(ts.rows.size() == 100);
  for (const auto& row : ts.rows) {
    CHECK(row.config == "config1");
    CHECK(row.achieved_dl == 845'852'958);
    CHECK(row.event.empty());
    CHECK(row.fh_dl <= row.capacity_dl);
    CHECK(row.fh_ul <= row.capacity_ul);
    CHECK(row.achieved_dl <= row.offered_dl);
  }
}

TEST_CASE("a capacity step forces a downgrade and halves the rate") {
  Scenario sc = table_scenario();
  sc.capacity.segments = {{0, 3'500'000'000, 3'500'000'000}, {5000, 1'800'000'000, 1'800'000'000}};
  const TimeSeries ts = run(sc);

  std::vector<std::string> events;
  for (const auto& row : ts.rows)
    if (!row.event.empty()) events.push_back(row.event);
  REQUIRE(events.size() == 1);
  CHECK(events[0] == "config1->config2");

  CHECK(ts.rows.front().achieved_dl == 845'852'958);
  CHECK(ts.rows.back().config == "config2");
  CHECK(ts.rows.back().achieved_dl == 422'926'479);
}

TEST_CASE("zero demand runs at the signaling and control floor") {
  Scenario sc = table_scenario();
  sc.traffic = Traffic{0, 0};
  const TimeSeries ts = run(sc);
  for (const auto& row : ts.rows) {
    CHECK(row.achieved_dl == 0);
    CHECK(row.fh_dl == 300'000'000);                    // control overhead only
    CHECK(row.fh_ul == 364'953'600 + 300'000'000);      // 8 signaling symbols + control
  }
}

TEST_CASE("runs are deterministic per seed") {
  Scenario sc = table_scenario();
  sc.demand_jitter = Ratio::from_ppm(50'000);
  sc.duration_ms = 3000;

  std::ostringstream a, b;
  write_timeseries_csv(a, run(sc));
  write_timeseries_csv(b, run(sc));
  CHECK(a.str() == b.str());

  Scenario other = sc;
  other.seed = 2;
  std::ostringstream c;
  write_timeseries_csv(c, run(other));
  CHECK(a.str() != c.str());
}

TEST_CASE("jitter keeps the offered rate within the configured band") {
  Scenario sc = table_scenario();
  sc.demand_jitter = Ratio::from_ppm(50'000);
  sc.traffic.dl_demand = 500'000'000;
  bool moved = false;
  for (const auto& row : run(sc).rows) {
    CHECK(row.offered_dl >= 475'000'000);
    CHECK(row.offered_dl <= 525'000'000);
    moved = moved || row.offered_dl != 500'000'000;
  }
  CHECK(moved);
}

TEST_CASE("sweep jumps once per config at its threshold") {
  const Scenario sc = table_scenario();
  const auto rows = sweep_capacity(sc, 500'000'000, 4'000'000'000, 100'000'000);
  REQUIRE(rows.size() == 35 * 3);

  // ordered by capacity then catalog order
  CHECK(rows[0].config == "config1");
  CHECK(rows[1].config == "config2");
  CHECK(rows[2].config == "config3");
  CHECK(rows[3].capacity == 600'000'000);

  std::map<std::string, std::vector<const SweepRow*>> per_cfg;
  for (const auto& r : rows) per_cfg[r.config].push_back(&r);

  const std::map<std::string, Bps> jump_at = {{"config1", 2'900'000'000},
                                              {"config2", 1'600'000'000},
                                              {"config3", 2'900'000'000}};
  for (const auto& [name, list] : per_cfg) {
    int jumps = 0;
    Bps where = 0;
    for (std::size_t i = 1; i < list.size(); ++i)
      if (list[i]->achieved_dl != list[i - 1]->achieved_dl) {
        ++jumps;
        where = list[i]->capacity;
      }
    CHECK(jumps == 1);
    CHECK(where == jump_at.at(name));
  }
}

TEST_CASE("sweep point grid is empty for an empty range") {
  const Scenario sc = table_scenario();
  CHECK(sweep_capacity(sc, 1000, 1000, 100).empty());
  CHECK(sweep_capacity(sc, 2000, 1000, 100).empty());
}

TEST_CASE("sweep jump point matches threshold_capacity within one step") {
  const Scenario sc = table_scenario();
  const Bps step = 100'000'000;
  const auto rows = sweep_capacity(sc, 500'000'000, 4'000'000'000, step);
  for (const auto& cell : sc.catalog.configs) {
    const Bps thr = threshold_capacity(cell, sc.ue, sc.tdd, sc.params, Direction::dl);
    Bps jump = -1, prev = -1;
    for (const auto& r : rows) {
      if (r.config != cell.name) continue;
      if (prev >= 0 && r.achieved_dl != prev) jump = r.capacity;
      prev = r.achieved_dl;
    }
    REQUIRE(jump >= thr);
    REQUIRE(jump - step < thr);
  }
}

TEST_CASE("curve reproduces the per-config fronthaul relations") {
  Scenario sc = table_scenario();
  const auto rows = curve_access_vs_fh(sc, Direction::dl, 900'000'000, 10);
  REQUIRE(rows.size() == 30);

  std::map<std::string, std::vector<const CurveRow*>> per_cfg;
  for (const auto& r : rows) per_cfg[r.config].push_back(&r);

  // configurations 2 and 3 coincide in DL; 1 doubles them
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(per_cfg["config2"][i]->fh_dl == per_cfg["config3"][i]->fh_dl);
    CHECK(per_cfg["config2"][i]->access == per_cfg["config3"][i]->access);
    // UL fronthaul: factor two between 2 and 3, equality between 1 and 3
    CHECK(2 * per_cfg["config2"][i]->fh_ul == per_cfg["config3"][i]->fh_ul);
    CHECK(per_cfg["config1"][i]->fh_ul == per_cfg["config3"][i]->fh_ul);
  }

  // endpoints: saturated access and the corresponding DL loads
  CHECK(per_cfg["config1"].back()->access == 845'852'958);
  CHECK(per_cfg["config1"].back()->fh_dl == 1'277'337'600);
  CHECK(per_cfg["config2"].back()->access == 422'926'479);

  // UL floor is strictly positive at zero offered demand; both fronthaul
  // columns are non-decreasing in the offered demand
  for (const auto& [name, list] : per_cfg) {
    CHECK(list.front()->fh_ul > 0);
    for (std::size_t i = 1; i < list.size(); ++i) {
      CHECK(list[i]->fh_ul >= list[i - 1]->fh_ul);
      CHECK(list[i]->fh_dl >= list[i - 1]->fh_dl);
    }
  }
  CHECK(per_cfg["config1"].front()->fh_ul == 364'953'600);
  CHECK(per_cfg["config2"].front()->fh_ul == 182'476'800);
}

TEST_CASE("parallel sweep and curve match the serial results") {
  const Scenario sc = table_scenario();
  const auto serial = sweep_capacity(sc, 500'000'000, 4'000'000'000, 100'000'000, 1);
  const auto parallel = sweep_capacity(sc, 500'000'000, 4'000'000'000, 100'000'000, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].capacity == parallel[i].capacity);
    CHECK(serial[i].config == parallel[i].config);
    CHECK(serial[i].achieved_dl == parallel[i].achieved_dl);
    CHECK(serial[i].fh_ul == parallel[i].fh_ul);
  }

  const auto c1 = curve_access_vs_fh(sc, Direction::dl, 900'000'000, 10, 1);
  const auto c4 = curve_access_vs_fh(sc, Direction::dl, 900'000'000, 10, 4);
  REQUIRE(c1.size() == c4.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].offered == c4[i].offered);
    CHECK(c1[i].fh_dl == c4[i].fh_dl);
  }
}

TEST_CASE("achieved rates never exceed offer or capacity bounds") {
  Scenario sc = table_scenario();
  sc.traffic.dl_demand = 600'000'000;
  sc.traffic.ul_demand = 50'000'000;
  sc.capacity.segments = {{0, 3'500'000'000, 3'500'000'000},
                          {3000, 1'800'000'000, 1'800'000'000},
                          {6000, 900'000'000, 900'000'000}};
  for (const auto& row : run(sc).rows) {
    const CellConfig& cell = *sc.catalog.find(row.config);
    CHECK(row.achieved_dl <= row.offered_dl);
    CHECK(row.achieved_ul <= row.offered_ul);
    CHECK(row.achieved_dl <= access_capacity(cell, sc.ue, Direction::dl, sc.tdd));
    CHECK(row.achieved_ul <= access_capacity(cell, sc.ue, Direction::ul, sc.tdd));
  }
}

TEST_CASE("csv formatting is fixed point with one decimal") {
  CHECK(format_mbps(845'852'958) == "845.9");
  CHECK(format_mbps(1'277'337'600) == "1277.3");
  CHECK(format_mbps(0) == "0.0");
  CHECK(format_time_s(100) == "0.100");

  std::ostringstream os;
  write_sweep_csv(os, {});
  CHECK(os.str() ==
        "capacity_mbps,config,achieved_dl_mbps,achieved_ul_mbps,fh_dl_mbps,fh_ul_mbps\n");
  std::ostringstream oc;
  write_curve_csv(oc, {});
  CHECK(oc.str() == "offered_mbps,config,access_mbps,fh_dl_mbps,fh_ul_mbps\n");
}

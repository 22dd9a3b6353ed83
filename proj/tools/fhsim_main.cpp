// Command-line front end: scenario loading, experiment commands, CSV output.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include <fhsim/fhsim.hpp>

namespace {

fhsim::Bps mbps_to_bps(double mbps) { return static_cast<fhsim::Bps>(std::llround(mbps * 1e6)); }

// Stream selected by --out; standard output otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw fhsim::ValidationError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void print_rates(std::ostream& os, const fhsim::Scenario& sc, const fhsim::CellConfig& cell) {
  using namespace fhsim;
  const DirPair req = required_fh(cell, sc.ue, sc.tdd, sc.params.control_overhead);
  os << "cell = " << cell.name << "\n";
  os << "dl_access_mbps = " << format_mbps(access_capacity(cell, sc.ue, Direction::dl, sc.tdd))
     << "\n";
  os << "ul_access_mbps = " << format_mbps(access_capacity(cell, sc.ue, Direction::ul, sc.tdd))
     << "\n";
  os << "dl_fh_required_mbps = " << format_mbps(req.dl) << "\n";
  os << "ul_fh_required_mbps = " << format_mbps(req.ul) << "\n";
  os << "threshold_mbps = "
     << format_mbps(threshold_capacity(cell, sc.ue, sc.tdd, sc.params, Direction::dl)) << "\n";
}

void dump_scenario_grid(const std::string& path, const fhsim::Scenario& sc) {
  using namespace fhsim;
  const Selection sel =
      select_config(sc.catalog, capacity_at(sc.capacity, 0), sc.ue, sc.tdd, sc.params);
  const CellConfig& cell = *sc.catalog.find(sel.name);
  const Bps dl = std::min(sc.traffic.dl_demand, access_capacity(cell, sc.ue, Direction::dl, sc.tdd));
  const Bps acc_ul = access_capacity(cell, sc.ue, Direction::ul, sc.tdd);
  const Bps ul =
      std::min<Bps>(sc.traffic.ul_demand + ack_traffic(dl, sc.params.ack_ratio), acc_ul);
  FrameGrid grid = baseline_signaling(build_grid(cell, sc.tdd, sc.params.horizon_slots),
                                      sc.params.signaling_symbols, sc.params.signaling_rbs);
  schedule_demand(grid, dl, ul, sc.params.scheduling, cell, sc.ue);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open grid dump file '" + path + "'");
  write_grid_dump_csv(out, grid);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fhsim: access/fronthaul co-simulator for a reconfigurable 5G cell site"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are valid after the subcommand name too

  std::string scenario_path = "scenarios/tableI.scenario";
  std::string out_path;
  std::string grid_dump_path;
  int jobs = 1;
  app.add_option("--scenario", scenario_path, "scenario file")->capture_default_str();
  app.add_option("--out", out_path, "write output to a file instead of stdout");
  app.add_option("--jobs", jobs, "worker threads for sweep/curve points")
      ->check(CLI::PositiveNumber);
  app.add_option("--grid-dump", grid_dump_path, "also write the scheduled grid as CSV (debug)");

  auto* cmd_rates = app.add_subcommand("rates", "closed-form rates and thresholds per cell");
  std::string cell_name;
  cmd_rates->add_option("--cell", cell_name, "cell name (default: all cells)");

  auto* cmd_sweep =
      app.add_subcommand("sweep", "achieved rates vs symmetric fronthaul capacity");
  double sweep_min = 500, sweep_max = 4000, sweep_step = 100;
  cmd_sweep->add_option("--min", sweep_min, "first capacity, Mbps")->capture_default_str();
  cmd_sweep->add_option("--max", sweep_max, "end capacity (excluded), Mbps")
      ->capture_default_str();
  cmd_sweep->add_option("--step", sweep_step, "capacity step, Mbps")->capture_default_str();

  auto* cmd_curve =
      app.add_subcommand("curve", "fronthaul load vs offered access demand, unconstrained link");
  std::string curve_direction = "dl";
  double demand_max = 900;
  int points = 10;
  cmd_curve->add_option("--direction", curve_direction, "dl or ul")
      ->check(CLI::IsMember({"dl", "ul"}))
      ->capture_default_str();
  cmd_curve->add_option("--demand-max", demand_max, "highest offered demand, Mbps")
      ->capture_default_str();
  cmd_curve->add_option("--points", points, "demand grid points")->capture_default_str();

  auto* cmd_simulate = app.add_subcommand("simulate", "time-stepped run over the capacity profile");
  auto* cmd_validate = app.add_subcommand("validate", "run the model invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    const fhsim::Scenario sc = fhsim::load_scenario(scenario_path);
    Output out(out_path);

    if (cmd_rates->parsed()) {
      if (!cell_name.empty()) {
        const fhsim::CellConfig* cell = sc.catalog.find(cell_name);
        if (!cell) throw fhsim::UnknownCell("no cell named '" + cell_name + "'");
        print_rates(out.stream(), sc, *cell);
      } else {
        for (std::size_t i = 0; i < sc.catalog.configs.size(); ++i) {
          if (i) out.stream() << "\n";
          print_rates(out.stream(), sc, sc.catalog.configs[i]);
        }
      }
    } else if (cmd_sweep->parsed()) {
      const auto rows = fhsim::sweep_capacity(sc, mbps_to_bps(sweep_min), mbps_to_bps(sweep_max),
                                              mbps_to_bps(sweep_step), jobs);
      fhsim::write_sweep_csv(out.stream(), rows);
    } else if (cmd_curve->parsed()) {
      const auto dir = curve_direction == "dl" ? fhsim::Direction::dl : fhsim::Direction::ul;
      const auto rows = fhsim::curve_access_vs_fh(sc, dir, mbps_to_bps(demand_max), points, jobs);
      fhsim::write_curve_csv(out.stream(), rows);
    } else if (cmd_simulate->parsed()) {
      fhsim::write_timeseries_csv(out.stream(), fhsim::run(sc));
    } else if (cmd_validate->parsed()) {
      bool all_pass = true;
      for (const auto& r : fhsim::validate_scenario(sc)) {
        all_pass = all_pass && r.pass;
        out.stream() << (r.pass ? "PASS " : "FAIL ") << r.name
                     << (r.detail.empty() ? "" : " - " + r.detail) << "\n";
      }
      if (!all_pass) return 1;
    }

    if (!grid_dump_path.empty()) dump_scenario_grid(grid_dump_path, sc);
  } catch (const fhsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const fhsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

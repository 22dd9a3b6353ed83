#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include <fhsim/frame_grid.hpp>

using namespace fhsim;

namespace {

CellConfig table_cell(const std::string& name, int bw_mhz, int ports) {
  CellConfig c;
  c.name = name;
  c.bandwidth_mhz = bw_mhz;
  c.gnb_ports = ports;
  return c;
}

CellConfig tiny_cell(std::int64_t rbs, int ports) {
  CellConfig c;
  c.name = "tiny";
  c.bandwidth_mhz = 10;
  c.gnb_ports = ports;
  c.qm_dl = c.qm_ul = 4;
  c.n_iq = 8;
  c.code_rate = Ratio::from_ppm(500'000);
  c.overhead = Ratio::from_ppm(0);
  c.rb_count_override = rbs;
  return c;
}

const UeProfile kUe{};
const TddPattern kTdd{};

// Independent oracle: brute-force goodput of n cells.
std::int64_t brute_force_bits(std::int64_t cells, int qm, const CellConfig& cell) {
  const __int128 per_cell = static_cast<__int128>(12) * qm * cell.code_rate.ppm() *
                            (1'000'000 - cell.overhead.ppm());
  return static_cast<std::int64_t>(static_cast<__int128>(cells) * per_cell /
                                   1'000'000'000'000);
}

std::int64_t count_occupied(const FrameGrid& g, Direction dir) {
  std::int64_t n = 0;
  for (int s = 0; s < g.horizon_slots(); ++s)
    for (int y = 0; y < Numerology::symbols_per_slot; ++y) {
      const bool dl = g.symbol_kind(s, y) == FrameGrid::SymbolKind::dl;
      if (g.symbol_kind(s, y) == FrameGrid::SymbolKind::gap) continue;
      if (dl != (dir == Direction::dl)) continue;
      for (std::int64_t rb = 0; rb < g.n_rb(); ++rb)
        for (int l = 0; l < g.layers(); ++l)
          if (g.occupied(s, y, rb, l)) ++n;
    }
  return n;
}

}  // namespace

TEST_CASE("grid slot typing follows the pattern cyclically") {
  const CellConfig cell2 = table_cell("config2", 100, 4);
  const FrameGrid grid = build_grid(cell2, kTdd, 10);
  int d = 0, s = 0, u = 0;
  for (int i = 0; i < 10; ++i) {
    if (grid.slot_type(i) == 'D') ++d;
    if (grid.slot_type(i) == 'S') ++s;
    if (grid.slot_type(i) == 'U') ++u;
  }
  CHECK(d == 6);
  CHECK(s == 2);
  CHECK(u == 2);

  CHECK_THROWS_AS(build_grid(cell2, kTdd, 7), BadHorizon);

  TddPattern all_dl;
  all_dl.slot_sequence = "DDDDD";
  const FrameGrid dl_grid = build_grid(table_cell("config1", 200, 4), all_dl, 5);
  CHECK(dl_grid.ul_symbols().empty());
}

TEST_CASE("baseline signaling marks trailing UL symbols") {
  const CellConfig cell3 = table_cell("config3", 100, 8);

  FrameGrid grid = baseline_signaling(build_grid(cell3, kTdd, 20), 2, 4);
  CHECK(ul_transport_symbols(grid) == 8);  // 2 symbols in each of 4 UL slots

  FrameGrid none = baseline_signaling(build_grid(cell3, kTdd, 20), 0, 4);
  CHECK(ul_transport_symbols(none) == 0);

  // every symbol of every full UL slot transported (S-slot UL symbols carry
  // no payload while the special slot is data-free)
  FrameGrid full = baseline_signaling(build_grid(cell3, kTdd, 20), 14, 1);
  CHECK(ul_transport_symbols(full) == 4 * 14);

  CHECK_THROWS_AS(baseline_signaling(build_grid(cell3, kTdd, 20), 15, 4), OutOfRange);
  CHECK_THROWS_AS(baseline_signaling(build_grid(cell3, kTdd, 20), 2, 67), OutOfRange);
}

TEST_CASE("scheduling saturates at the access capacity") {
  const CellConfig cell1 = table_cell("config1", 200, 4);
  const Bps acc = access_capacity(cell1, kUe, Direction::dl, kTdd);
  FrameGrid grid = build_grid(cell1, kTdd, 20);
  const Allocation alloc = schedule_demand(grid, acc, 0, SchedulingPolicy::spread, cell1, kUe);
  // all DL data cells: 12 D slots x 14 symbols x 132 RBs x 2 layers
  CHECK(alloc.dl_cells == 12 * 14 * 132 * 2);
  CHECK(alloc.ul_cells == 0);
  CHECK(count_occupied(grid, Direction::dl) == alloc.dl_cells);
}

TEST_CASE("zero demand leaves only the signaling mask") {
  const CellConfig cell2 = table_cell("config2", 100, 4);
  FrameGrid grid = baseline_signaling(build_grid(cell2, kTdd, 20), 2, 4);
  const Allocation alloc = schedule_demand(grid, 0, 0, SchedulingPolicy::spread, cell2, kUe);
  CHECK(alloc.dl_cells == 0);
  CHECK(alloc.ul_cells == 0);
  CHECK(count_occupied(grid, Direction::dl) == 0);
  CHECK(count_occupied(grid, Direction::ul) == 0);
  CHECK(ul_transport_symbols(grid) == 8);
}

TEST_CASE("half demand occupies the ceiling cell count") {
  const CellConfig cell2 = table_cell("config2", 100, 4);
  const Bps half = access_capacity(cell2, kUe, Direction::dl, kTdd) / 2;
  FrameGrid grid = build_grid(cell2, kTdd, 20);
  const Allocation alloc =
      schedule_demand(grid, half, 0, SchedulingPolicy::frequency_first, cell2, kUe);
  const std::int64_t target_bits = muldiv(half, grid.horizon_duration_ns(), 1'000'000'000);
  CHECK(alloc.dl_bits_carried == brute_force_bits(alloc.dl_cells, alloc.qm_dl, cell2));
  CHECK(alloc.dl_bits_carried >= target_bits);
  CHECK(brute_force_bits(alloc.dl_cells - 1, alloc.qm_dl, cell2) < target_bits);
}

TEST_CASE("carried goodput overshoots demand by at most one quantum") {
  std::mt19937_64 rng(7);
  const SchedulingPolicy policies[] = {SchedulingPolicy::frequency_first,
                                       SchedulingPolicy::time_first, SchedulingPolicy::spread};
  for (int trial = 0; trial < 60; ++trial) {
    const CellConfig cell = tiny_cell(2 + rng() % 7, 1 + rng() % 3);
    TddPattern tdd;
    tdd.slot_sequence = "DU";
    FrameGrid grid = build_grid(cell, tdd, 4);
    const Bps acc_dl = access_capacity(cell, kUe, Direction::dl, tdd);
    const Bps acc_ul = access_capacity(cell, kUe, Direction::ul, tdd);
    const Bps dl = static_cast<Bps>(rng() % static_cast<std::uint64_t>(2 * acc_dl + 1));
    const Bps ul = static_cast<Bps>(rng() % static_cast<std::uint64_t>(2 * acc_ul + 1));
    const Allocation alloc = schedule_demand(grid, dl, ul, policies[trial % 3], cell, kUe);

    const std::int64_t horizon_ns = grid.horizon_duration_ns();
    auto target = [&](Bps demand) { return muldiv(demand, horizon_ns, 1'000'000'000); };
    auto check_side = [&](std::int64_t cells, int qm, Bps demand, Direction dir) {
      const std::int64_t cap_cells =
          2 * 14 * grid.n_rb() * effective_layers(cell, kUe, dir);  // 2 slots per direction
      CHECK(brute_force_bits(cells, qm, cell) <= target(demand) + brute_force_bits(1, qm, cell));
      if (cells < cap_cells)  // not saturated: demand must be covered
        CHECK(brute_force_bits(cells, qm, cell) >= target(demand));
    };
    check_side(alloc.dl_cells, alloc.qm_dl, dl, Direction::dl);
    check_side(alloc.ul_cells, alloc.qm_ul, ul, Direction::ul);

    // no occupancy outside direction-legal symbols
    for (int s = 0; s < grid.horizon_slots(); ++s)
      for (int y = 0; y < Numerology::symbols_per_slot; ++y)
        for (std::int64_t rb = 0; rb < grid.n_rb(); ++rb)
          for (int l = 0; l < grid.layers(); ++l)
            if (grid.occupied(s, y, rb, l))
              REQUIRE((grid.data_legal(s, y, Direction::dl) ||
                       grid.data_legal(s, y, Direction::ul)));
  }
}

TEST_CASE("partially loaded symbols are transported whole") {
  const CellConfig cell = tiny_cell(4, 2);
  TddPattern tdd;
  tdd.slot_sequence = "DU";
  FrameGrid grid = build_grid(cell, tdd, 4);
  CHECK(ul_transport_symbols(grid) == 0);
  grid.set_occupied(1, 3, 2, 1);  // a single RE
  CHECK(ul_transport_symbols(grid) == 1);
}

TEST_CASE("symbol transport count matches the RE enumeration oracle") {
  std::mt19937_64 rng(1234);
  const std::vector<std::string> patterns{"DU", "DSU", "DDSU", "DDDSU", "U"};
  for (int trial = 0; trial < 250; ++trial) {
    TddPattern tdd;
    tdd.slot_sequence = patterns[rng() % patterns.size()];
    tdd.s_slot_split = {6, 2, 6};
    tdd.s_slot_carries_data = rng() % 2 == 0;
    const std::int64_t rbs = 2 + static_cast<std::int64_t>(rng() % 7);
    const int ports = 1 + static_cast<int>(rng() % 4);
    const CellConfig cell = tiny_cell(rbs, ports);
    const int horizon = tdd.period_slots() * (1 + static_cast<int>(rng() % 3));
    FrameGrid grid = build_grid(cell, tdd, horizon);

    // first-principles layout: which (slot, symbol) positions are uplink
    auto ul_by_layout = [&](int slot, int sym) {
      const char t = tdd.slot_sequence[slot % tdd.period_slots()];
      return t == 'U' || (t == 'S' && sym >= 14 - tdd.s_slot_split[2]);
    };

    std::set<std::pair<int, int>> oracle;
    const int sig_syms = static_cast<int>(rng() % 3);
    const int sig_rbs = static_cast<int>(rng() % (rbs + 1));
    grid = baseline_signaling(std::move(grid), sig_syms, sig_rbs);
    if (sig_rbs > 0)
      for (int s = 0; s < horizon; ++s)
        if (tdd.slot_sequence[s % tdd.period_slots()] == 'U')
          for (int k = 0; k < sig_syms; ++k) oracle.insert({s, 13 - k});

    const int sprinkles = static_cast<int>(rng() % 50);
    for (int n = 0; n < sprinkles; ++n) {
      const int slot = static_cast<int>(rng() % horizon);
      const int sym = static_cast<int>(rng() % 14);
      const std::int64_t rb = static_cast<std::int64_t>(rng() % rbs);
      const int layer = static_cast<int>(rng() % ports);
      const Direction dir = ul_by_layout(slot, sym) ? Direction::ul : Direction::dl;
      if (!grid.data_legal(slot, sym, dir)) continue;
      grid.set_occupied(slot, sym, rb, layer);
      if (dir == Direction::ul) oracle.insert({slot, sym});
    }
    REQUIRE(ul_transport_symbols(grid) == static_cast<int>(oracle.size()));
  }
}

TEST_CASE("grid load reproduces the closed-form rates") {
  const CellConfig cell1 = table_cell("config1", 200, 4);
  const CellConfig cell3 = table_cell("config3", 100, 8);

  FrameGrid g1 = build_grid(cell1, kTdd, 20);
  const Allocation a1 = schedule_demand(g1, access_capacity(cell1, kUe, Direction::dl, kTdd), 0,
                                        SchedulingPolicy::spread, cell1, kUe);
  CHECK(fh_load_from_grid(g1, a1, cell1).dl == 1'277'337'600);

  FrameGrid g3 = build_grid(cell3, kTdd, 20);
  const Allocation a3 = schedule_demand(g3, 0, access_capacity(cell3, kUe, Direction::ul, kTdd),
                                        SchedulingPolicy::spread, cell3, kUe);
  CHECK(fh_load_from_grid(g3, a3, cell3).ul == 2'554'675'200);

  FrameGrid empty = build_grid(cell1, kTdd, 20);
  const Allocation none = schedule_demand(empty, 0, 0, SchedulingPolicy::spread, cell1, kUe);
  CHECK(fh_load_from_grid(empty, none, cell1) == DirPair{0, 0});
}

TEST_CASE("port count scales UL load but not the transported symbols") {
  for (int ports : {1, 2, 4, 8}) {
    CellConfig cell = table_cell("x", 100, ports);
    FrameGrid grid = baseline_signaling(build_grid(cell, kTdd, 20), 2, 4);
    const Allocation alloc =
        schedule_demand(grid, 0, 20'000'000, SchedulingPolicy::spread, cell, kUe);
    CHECK(ul_transport_symbols(grid) == [&] {
      CellConfig ref = table_cell("ref", 100, 1);
      FrameGrid g = baseline_signaling(build_grid(ref, kTdd, 20), 2, 4);
      schedule_demand(g, 0, 20'000'000, SchedulingPolicy::spread, ref, kUe);
      return ul_transport_symbols(g);
    }());
    CHECK(fh_load_from_grid(grid, alloc, cell).ul ==
          ports * fh_load_from_grid(grid, alloc, table_cell("one", 100, 1)).ul);
  }
}

TEST_CASE("removing one RE from a multi-RE symbol keeps it transported") {
  const CellConfig cell = tiny_cell(4, 2);
  TddPattern tdd;
  tdd.slot_sequence = "DU";
  FrameGrid grid = build_grid(cell, tdd, 2);
  grid.set_occupied(1, 5, 0, 0);
  grid.set_occupied(1, 5, 3, 1);
  CHECK(ul_transport_symbols(grid) == 1);
  grid.clear_occupied(1, 5, 0, 0);
  CHECK(ul_transport_symbols(grid) == 1);
  grid.clear_occupied(1, 5, 3, 1);
  CHECK(ul_transport_symbols(grid) == 0);
}

TEST_CASE("ack traffic is a capped share of the DL rate") {
  CHECK(ack_traffic(850'000'000, Ratio::from_ppm(20'000)) == 17'000'000);
  CHECK(ack_traffic(845'852'958, Ratio::from_ppm(0)) == 0);
  CHECK(ack_traffic(200, Ratio::from_ppm(20'000)) <= ack_traffic(400, Ratio::from_ppm(20'000)));
  CHECK(ack_traffic(400, Ratio::from_ppm(10'000)) <= ack_traffic(400, Ratio::from_ppm(20'000)));
  CHECK_THROWS_AS(ack_traffic(100, Ratio::from_ppm(300'000)), OutOfRange);
}

TEST_CASE("occupancy is rejected outside legal symbols") {
  const CellConfig cell = tiny_cell(4, 2);
  TddPattern tdd;
  tdd.slot_sequence = "DSU";
  tdd.s_slot_split = {6, 2, 6};
  FrameGrid grid = build_grid(cell, tdd, 3);
  CHECK_THROWS_AS(grid.set_occupied(1, 6, 0, 0), OutOfRange);   // gap symbol
  CHECK_THROWS_AS(grid.set_occupied(1, 2, 0, 0), OutOfRange);   // S slot without data
  CHECK_THROWS_AS(grid.set_occupied(0, 0, 9, 0), OutOfRange);   // rb out of range
  tdd.s_slot_carries_data = true;
  FrameGrid with_data = build_grid(cell, tdd, 3);
  CHECK_NOTHROW(with_data.set_occupied(1, 2, 0, 0));
}

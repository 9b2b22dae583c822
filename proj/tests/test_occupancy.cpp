#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bedrock/occupancy.hpp"

using namespace bedrock;

namespace {

// Hand-transcribed request-occupancy formulas, one table per engine.
// C = caches, N = data beats, s = sharers invalidated by the scenario.
uint64_t fsm_expect(const std::string& r, uint64_t C, uint64_t N, uint64_t s) {
  if (r == "read I/I" || r == "read I/S") return 8 + C / 2;
  if (r == "read I/E clean") return 10 + C / 2;
  if (r == "read I/E dirty") return 9 + C / 2 + N;
  if (r == "read I/M" || r == "read I/O" || r == "read I/F") return 9 + C / 2;
  if (r == "write I/I") return 8 + C / 2;
  if (r == "write I/S") return 8 + C / 2 + 2 * s;
  if (r == "write I/E" || r == "write I/M") return 9 + C / 2;
  if (r == "write I/O" || r == "write I/F") return 9 + C / 2 + 2 * s;
  if (r == "write S/S") return 9 + C / 2 + 2 * s;
  if (r == "write S/O" || r == "write S/F") return 9 + C / 2 + 2 * (s + 1);
  if (r == "write O/O" || r == "write F/F") return 9 + C / 2 + 2 * s;
  if (r == "read replace clean") return 8 + C / 2 + 2;
  if (r == "read replace dirty") return 8 + C / 2 + 1 + N;
  FAIL("unknown fsm row ", r);
  return 0;
}

uint64_t ucode_expect(const std::string& r, uint64_t C, uint64_t N,
                      uint64_t s) {
  if (r == "read excl I/I") return 12 + C / 2;
  if (r == "read I/I" || r == "read I/S") return 26 + C / 2;
  if (r == "read I/E clean") return 36 + C / 2;
  if (r == "read I/E dirty") return 35 + C / 2 + N;
  if (r == "read I/M") return 32 + C / 2;
  if (r == "read I/O" || r == "read I/F") return 27 + C / 2;
  if (r == "write I/I") return 23 + C / 2;
  if (r == "write I/S") return 24 + C / 2 + 2 * s;
  if (r == "write I/E" || r == "write I/M") return 27 + C / 2;
  if (r == "write I/O" || r == "write I/F") return 28 + C / 2 + 2 * s;
  if (r == "write S/S") return 24 + C / 2 + 2 * s;
  if (r == "write S/O" || r == "write S/F") return 30 + C / 2 + 2 * s;
  if (r == "write O/O" || r == "write F/F") return 24 + C / 2 + 2 * s;
  if (r == "read replace clean") return 26 + C / 2 + 7;
  if (r == "read replace dirty") return 26 + C / 2 + 6 + N;
  FAIL("unknown ucode row ", r);
  return 0;
}

uint64_t hybrid_expect(const std::string& r, uint64_t C, uint64_t N,
                       uint64_t s) {
  (void)N;
  if (r == "read I/I" || r == "read I/S") return 8 + C / 2;
  if (r == "read I/E clean" || r == "read I/E dirty") return 10 + C / 2;
  if (r == "read I/M" || r == "read I/O" || r == "read I/F") return 9 + C / 2;
  if (r == "write I/I") return 8 + C / 2;
  if (r == "write I/S") return 8 + C / 2 + 2 * s;
  if (r == "write I/E" || r == "write I/M") return 9 + C / 2;
  if (r == "write I/O" || r == "write I/F") return 9 + C / 2 + 2 * s;
  if (r == "write S/S") return 9 + C / 2 + 2 * s;
  if (r == "write S/O" || r == "write S/F") return 9 + C / 2 + 2 * (s + 1);
  if (r == "write O/O" || r == "write F/F") return 9 + C / 2 + 2 * s;
  if (r == "read replace clean" || r == "read replace dirty")
    return 8 + C / 2 + 2;
  FAIL("unknown hybrid row ", r);
  return 0;
}

uint64_t expect(EngineKind e, const std::string& r, uint64_t C, uint64_t N,
                uint64_t s) {
  switch (e) {
  case EngineKind::Fsm: return fsm_expect(r, C, N, s);
  case EngineKind::Ucode: return ucode_expect(r, C, N, s);
  case EngineKind::Hybrid: return hybrid_expect(r, C, N, s);
  }
  return 0;
}

size_t rows_for(EngineKind e) { return e == EngineKind::Ucode ? 21 : 20; }

} // namespace

TEST_CASE("every report row matches its formula across the sweep") {
  for (EngineKind e :
       {EngineKind::Fsm, EngineKind::Ucode, EngineKind::Hybrid}) {
    for (uint32_t C : {2u, 4u, 8u, 16u}) {
      for (uint32_t N : {1u, 2u, 4u, 8u}) {
        for (uint32_t S : {0u, 1u, 3u, C - 1}) {
          CAPTURE(to_string(e));
          CAPTURE(C);
          CAPTURE(N);
          CAPTURE(S);
          auto rows = occupancy_report({e, C, N, S});
          REQUIRE(rows.size() == rows_for(e));
          for (const OccupancyRow& r : rows) {
            CAPTURE(r.name);
            CHECK(r.match);
            CHECK(r.measured == r.expected);
            CHECK(r.expected == expect(e, r.name, C, N, r.sharers));
          }
        }
      }
    }
  }
}

TEST_CASE("sharers clamp to what the scenario can seat") {
  auto rows = occupancy_report({EngineKind::Fsm, 4, 1, 7});
  for (const OccupancyRow& r : rows) {
    CAPTURE(r.name);
    CHECK(r.sharers <= 3); // requestor plus a possible owner take two seats
    CHECK(r.match);
  }
}

TEST_CASE("spot values at the documented operating points") {
  auto find = [](const std::vector<OccupancyRow>& rows, const char* name) {
    for (const OccupancyRow& r : rows)
      if (r.name == name) return r;
    REQUIRE(false);
    return OccupancyRow{};
  };
  auto fsm = occupancy_report({EngineKind::Fsm, 8, 4, 3});
  CHECK(find(fsm, "read I/I").expected == 12);
  CHECK(find(fsm, "read I/I").measured == 12);
  auto uc = occupancy_report({EngineKind::Ucode, 8, 4, 3});
  CHECK(find(uc, "write I/E").expected == 31);
  CHECK(find(uc, "write I/E").measured == 31);
  auto hy = occupancy_report({EngineKind::Hybrid, 16, 4, 3});
  CHECK(find(hy, "read I/M").expected == 17);
  CHECK(find(hy, "read I/M").measured == 17);
}

TEST_CASE("cache-side occupancies match their closed forms") {
  for (uint32_t N : {1u, 2u, 4u, 8u}) {
    CAPTURE(N);
    auto rows = lce_occupancy_report(N);
    REQUIRE(rows.size() >= 15);
    for (const OccupancyRow& r : rows) {
      CAPTURE(r.name);
      CHECK(r.match);
    }
    auto find = [&](const char* name) {
      for (const OccupancyRow& r : rows)
        if (r.name == name) return r.measured;
      REQUIRE(false);
      return uint64_t(0);
    };
    CHECK(find("req load") == 2 + N);
    CHECK(find("req ucstore") == 1);
    CHECK(find("cmd DATA") == 1 + N);
    CHECK(find("cmd WB dirty") == 2 + N);
    CHECK(find("cmd ST_TR_WB dirty") == 2 + 2 * N);
    CHECK(find("cmd INV") == 1);
  }
}

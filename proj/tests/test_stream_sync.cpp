#include <doctest.h>

#include <cstdlib>
#include <random>

#include "radarcam/stream_sync.hpp"

using namespace radarcam;

namespace {

RadarFrame rf(std::int64_t t_us) { return RadarFrame{t_us, {}}; }
DetectionFrame df(std::int64_t t_us) { return DetectionFrame{t_us, {}}; }

}  // namespace

TEST_CASE("10 FPS radar against 2 FPS detections pairs every detection at zero offset") {
  std::vector<RadarFrame> radar;
  for (int k = 0; k < 100; ++k) radar.push_back(rf(k * 100000));
  std::vector<DetectionFrame> detections;
  for (int k = 0; k < 20; ++k) detections.push_back(df(k * 500000));

  const SyncResult result = pair_streams(radar, detections, 50000);
  REQUIRE(result.pairs.size() == 20);
  CHECK(result.dropped_detections == 0);
  for (const auto& p : result.pairs) CHECK(p.offset_us == 0);
}

TEST_CASE("nearest radar frame wins") {
  const SyncResult result = pair_streams({rf(100000), rf(200000)}, {df(130000)}, 50000);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].radar.t_us == 100000);
  CHECK(result.pairs[0].offset_us == -30000);
}

TEST_CASE("equidistant tie goes to the earlier radar frame") {
  const SyncResult result = pair_streams({rf(100000), rf(200000)}, {df(150000)}, 50000);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].radar.t_us == 100000);
  CHECK(result.pairs[0].offset_us == -50000);
}

TEST_CASE("detections without a radar frame in tolerance are dropped and counted") {
  const SyncResult result =
      pair_streams({rf(0), rf(100000)}, {df(40000), df(500000), df(700000)}, 50000);
  CHECK(result.pairs.size() == 1);
  CHECK(result.dropped_detections == 2);
}

TEST_CASE("a radar frame may serve several detections") {
  const SyncResult result = pair_streams({rf(100000)}, {df(80000), df(120000)}, 50000);
  REQUIRE(result.pairs.size() == 2);
  CHECK(result.pairs[0].radar.t_us == 100000);
  CHECK(result.pairs[1].radar.t_us == 100000);
}

TEST_CASE("unsorted streams are rejected") {
  CHECK_THROWS_AS(pair_streams({rf(200000), rf(100000)}, {df(0)}, 50000), UnsortedInput);
  CHECK_THROWS_AS(pair_streams({rf(0)}, {df(200000), df(100000)}, 50000), UnsortedInput);
}

TEST_CASE("empty inputs") {
  CHECK(pair_streams({}, {}, 50000).pairs.empty());
  const SyncResult no_radar = pair_streams({}, {df(0), df(1)}, 50000);
  CHECK(no_radar.pairs.empty());
  CHECK(no_radar.dropped_detections == 2);
}

TEST_CASE("pairing matches a brute-force scan on random instances") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> step(1, 80000);
  std::uniform_int_distribution<int> n_radar(0, 200), n_det(0, 200);
  const std::int64_t tolerance = 50000;

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RadarFrame> radar;
    std::int64_t t = 0;
    for (int k = n_radar(rng); k > 0; --k) {
      t += step(rng);
      radar.push_back(rf(t));
    }
    std::vector<DetectionFrame> detections;
    t = 0;
    for (int k = n_det(rng); k > 0; --k) {
      t += step(rng);
      detections.push_back(df(t));
    }

    const SyncResult result = pair_streams(radar, detections, tolerance);

    // Brute force: full scan per detection, earlier frame on ties.
    std::size_t expected_pairs = 0, expected_drops = 0, pi = 0;
    for (const auto& det : detections) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      const RadarFrame* pick = nullptr;
      for (const auto& r : radar) {
        const std::int64_t d = std::llabs(r.t_us - det.t_us);
        if (d < best) {
          best = d;
          pick = &r;
        }
      }
      if (pick != nullptr && best <= tolerance) {
        ++expected_pairs;
        REQUIRE(pi < result.pairs.size());
        CHECK(result.pairs[pi].radar.t_us == pick->t_us);
        // Optimality: no frame is strictly closer than the emitted one.
        CHECK(std::llabs(result.pairs[pi].offset_us) == best);
        ++pi;
      } else {
        ++expected_drops;
      }
    }
    CHECK(result.pairs.size() == expected_pairs);
    CHECK(result.dropped_detections == expected_drops);
  }
}

TEST_CASE("pairing is deterministic") {
  std::vector<RadarFrame> radar;
  for (int k = 0; k < 50; ++k) radar.push_back(rf(k * 70001));
  std::vector<DetectionFrame> detections;
  for (int k = 0; k < 23; ++k) detections.push_back(df(k * 170003));

  const SyncResult a = pair_streams(radar, detections, 50000);
  const SyncResult b = pair_streams(radar, detections, 50000);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].radar.t_us == b.pairs[i].radar.t_us);
    CHECK(a.pairs[i].offset_us == b.pairs[i].offset_us);
  }
}

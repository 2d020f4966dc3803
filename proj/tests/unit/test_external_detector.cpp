#include <doctest.h>

#include <chrono>
#include <fstream>
#include <thread>

#include "dci/error.hpp"
#include "dci/external_detector.hpp"
#include "support/fixtures.hpp"

using namespace dci;
using testfix::capture_error;
using testfix::contains;

TEST_CASE("parse_detections reads the documented exchange format") {
  const std::string text =
      R"([{"box": [10, 10, 50, 40], "score": 0.87, "class_id": 0},
          {"box": [0.5, 1.5, 8.25, 9.75], "score": 0.25, "class_id": 2}])";
  const auto dets = parse_detections(text, "frame.detections.json");
  REQUIRE(dets.size() == 2);
  CHECK(dets[0].box == Box{10.0, 10.0, 50.0, 40.0});
  CHECK(dets[0].score == 0.87);
  CHECK(dets[0].class_id == 0);
  CHECK(dets[1].box.x1 == 8.25);
  CHECK(dets[1].class_id == 2);
}

TEST_CASE("parse_detections accepts an empty array") {
  CHECK(parse_detections("[]", "empty.json").empty());
}

TEST_CASE("parse_detections names the malformed field and entry index") {
  const auto bad_score = capture_error([] {
    parse_detections(R"([{"box": [0, 0, 4, 4], "score": 1.5, "class_id": 0}])", "f.json");
  });
  CHECK(contains(bad_score, "score"));

  const auto short_box = capture_error([] {
    parse_detections(R"([{"box": [0, 0, 4], "score": 0.5, "class_id": 0}])", "f.json");
  });
  CHECK(contains(short_box, "box"));

  const auto flipped = capture_error([] {
    parse_detections(R"([{"box": [8, 0, 4, 4], "score": 0.5, "class_id": 0}])", "f.json");
  });
  CHECK(contains(flipped, "box"));

  const auto fractional_class = capture_error([] {
    parse_detections(R"([{"box": [0, 0, 4, 4], "score": 0.5, "class_id": 1.5}])", "f.json");
  });
  CHECK(contains(fractional_class, "class_id"));

  const auto not_array = capture_error([] { parse_detections("{}", "f.json"); });
  CHECK_FALSE(not_array.empty());
}

TEST_CASE("save and load detections round-trip") {
  testfix::TempDir tmp("dets");
  const std::vector<Detection> dets{{Box{1.0, 2.0, 30.0, 20.0}, 0.75, 0},
                                    {Box{5.0, 5.0, 9.0, 9.0}, 0.25, 1}};
  const auto path = tmp.file("a.detections.json");
  save_detections(path, dets);
  const auto back = load_detections(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].box == dets[0].box);
  CHECK(back[0].score == dets[0].score);
  CHECK(back[1].class_id == 1);
}

TEST_CASE("offline mode reads pre-staged detections without writing a frame") {
  testfix::TempDir tmp("offline");
  ExternalDetectorConfig config;
  config.exchange_dir = tmp.path();
  config.timeout_seconds = 0.2;
  const ExternalDetector detector(config);

  {
    std::ofstream out(detector.detections_path("frame_007"));
    out << R"([{"box": [2, 2, 20, 12], "score": 0.9, "class_id": 0}])";
  }
  const Image image(16, 16, {0.5, 0.5, 0.5});
  const auto dets = detector.detect(image, "frame_007");
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].score == 0.9);
  // Offline mode must not write the frame PNG.
  CHECK_FALSE(std::filesystem::exists(tmp.file("frame_007.png")));
}

TEST_CASE("a silent exchange directory times out with the path in the error") {
  testfix::TempDir tmp("timeout");
  ExternalDetectorConfig config;
  config.exchange_dir = tmp.path();
  config.timeout_seconds = 0.15;
  config.poll_interval_seconds = 0.02;
  const ExternalDetector detector(config);
  const Image image(8, 8, {0.1, 0.2, 0.3});
  const auto msg = capture_error([&] { detector.detect(image, "frame_001"); });
  CHECK(contains(msg, "frame_001"));
  // The frame must have been offered to the external process.
  CHECK(std::filesystem::exists(tmp.file("frame_001.png")));
}

TEST_CASE("a detections file appearing during the poll is picked up") {
  testfix::TempDir tmp("poll");
  ExternalDetectorConfig config;
  config.exchange_dir = tmp.path();
  config.timeout_seconds = 5.0;
  config.poll_interval_seconds = 0.01;
  const ExternalDetector detector(config);

  std::thread responder([&] {
    // Wait for the frame, then answer like an external process would.
    const auto frame = tmp.file("frame_042.png");
    for (int i = 0; i < 500 && !std::filesystem::exists(frame); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    // Write-then-rename so the poller never sees a half-written file.
    const auto staging = tmp.file("frame_042.staging");
    {
      std::ofstream out(staging);
      out << "[]";
    }
    std::filesystem::rename(staging, detector.detections_path("frame_042"));
  });
  const Image image(8, 8);
  const auto dets = detector.detect(image, "frame_042");
  responder.join();
  CHECK(dets.empty());
}

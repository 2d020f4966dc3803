#include <doctest.h>

#include <fstream>
#include <random>

#include "dci/error.hpp"
#include "dci/rng.hpp"
#include "dci/texture.hpp"
#include "support/fixtures.hpp"

using namespace dci;
using testfix::capture_error;
using testfix::contains;

TEST_CASE("texture bin selection follows floor(b*T) with clamping") {
  CHECK(texture_bin_for_barycentric(0.0, 0.0, 4) == std::pair<int, int>{0, 0});
  CHECK(texture_bin_for_barycentric(0.999, 0.0, 4) == std::pair<int, int>{3, 0});
  CHECK(texture_bin_for_barycentric(1.0, 0.0, 4) == std::pair<int, int>{3, 0});
  CHECK(texture_bin_for_barycentric(0.0, 1.0, 4) == std::pair<int, int>{0, 3});
  CHECK(texture_bin_for_barycentric(0.25, 0.5, 2) == std::pair<int, int>{0, 1});
  CHECK(texture_bin_for_barycentric(0.49, 0.49, 2) == std::pair<int, int>{0, 0});
  CHECK(texture_bin_for_barycentric(0.26, 0.26, 4) == std::pair<int, int>{1, 1});
}

TEST_CASE("texture dimensions and default fill") {
  const Texture tex(3, 4);
  CHECK(tex.face_count() == 3);
  CHECK(tex.bins_per_side() == 4);
  CHECK(tex.bin_count() == 3u * 16u);
  CHECK(tex.bin(2, 3, 3) == Rgb{0.5, 0.5, 0.5});
}

TEST_CASE("validate_texture accepts a matching in-range texture") {
  const Mesh mesh = testfix::mesh_from_source("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  const Texture tex(1, 4);
  CHECK_NOTHROW(validate_texture(tex, mesh));
}

TEST_CASE("validate_texture names the offending face and bin") {
  const Mesh mesh = testfix::mesh_from_source("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  Texture tex(1, 4);
  tex.bin(0, 2, 1).g = 1.2;
  const auto msg = capture_error([&] { validate_texture(tex, mesh); });
  CHECK(contains(msg, "face 0"));
  CHECK(contains(msg, "2"));
  CHECK(contains(msg, "1"));
}

TEST_CASE("validate_texture rejects a face-count mismatch") {
  const Mesh mesh = testfix::mesh_from_source("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  const Texture tex(4, 4);
  const auto msg = capture_error([&] { validate_texture(tex, mesh); });
  CHECK(contains(msg, "4"));
  CHECK(contains(msg, "1"));
}

TEST_CASE("texture checksum is content-determined") {
  Texture a(2, 2);
  Texture b(2, 2);
  CHECK(a.checksum() == b.checksum());
  b.bin(1, 0, 1).r = 0.25;
  CHECK(a.checksum() != b.checksum());
}

TEST_CASE("texture save/load round-trips bit-exactly") {
  testfix::TempDir tmp("texture");
  Texture tex(5, 3);
  std::mt19937_64 rng(77);
  for (auto& bin : tex.data()) {
    bin = {uniform_unit(rng), uniform_unit(rng), uniform_unit(rng)};
  }
  const auto path = tmp.file("t.tex");
  save_texture(path, tex);
  const Texture back = load_texture(path);
  REQUIRE(back.face_count() == 5);
  REQUIRE(back.bins_per_side() == 3);
  CHECK(back.data() == tex.data());
  CHECK(back.checksum() == tex.checksum());
}

TEST_CASE("load_texture rejects a corrupted payload") {
  testfix::TempDir tmp("texture_bad");
  const Texture tex(2, 2);
  const auto path = tmp.file("t.tex");
  save_texture(path, tex);
  // Flip one payload byte; the header checksum must catch it.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    f.put('\x7f');
  }
  CHECK_THROWS_AS(load_texture(path), Error);
}

TEST_CASE("load_texture reports a missing file") {
  CHECK_THROWS_AS(load_texture("/nonexistent/t.tex"), Error);
}

#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "jsmreg/config.hpp"
#include "jsmreg/io.hpp"
#include "jsmreg/synth.hpp"
#include "support.hpp"

using namespace jsmreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "jsmreg_test_io";
  fs::create_directories(d);
  return d;
}

GrayImage quantized(int w, int h, int levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, levels);
  ScalarMap m(w, h);
  for (double& v : m.values()) v = static_cast<double>(u(rng)) / levels;
  return GrayImage(std::move(m));
}

}  // namespace

TEST_CASE("JSMF round trip is bit identical for float values") {
  DenseDeformationField f(7, 5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-20.0f, 20.0f);
  for (Vec2& v : f.values()) v = {u(rng), u(rng)};
  const auto bytes = io::encode_jsmf(f);
  CHECK(bytes.size() == 12 + 7 * 5 * 8);
  CHECK(io::decode_jsmf(bytes) == f);
  CHECK(io::encode_jsmf(io::decode_jsmf(bytes)) == bytes);

  const fs::path p = scratch_dir() / "f.jsmf";
  io::write_jsmf(p, f);
  CHECK(io::read_jsmf(p) == f);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(io::decode_jsmf(truncated), InvalidInput);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(io::decode_jsmf(magic), InvalidInput);
}

TEST_CASE("PNG and PGM round trips") {
  const fs::path d = scratch_dir();
  const GrayImage g8 = quantized(13, 9, 255, 2);
  io::write_png(d / "a8.png", g8, 8);
  CHECK(io::read_image(d / "a8.png") == g8);
  io::write_pgm(d / "a8.pgm", g8);
  CHECK(io::read_image(d / "a8.pgm") == g8);

  const GrayImage g16 = quantized(11, 6, 65535, 3);
  io::write_png(d / "a16.png", g16, 16);
  CHECK(io::read_image(d / "a16.png") == g16);

  io::write_text(d / "ascii.pgm", "P2\n# comment\n3 2\n4\n0 1 2\n3 4 4\n");
  const GrayImage p2 = io::read_image(d / "ascii.pgm");
  CHECK(p2.width() == 3);
  CHECK(p2(1, 0) == 0.25);
  CHECK(p2(2, 1) == 1.0);
}

TEST_CASE("unreadable inputs throw IoError") {
  const fs::path d = scratch_dir();
  io::write_png_rgb(d / "rgb.png", 2, 2, std::vector<std::uint8_t>(12, 100));
  CHECK_THROWS_AS(io::read_image(d / "rgb.png"), IoError);
  CHECK_THROWS_AS(io::read_image(d / "missing.png"), IoError);
  io::write_text(d / "bad.png", "not an image");
  CHECK_THROWS_AS(io::read_image(d / "bad.png"), IoError);
}

TEST_CASE("landmark CSV parsing") {
  const LandmarkSet lm = io::parse_landmarks_csv("rx, ry, mx, my\r\n1,2,3,4\n\n5.5,6,7,8e0\n");
  REQUIRE(lm.size() == 2);
  CHECK(lm[1].reference == Vec2{5.5, 6});
  CHECK(lm[1].moving == Vec2{7, 8});

  auto error_of = [](const std::string& text) {
    try {
      io::parse_landmarks_csv(text);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("rx,ry,mx,my\n1,2,3,4\n1,2,x,4\n").find("line 3") != std::string::npos);
  CHECK(error_of("rx,ry,mx,my\n1,2,3\n").find("line 2") != std::string::npos);
  CHECK(error_of("a,b,c,d\n").find("line 1") != std::string::npos);

  const fs::path p = scratch_dir() / "lm.csv";
  io::write_landmarks_csv(p, lm);
  CHECK(io::read_landmarks_csv(p) == lm);
}

TEST_CASE("colormap endpoints") {
  const auto lo = io::colormap(0.0), hi = io::colormap(1.0);
  CHECK(lo != hi);
  CHECK(io::colormap(-1.0) == lo);
  CHECK(io::colormap(2.0) == hi);
}

TEST_CASE("parameter overrides") {
  RegistrationConfig cfg;
  apply_override(cfg, "block.size=21");
  apply_override(cfg, "mdl.lambda=0.25");
  apply_override(cfg, "pyramid_levels=3");
  CHECK(cfg.block.block_size == 21);
  CHECK(cfg.mdl.lambda == 0.25);
  CHECK(cfg.pyramid_levels == 3);
  CHECK_THROWS_AS(apply_override(cfg, "foo=1"), InvalidInput);
  CHECK_THROWS_AS(apply_override(cfg, "block.size"), InvalidInput);
  CHECK_THROWS_AS(apply_override(cfg, "block.size=abc"), InvalidInput);
  try {
    apply_override(cfg, "foo=1");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("block.bins") != std::string::npos);
  }
  CHECK(config_keys().size() == 23);
}

TEST_CASE("synthetic fixtures") {
  CHECK(synth::textured_image(40, 30, 5) == synth::textured_image(40, 30, 5));
  CHECK(!(synth::textured_image(40, 30, 5) == synth::textured_image(40, 30, 6)));

  const auto b = synth::bump_fixture(1, 128);
  double peak = 0.0;
  for (const Vec2& v : b.truth.values()) peak = std::max(peak, v.norm());
  CHECK(peak == doctest::Approx(6.0).epsilon(1e-6));
  const Vec2 c = b.bump.center;
  const Vec2 back = synth::invert_bump(b.bump, c + synth::bump_displacement(b.bump, c));
  CHECK((back - c).norm() < 1e-9);

  const auto blob = synth::bump_fixture(1, 128, true);
  const Grid<char> disk = synth::disk_mask(128, 128, blob.blob.center, blob.blob.radius);
  int changed_inside = 0;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (disk(x, y)) {
        changed_inside += blob.mov(x, y) != b.mov(x, y);
      } else {
        CHECK(blob.mov(x, y) == b.mov(x, y));
      }
    }
  }
  CHECK(changed_inside > 300);

  const auto t = synth::translation_fixture(1, 64);
  CHECK(t.mov(20, 20) == doctest::Approx(t.ref(17, 22)).epsilon(1e-12));
}

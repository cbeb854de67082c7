// Copyright 2026 The fnsup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fnsup/errors.hpp"
#include "fnsup/image_io.hpp"
#include "fnsup/model_io.hpp"
#include "fnsup/noise.hpp"
#include "fnsup/report.hpp"

using namespace fnsup;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fnsup_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

ImageGrid quantize(const ImageGrid& g, double maxval) {
  return (g.max(0.0).min(1.0) * maxval).round() / maxval;
}

}  // namespace

TEST_CASE("16-bit PGM round trip") {
  const ImageGrid z = gen_clean({11, 0}, 37, 29, 12);
  const auto p = scratch("a.pgm");
  image_write(p.string(), z, 16);
  const ImageGrid back = image_read(p.string());
  REQUIRE(back.rows() == 37);
  REQUIRE(back.cols() == 29);
  CHECK((back - z).abs().maxCoeff() <= 0.5 / 65535 + 1e-15);
  CHECK(slurp(p).substr(0, 2) == "P5");
}

TEST_CASE("ASCII and binary PGM decode to the same grid") {
  const ImageGrid z = gen_clean({12, 0}, 16, 20, 5);
  const auto a = scratch("ascii.pgm"), b = scratch("binary.pgm");
  for (int depth : {8, 16}) {
    image_write(a.string(), z, depth, ImageFormat::PgmAscii);
    image_write(b.string(), z, depth, ImageFormat::PgmBinary);
    CHECK(slurp(a).substr(0, 2) == "P2");
    const ImageGrid ga = image_read(a.string()), gb = image_read(b.string());
    CHECK((ga - gb).abs().maxCoeff() == 0.0);
    CHECK((ga - quantize(z, depth == 8 ? 255.0 : 65535.0)).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("PGM header with comments and big-endian 16-bit samples") {
  const auto p = scratch("hand.pgm");
  std::string bytes = "P5\n# two by one\n2 1\n65535\n";
  bytes += std::string("\x01\x02\xff\xff", 4);
  spit(p, bytes);
  const ImageGrid g = image_read(p.string());
  CHECK(g(0, 0) == doctest::Approx(258.0 / 65535.0));
  CHECK(g(0, 1) == 1.0);
}

TEST_CASE("PNG round trip is exact at the stored depth") {
  const ImageGrid z = gen_clean({13, 0}, 24, 31, 8);
  const auto p = scratch("a.png");
  for (int depth : {8, 16}) {
    image_write(p.string(), z, depth);
    CHECK(slurp(p).substr(1, 3) == "PNG");
    const ImageGrid back = image_read(p.string());
    CHECK((back - quantize(z, depth == 8 ? 255.0 : 65535.0)).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("out-of-range samples are clipped on write") {
  ImageGrid g(1, 3);
  g << -0.5, 0.25, 1.5;
  const auto p = scratch("clip.pgm");
  image_write(p.string(), g, 8);
  const ImageGrid back = image_read(p.string());
  CHECK(back(0, 0) == 0.0);
  CHECK(back(0, 1) == doctest::Approx(64.0 / 255.0));
  CHECK(back(0, 2) == 1.0);
}

TEST_CASE("corrupt and unsupported images") {
  const ImageGrid z = gen_clean({14, 0}, 8, 8, 3);
  const auto good = scratch("good.pgm"), bad = scratch("bad.pgm");
  image_write(good.string(), z, 8);
  const std::string bytes = slurp(good);

  spit(bad, bytes.substr(0, bytes.size() - 5));
  try {
    image_read(bad.string());
    FAIL("truncated data accepted");
  } catch (const CorruptHeader& e) {
    CHECK(e.offset() > 0);
    CHECK(e.offset() <= bytes.size());
  }

  spit(bad, "P5\n8 x\n255\n");
  CHECK_THROWS_AS(image_read(bad.string()), CorruptHeader);
  spit(bad, "P5\n8 8\n70000\n");
  CHECK_THROWS_AS(image_read(bad.string()), CorruptHeader);
  spit(bad, "P6\n1 1\n255\nabc");
  CHECK_THROWS_AS(image_read(bad.string()), UnsupportedFormat);
  spit(bad, "GIF89a");
  CHECK_THROWS_AS(image_read(bad.string()), UnsupportedFormat);

  const auto png = scratch("t.png");
  image_write(png.string(), z, 8);
  const std::string pbytes = slurp(png);
  spit(png, pbytes.substr(0, pbytes.size() / 2));
  CHECK_THROWS_AS(image_read(png.string()), CorruptHeader);

  CHECK_THROWS_AS(image_read(scratch("missing.pgm").string()), IoError);
  CHECK_THROWS_AS(image_write(scratch("x.pgm").string(), z, 12), UnsupportedFormat);
}

TEST_CASE("model container round trip") {
  SpectralDiagonalModel s(6, 5);
  for (Eigen::Index i = 0; i < s.params().size(); ++i) s.params()[i] = 0.01 * i - 0.3;
  s.project();
  auto s2 = model_deserialize(model_serialize(s));
  REQUIRE(s2->kind() == ModelKind::SpectralDiagonal);
  CHECK(s2->params() == s.params());
  CHECK(static_cast<SpectralDiagonalModel&>(*s2).rows() == 6);

  ConvNetModel c({3, 5, 4});
  c.init_uniform({21, 0});
  const auto p = scratch("m.fnsm");
  model_save(p.string(), c);
  auto c2 = model_load(p.string());
  REQUIRE(c2->kind() == ModelKind::ConvNet);
  CHECK(c2->params() == c.params());
  const ImageGrid x = gen_clean({15, 0}, 12, 12, 4);
  CHECK((c2->forward(x) - c.forward(x)).abs().maxCoeff() == 0.0);
  CHECK(static_cast<ConvNetModel&>(*c2).layers().size() == 3);
}

TEST_CASE("model container rejects damaged input") {
  ConvNetModel c({2, 3, 2});
  const std::string bytes = model_serialize(c);
  CHECK(bytes.substr(0, 4) == "FNSM");

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(model_deserialize(bad), CorruptHeader);
  bad = bytes;
  bad[4] = 9;  // version
  CHECK_THROWS_AS(model_deserialize(bad), UnsupportedFormat);
  bad = bytes;
  bad[8] = 7;  // kind
  CHECK_THROWS_AS(model_deserialize(bad), UnsupportedFormat);
  try {
    model_deserialize(bytes.substr(0, bytes.size() - 3));
    FAIL("truncated model accepted");
  } catch (const CorruptHeader& e) {
    CHECK(e.offset() <= bytes.size());
  }
  CHECK_THROWS_AS(model_load(scratch("nope.fnsm").string()), IoError);
}

TEST_CASE("report formatting is deterministic") {
  CHECK(fmt(0.5) == "0.5");
  CHECK(fmt(-0.0) == "0");
  CHECK(fmt(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt(std::nan("")) == "nan");
  CsvTable t({"a", "b"});
  t.row(std::vector<double>{1.0, 2.5}).row(std::vector<std::string>{"x", "y"});
  CHECK(t.rows() == 2);
  CHECK(t.str() == "a,b\n1,2.5\nx,y\n");
  CHECK_THROWS(t.row(std::vector<double>{1.0}));

  ImageGrid g(2, 2);
  g << 1, 2, 3, 4;
  CHECK(grid_csv(g) == "1,2\n3,4\n");
  const std::string svg = svg_lines({{"s", {0, 1, 2}, {1, 4, 9}}}, "t", "x", "y");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg_heatmap(g, "h", true).find("<rect") != std::string::npos);
}

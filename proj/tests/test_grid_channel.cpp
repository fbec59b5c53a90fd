// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "maopt/error.hpp"
#include "maopt/grid_channel.hpp"

using namespace maopt;

namespace {

constexpr double kLambda = 0.06;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected maopt::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("build_grid derives the integer index spacing") {
  CHECK(build_grid(48, 6 * kLambda, kLambda, kLambda / 2).min_index_spacing == 4);
  CHECK(build_grid(10, 1.0, kLambda, 0.1).min_index_spacing == 1);
  CHECK(code_of([] { build_grid(48, 6 * kLambda, kLambda, kLambda / 3); }) ==
        ErrorCode::NonIntegerIndexSpacing);
  CHECK(code_of([] { build_grid(48, 0.36, kLambda, 0.36); }) == ErrorCode::InvalidGeometry);
  CHECK(code_of([] { build_grid(1, 0.36, kLambda, 0.03); }) == ErrorCode::InvalidGeometry);
  CHECK(code_of([] { build_grid(48, -1.0, kLambda, 0.03); }) == ErrorCode::InvalidGeometry);
}

TEST_CASE("index_to_position maps m to m*A/M") {
  const auto grid = build_grid(48, 0.36, kLambda, 0.03);
  CHECK(index_to_position(grid, 48) == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(index_to_position(grid, 24) == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(index_to_position(grid, 1) == doctest::Approx(0.0075).epsilon(1e-15));
  for (int m = 2; m <= 48; ++m) CHECK(grid.position(m) > grid.position(m - 1));
  CHECK(code_of([&] { index_to_position(grid, 0); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { index_to_position(grid, 49); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("draw_paths has the configured gain variance and angle law") {
  const double beta = std::pow(10.0, -4.6);
  const std::vector<double> distances{100.0, 60.0, 40.0};

  SUBCASE("paper parameters give 27 coefficients") {
    Rng rng(7);
    const auto ps = draw_paths(3, 9, distances, 2.8, beta, rng);
    CHECK(ps.paths() == 9);
    CHECK(ps.users() == 3);
    CHECK(ps.gain.size() == 27);
    CHECK(ps.gain_variance(0) == doctest::Approx(beta * std::pow(100.0, -2.8) / 9));
  }

  SUBCASE("statistics over 1e4 draws") {
    Rng rng(11);
    constexpr int draws = 10000;
    double power[3] = {0, 0, 0};
    double angle_sum = 0.0, angle_sq = 0.0;
    int angle_count = 0;
    PathSet last;
    for (int i = 0; i < draws; ++i) {
      last = draw_paths(3, 9, distances, 2.8, beta, rng);
      for (int k = 0; k < 3; ++k) power[k] += last.gain.col(k).squaredNorm() / 9;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 9; ++l) {
          const double t = last.angle(l, k);
          CHECK_MESSAGE((t >= 0.0 && t <= std::numbers::pi), "angle outside [0, pi]");
          angle_sum += t;
          angle_sq += t * t;
          ++angle_count;
        }
    }
    for (int k = 0; k < 3; ++k)
      CHECK(power[k] / draws == doctest::Approx(last.gain_variance(k)).epsilon(0.05));
    const double mean = angle_sum / angle_count;
    const double var = angle_sq / angle_count - mean * mean;
    CHECK(mean == doctest::Approx(std::numbers::pi / 2).epsilon(0.01));
    CHECK(var == doctest::Approx(std::numbers::pi * std::numbers::pi / 12).epsilon(0.02));
  }

  SUBCASE("single unit path") {
    Rng rng(3);
    const std::vector<double> d{1.0};
    double power = 0.0;
    for (int i = 0; i < 10000; ++i) power += std::norm(draw_paths(1, 1, d, 2.8, 1.0, rng).gain(0, 0));
    CHECK(power / 10000 == doctest::Approx(1.0).epsilon(0.05));
  }

  SUBCASE("same seed gives the same path set") {
    Rng a(42), b(42);
    const auto pa = draw_paths(3, 9, distances, 2.8, beta, a);
    const auto pb = draw_paths(3, 9, distances, 2.8, beta, b);
    CHECK(pa.gain == pb.gain);
    CHECK(pa.angle == pb.angle);
  }
}

namespace {

PathSet single_user_paths(std::vector<std::complex<double>> gains, std::vector<double> angles) {
  PathSet ps;
  ps.gain = Eigen::Map<Eigen::VectorXcd>(gains.data(), gains.size());
  ps.angle = Eigen::Map<Eigen::VectorXd>(angles.data(), angles.size());
  ps.distance = Eigen::VectorXd::Ones(1);
  ps.pathloss_exponent = 2.8;
  ps.reference_gain = 1.0;
  return ps;
}

}  // namespace

TEST_CASE("generate_channel_map evaluates the field response") {
  SUBCASE("broadside path has no phase progression") {
    const auto grid = build_grid(48, 0.36, kLambda, 0.03);
    const auto map = generate_channel_map(single_user_paths({1.0}, {std::numbers::pi / 2}), grid);
    for (int m = 1; m <= 48; ++m) {
      CHECK(map.at(m, 0).real() == doctest::Approx(1.0));
      CHECK(std::abs(map.at(m, 0).imag()) < 1e-12);
    }
  }
  SUBCASE("endfire path at one wavelength") {
    // M = 6, A = lambda: point 6 sits at x = lambda
    const auto grid = build_grid(6, kLambda, kLambda, kLambda / 6);
    const auto map = generate_channel_map(single_user_paths({1.0}, {0.0}), grid);
    CHECK(std::abs(map.at(6, 0) - std::complex<double>(1.0, 0.0)) < 1e-12);
  }
  SUBCASE("opposite endfire paths cancel at a quarter wavelength") {
    // x = lambda/4: e^{j pi/2} + e^{-j pi/2} = 0
    const auto grid = build_grid(4, kLambda, kLambda, kLambda / 4);
    const auto map =
        generate_channel_map(single_user_paths({1.0, 1.0}, {0.0, std::numbers::pi}), grid);
    CHECK(std::abs(map.at(1, 0)) < 1e-12);
  }
}

TEST_CASE("channel map invariants") {
  const auto grid = build_grid(48, 0.36, kLambda, 0.03);
  const std::vector<double> distances{100.0, 60.0, 40.0};
  Rng rng(5);
  const auto paths = draw_paths(3, 9, distances, 2.8, 1e-4, rng);
  const auto map = generate_channel_map(paths, grid);

  SUBCASE("triangle inequality") {
    for (int k = 0; k < 3; ++k) {
      const double bound = paths.gain.col(k).cwiseAbs().sum();
      for (int m = 1; m <= 48; ++m) CHECK(std::abs(map.at(m, k)) <= bound * (1 + 1e-12));
    }
  }
  SUBCASE("regeneration is bitwise identical") {
    const auto again = generate_channel_map(paths, grid);
    CHECK(again.checksum() == map.checksum());
    CHECK(again.table() == map.table());
  }
  SUBCASE("scaling every gain scales every channel") {
    const std::complex<double> c(0.3, -1.7);
    PathSet scaled = paths;
    scaled.gain *= c;
    const auto other = generate_channel_map(scaled, grid);
    CHECK((other.table() - c * map.table()).norm() <= 1e-12 * map.table().norm());
  }
}

TEST_CASE("channel_at extracts conjugated rows") {
  const auto grid = build_grid(3, 0.03, kLambda, 0.01);
  Eigen::MatrixXcd table(3, 2);
  table << std::complex<double>(1, 2), std::complex<double>(3, -1),
      std::complex<double>(0, 1), std::complex<double>(-2, 0),
      std::complex<double>(5, 5), std::complex<double>(0.5, -0.5);
  const ChannelMap map(table, grid);

  SUBCASE("K = 2, N = 2 by hand") {
    const auto H = channel_at(map, {3, 1});
    Eigen::MatrixXcd expected(2, 2);
    expected << std::complex<double>(5, -5), std::complex<double>(1, -2),
        std::complex<double>(0.5, 0.5), std::complex<double>(3, 1);
    CHECK(H == expected);
  }
  SUBCASE("single antenna single user") {
    const ChannelMap one(table.col(0), grid);
    const auto H = channel_at(one, {2});
    CHECK(H.rows() == 1);
    CHECK(H.cols() == 1);
    CHECK(H(0, 0) == std::complex<double>(0, -1));
  }
  SUBCASE("repeated index duplicates the column") {
    const auto H = channel_at(map, {2, 2});
    CHECK(H.col(0) == H.col(1));
  }
  SUBCASE("pure lookup") {
    const auto before = map.checksum();
    CHECK(channel_at(map, {1, 3}) == channel_at(map, {1, 3}));
    CHECK(map.checksum() == before);
  }
  SUBCASE("out of range") {
    CHECK(code_of([&] { channel_at(map, {0, 1}); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { channel_at(map, {4}); }) == ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("CSV forms reproduce the channel bit for bit") {
  const auto grid = build_grid(24, 0.36, kLambda, 0.03);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const std::vector<double> distances{100.0, 60.0};
    const auto paths = draw_paths(2, 5, distances, 2.8, 1e-4, rng);
    const auto map = generate_channel_map(paths, grid);

    std::stringstream path_csv;
    write_paths_csv(paths, path_csv);
    auto restored = read_paths_csv(path_csv);
    CHECK(generate_channel_map(restored, grid).table() == map.table());

    std::stringstream channel_csv;
    write_channel_csv(map, channel_csv);
    CHECK(read_channel_csv(channel_csv) == map.table());
  }
  std::stringstream header_only("m,k,re,im\n");
  CHECK(code_of([&] { read_channel_csv(header_only); }) == ErrorCode::Io);
  std::stringstream bad("m,k,re,im\n1,1,abc,0\n");
  CHECK(code_of([&] { read_channel_csv(bad); }) == ErrorCode::Io);
}

TEST_CASE("channel CSV header and layout") {
  const auto grid = build_grid(2, 0.02, kLambda, 0.01);
  Eigen::MatrixXcd table(2, 1);
  table << std::complex<double>(0.5, -0.25), std::complex<double>(1, 0);
  std::stringstream out;
  write_channel_csv(ChannelMap(table, grid), out);
  CHECK(out.str() == "m,k,re,im\n1,1,0.5,-0.25\n2,1,1,0\n");
}

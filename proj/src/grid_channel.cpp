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

#include "maopt/grid_channel.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "maopt/error.hpp"
#include "maopt/number_format.hpp"

namespace maopt {

namespace {

constexpr double kIntegerTolerance = 1e-9;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::Io, "malformed number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::Io, "malformed integer '" + s + "'");
  return v;
}

// Reads "header\nrow..." into rows of fields, checking the column count.
std::vector<std::vector<std::string>> read_rows(std::istream& in, std::size_t columns) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "missing CSV header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns)
      throw Error(ErrorCode::Io, "expected " + std::to_string(columns) + " columns: '" + line + "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

double SamplingGrid::position(int m) const {
  if (m < 1 || m > points)
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(m) + " outside 1.." + std::to_string(points));
  return m * length / points;
}

SamplingGrid build_grid(int points, double length, double wavelength, double min_spacing) {
  if (points < 2) throw Error(ErrorCode::InvalidGeometry, "need at least 2 sampling points");
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidGeometry, "region length must be positive");
  if (!(wavelength > 0.0)) throw Error(ErrorCode::InvalidGeometry, "wavelength must be positive");
  if (!(min_spacing > 0.0) || min_spacing >= length)
    throw Error(ErrorCode::InvalidGeometry, "minimum spacing must lie in (0, A)");

  const double spacing = min_spacing * points / length;
  const double rounded = std::round(spacing);
  if (std::abs(spacing - rounded) > kIntegerTolerance * std::max(1.0, spacing) || rounded < 1.0)
    throw Error(ErrorCode::NonIntegerIndexSpacing,
                "d_min * M / A = " + format_number(spacing) + " is not an integer");

  return SamplingGrid{points, length, wavelength, min_spacing, static_cast<int>(rounded)};
}

double index_to_position(const SamplingGrid& grid, int m) { return grid.position(m); }

double PathSet::gain_variance(int user) const {
  return reference_gain * std::pow(distance(user), -pathloss_exponent) / paths();
}

PathSet draw_paths(int users, int paths, std::span<const double> distances,
                   double pathloss_exponent, double reference_gain, Rng& rng) {
  if (users < 1 || paths < 1)
    throw Error(ErrorCode::InvalidGeometry, "need at least one user and one path");
  if (distances.size() != static_cast<std::size_t>(users))
    throw Error(ErrorCode::InvalidGeometry, "one distance per user required");
  for (double d : distances)
    if (!(d > 0.0)) throw Error(ErrorCode::InvalidGeometry, "distances must be positive");

  PathSet ps;
  ps.gain.resize(paths, users);
  ps.angle.resize(paths, users);
  ps.distance = Eigen::Map<const Eigen::VectorXd>(distances.data(), users);
  ps.pathloss_exponent = pathloss_exponent;
  ps.reference_gain = reference_gain;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, std::numbers::pi);
  for (int k = 0; k < users; ++k) {
    const double sigma = std::sqrt(ps.gain_variance(k) / 2.0);
    for (int l = 0; l < paths; ++l) {
      const double re = normal(rng);
      const double im = normal(rng);
      ps.gain(l, k) = {sigma * re, sigma * im};
      ps.angle(l, k) = uniform(rng);
    }
  }
  return ps;
}

ChannelMap::ChannelMap(Eigen::MatrixXcd table, SamplingGrid grid)
    : table_(std::move(table)), grid_(grid) {
  if (table_.rows() != grid_.points)
    throw Error(ErrorCode::InvalidGeometry, "channel table rows must equal grid points");
}

std::complex<double> ChannelMap::at(int m, int user) const {
  if (m < 1 || m > points())
    throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(m) + " outside grid");
  return table_(m - 1, user);
}

std::uint64_t ChannelMap::checksum() const {
  std::uint64_t hash = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(table_.data());
  const std::size_t n = static_cast<std::size_t>(table_.size()) * sizeof(std::complex<double>);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

ChannelMap generate_channel_map(const PathSet& paths, const SamplingGrid& grid) {
  const double wavenumber = 2.0 * std::numbers::pi / grid.wavelength;
  Eigen::MatrixXcd table(grid.points, paths.users());
  for (int m = 1; m <= grid.points; ++m) {
    const double x = grid.position(m);
    for (int k = 0; k < paths.users(); ++k) {
      std::complex<double> h{0.0, 0.0};
      for (int l = 0; l < paths.paths(); ++l)
        h += paths.gain(l, k) * std::polar(1.0, wavenumber * x * std::cos(paths.angle(l, k)));
      table(m - 1, k) = h;
    }
  }
  return ChannelMap(std::move(table), grid);
}

Eigen::MatrixXcd channel_at(const ChannelMap& channel, const IndexVector& a) {
  Eigen::MatrixXcd H(channel.users(), static_cast<Eigen::Index>(a.size()));
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a[n] < 1 || a[n] > channel.points())
      throw Error(ErrorCode::IndexOutOfRange,
                  "index " + std::to_string(a[n]) + " outside 1.." + std::to_string(channel.points()));
    H.col(static_cast<Eigen::Index>(n)) = channel.table().row(a[n] - 1).transpose().conjugate();
  }
  return H;
}

void write_channel_csv(const ChannelMap& channel, std::ostream& out) {
  out << "m,k,re,im\n";
  for (int m = 1; m <= channel.points(); ++m)
    for (int k = 0; k < channel.users(); ++k) {
      const auto h = channel.at(m, k);
      out << m << ',' << k + 1 << ',' << format_number(h.real()) << ',' << format_number(h.imag())
          << '\n';
    }
}

Eigen::MatrixXcd read_channel_csv(std::istream& in) {
  const auto rows = read_rows(in, 4);
  int points = 0;
  int users = 0;
  for (const auto& r : rows) {
    points = std::max(points, parse_int(r[0]));
    users = std::max(users, parse_int(r[1]));
  }
  if (points < 1 || users < 1 || rows.size() != static_cast<std::size_t>(points) * users)
    throw Error(ErrorCode::Io, "channel CSV does not cover a full M x K table");
  Eigen::MatrixXcd table = Eigen::MatrixXcd::Zero(points, users);
  for (const auto& r : rows) {
    const int m = parse_int(r[0]);
    const int k = parse_int(r[1]);
    if (m < 1 || k < 1) throw Error(ErrorCode::Io, "channel CSV indices are 1-based");
    table(m - 1, k - 1) = {parse_double(r[2]), parse_double(r[3])};
  }
  return table;
}

void write_paths_csv(const PathSet& paths, std::ostream& out) {
  out << "k,l,re_gamma,im_gamma,theta\n";
  for (int k = 0; k < paths.users(); ++k)
    for (int l = 0; l < paths.paths(); ++l) {
      const auto g = paths.gain(l, k);
      out << k + 1 << ',' << l + 1 << ',' << format_number(g.real()) << ','
          << format_number(g.imag()) << ',' << format_number(paths.angle(l, k)) << '\n';
    }
}

PathSet read_paths_csv(std::istream& in) {
  const auto rows = read_rows(in, 5);
  int users = 0;
  int npaths = 0;
  for (const auto& r : rows) {
    users = std::max(users, parse_int(r[0]));
    npaths = std::max(npaths, parse_int(r[1]));
  }
  if (users < 1 || npaths < 1 || rows.size() != static_cast<std::size_t>(users) * npaths)
    throw Error(ErrorCode::Io, "paths CSV does not cover a full L_t x K table");
  PathSet ps;
  ps.gain = Eigen::MatrixXcd::Zero(npaths, users);
  ps.angle = Eigen::MatrixXd::Zero(npaths, users);
  for (const auto& r : rows) {
    const int k = parse_int(r[0]);
    const int l = parse_int(r[1]);
    if (k < 1 || l < 1) throw Error(ErrorCode::Io, "paths CSV indices are 1-based");
    ps.gain(l - 1, k - 1) = {parse_double(r[2]), parse_double(r[3])};
    ps.angle(l - 1, k - 1) = parse_double(r[4]);
  }
  return ps;
}

}  // namespace maopt

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

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace maopt {

using Rng = std::mt19937_64;

/// One sampling-point index per movable antenna, 1-based (1..M). Order is
/// positional: entry n belongs to antenna n, entries need not be sorted.
using IndexVector = std::vector<int>;

/// Uniform discretization of a linear transmit region of length A into M
/// points. Point m (1-based) sits at m * A / M, so there is no point at 0
/// and the last point is at A.
struct SamplingGrid {
  int points = 0;              // M
  double length = 0.0;         // A [m]
  double wavelength = 0.0;     // lambda [m]
  double min_spacing = 0.0;    // d_min [m]
  int min_index_spacing = 0;   // a_min = d_min * M / A

  double step() const { return length / points; }
  double position(int m) const;
};

/// Throws NonIntegerIndexSpacing when d_min * M / A is not an integer and
/// InvalidGeometry for non-positive sizes or d_min >= A.
SamplingGrid build_grid(int points, double length, double wavelength, double min_spacing);

double index_to_position(const SamplingGrid& grid, int m);

/// Field-response path parameters. Column k holds the L_t paths of user k
/// (users are 0-based in code, 1-based in CSV files).
struct PathSet {
  Eigen::MatrixXcd gain;       // L_t x K
  Eigen::MatrixXd angle;       // L_t x K, departure angle in [0, pi]
  Eigen::VectorXd distance;    // K, BS-user distance [m]
  double pathloss_exponent = 0.0;
  double reference_gain = 0.0; // linear scale

  int paths() const { return static_cast<int>(gain.rows()); }
  int users() const { return static_cast<int>(gain.cols()); }

  /// beta * D_k^-alpha / L_t
  double gain_variance(int user) const;
};

/// gamma ~ CN(0, beta D_k^-alpha / L_t), theta ~ U[0, pi].
PathSet draw_paths(int users, int paths, std::span<const double> distances,
                   double pathloss_exponent, double reference_gain, Rng& rng);

/// Point-wise channel table h[m][k] for every sampling point and user.
/// Immutable after construction.
class ChannelMap {
 public:
  ChannelMap(Eigen::MatrixXcd table, SamplingGrid grid);

  const Eigen::MatrixXcd& table() const { return table_; }
  const SamplingGrid& grid() const { return grid_; }
  int points() const { return static_cast<int>(table_.rows()); }
  int users() const { return static_cast<int>(table_.cols()); }

  /// h[m][k] with m 1-based and k 0-based.
  std::complex<double> at(int m, int user) const;

  /// FNV-1a over the raw table bytes; used to check that paired methods saw
  /// the same realization.
  std::uint64_t checksum() const;

 private:
  Eigen::MatrixXcd table_;
  SamplingGrid grid_;
};

/// h[m][k] = sum_l gamma[l][k] * exp(j 2pi/lambda x_m cos(theta[l][k])).
ChannelMap generate_channel_map(const PathSet& paths, const SamplingGrid& grid);

/// K x N matrix H(a) whose row k is h_k(a)^H, i.e. H(k, n) = conj(h[a_n][k]).
Eigen::MatrixXcd channel_at(const ChannelMap& channel, const IndexVector& a);

// CSV forms used for cross-implementation testing. Both write a header row
// and use 1-based m, k, l.
//   channel: m,k,re,im
//   paths:   k,l,re_gamma,im_gamma,theta
void write_channel_csv(const ChannelMap& channel, std::ostream& out);
Eigen::MatrixXcd read_channel_csv(std::istream& in);
void write_paths_csv(const PathSet& paths, std::ostream& out);
/// Only gain and angle are restored; distance and path-loss metadata are left
/// empty since the file does not carry them.
PathSet read_paths_csv(std::istream& in);

}  // namespace maopt

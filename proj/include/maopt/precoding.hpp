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

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "maopt/error.hpp"
#include "maopt/grid_channel.hpp"

namespace maopt {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Condition-number ceiling above which a regularized Gram matrix is treated
/// as singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// Regularized zero-forcing precoder for a K x N channel H whose row k is the
/// effective channel of user k. Returns the N x K matrix
///
///   W = H^H (H H^H + rho I_K)^-1  ==  (H^H H + rho I_N)^-1 H^H
///
/// with one column per user. Throws SingularSystem when the K x K system is
/// numerically singular.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> rzf_precoder(const Eigen::MatrixBase<Derived>& H,
                                                   typename Derived::RealScalar rho) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Derived::RealScalar;
  using Matrix = DenseMatrix<Scalar>;

  if (rho < Real(0)) throw Error(ErrorCode::SingularSystem, "regularization must be non-negative");
  Matrix gram = H * H.adjoint();
  gram.diagonal().array() += Scalar(rho);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const Real lo = eig.eigenvalues().minCoeff();
  const Real hi = eig.eigenvalues().maxCoeff();
  if (!(lo > Real(0)) || hi / lo > Real(kMaxConditionNumber))
    throw Error(ErrorCode::SingularSystem, "regularized Gram matrix is numerically singular");

  const Matrix identity = Matrix::Identity(gram.rows(), gram.cols());
  return H.adjoint() * gram.llt().solve(identity);
}

/// Same precoder through the N x N form; kept as an independent route for
/// cross-checking the K x K implementation.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> rzf_precoder_primal(const Eigen::MatrixBase<Derived>& H,
                                                          typename Derived::RealScalar rho) {
  using Matrix = DenseMatrix<typename Derived::Scalar>;
  Matrix gram = H.adjoint() * H;
  gram.diagonal().array() += typename Derived::Scalar(rho);
  return gram.partialPivLu().solve(Matrix(H.adjoint()));
}

/// Per-user rates log2(1 + SINR_k) of precoder W on the K x N channel H.
template <typename DerivedH, typename DerivedW>
DenseVector<typename DerivedH::RealScalar> user_rates(const Eigen::MatrixBase<DerivedH>& H,
                                                      const Eigen::MatrixBase<DerivedW>& W,
                                                      typename DerivedH::RealScalar noise_power) {
  using Real = typename DerivedH::RealScalar;
  // gain(k, i) = |h_k^H w_i|^2
  const DenseMatrix<Real> gain = (H * W).cwiseAbs2();
  DenseVector<Real> rates(H.rows());
  for (Eigen::Index k = 0; k < H.rows(); ++k) {
    const Real desired = gain(k, k);
    const Real interference = gain.row(k).sum() - desired;
    rates(k) = std::log2(Real(1) + desired / (interference + noise_power));
  }
  return rates;
}

/// sqrt(P) h / ||h||. Throws ZeroChannel for an all-zero channel.
template <typename Derived>
DenseVector<typename Derived::Scalar> mrt_beamformer(const Eigen::MatrixBase<Derived>& h,
                                                     typename Derived::RealScalar power) {
  const auto norm = h.norm();
  if (!(norm > 0)) throw Error(ErrorCode::ZeroChannel, "MRT needs a non-zero channel");
  return h * (std::sqrt(power) / norm);
}

/// ||W_RZF(rho)||_F^2 evaluated from the spectrum of H H^H:
/// sum_i lambda_i / (lambda_i + rho)^2. One eigendecomposition serves the
/// whole bisection.
class RzfPowerProfile {
 public:
  explicit RzfPowerProfile(const Eigen::MatrixXcd& H);

  double power(double rho) const;
  double trace() const { return eigenvalues_.sum(); }
  int users() const { return static_cast<int>(eigenvalues_.size()); }

 private:
  Eigen::VectorXd eigenvalues_;
};

enum class RhoMode {
  PowerEquality,  // rho makes the budget active: ||W||^2 = P
  RateOptimal,    // golden-section search of sum rate over the budget-feasible rho
};

struct RhoSearch {
  double tolerance = 1e-6;  // relative, on the transmit power
  int max_doublings = 60;
  int max_bisections = 200;
  RhoMode mode = RhoMode::PowerEquality;
};

struct PrecoderSolution {
  Eigen::MatrixXcd W;        // N x K, column k serves user k
  double rho = 0.0;
  double total_power = 0.0;  // ||W||_F^2
  Eigen::VectorXd rates;     // bits/s/Hz
  double sum_rate = 0.0;
  bool clamped = false;      // rho sits at the lower bracket edge
};

/// Lower bracket edge 1e-9 * trace(H H^H) / K.
double rho_lower_bound(const RzfPowerProfile& profile);

/// Finds rho with |‖W_RZF(rho)‖^2 - P| / P <= tolerance, auto-detecting the
/// monotone direction of the power curve from the bracket endpoints. When the
/// budget already holds at the lower edge rho is clamped there. Throws
/// BracketFailure for a degenerate (all-zero) channel or when no sign change
/// shows up within max_doublings.
PrecoderSolution bisect_rho(const Eigen::MatrixXcd& H, double power_budget, double noise_power,
                            const RhoSearch& search = {});

PrecoderSolution bisect_rho(const IndexVector& a, const ChannelMap& channel, double power_budget,
                            double noise_power, const RhoSearch& search = {});

Eigen::VectorXd user_rates(const IndexVector& a, const Eigen::MatrixXcd& W,
                           const ChannelMap& channel, double noise_power);

/// Effective channel h_1(a) of a single-user map (the conjugate of row 0 of
/// channel_at).
Eigen::VectorXcd user_channel(const IndexVector& a, const ChannelMap& channel, int user = 0);

Eigen::VectorXcd mrt_precoder(const IndexVector& a, const ChannelMap& channel, double power);

/// P ||h_1(a)||^2 / sigma^2 (linear).
double received_snr(const IndexVector& a, const ChannelMap& channel, double power,
                    double noise_power);

// Case-study utilities. Both capture the channel by reference; the map must
// outlive the returned callable.
std::function<double(const IndexVector&)> snr_utility(const ChannelMap& channel, double power,
                                                      double noise_power);
std::function<double(const IndexVector&)> sum_rate_utility(const ChannelMap& channel,
                                                           double power, double noise_power,
                                                           RhoSearch search = {});

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace maopt

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

#include "maopt/precoding.hpp"

#include <algorithm>
#include <cmath>

namespace maopt {

namespace {

PrecoderSolution make_solution(const Eigen::MatrixXcd& H, double rho, double noise_power) {
  PrecoderSolution sol;
  sol.W = rzf_precoder(H, rho);
  sol.rho = rho;
  sol.total_power = sol.W.squaredNorm();
  sol.rates = user_rates(H, sol.W, noise_power);
  sol.sum_rate = sol.rates.sum();
  return sol;
}

// Golden-section maximization of the sum rate over log(rho) in [lo, hi].
PrecoderSolution golden_section(const Eigen::MatrixXcd& H, double lo, double hi,
                                double noise_power) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = std::log(lo);
  double b = std::log(hi);
  auto rate = [&](double x) { return make_solution(H, std::exp(x), noise_power).sum_rate; };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = rate(c);
  double fd = rate(d);
  for (int i = 0; i < 80 && b - a > 1e-9; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = rate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = rate(d);
    }
  }
  PrecoderSolution best = make_solution(H, lo, noise_power);
  for (double x : {std::log(hi), 0.5 * (a + b)}) {
    auto cand = make_solution(H, std::exp(x), noise_power);
    if (cand.sum_rate > best.sum_rate) best = std::move(cand);
  }
  return best;
}

}  // namespace

RzfPowerProfile::RzfPowerProfile(const Eigen::MatrixXcd& H) {
  const Eigen::MatrixXcd gram = H * H.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
}

double RzfPowerProfile::power(double rho) const {
  return (eigenvalues_.array() / (eigenvalues_.array() + rho).square()).sum();
}

double rho_lower_bound(const RzfPowerProfile& profile) {
  return 1e-9 * profile.trace() / profile.users();
}

PrecoderSolution bisect_rho(const Eigen::MatrixXcd& H, double power_budget, double noise_power,
                            const RhoSearch& search) {
  if (!(power_budget > 0.0)) throw Error(ErrorCode::BracketFailure, "power budget must be positive");
  const RzfPowerProfile profile(H);
  if (!(profile.trace() > 0.0) || !std::isfinite(profile.trace()))
    throw Error(ErrorCode::BracketFailure, "degenerate channel: H H^H has zero trace");

  const double tol = search.tolerance;
  auto excess = [&](double rho) { return profile.power(rho) - power_budget; };
  auto within = [&](double rho) { return std::abs(excess(rho)) <= tol * power_budget; };

  const double rho_lo = rho_lower_bound(profile);
  const bool lo_over = excess(rho_lo) > 0.0;

  double rho_star = rho_lo;
  bool clamped = false;
  bool decreasing = true;

  if (within(rho_lo)) {
    clamped = true;
  } else {
    double inner = rho_lo;
    double outer = std::max(1.0, 2.0 * rho_lo);
    bool flipped = false;
    for (int i = 0; i <= search.max_doublings; ++i) {
      if ((excess(outer) > 0.0) != lo_over) {
        flipped = true;
        break;
      }
      inner = outer;
      outer *= 2.0;
    }
    decreasing = profile.power(outer) < profile.power(rho_lo);
    if (!flipped) {
      if (lo_over)
        throw Error(ErrorCode::BracketFailure,
                    "no rho within the bracket meets the power budget");
      clamped = true;
    } else {
      // geometric bisection; inner keeps the lower-edge sign
      rho_star = outer;
      for (int i = 0; i < search.max_bisections; ++i) {
        const double mid = std::sqrt(inner * outer);
        rho_star = mid;
        if (within(mid)) break;
        if ((excess(mid) > 0.0) == lo_over)
          inner = mid;
        else
          outer = mid;
        rho_star = outer;
      }
    }
  }

  if (search.mode == RhoMode::RateOptimal) {
    // budget-feasible side of rho_star, spanning six decades
    const double lo = decreasing ? rho_star : std::max(rho_lo, rho_star * 1e-6);
    const double hi = decreasing ? rho_star * 1e6 : rho_star;
    auto sol = golden_section(H, lo, hi, noise_power);
    sol.clamped = clamped && sol.rho == rho_lo;
    return sol;
  }

  auto sol = make_solution(H, rho_star, noise_power);
  sol.clamped = clamped;
  return sol;
}

PrecoderSolution bisect_rho(const IndexVector& a, const ChannelMap& channel, double power_budget,
                            double noise_power, const RhoSearch& search) {
  return bisect_rho(channel_at(channel, a), power_budget, noise_power, search);
}

Eigen::VectorXd user_rates(const IndexVector& a, const Eigen::MatrixXcd& W,
                           const ChannelMap& channel, double noise_power) {
  return user_rates(channel_at(channel, a), W, noise_power);
}

Eigen::VectorXcd user_channel(const IndexVector& a, const ChannelMap& channel, int user) {
  return channel_at(channel, a).row(user).adjoint();
}

Eigen::VectorXcd mrt_precoder(const IndexVector& a, const ChannelMap& channel, double power) {
  return mrt_beamformer(user_channel(a, channel), power);
}

double received_snr(const IndexVector& a, const ChannelMap& channel, double power,
                    double noise_power) {
  double gain = 0.0;
  for (int m : a) gain += std::norm(channel.at(m, 0));
  return power * gain / noise_power;
}

std::function<double(const IndexVector&)> snr_utility(const ChannelMap& channel, double power,
                                                      double noise_power) {
  return [&channel, power, noise_power](const IndexVector& a) {
    return received_snr(a, channel, power, noise_power);
  };
}

std::function<double(const IndexVector&)> sum_rate_utility(const ChannelMap& channel,
                                                           double power, double noise_power,
                                                           RhoSearch search) {
  return [&channel, power, noise_power, search](const IndexVector& a) {
    return bisect_rho(a, channel, power, noise_power, search).sum_rate;
  };
}

}  // namespace maopt

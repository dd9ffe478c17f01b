// Copyright 2026 The njcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "njcm/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace njcm {

VibronicState apply_hamiltonian(const ModelParams& params, double t,
                                const VibronicState& psi) {
  const int k = params.sideband_order;
  const int n_max = psi.n_max;
  const Complex phase =
      params.coupling_scale *
      std::polar(1.0, -params.detuning * t + 2.0 * params.laser_phase);
  VibronicState out(n_max);
  for (int n = 0; n + k <= n_max; ++n) {
    const double w = rabi_weight(params, n);
    out.excited(n) += phase * w * psi.ground(n + k);
    out.ground(n + k) += std::conj(phase) * w * psi.excited(n);
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
// b - b* rows of the embedded 4th-order solution.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

}  // namespace

VibronicState integrate_schrodinger(const ModelParams& params,
                                    const VibronicState& state0, double t,
                                    double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6))
    throw std::invalid_argument("integrator tol must lie in [1e-13, 1e-6]");
  if (t < 0.0) throw std::invalid_argument("integration time must be >= 0");
  if (t == 0.0) return state0;

  using Vec = Eigen::VectorXcd;
  const auto rhs = [&params](double tau, const Vec& y) -> Vec {
    VibronicState psi(static_cast<int>(y.size()) / 2 - 1);
    psi.amp = y;
    return Complex(0.0, -1.0) * apply_hamiltonian(params, tau, psi).amp;
  };

  Vec y = state0.amp;
  double tau = 0.0;
  double h = std::min(t / 100.0, 0.05);
  Vec k1 = rhs(tau, y);
  const double underflow = 16.0 * std::numeric_limits<double>::epsilon();

  while (tau < t) {
    h = std::min(h, t - tau);
    if (h < underflow * std::max(1.0, std::abs(tau)))
      throw StepSizeUnderflow("step size underflow at t = " +
                              std::to_string(tau));

    const Vec k2 = rhs(tau + kC2 * h, y + h * (kA21 * k1));
    const Vec k3 = rhs(tau + kC3 * h, y + h * (kA31 * k1 + kA32 * k2));
    const Vec k4 =
        rhs(tau + kC4 * h, y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Vec k5 = rhs(tau + kC5 * h,
                       y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Vec k6 = rhs(
        tau + h,
        y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const Vec y5 =
        y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Vec k7 = rhs(tau + h, y5);

    const Vec err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 +
                         kE6 * k6 + kE7 * k7);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          tol + tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      const double r = std::abs(err(i)) / scale;
      sum += r * r;
    }
    const double err_norm = std::sqrt(sum / static_cast<double>(y.size()));

    if (err_norm <= 1.0) {
      tau += h;
      y = y5;
      k1 = k7;  // first-same-as-last
      const double grow =
          err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
      h *= std::min(5.0, std::max(0.2, grow));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
    }
  }

  VibronicState out(state0.n_max);
  out.amp = y;
  return out;
}

namespace {

struct SimpsonWorkspace {
  std::function<double(double)> f;
  int max_depth = 0;

  double recurse(double a, double m, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) const {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth)
      throw QuadratureNotConverged("Simpson refinement depth " +
                                   std::to_string(max_depth) + " exhausted");
    return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

// Adaptive Simpson with an absolute tolerance shared across panels.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol_abs, int panels) {
  SimpsonWorkspace ws{f, 48};
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h;
    const double x1 = x0 + h;
    const double xm = 0.5 * (x0 + x1);
    const double f0 = f(x0);
    const double fm = f(xm);
    const double f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total +=
        ws.recurse(x0, xm, x1, f0, fm, f1, whole, tol_abs / panels, 0);
  }
  return total;
}

}  // namespace

Complex dyson_term(const ModelParams& params, int order,
                   const VibronicState& state0, double t,
                   double quadrature_tol) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("dyson_term supports orders 1 and 2");
  if (t < 0.0) throw std::invalid_argument("dyson_term requires t >= 0");
  if (!(quadrature_tol > 0.0))
    throw std::invalid_argument("quadrature_tol must be > 0");

  if (order == 1) {
    const VibronicState hpsi = apply_hamiltonian(params, t, state0);
    return state0.amp.dot(hpsi.amp);
  }

  if (t == 0.0) return {0.0, 0.0};

  // i <[H(tau), H(t)]> = -2 Im <H(tau) psi0 | H(t) psi0>, a real integrand.
  const VibronicState u = apply_hamiltonian(params, t, state0);
  const auto integrand = [&](double tau) -> double {
    const VibronicState v = apply_hamiltonian(params, tau, state0);
    return -2.0 * std::imag(v.amp.dot(u.amp));
  };

  // Scale the tolerance by the integrand mass so quadrature_tol acts as a
  // relative tolerance even when the result nearly cancels.
  const int panels = 64;
  double mass = 0.0;
  for (int i = 0; i <= 4 * panels; ++i)
    mass += std::abs(integrand(t * i / (4.0 * panels)));
  mass *= t / (4.0 * panels + 1.0);
  if (mass == 0.0) return {0.0, 0.0};

  const double value =
      adaptive_simpson(integrand, 0.0, t, quadrature_tol * mass, panels);
  return {value, 0.0};
}

}  // namespace njcm

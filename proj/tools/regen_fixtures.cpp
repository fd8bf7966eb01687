// Regenerates the frozen numeric fixtures quoted in the unit tests.
//
// Values are computed here with deliberately independent methods (RK4
// integration, explicit series summation, direct arithmetic) so the tests can
// pin them without trusting the library code under test.  Run manually and
// paste the printed numbers; nothing in the build depends on this output.
#include <cmath>
#include <cstdio>

#include "wpg/gait.hpp"
#include "wpg/lipm.hpp"

namespace {

constexpr double kG = 9.81;
constexpr double kH = 0.8;

struct Rk4State {
  double pos;
  double vel;
};

// Integrates pos'' = omega^2 (pos - z) + a with classic RK4.
Rk4State rk4_lipm(Rk4State s, double z, double a, double dt, int n_sub) {
  const double omega2 = kG / kH;
  const double h = dt / n_sub;
  auto acc = [&](double pos) { return omega2 * (pos - z) + a; };
  for (int i = 0; i < n_sub; ++i) {
    const double k1p = s.vel, k1v = acc(s.pos);
    const double k2p = s.vel + 0.5 * h * k1v, k2v = acc(s.pos + 0.5 * h * k1p);
    const double k3p = s.vel + 0.5 * h * k2v, k3v = acc(s.pos + 0.5 * h * k2p);
    const double k4p = s.vel + h * k3v, k4v = acc(s.pos + h * k3p);
    s.pos += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    s.vel += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return s;
}

// Max/min capturable DCM offset by explicit summation of the stepping series:
// offset(t) = exp(-omega (T_ss - t)) * sum_k d_k exp(-omega (k-1) T_ss), where
// d_1 is the reach-limited first displacement and d_k (k >= 2) extremizes the
// per-step kinematic set.  200 terms is far below double precision already.
double series_bound(double omega, double t_ss, double t, double first,
                    double (*later)(int k)) {
  double sum = first;
  for (int k = 2; k <= 200; ++k) sum += later(k) * std::exp(-omega * (k - 1) * t_ss);
  return sum * std::exp(-omega * (t_ss - t));
}

void print_viability_fixtures() {
  const double omega = std::sqrt(kG / kH);
  const double t_ss = 0.5;
  const double l_max = 0.6, l_f = 0.2, w_f = 0.1, l_p = 0.2;
  const double w_max = 0.2, w_min = -0.08, v_max = 1.5;

  std::printf("omega0          %.12f\n", omega);
  std::printf("exp(omega*T_ss) %.12f\n", std::exp(omega * t_ss));

  // Sagittal, nominal phase: stance and swing both at x = 0.
  for (double t : {0.0, 0.3}) {
    const double window = t_ss - t;
    const double reach_hi = std::min(0.0 + v_max * window - 0.0, l_max);
    const double reach_lo = std::max(0.0 - v_max * window - 0.0, -l_max);
    const double b_max =
        series_bound(omega, t_ss, t, reach_hi, [](int) { return 0.6; }) + l_f / 2.0;
    const double b_min =
        series_bound(omega, t_ss, t, reach_lo, [](int) { return -0.6; }) - l_f / 2.0;
    std::printf("sagittal t=%.1f  b_min %.12f  b_max %.12f\n", t, b_min, b_max);
  }

  // Lateral, right stance, nominal phase: stance (0,-0.1), swing (0,+0.1).
  auto lateral_in = [](int k) {
    return (k % 2 == 0) ? -(0.2 + -0.08) : (0.2 + 0.2);  // -(L_p+W_min), +(L_p+W_max)
  };
  auto lateral_out = [](int k) {
    return (k % 2 == 0) ? -(0.2 + 0.2) : (0.2 + -0.08);  // -(L_p+W_max), +(L_p+W_min)
  };
  for (double t : {0.0, 0.25}) {
    const double window = t_ss - t;
    const double rel_hi = 0.2 + v_max * window;  // swing - stance = +0.2
    const double rel_lo = 0.2 - v_max * window;
    const double reach_in = std::min(rel_hi, l_p + w_max);
    const double reach_out = std::max(rel_lo, l_p + w_min);
    const double b_in = series_bound(omega, t_ss, t, reach_in, lateral_in) + w_f / 2.0;
    const double b_out = series_bound(omega, t_ss, t, reach_out, lateral_out) - w_f / 2.0;
    std::printf("lateral-R t=%.2f b_out %.12f  b_in %.12f\n", t, b_out, b_in);
  }
}

void print_lipm_fixtures() {
  const Rk4State out = rk4_lipm({0.05, 0.1}, 0.02, 0.3, 0.1, 100000);
  const double omega = std::sqrt(kG / kH);
  std::printf("rk4 step pos    %.12f\n", out.pos);
  std::printf("rk4 step vel    %.12f\n", out.vel);
  std::printf("rk4 step dcm    %.12f\n", out.pos + out.vel / omega);
}

void print_projection_fixtures() {
  const double omega2 = kG / kH;
  const double omega = std::sqrt(omega2);
  const double shift = 0.02;
  const double dc = shift / (1.0 + 1.0 / omega2);
  const double dv = shift * omega / (1.0 + omega2);
  std::printf("proj shift=0.02 dc %.12f  dcdot %.12f  ddcm %.12f\n", dc, dv,
              dc + dv / omega);
}

void print_gait_fixtures() {
  wpg::GaitConfig config;
  wpg::GaitPhase phase;  // right stance
  phase.t_in_step = 0.27;
  const auto sel = wpg::selection_matrices(phase, config, 16, 2);
  std::printf("selection t=0.27:");
  for (int i = 0; i < 16; ++i) {
    int owner = sel.U_c(i) > 0.5 ? 0 : (sel.U(i, 0) > 0.5 ? 1 : 2);
    std::printf(" %d", owner);
  }
  std::printf("\n");

  wpg::GaitPhase chain;
  chain.stance_pos = wpg::Vec2(0.1, -0.1);
  wpg::ReferenceProfile profile;
  const auto refs = wpg::references(chain, profile, config, 16, 2, 0.0);
  std::printf("xf chain right  F1(%.6f,%.6f) F2(%.6f,%.6f)\n", refs.Xfref(0, 0),
              refs.Xfref(0, 1), refs.Xfref(1, 0), refs.Xfref(1, 1));
}

}  // namespace

int main() {
  print_viability_fixtures();
  print_lipm_fixtures();
  print_projection_fixtures();
  print_gait_fixtures();
  return 0;
}

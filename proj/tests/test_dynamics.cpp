#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "floquet/dynamics.hpp"
#include "floquet/floquet.hpp"

using namespace floquet;
using C = std::complex<double>;

namespace {

const DriveParamsd raman2{mhz(10.03), mhz(9.67), mhz(2.37), mhz(6.985), 0, 0};

// Oracle: Pade matrix exponential from Eigen, independent of the closed form.
Matrix2cd expm(const Matrix2cd& h, double dt) { return (C(0, -dt) * h).exp(); }

// Oracle: piecewise-constant midpoint propagation with a fixed step count.
Matrix2cd brute_force(const DriveParamsd& p, double t0, double t1, long steps) {
  Matrix2cd u = Matrix2cd::Identity();
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) u = expm(rotating_frame_matrix(p, t0 + (k + 0.5) * h), h) * u;
  return u;
}

}  // namespace

TEST_CASE("hamiltonian samples") {
  const DriveParamsd p{mhz(10), mhz(10), 0, mhz(7), 0, 0};
  const auto h = hamiltonian_at(p, 3e-7);
  Eigen::SelfAdjointEigenSolver<Matrix2cd> es(h.matrix);
  CHECK(es.eigenvalues()(1) == doctest::Approx(std::sqrt(200.0) * kTwoPi * 1e6 / 2).epsilon(1e-12));
  CHECK((h.matrix - h.matrix.adjoint()).norm() < 1e-12);
  CHECK(std::abs(h.matrix.trace()) < 1e-6);

  const auto h0 = hamiltonian_at(raman2, 0.0);
  CHECK(h0.matrix(0, 1).real() == raman2.delta_x / 2);

  DriveParamsd mod = raman2;
  mod.phase_mod_nu = mhz(7.343);
  mod.phase_mod_a = 4.35 * mod.phase_mod_nu;
  const double t = std::numbers::pi / mod.phase_mod_nu;
  CHECK(drive_phase(mod, t) == doctest::Approx(mod.omega * t).epsilon(1e-12));

  CHECK_THROWS_AS(hamiltonian_at(raman2, -1e-9), Error);
}

TEST_CASE("closed-form exponential matches Pade") {
  for (double t : {0.0, 1e-8, 1.3e-7, 4e-6}) {
    const Matrix2cd h = rotating_frame_matrix(raman2, t) + Matrix2cd::Identity() * C(mhz(0.3), 0);
    const double dt = 2.1e-8;
    CHECK((exp_hermitian<double>(dt * h) - expm(h, dt)).norm() < 1e-12);
  }
  CHECK((exp_hermitian<double>(Matrix2cd::Zero()) - Matrix2cd::Identity()).norm() == 0);
}

TEST_CASE("static drive: closed form and stationary eigenstate") {
  DriveParamsd p = raman2;
  p.amp_a = 0;
  const double t1 = 1.7e-6;
  const auto u = propagate_unitary(p, 0.0, t1);
  CHECK((u.u - expm(rotating_frame_matrix(p, 0.0), t1)).norm() < 1e-10);
  CHECK((propagate_unitary(p, 2e-7, 2e-7).u - Matrix2cd::Identity()).norm() == 0);

  const SpinStated plus = eigenbasis(p).plus;
  const double p0 = population_zero(plus);
  for (double t : {1e-7, 5e-7, 2e-6}) CHECK(std::abs(population_zero(propagate_state(plus, p, 0.0, t)) - p0) < 1e-9);
}

TEST_CASE("free precession flips <sx>") {
  const DriveParamsd p{mhz(3), 0, 0, mhz(1), 0, 0};
  const SpinStated psi = SpinStated(1, 1) / std::sqrt(2.0);
  const SpinStated out = propagate_state(psi, p, 0.0, std::numbers::pi / p.delta_z);
  const double sx_in = (psi.adjoint() * sigma_x<double>() * psi)(0).real();
  const double sx_out = (out.adjoint() * sigma_x<double>() * out)(0).real();
  CHECK(sx_in == doctest::Approx(1));
  CHECK(std::abs(sx_out + 1) < 1e-8);
}

TEST_CASE("matches brute-force reference at 1e4 steps per period") {
  const double period = kTwoPi / raman2.omega;
  const double t1 = 1e-6;
  const long steps = std::lround(t1 / period * 1e4);
  const SpinStated plus = eigenbasis(raman2).plus;
  const SpinStated ref = brute_force(raman2, 0.0, t1, steps) * plus;
  const SpinStated got = propagate_state(plus, raman2, 0.0, t1);
  CHECK(std::abs(population_zero(ref) - population_zero(got)) < 1e-6);
}

TEST_CASE("unitarity, norm, composition, time reversal") {
  const double t1 = 2.3e-6;
  const auto u = propagate_unitary(raman2, 0.0, t1);
  CHECK(u.unitarity_defect() < 1e-10);
  const SpinStated psi = propagate_state(ket_zero<double>(), raman2, 0.0, t1);
  CHECK(std::abs(psi.norm() - 1) < 1e-9);

  const double period = kTwoPi / raman2.omega;
  const auto a = propagate_unitary(raman2, 0.0, period / 2);
  const auto b = propagate_unitary(raman2, period / 2, period);
  CHECK((b.then_after(a).u - propagate_unitary(raman2, 0.0, period).u).norm() < 1e-8);

  const SpinStated back = u.u.adjoint() * psi;
  CHECK((back - ket_zero<double>()).norm() < 1e-8);

  CHECK_THROWS_AS(propagate_unitary(raman2, 1e-6, 0.0), Error);
  CHECK_THROWS_AS(propagate_unitary(raman2, 0.0, 1e-6, 0.0), Error);
}

TEST_CASE("convergence order of the fixed-step integrator") {
  auto ham = [](double t) { return rotating_frame_matrix(raman2, t); };
  const double t1 = kTwoPi / raman2.omega;
  const Matrix2cd ref = evolve_fixed<double>(ham, 0.0, t1, 4096);
  std::vector<double> logn, logerr;
  for (int n : {16, 32, 64, 128}) {
    logn.push_back(std::log(n));
    logerr.push_back(std::log((evolve_fixed<double>(ham, 0.0, t1, n) - ref).norm()));
  }
  // least-squares slope of log error against log steps
  const double mx = (logn[0] + logn[1] + logn[2] + logn[3]) / 4;
  const double my = (logerr[0] + logerr[1] + logerr[2] + logerr[3]) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (logn[i] - mx) * (logerr[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  CHECK(std::abs(-sxy / sxx - kMagnusOrder) < 0.3);
}

TEST_CASE("continuity as the modulation depth vanishes") {
  DriveParamsd mod = raman2;
  mod.phase_mod_nu = mhz(7.343);
  mod.phase_mod_a = 1e-9 * mod.phase_mod_nu;
  const double t1 = 0.8e-6;
  const double p_mod = population_zero(propagate_state(ket_zero<double>(), mod, 0.0, t1));
  const double p_plain = population_zero(propagate_state(ket_zero<double>(), raman2, 0.0, t1));
  CHECK(std::abs(p_mod - p_plain) < 1e-6);
}

TEST_CASE("step underflow is reported") {
  auto ham = [](double t) {
    Matrix2cd h = Matrix2cd::Zero();
    h(0, 1) = h(1, 0) = 1e12 * std::sin(1e15 * t * t);
    return h;
  };
  CHECK_THROWS_AS(evolve_adaptive<double>(ham, 0.0, 1e-3, StepControl<double>{1e-12, 1e-4, 1e-9}), Error);
}

TEST_CASE("lab frame reduces to the rotating frame") {
  const double r = lab_frame_check(raman2, mhz(1445.8), 0.5e-6);
  CHECK(r < 0.02);

  const DriveParamsd diag{mhz(10), 0, 0, mhz(7), 0, 0};
  CHECK(lab_frame_check(diag, mhz(1445.8), 0.5e-6) < 1e-9);

  double prev = lab_frame_check(raman2, mhz(1445.8), 0.2e-6);
  for (double f : {2891.6, 5783.2, 11566.4}) {
    const double next = lab_frame_check(raman2, mhz(f), 0.2e-6);
    CHECK(next < prev);
    prev = next;
  }
  CHECK_THROWS_AS(lab_frame_check(raman2, mhz(100), 1e-7), Error);
}

TEST_CASE("scalar template instantiates for long double") {
  const DriveParams<long double> p{mhz(10.03), mhz(9.67), mhz(2.37), mhz(6.985), 0, 0};
  const auto u = propagate_unitary<long double>(p, 0.0L, 1e-6L, 1e-10L);
  CHECK(u.unitarity_defect() < 1e-14L);
}

#ifndef FLOQUET_FLOQUET_HPP
#define FLOQUET_FLOQUET_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "floquet/types.hpp"

namespace floquet {

/// Eigenbasis of the static part (dz/2) sz + (dx/2) sx.
struct EigenBasis {
  double theta = 0;   ///< atan2(dx, dz)
  double omega0 = 0;  ///< gap between |+> and |->
  SpinStated plus;    ///< cos(theta/2)|0> + sin(theta/2)|-1>, energy +omega0/2
  SpinStated minus;   ///< -sin(theta/2)|0> + cos(theta/2)|-1>, energy -omega0/2
};

EigenBasis eigenbasis(const DriveParamsd& p);

/// Folds a quasienergy into the first zone [-omega/2, omega/2).
double fold_quasienergy(double eps, double omega);

/// Distance between two quasienergies on the circle of circumference omega.
double quasienergy_distance(double a, double b, double omega);

struct FloquetSpectrum {
  std::array<double, 2> quasienergies{};
  double period = 0;
  double t_start = 0;
  std::vector<double> sample_times;                ///< t_start + k T / n, k = 0..n
  std::vector<std::array<SpinStated, 2>> modes;    ///< periodic Floquet modes at sample_times
  Matrix2cd monodromy = Matrix2cd::Identity();
  bool degenerate = false;    ///< eigenphases coincide within 1e-12
  bool at_zone_edge = false;  ///< a quasienergy sits on the zone boundary
};

/// Diagonalizes the one-period propagator U(t_start -> t_start + T).
/// Degenerate eigenphases are flagged, not thrown.
FloquetSpectrum floquet_spectrum(const DriveParamsd& p, double tol = 1e-8, int n_samples = 64,
                                 double t_start = 0);

/// Both quasienergies only, without mode sampling.
std::array<double, 2> quasienergies(const DriveParamsd& p, double tol = 1e-10);

/// Quasienergies along a scan of drive frequencies, with each point's pair
/// ordered by eigenvector overlap with the previous point rather than by value.
std::vector<std::array<double, 2>> track_quasienergies(const DriveParamsd& base,
                                                       std::span<const double> omegas,
                                                       double tol = 1e-10);

struct LadderLevel {
  int band;  ///< +1 upper, -1 lower
  int n;
  double energy;  ///< band * omega0/2 + n omega
};

/// Truncated two-band ladder of synthetic levels |band, n>. `couplings` holds
/// the drive matrix elements between neighbouring rungs; `hamiltonian()` adds
/// the level energies on the diagonal.
struct LadderModel {
  int n_min = 0;
  int n_max = 0;
  std::vector<LadderLevel> levels;
  Eigen::MatrixXcd couplings;

  Eigen::Index index(int band, int n) const;
  Eigen::MatrixXcd hamiltonian() const;
};

LadderModel ladder_model(const DriveParamsd& p, int n_min = -5, int n_max = 5);

/// Bare m-th order resonance omega0/m (no Stark shift).
double resonance_frequency(const DriveParamsd& p, int m);

/// Splitting of the resonant pair |+, n>, |-, n+m> in the ladder spectrum at p.omega.
double ladder_pair_splitting(const DriveParamsd& p, int m, int n_min = -5, int n_max = 5);

struct GapMinimum {
  double omega;  ///< drive frequency at the avoided crossing
  double gap;    ///< minimum splitting there
};

/// Avoided crossing of the monodromy quasienergies near omega0/m.
GapMinimum quasienergy_gap_minimum(const DriveParamsd& p, int m, double search_width);

/// Avoided crossing of the resonant ladder pair near omega0/m.
GapMinimum ladder_gap_minimum(const DriveParamsd& p, int m, double search_width, int n_min = -5,
                              int n_max = 5);

/// Drive frequency maximizing inter-band transfer contrast within
/// omega0/m +- search_width.
double resonance_locate(const DriveParamsd& p, int m, double search_width);

enum class RabiMethod { Ladder, QuasienergyGap, TimeFit };

/// Raman Rabi frequency at the m-th resonance nearest p.omega. Every method
/// locates its own operating point: the two spectral methods minimize their
/// splitting over omega, the time fit runs at resonance_locate's frequency.
double raman_rabi_frequency(const DriveParamsd& p, int m, RabiMethod method);

/// max_t |<-| dH/dt |+>| / omega0^2 = A omega |cos(theta)| / omega0^2.
double adiabaticity_parameter(const DriveParamsd& p);

}  // namespace floquet

#endif  // FLOQUET_FLOQUET_HPP

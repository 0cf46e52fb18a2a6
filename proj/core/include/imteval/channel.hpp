// SPDX-License-Identifier: Apache-2.0
#pragma once

// Geometry-based stochastic channel model: LOS assignment, pathloss,
// correlated large-scale parameters, cluster and ray generation, time-varying
// channel coefficients and the final pathloss/shadowing scaling.
//
// Distribution parameters come from named channel profiles (profiles.hpp).

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imteval/antenna.hpp"
#include "imteval/geometry.hpp"
#include "imteval/random.hpp"

namespace imteval::channel {

using cdouble = std::complex<double>;
inline constexpr double kSpeedOfLight = 299792458.0;

enum class Condition { LOS, NLOS, O2I };

enum class LosModel { UMa, UMi, RMa, InH, AlwaysLos, NeverLos };
enum class BreakpointModel { Standard, Rural, None };

/// Order of the large-scale parameters in correlation matrices and draws.
enum Lsp : int { kSF = 0, kK = 1, kDS = 2, kASD = 3, kASA = 4, kZSD = 5, kZSA = 6 };
inline constexpr int kLspCount = 7;
inline constexpr std::array<const char*, kLspCount> kLspNames{"SF", "K", "DS", "ASD", "ASA", "ZSD", "ZSA"};

struct LogNormal {
  double mu = 0.0;     // mean of log10(x), or of x in dB for SF and K
  double sigma = 0.0;  // standard deviation of the same quantity
};

/// Parameters for one propagation condition of one profile.
struct ConditionProfile {
  // Pathloss: free-space at 1 m plus 10*n*log10(d) up to the breakpoint,
  // then 10*n_far*log10(d/d_bp). NLOS rows use n and offset in a single slope
  // and are floored at the LOS value.
  double pl_exponent = 2.0;
  double pl_exponent_far = 4.0;
  double pl_offset = 0.0;  // dB, NLOS single-slope offset relative to free space at 1 m

  LogNormal ds;   // log10(s)
  LogNormal asd;  // log10(deg)
  LogNormal asa;
  LogNormal zsd;
  LogNormal zsa;
  double sf_sigma = 0.0;  // dB
  LogNormal k;            // dB, LOS only

  Eigen::Matrix<double, kLspCount, kLspCount> correlation =
      Eigen::Matrix<double, kLspCount, kLspCount>::Identity();
  /// Lower-triangular factor of `correlation`, filled by `prepare()`.
  Eigen::Matrix<double, kLspCount, kLspCount> factor =
      Eigen::Matrix<double, kLspCount, kLspCount>::Identity();

  int n_clusters = 12;
  double delay_scaling = 3.0;  // r_tau
  double cluster_shadowing = 3.0;  // zeta, dB
  LogNormal xpr;                  // dB
  double c_asd = 5.0;  // intra-cluster spreads, degrees
  double c_asa = 11.0;
  double c_zsa = 7.0;

  /// Validates the correlation matrix and stores its factor. Throws
  /// ConfigInvalid(`field_prefix`.correlation) when it is not positive
  /// semi-definite.
  void prepare(const std::string& field_prefix);
};

struct PenetrationModel {
  // Low-loss building: glass/concrete mix; high-loss: IRR glass/concrete.
  double low_glass_fraction = 0.3;
  double high_glass_fraction = 0.7;
  double sigma_low = 4.4;
  double sigma_high = 6.5;
  double indoor_loss_per_m = 0.5;
};

struct ChannelProfile {
  std::string name;
  LosModel los_model = LosModel::UMa;
  BreakpointModel breakpoint = BreakpointModel::Standard;
  double min_distance = 1.0;      // m, 3D
  double env_height = 1.0;      // m, effective environment height for the breakpoint
  PenetrationModel penetration{};
  ConditionProfile los;
  ConditionProfile nlos;
  ConditionProfile o2i;
  bool has_o2i = true;

  const ConditionProfile& condition(Condition c) const noexcept;
};

// ---------------------------------------------------------------------------
// Propagation condition

/// LOS probability at 2D distance `d2d`; 1 at d2d = 0, non-increasing.
double los_probability(LosModel model, double d2d) noexcept;

struct PropagationCondition {
  bool los = false;
  double p_los = 0.0;
};

/// One Bernoulli draw with p = los_probability(model, d2d).
PropagationCondition assign_los(const ChannelProfile& profile, double d2d, RngStream& rng);

// ---------------------------------------------------------------------------
// Pathloss

double free_space_1m(double fc_hz) noexcept;
double breakpoint_distance(const ChannelProfile& p, double fc_hz, double h_bs, double h_ut) noexcept;

/// Basic pathloss in dB at 3D distance `d3d`. Throws DomainError below the
/// profile's minimum distance.
double pathloss(const ChannelProfile& profile, bool los, double fc_hz, double d3d, double h_bs,
                double h_ut);
double pathloss(const ChannelProfile& profile, bool los, double fc_hz, geometry::Vec3 tx,
                geometry::Vec3 rx);

/// Outdoor-to-indoor loss in dB for one UE: wall loss by building type, the
/// indoor distance term and a normal draw with the building type's sigma.
double penetration_loss(const PenetrationModel& m, double fc_hz, bool high_loss,
                        double indoor_distance, double standard_normal);

// ---------------------------------------------------------------------------
// Large-scale parameters

struct LargeScaleParams {
  double ds = 0.0;   // s
  double asd = 0.0;  // deg
  double asa = 0.0;
  double zsd = 0.0;
  double zsa = 0.0;
  double sf = 0.0;   // dB
  double k = 0.0;    // dB; meaningful for LOS only
  Condition condition = Condition::NLOS;
};

/// Correlated draws. Consumes exactly seven standard normals from `rng`, the
/// first of which alone determines SF (so the shadowing of a link can be
/// drawn cheaply with a single `rng.normal()` on a fresh copy of the stream).
LargeScaleParams gen_lsp(const ConditionProfile& p, Condition condition, RngStream& rng);

/// SF in dB from the first standard normal of a link stream.
inline double shadowing_from_normal(const ConditionProfile& p, double z0) noexcept {
  return p.sf_sigma * z0;
}

// ---------------------------------------------------------------------------
// Clusters and rays

/// Ray offsets within a cluster for 20 rays (degrees, unit spread).
extern const std::array<double, 20> kRayOffsets;

/// Line-of-sight directions of a link, degrees. Departure angles are seen
/// from the transmitter, arrival angles at the receiver.
struct LinkAngles {
  double aod = 0.0;
  double zod = 90.0;
  double aoa = 180.0;
  double zoa = 90.0;
};

struct ClusterSet {
  int n_clusters = 0;
  int rays_per_cluster = 0;
  std::vector<double> delays;  // s, ascending, delays[0] = 0
  std::vector<double> powers;  // sum 1, LOS spike included in cluster 0
  /// Scattered powers before the LOS spike is added (sum 1).
  std::vector<double> scattered_powers;
  double k_factor = 0.0;  // linear, 0 for NLOS
  std::vector<double> aoa, aod, zoa, zod;  // cluster centres, degrees
  /// Per ray (cluster-major): angles after intra-cluster coupling.
  std::vector<double> ray_aoa, ray_aod, ray_zoa, ray_zod;
  std::vector<double> xpr;  // linear, per ray
  /// Per ray: initial phases for (theta-theta, theta-phi, phi-theta, phi-phi), in (-pi, pi].
  std::vector<std::array<double, 4>> phases;

  std::size_t ray_index(int n, int m) const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(rays_per_cluster) +
           static_cast<std::size_t>(m);
  }
};

/// Delay, power, angle, coupling, XPR and phase generation.
/// `n_clusters` >= 1; `rays_per_cluster` is 20 or 1 (a single centred ray).
ClusterSet gen_clusters(const LargeScaleParams& lsp, const ConditionProfile& p, int n_clusters,
                        int rays_per_cluster, const LinkAngles& los, RngStream& rng);

/// RMS delay spread of a (delays, powers) set.
double rms_delay_spread(const std::vector<double>& delays, const std::vector<double>& powers);

// ---------------------------------------------------------------------------
// Coefficients

/// Radiating points of one end of a link: positions in wavelengths in the
/// array's local y-z plane with their polarization slants. Element-level
/// arrays use the element pattern; port-level arrays place one point per
/// TXRU subarray and include the subarray gain.
struct PortArray {
  std::vector<antenna::ElementSite> sites;
  antenna::ArrayConfig array;  // orientation and element pattern
  bool subarray = false;

  /// Power gain in dBi toward a global direction.
  double gain_db(double azimuth_deg, double zenith_deg) const;
  /// Same toward a global unit vector; `frame` must be Frame::of(array.orientation).
  double gain_db(const antenna::Frame& frame, double x, double y, double z) const;
  /// True when the gain does not depend on direction.
  bool omnidirectional() const noexcept;

  static PortArray single_isotropic();
  static PortArray element_level(const antenna::ArrayConfig& cfg);
  static PortArray port_level(const antenna::ArrayConfig& cfg);
};

struct ChannelRealization {
  double pathloss = 0.0;  // dB
  double shadow = 0.0;    // dB
  LargeScaleParams lsp;
  ClusterSet clusters;
  LinkAngles angles;
  double distance_3d = 0.0;   // m, for the LOS phase
  double speed = 0.0;         // km/h, receiver
  double direction = 0.0;     // radians, receiver heading
  double carrier = 0.0;       // Hz
};

using CoefficientMatrix = Eigen::MatrixXcd;

/// Precomputes per-ray field products, array phases and Doppler shifts of a
/// realization so repeated evaluation over time and frequency is cheap.
class CoefficientGenerator {
 public:
  CoefficientGenerator(const ChannelRealization& real, const PortArray& tx, const PortArray& rx);

  int rx_ports() const noexcept { return rx_ports_; }
  int tx_ports() const noexcept { return tx_ports_; }
  int clusters() const noexcept { return static_cast<int>(delays_.size()); }
  const std::vector<double>& delays() const noexcept { return delays_; }

  /// Per-cluster coefficients at time t; the LOS ray is folded into cluster 0.
  std::vector<CoefficientMatrix> cluster_matrices(double t) const;
  /// Sum over clusters at time t and baseband frequency offset f (Hz).
  CoefficientMatrix at(double t, double f = 0.0) const;
  /// E|H(u, s)|^2 over the random initial phases, given the clusters and rays.
  double expected_power(int u, int s) const;

 private:
  struct Ray {
    int cluster;
    double amplitude;   // sqrt of the ray's power share
    double doppler_hz;
    double base_phase;  // radians; LOS distance phase or zero
    std::array<cdouble, 4> pol;  // rx polarization (2) x tx polarization (2)
    std::array<double, 4> pol_power;  // E|pol|^2 over the initial phases
    std::vector<cdouble> rx_phase;
    std::vector<cdouble> tx_phase;
  };
  int rx_ports_ = 0;
  int tx_ports_ = 0;
  std::vector<int> rx_pol_;
  std::vector<int> tx_pol_;
  std::vector<double> delays_;
  std::vector<Ray> rays_;
};

/// rx_ports x tx_ports matrix at time t (seconds), summed over clusters.
CoefficientMatrix channel_coeff(const ChannelRealization& real, const PortArray& tx,
                                const PortArray& rx, double t);

/// Per-cluster coefficients H_n(t), each rx_ports x tx_ports; the LOS ray is
/// folded into cluster 0. Their sum is channel_coeff.
std::vector<CoefficientMatrix> cluster_coefficients(const ChannelRealization& real,
                                                    const PortArray& tx, const PortArray& rx,
                                                    double t);

/// Multiplies by 10^(-(PL+SF)/20).
CoefficientMatrix apply_pl_sf(const ChannelRealization& real, const CoefficientMatrix& h);

}  // namespace imteval::channel

#pragma once

// Level widths, the two-state density-matrix rate equations and the
// path-weighted effective rate of a localized-state ensemble.
//
// Unit system throughout: energies in eV, temperatures in K, times in ps,
// widths as rates in 1/ps.

#include <memory>
#include <span>

namespace lse {

class PhysicalConstants {
 public:
  /// eV / K and eV * ps.
  static constexpr double kBoltzmannEv = 8.617333262e-5;
  static constexpr double kHbarEvPs = 6.582119569e-4;

  static PhysicalConstants si() { return {kBoltzmannEv, kHbarEvPs, false}; }
  /// hbar = k_B = 1: temperatures are then given in energy units.
  static PhysicalConstants natural() { return {1.0, 1.0, true}; }

  double k_B() const noexcept { return k_B_; }
  double hbar() const noexcept { return hbar_; }
  bool natural_units() const noexcept { return natural_; }

  double thermal_energy(double T) const noexcept { return k_B_ * T; }
  /// hw / (k_B T); identical in both unit systems for the same physical state.
  double thermal_ratio(double hw, double T) const noexcept { return hw / (k_B_ * T); }

 private:
  constexpr PhysicalConstants(double k_B, double hbar, bool natural)
      : k_B_(k_B), hbar_(hbar), natural_(natural) {}

  double k_B_;
  double hbar_;
  bool natural_;
};

enum class ChannelKind { Launch, Receive, Radiative, OpticalPhonon, AcousticPhonon };

struct CouplingChannel {
  ChannelKind kind = ChannelKind::Launch;
  double rho = 0.0;             // 1/eV
  double omega_coupling = 0.0;  // eV
};

struct PhononBranch {
  double energy_hw = 0.03;         // eV
  double base_width = 0.0;         // 1/ps, multiplies the Bose occupation
  double spontaneous_floor = 0.0;  // 1/ps, temperature independent
};

struct PhononBranches {
  PhononBranch optical;
  PhononBranch acoustic;
};

struct RateLaws {
  double gamma_L0 = 0.0;  // 1/ps
  double gamma_R0 = 0.0;  // 1/ps
  double gamma_P0 = 0.0;  // 1/ps
  double beta_ee = 0.0;   // Gamma_L grows as (1 + beta_ee * T / 300 K)
  double C = 0.0;         // 1/ps, e-e rate during successful transport
  double E_a = 0.0;       // eV, tunneling level
  double E_F_launch = 0.0;
  double E_F_receive = 0.0;
  double re_excite_base = 0.0;
  double re_excite_kappa = 0.0;
};

struct ModelToggles {
  bool include_gel = true;
  bool include_ep = true;
  bool vary_ee = true;

  friend bool operator==(const ModelToggles&, const ModelToggles&) = default;
};

struct LevelWidths {
  double gamma_L = 0.0;
  double gamma_R = 0.0;
  double gamma_P = 0.0;
  double gamma_phO = 0.0;
  double gamma_phA = 0.0;
  double X = 0.0;

  /// Builds widths with X set to the exact component sum.
  static LevelWidths from(double L, double R, double P, double phO, double phA);
};

struct PathProfile {
  double n_tr = 0.0;
  double n_sc = 0.0;
  double n_p = 0.0;
  double n_re = 0.0;
  double t_tr = 0.0;  // ps
  double t_sc = 0.0;
  double t_p = 0.0;
  double t_re = 0.0;

  double total_time() const noexcept {
    return n_tr * t_tr + n_sc * t_sc + n_p * t_p + n_re * t_re;
  }
};

struct PathWeights {
  double w_sc = 0.0;
  double w_re = 0.0;
  double w_tr = 0.0;
  double w_p = 0.0;
};

struct EffectiveWidths {
  double gamma_L_eff = 0.0;
  double gamma_R_eff = 0.0;
  double gamma_P_eff = 0.0;
  double gamma_phO_eff = 0.0;
  double gamma_phA_eff = 0.0;
  double chi = 0.0;
  PathWeights weights;
};

struct Occupancy {
  double sigma_aa = 1.0;
  double sigma_bb = 0.0;
};

/// Mean phonon number 1/(exp(hw/k_B T) - 1); exactly 0 at T = 0.
double bose_occupation(double hw, double T,
                       const PhysicalConstants& constants = PhysicalConstants::si());

/// 2 pi rho |Omega|^2.
double channel_width(const CouplingChannel& channel);

/// Temperature and level dependence of the channel widths.
class RateLawModel {
 public:
  virtual ~RateLawModel() = default;

  virtual LevelWidths widths(const RateLaws& laws, const PhononBranches& branches, double mu,
                             double T, const ModelToggles& toggles,
                             const PhysicalConstants& constants) const = 0;

  /// Average re-excitation count entering the mean radiative probability.
  virtual double re_excitation(const RateLaws& laws, const PhononBranches& branches, double T,
                               const PhysicalConstants& constants) const;

  /// Structure-of-arrays output for a whole level grid. The default loops
  /// over widths(); implementations may hoist level-independent work.
  struct GridOut {
    std::span<double> gamma_L, gamma_R, gamma_P, gamma_phO, gamma_phA;
  };
  virtual void widths_on_grid(const RateLaws& laws, const PhononBranches& branches,
                              std::span<const double> mu, double T, const ModelToggles& toggles,
                              const PhysicalConstants& constants, GridOut out) const;
};

/// Gamma_L = Gamma_L0 (1 + beta_ee T/300 K); Gamma_R thermally activated
/// through E_a; Gamma_P constant; Gamma_ph = Gamma_ph0 n(w, T) + floor.
class DefaultRateLaws final : public RateLawModel {
 public:
  LevelWidths widths(const RateLaws& laws, const PhononBranches& branches, double mu, double T,
                     const ModelToggles& toggles,
                     const PhysicalConstants& constants) const override;

  void widths_on_grid(const RateLaws& laws, const PhononBranches& branches,
                      std::span<const double> mu, double T, const ModelToggles& toggles,
                      const PhysicalConstants& constants, GridOut out) const override;

  /// exp(-max(E_a - mu, 0) / k_B T) with the T = 0 limit taken analytically.
  static double activation(double E_a, double mu, double T, const PhysicalConstants& constants);
};

std::shared_ptr<const RateLawModel> default_rate_laws();

LevelWidths evaluate_widths(const RateLaws& laws, const PhononBranches& branches, double mu,
                            double T, const ModelToggles& toggles,
                            const PhysicalConstants& constants = PhysicalConstants::si(),
                            const RateLawModel& model = DefaultRateLaws{});

/// sigma_aa, sigma_bb of the rate equations started from (1, 0).
Occupancy occupancy_closed_form(const LevelWidths& widths, double t);

/// Fixed-step RK4 integration of the rate equations; brute-force oracle for
/// occupancy_closed_form. Rejects step > 0.1 / X.
Occupancy occupancy_ode_oracle(const LevelWidths& widths, double t, double step);

PathWeights path_weights(const PathProfile& path);

/// Primed widths and their sum chi. The C w_tr transport term is carried by
/// the receiver channel.
EffectiveWidths effective_widths(const LevelWidths& widths, const PathProfile& path, double C);

}  // namespace lse

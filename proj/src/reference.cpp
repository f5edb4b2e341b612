#include "lse/reference.hpp"

#include "lse/analysis.hpp"

namespace lse {

ModelConfig reference_config() {
  ModelConfig c;
  c.dos.center_E0 = 3.0;
  c.dos.variance_sigma2 = 0.025;
  c.dos.density_Nl = 1.0;

  c.laws.gamma_L0 = 0.011;
  c.laws.gamma_R0 = 0.0027;
  c.laws.gamma_P0 = 7e-6;
  c.laws.beta_ee = -0.7;
  c.laws.C = 0.0;
  c.laws.E_a = 3.0075;
  c.laws.E_F_launch = 3.1;
  c.laws.E_F_receive = 2.9;
  c.laws.re_excite_base = 0.14;
  c.laws.re_excite_kappa = 0.09;

  c.branches.optical = {0.095, 14.0, 0.0};
  c.branches.acoustic = {0.0175, 0.1, 0.0};

  c.path = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

  c.gel.mode = GelMode::Fixed;
  c.gel.t_lsc_fixed = 0.5;
  c.gel.alpha = 1.0;
  return c;
}

std::vector<double> reference_temperatures() { return linspace(10.0, 300.0, 30); }

}  // namespace lse

#include <cmath>

#include "lse/error.hpp"
#include "lse/kernels.hpp"

namespace lse::kernels {

namespace {

void check_sizes(const ChannelInputs& in, const ChannelOutputs& out) {
  const auto n = in.mu.size();
  if (in.gamma_L.size() != n || in.gamma_R.size() != n || in.gamma_P.size() != n ||
      in.gamma_phO.size() != n || in.gamma_phA.size() != n || out.energy.size() != n ||
      out.intensity.size() != n || out.chi.size() != n)
    fail(ErrorKind::InvalidInput, "channel kernel spans differ in length");
}

}  // namespace

std::string_view to_string(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void evaluate_channels_scalar(const ChannelParams& p, const ChannelInputs& in,
                              ChannelOutputs out) {
  check_sizes(in, out);
  const double transport = p.C * p.w_tr;
  for (std::size_t i = 0; i < in.mu.size(); ++i) {
    const double L = p.w_sc * in.gamma_L[i];
    const double R = p.w_re * in.gamma_R[i] + transport;
    const double P = p.w_p * in.gamma_P[i];
    const double O = p.w_sc * in.gamma_phO[i];
    const double A = p.w_sc * in.gamma_phA[i];
    const double chi = L + R + P + O + A;

    double prob = 1.0;
    const double den = P + O + A;
    if (p.re_count != 0.0 && den > 0.0) prob = std::pow(P / den, p.re_count);

    const double d = in.mu[i] - p.dos_center;
    const double rho = p.dos_norm * std::exp(-(d * d) * p.dos_inv_two_var);
    const double kernel = p.steady_state ? 1.0 / chi : std::exp(-chi * p.time);

    double shift = 0.0;
    if (p.include_gel) {
      const double t_lsc = p.gel_self_consistent ? p.gel_alpha / chi : p.gel_t_lsc;
      shift = (p.hw_optical * O + p.hw_acoustic * A) * t_lsc;
    }

    out.chi[i] = chi;
    out.intensity[i] = prob * rho * kernel;
    out.energy[i] = in.mu[i] - shift;
  }
}

}  // namespace lse::kernels

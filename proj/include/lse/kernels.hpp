#pragma once

// Per-level channel kernel: turns the level widths on a mu grid into
// photon energy, emission intensity and effective decay rate. A scalar
// reference and an AVX2 variant are provided; the variant is selected at
// runtime and must agree with the reference to ~1e-13 relative.

#include <span>
#include <string_view>

namespace lse::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);

struct ChannelParams {
  // path weights and e-e transport rate
  double w_sc = 0.0, w_re = 0.0, w_tr = 0.0, w_p = 0.0, C = 0.0;
  // Gaussian DOS: norm * exp(-(mu - center)^2 * inv_two_var)
  double dos_center = 0.0, dos_inv_two_var = 0.0, dos_norm = 0.0;
  // exponent of the radiative probability
  double re_count = 0.0;
  bool include_gel = true;
  bool gel_self_consistent = false;
  double gel_t_lsc = 0.0;  // ps, fixed mode
  double gel_alpha = 1.0;  // t_lsc = alpha / chi, self-consistent mode
  double hw_optical = 0.0, hw_acoustic = 0.0;
  bool steady_state = true;
  double time = 0.0;  // ps, snapshot time when !steady_state
};

struct ChannelInputs {
  std::span<const double> mu, gamma_L, gamma_R, gamma_P, gamma_phO, gamma_phA;
};

struct ChannelOutputs {
  std::span<double> energy, intensity, chi;
};

/// Reference implementation; std::exp / std::pow per element.
void evaluate_channels_scalar(const ChannelParams& p, const ChannelInputs& in,
                              ChannelOutputs out);

bool avx2_available();

/// Throws InvalidInput when the AVX2 variant is not compiled in or the CPU
/// lacks AVX2/FMA.
void evaluate_channels_avx2(const ChannelParams& p, const ChannelInputs& in, ChannelOutputs out);

/// Runtime choice: AVX2 when available unless LSE_KERNEL=scalar is set.
Backend active_backend();

void evaluate_channels(const ChannelParams& p, const ChannelInputs& in, ChannelOutputs out,
                       Backend backend);
void evaluate_channels(const ChannelParams& p, const ChannelInputs& in, ChannelOutputs out);

namespace detail {
// Vector math used by the AVX2 kernel, exposed for accuracy tests.
// Subnormal exp results carry reduced relative accuracy; below that they are 0.
void exp_avx2(std::span<const double> x, std::span<double> y);
void log_avx2(std::span<const double> x, std::span<double> y);
}  // namespace detail

}  // namespace lse::kernels

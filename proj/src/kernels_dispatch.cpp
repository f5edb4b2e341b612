#include <cstdlib>
#include <string_view>

#include "lse/error.hpp"
#include "lse/kernels.hpp"

namespace lse::kernels {

bool avx2_available() {
#if defined(LSE_HAVE_AVX2_KERNEL) && (defined(__x86_64__) || defined(__i386__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

#if !defined(LSE_HAVE_AVX2_KERNEL)
void evaluate_channels_avx2(const ChannelParams&, const ChannelInputs&, ChannelOutputs) {
  fail(ErrorKind::InvalidInput, "AVX2 kernel not compiled in");
}
namespace detail {
void exp_avx2(std::span<const double>, std::span<double>) {
  fail(ErrorKind::InvalidInput, "AVX2 kernel not compiled in");
}
void log_avx2(std::span<const double>, std::span<double>) {
  fail(ErrorKind::InvalidInput, "AVX2 kernel not compiled in");
}
}  // namespace detail
#endif

Backend active_backend() {
  const char* forced = std::getenv("LSE_KERNEL");
  if (forced != nullptr && std::string_view(forced) == "scalar") return Backend::Scalar;
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

void evaluate_channels(const ChannelParams& p, const ChannelInputs& in, ChannelOutputs out,
                       Backend backend) {
  if (backend == Backend::Avx2)
    evaluate_channels_avx2(p, in, out);
  else
    evaluate_channels_scalar(p, in, out);
}

void evaluate_channels(const ChannelParams& p, const ChannelInputs& in, ChannelOutputs out) {
  evaluate_channels(p, in, out, active_backend());
}

}  // namespace lse::kernels

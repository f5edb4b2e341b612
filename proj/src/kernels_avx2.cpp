// AVX2 + FMA variant of the channel kernel. This translation unit is the
// only one compiled with -mavx2 -mfma; it is entered only after a runtime
// CPU check.

#include <immintrin.h>

#include <array>
#include <cfloat>

#include "lse/error.hpp"
#include "lse/kernels.hpp"

namespace lse::kernels {

namespace {

// exp: Cephes rational approximation on [-ln2/2, ln2/2], scaled by 2^n.
constexpr double kExpP0 = 1.26177193074810590878e-4;
constexpr double kExpP1 = 3.02994407707441961300e-2;
constexpr double kExpP2 = 9.99999999999999999910e-1;
constexpr double kExpQ0 = 3.00198505138664455042e-6;
constexpr double kExpQ1 = 2.52448340349684104192e-3;
constexpr double kExpQ2 = 2.27265548208155028766e-1;
constexpr double kExpQ3 = 2.00000000000000000009e0;
constexpr double kLn2Hi = 6.93145751953125e-1;
constexpr double kLn2Lo = 1.42860682030941723212e-6;
constexpr double kLog2e = 1.4426950408889634073599;
constexpr double kExpMax = 709.782712893384;
constexpr double kExpMin = -745.1332191019412;

// log: Cephes rational approximation of log(1 + x) around the mantissa.
constexpr double kLogP0 = 1.01875663804580931796e-4;
constexpr double kLogP1 = 4.97494994976747001425e-1;
constexpr double kLogP2 = 4.70579119878881725854e0;
constexpr double kLogP3 = 1.44989225341610930846e1;
constexpr double kLogP4 = 1.79368678507819816313e1;
constexpr double kLogP5 = 7.70838733755885391666e0;
constexpr double kLogQ0 = 1.12873587189167450590e1;
constexpr double kLogQ1 = 4.52279145837532221105e1;
constexpr double kLogQ2 = 8.29875266912776603211e1;
constexpr double kLogQ3 = 7.11544750618563894466e1;
constexpr double kLogQ4 = 2.31251620126765340583e1;
constexpr double kSqrtHalf = 0.70710678118654752440;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

/// 2^n for integer-valued n in [-2044, 2046], split in two factors so that
/// every factor stays a normal double.
inline __m256d pow2(__m256d n) {
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m128i lo = _mm_srai_epi32(n32, 1);
  const __m128i hi = _mm_sub_epi32(n32, lo);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256i a = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(lo), bias), 52);
  const __m256i b = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(hi), bias), 52);
  return _mm256_mul_pd(_mm256_castsi256_pd(a), _mm256_castsi256_pd(b));
}

inline __m256d vexp(__m256d x) {
  const __m256d underflow = _mm256_cmp_pd(x, set1(kExpMin), _CMP_LT_OQ);
  const __m256d overflow = _mm256_cmp_pd(x, set1(kExpMax), _CMP_GT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, set1(kExpMin)), set1(kExpMax));

  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, set1(kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, set1(kLn2Hi), x);
  r = _mm256_fnmadd_pd(n, set1(kLn2Lo), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(set1(kExpP0), rr, set1(kExpP1));
  p = _mm256_fmadd_pd(p, rr, set1(kExpP2));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(set1(kExpQ0), rr, set1(kExpQ1));
  q = _mm256_fmadd_pd(q, rr, set1(kExpQ2));
  q = _mm256_fmadd_pd(q, rr, set1(kExpQ3));
  const __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  const __m256d y = _mm256_fmadd_pd(set1(2.0), e, set1(1.0));

  __m256d out = _mm256_mul_pd(y, pow2(n));
  out = _mm256_blendv_pd(out, _mm256_setzero_pd(), underflow);
  out = _mm256_blendv_pd(out, set1(__builtin_inf()), overflow);
  return out;
}

/// Natural log for x >= 0; log(0) = -inf. Subnormal inputs are rescaled.
inline __m256d vlog(__m256d x) {
  const __m256d zero = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ);
  const __m256d tiny = _mm256_cmp_pd(x, set1(DBL_MIN), _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, set1(0x1p54)), tiny);
  const __m256d e_adjust = _mm256_blendv_pd(_mm256_setzero_pd(), set1(-54.0), tiny);

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  // int64 -> double for small non-negative values via the 2^52 trick
  const __m256d magic = set1(0x1p52);
  const __m256d biased_d = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(magic))), magic);
  __m256d e = _mm256_add_pd(_mm256_sub_pd(biased_d, set1(1022.0)), e_adjust);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  const __m256d m =
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d small = _mm256_cmp_pd(m, set1(kSqrtHalf), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, set1(1.0)));
  const __m256d t = _mm256_blendv_pd(_mm256_sub_pd(m, set1(1.0)),
                                     _mm256_sub_pd(_mm256_add_pd(m, m), set1(1.0)), small);

  const __m256d z = _mm256_mul_pd(t, t);
  __m256d p = _mm256_fmadd_pd(set1(kLogP0), t, set1(kLogP1));
  p = _mm256_fmadd_pd(p, t, set1(kLogP2));
  p = _mm256_fmadd_pd(p, t, set1(kLogP3));
  p = _mm256_fmadd_pd(p, t, set1(kLogP4));
  p = _mm256_fmadd_pd(p, t, set1(kLogP5));
  __m256d q = _mm256_add_pd(t, set1(kLogQ0));
  q = _mm256_fmadd_pd(q, t, set1(kLogQ1));
  q = _mm256_fmadd_pd(q, t, set1(kLogQ2));
  q = _mm256_fmadd_pd(q, t, set1(kLogQ3));
  q = _mm256_fmadd_pd(q, t, set1(kLogQ4));

  __m256d y = _mm256_mul_pd(t, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, set1(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(set1(0.5), z, y);
  __m256d out = _mm256_add_pd(t, y);
  out = _mm256_fmadd_pd(e, set1(0.693359375), out);
  return _mm256_blendv_pd(out, set1(-__builtin_inf()), zero);
}

struct Broadcast {
  __m256d w_sc, w_re, w_p, transport;
  __m256d center, inv_two_var, norm;
  __m256d re_count, time, t_lsc, alpha, hw_o, hw_a;
};

inline void lane_block(const ChannelParams& p, const Broadcast& b, const double* mu_p,
                       const double* gl, const double* gr, const double* gp, const double* go,
                       const double* ga, double* energy, double* intensity, double* chi_out) {
  const __m256d mu = _mm256_loadu_pd(mu_p);
  const __m256d L = _mm256_mul_pd(b.w_sc, _mm256_loadu_pd(gl));
  const __m256d R = _mm256_add_pd(_mm256_mul_pd(b.w_re, _mm256_loadu_pd(gr)), b.transport);
  const __m256d P = _mm256_mul_pd(b.w_p, _mm256_loadu_pd(gp));
  const __m256d O = _mm256_mul_pd(b.w_sc, _mm256_loadu_pd(go));
  const __m256d A = _mm256_mul_pd(b.w_sc, _mm256_loadu_pd(ga));
  const __m256d chi =
      _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(_mm256_add_pd(L, R), P), O), A);

  __m256d prob = set1(1.0);
  if (p.re_count != 0.0) {
    const __m256d den = _mm256_add_pd(_mm256_add_pd(P, O), A);
    const __m256d positive = _mm256_cmp_pd(den, _mm256_setzero_pd(), _CMP_GT_OQ);
    const __m256d ratio = _mm256_blendv_pd(set1(1.0), _mm256_div_pd(P, den), positive);
    prob = vexp(_mm256_mul_pd(b.re_count, vlog(ratio)));
  }

  const __m256d d = _mm256_sub_pd(mu, b.center);
  const __m256d rho =
      _mm256_mul_pd(b.norm, vexp(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(),
                                                             _mm256_mul_pd(d, d)),
                                               b.inv_two_var)));
  const __m256d kernel = p.steady_state
                             ? _mm256_div_pd(set1(1.0), chi)
                             : vexp(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), chi), b.time));

  __m256d energy_v = mu;
  if (p.include_gel) {
    const __m256d t_lsc = p.gel_self_consistent ? _mm256_div_pd(b.alpha, chi) : b.t_lsc;
    const __m256d loss = _mm256_add_pd(_mm256_mul_pd(b.hw_o, O), _mm256_mul_pd(b.hw_a, A));
    energy_v = _mm256_sub_pd(mu, _mm256_mul_pd(loss, t_lsc));
  }

  _mm256_storeu_pd(chi_out, chi);
  _mm256_storeu_pd(intensity, _mm256_mul_pd(_mm256_mul_pd(prob, rho), kernel));
  _mm256_storeu_pd(energy, energy_v);
}

}  // namespace

void evaluate_channels_avx2(const ChannelParams& p, const ChannelInputs& in, ChannelOutputs out) {
  if (!avx2_available()) fail(ErrorKind::InvalidInput, "AVX2/FMA not available on this CPU");
  const std::size_t n = in.mu.size();
  if (in.gamma_L.size() != n || in.gamma_R.size() != n || in.gamma_P.size() != n ||
      in.gamma_phO.size() != n || in.gamma_phA.size() != n || out.energy.size() != n ||
      out.intensity.size() != n || out.chi.size() != n)
    fail(ErrorKind::InvalidInput, "channel kernel spans differ in length");

  Broadcast b{};
  b.w_sc = set1(p.w_sc);
  b.w_re = set1(p.w_re);
  b.w_p = set1(p.w_p);
  b.transport = set1(p.C * p.w_tr);
  b.center = set1(p.dos_center);
  b.inv_two_var = set1(p.dos_inv_two_var);
  b.norm = set1(p.dos_norm);
  b.re_count = set1(p.re_count);
  b.time = set1(p.time);
  b.t_lsc = set1(p.gel_t_lsc);
  b.alpha = set1(p.gel_alpha);
  b.hw_o = set1(p.hw_optical);
  b.hw_a = set1(p.hw_acoustic);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane_block(p, b, &in.mu[i], &in.gamma_L[i], &in.gamma_R[i], &in.gamma_P[i], &in.gamma_phO[i],
               &in.gamma_phA[i], &out.energy[i], &out.intensity[i], &out.chi[i]);
  }
  if (i < n) {
    // Tail goes through the same vector code on a padded block so every
    // element is produced by one code path.
    std::array<double, 4> mu{}, gl{}, gr{}, gp{}, go{}, ga{}, e{}, it{}, c{};
    mu.fill(p.dos_center);
    gl.fill(1.0);
    gp.fill(1.0);
    for (std::size_t k = 0; i + k < n; ++k) {
      mu[k] = in.mu[i + k];
      gl[k] = in.gamma_L[i + k];
      gr[k] = in.gamma_R[i + k];
      gp[k] = in.gamma_P[i + k];
      go[k] = in.gamma_phO[i + k];
      ga[k] = in.gamma_phA[i + k];
    }
    lane_block(p, b, mu.data(), gl.data(), gr.data(), gp.data(), go.data(), ga.data(), e.data(),
               it.data(), c.data());
    for (std::size_t k = 0; i + k < n; ++k) {
      out.energy[i + k] = e[k];
      out.intensity[i + k] = it[k];
      out.chi[i + k] = c[k];
    }
  }
}

namespace detail {

namespace {
template <class F>
void apply(std::span<const double> x, std::span<double> y, F f) {
  if (x.size() != y.size()) fail(ErrorKind::InvalidInput, "span length mismatch");
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) _mm256_storeu_pd(&y[i], f(_mm256_loadu_pd(&x[i])));
  if (i < x.size()) {
    std::array<double, 4> buf{1.0, 1.0, 1.0, 1.0};
    for (std::size_t k = 0; i + k < x.size(); ++k) buf[k] = x[i + k];
    _mm256_storeu_pd(buf.data(), f(_mm256_loadu_pd(buf.data())));
    for (std::size_t k = 0; i + k < x.size(); ++k) y[i + k] = buf[k];
  }
}
}  // namespace

void exp_avx2(std::span<const double> x, std::span<double> y) {
  if (!avx2_available()) fail(ErrorKind::InvalidInput, "AVX2/FMA not available on this CPU");
  apply(x, y, [](__m256d v) { return vexp(v); });
}

void log_avx2(std::span<const double> x, std::span<double> y) {
  if (!avx2_available()) fail(ErrorKind::InvalidInput, "AVX2/FMA not available on this CPU");
  apply(x, y, [](__m256d v) { return vlog(v); });
}

}  // namespace detail

}  // namespace lse::kernels

// AVX2+FMA variants of the complex kernels. Interleaved complex<double>
// layout: one ymm register holds two complex values [re0 im0 re1 im1].
//
// Complex products use the usual movedup/permute/fmaddsub sequence:
//   a*b       : fmaddsub(re(a), b, im(a)*swap(b))
//   conj(a)*b : fmsubadd(re(a), b, im(a)*swap(b))
// Accumulating dots keep two independent accumulators; the different
// summation order versus the scalar kernels is why equivalence is tested
// with a tolerance rather than bitwise.

#include "pnmimo/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace pnmimo::kern {
namespace {

inline __m256d cmul2(__m256d a, __m256d b) {
    const __m256d are = _mm256_movedup_pd(a);
    const __m256d aim = _mm256_permute_pd(a, 0xF);
    const __m256d bsw = _mm256_permute_pd(b, 0x5);
    return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

inline __m256d cmul2_conj(__m256d a, __m256d b) {
    const __m256d are = _mm256_movedup_pd(a);
    const __m256d aim = _mm256_permute_pd(a, 0xF);
    const __m256d bsw = _mm256_permute_pd(b, 0x5);
    return _mm256_fmsubadd_pd(are, b, _mm256_mul_pd(aim, bsw));
}

inline cd reduce2(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    alignas(16) double out[2];
    _mm_store_pd(out, s);
    return {out[0], out[1]};
}

cd cdot_avx2(const cd* a, const cd* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        acc0 = _mm256_add_pd(acc0, cmul2(_mm256_loadu_pd(pa + 2 * m), _mm256_loadu_pd(pb + 2 * m)));
        acc1 = _mm256_add_pd(acc1, cmul2(_mm256_loadu_pd(pa + 2 * m + 4), _mm256_loadu_pd(pb + 2 * m + 4)));
    }
    if (m + 2 <= n) {
        acc0 = _mm256_add_pd(acc0, cmul2(_mm256_loadu_pd(pa + 2 * m), _mm256_loadu_pd(pb + 2 * m)));
        m += 2;
    }
    cd acc = reduce2(_mm256_add_pd(acc0, acc1));
    for (; m < n; ++m) acc += a[m] * b[m];
    return acc;
}

cd cdot_conj_avx2(const cd* a, const cd* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        acc0 = _mm256_add_pd(acc0, cmul2_conj(_mm256_loadu_pd(pa + 2 * m), _mm256_loadu_pd(pb + 2 * m)));
        acc1 = _mm256_add_pd(acc1,
                             cmul2_conj(_mm256_loadu_pd(pa + 2 * m + 4), _mm256_loadu_pd(pb + 2 * m + 4)));
    }
    if (m + 2 <= n) {
        acc0 = _mm256_add_pd(acc0, cmul2_conj(_mm256_loadu_pd(pa + 2 * m), _mm256_loadu_pd(pb + 2 * m)));
        m += 2;
    }
    cd acc = reduce2(_mm256_add_pd(acc0, acc1));
    for (; m < n; ++m) acc += std::conj(a[m]) * b[m];
    return acc;
}

cd cdot_abs2w_avx2(const cd* a, const cd* u, const cd* v, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pu = reinterpret_cast<const double*>(u);
    const double* pv = reinterpret_cast<const double*>(v);
    __m256d acc = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 2 <= n; m += 2) {
        const __m256d av = _mm256_loadu_pd(pa + 2 * m);
        const __m256d sq = _mm256_mul_pd(av, av);
        const __m256d nrm = _mm256_hadd_pd(sq, sq);  // [|a0|^2 |a0|^2 |a1|^2 |a1|^2]
        const __m256d w = cmul2_conj(_mm256_loadu_pd(pu + 2 * m), _mm256_loadu_pd(pv + 2 * m));
        acc = _mm256_fmadd_pd(nrm, w, acc);
    }
    cd out = reduce2(acc);
    for (; m < n; ++m) out += std::norm(a[m]) * (std::conj(u[m]) * v[m]);
    return out;
}

void caxpy_avx2(cd alpha, const cd* x, cd* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const __m256d are = _mm256_set1_pd(alpha.real());
    const __m256d aim = _mm256_set1_pd(alpha.imag());
    std::size_t m = 0;
    for (; m + 2 <= n; m += 2) {
        const __m256d xv = _mm256_loadu_pd(px + 2 * m);
        const __m256d xs = _mm256_permute_pd(xv, 0x5);
        const __m256d prod = _mm256_fmaddsub_pd(are, xv, _mm256_mul_pd(aim, xs));
        _mm256_storeu_pd(py + 2 * m, _mm256_add_pd(_mm256_loadu_pd(py + 2 * m), prod));
    }
    for (; m < n; ++m) y[m] += alpha * x[m];
}

void cmul_avx2(const cd* a, const cd* b, cd* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* po = reinterpret_cast<double*>(out);
    std::size_t m = 0;
    for (; m + 2 <= n; m += 2)
        _mm256_storeu_pd(po + 2 * m, cmul2(_mm256_loadu_pd(pa + 2 * m), _mm256_loadu_pd(pb + 2 * m)));
    for (; m < n; ++m) out[m] = a[m] * b[m];
}

void cmul_conj_avx2(const cd* a, const cd* b, cd* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* po = reinterpret_cast<double*>(out);
    std::size_t m = 0;
    for (; m + 2 <= n; m += 2)
        _mm256_storeu_pd(po + 2 * m, cmul2_conj(_mm256_loadu_pd(pa + 2 * m), _mm256_loadu_pd(pb + 2 * m)));
    for (; m < n; ++m) out[m] = std::conj(a[m]) * b[m];
}

void cscal_avx2(cd alpha, cd* x, std::size_t n) {
    double* px = reinterpret_cast<double*>(x);
    const __m256d are = _mm256_set1_pd(alpha.real());
    const __m256d aim = _mm256_set1_pd(alpha.imag());
    std::size_t m = 0;
    for (; m + 2 <= n; m += 2) {
        const __m256d xv = _mm256_loadu_pd(px + 2 * m);
        const __m256d xs = _mm256_permute_pd(xv, 0x5);
        _mm256_storeu_pd(px + 2 * m, _mm256_fmaddsub_pd(are, xv, _mm256_mul_pd(aim, xs)));
    }
    for (; m < n; ++m) x[m] *= alpha;
}

double sum_abs2_avx2(const cd* a, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 2 <= n; m += 2) {
        const __m256d av = _mm256_loadu_pd(pa + 2 * m);
        acc = _mm256_fmadd_pd(av, av, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; m < n; ++m) out += std::norm(a[m]);
    return out;
}

constexpr Ops kAvx2Ops = {
    cdot_avx2,  cdot_conj_avx2, cdot_abs2w_avx2, caxpy_avx2,
    cmul_avx2,  cmul_conj_avx2, cscal_avx2,      sum_abs2_avx2,
};

}  // namespace

const Ops* avx2_ops() { return &kAvx2Ops; }

}  // namespace pnmimo::kern

#else

namespace pnmimo::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace pnmimo::kern

#endif

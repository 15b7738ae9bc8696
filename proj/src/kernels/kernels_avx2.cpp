// Compiled with -mavx2 -mfma; only called after a CPUID check.

#include "latentcast/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace latentcast::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
	const __m128d lo = _mm256_castpd256_pd128(v);
	const __m128d hi = _mm256_extractf128_pd(v, 1);
	const __m128d s = _mm_add_pd(lo, hi);
	const __m128d shuf = _mm_unpackhi_pd(s, s);
	return _mm_cvtsd_f64(_mm_add_sd(s, shuf));
}

inline __m256d abs_pd(__m256d v) {
	const __m256d sign = _mm256_set1_pd(-0.0);
	return _mm256_andnot_pd(sign, v);
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
	__m256d acc0 = _mm256_setzero_pd();
	__m256d acc1 = _mm256_setzero_pd();
	std::size_t i = 0;
	for (; i + 8 <= n; i += 8) {
		acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
		acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
	}
	for (; i + 4 <= n; i += 4) {
		acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
	}
	double acc = hsum(_mm256_add_pd(acc0, acc1));
	for (; i < n; ++i) {
		acc += a[i] * b[i];
	}
	return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
	const __m256d va = _mm256_set1_pd(alpha);
	std::size_t i = 0;
	for (; i + 4 <= n; i += 4) {
		const __m256d vy = _mm256_loadu_pd(y + i);
		_mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
	}
	for (; i < n; ++i) {
		y[i] += alpha * x[i];
	}
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
	__m256d acc = _mm256_setzero_pd();
	std::size_t i = 0;
	for (; i + 4 <= n; i += 4) {
		const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
		acc = _mm256_add_pd(acc, abs_pd(d));
	}
	double total = hsum(acc);
	for (; i < n; ++i) {
		total += std::abs(a[i] - b[i]);
	}
	return total;
}

double smape_sum(const double* a, const double* f, std::size_t n) {
	__m256d acc = _mm256_setzero_pd();
	const __m256d zero = _mm256_setzero_pd();
	std::size_t i = 0;
	for (; i + 4 <= n; i += 4) {
		const __m256d va = _mm256_loadu_pd(a + i);
		const __m256d vf = _mm256_loadu_pd(f + i);
		const __m256d num = abs_pd(_mm256_sub_pd(va, vf));
		const __m256d den = _mm256_add_pd(abs_pd(va), abs_pd(vf));
		// Lanes with a zero denominator have a zero numerator too; mask them out.
		const __m256d nonzero = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
		const __m256d q = _mm256_div_pd(num, den);
		acc = _mm256_add_pd(acc, _mm256_and_pd(q, nonzero));
	}
	double total = hsum(acc);
	for (; i < n; ++i) {
		const double den = std::abs(a[i]) + std::abs(f[i]);
		if (den > 0.0) {
			total += std::abs(a[i] - f[i]) / den;
		}
	}
	return total;
}

} // namespace latentcast::kernels::avx2

#pragma once

// Data-parallel reductions shared by reconstruction, the TRMF normal
// equations and the accuracy metrics. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2/FMA variant. The active variant is
// chosen once at startup from CPUID and can be forced to the scalar path by
// setting LATENTCAST_SIMD=scalar in the environment.

#include <cstddef>
#include <span>
#include <string_view>

namespace latentcast::kernels {

enum class Isa { Scalar, Avx2 };

/// Dot product of two equal-length vectors.
double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Sum of |a_i - b_i|.
double sum_abs_diff(std::span<const double> a, std::span<const double> b);

/// Sum of |a_i - f_i| / (|a_i| + |f_i|), with 0/0 terms contributing 0.
double smape_sum(std::span<const double> actual, std::span<const double> forecast);

/// Sum of |y_t - y_{t-lag}| for t = lag .. n-1.
double seasonal_abs_diff(std::span<const double> y, std::size_t lag);

/// Accumulates weight * x x^T into the dense column-major k-by-k matrix gram.
void syr(double weight, std::span<const double> x, std::span<double> gram);

Isa active_isa();
std::string_view isa_name(Isa isa);

/// Overrides the dispatch target. Returns false if the ISA is unavailable.
bool force_isa(Isa isa);
bool isa_available(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double smape_sum(const double* a, const double* f, std::size_t n);
} // namespace scalar

#if defined(LATENTCAST_HAS_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
double smape_sum(const double* a, const double* f, std::size_t n);
} // namespace avx2
#endif

} // namespace latentcast::kernels

#include "latentcast/kernels.hpp"

#include <cmath>

namespace latentcast::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
	double acc = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		acc += a[i] * b[i];
	}
	return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
	for (std::size_t i = 0; i < n; ++i) {
		y[i] += alpha * x[i];
	}
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
	double acc = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		acc += std::abs(a[i] - b[i]);
	}
	return acc;
}

double smape_sum(const double* a, const double* f, std::size_t n) {
	double acc = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		const double denom = std::abs(a[i]) + std::abs(f[i]);
		if (denom > 0.0) {
			acc += std::abs(a[i] - f[i]) / denom;
		}
	}
	return acc;
}

} // namespace latentcast::kernels::scalar

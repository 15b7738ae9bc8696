#include "latentcast/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace latentcast::kernels {

namespace {

struct Table {
	double (*dot)(const double*, const double*, std::size_t);
	void (*axpy)(double, const double*, double*, std::size_t);
	double (*sum_abs_diff)(const double*, const double*, std::size_t);
	double (*smape_sum)(const double*, const double*, std::size_t);
};

constexpr Table kScalar{&scalar::dot, &scalar::axpy, &scalar::sum_abs_diff, &scalar::smape_sum};
#if defined(LATENTCAST_HAS_AVX2)
constexpr Table kAvx2{&avx2::dot, &avx2::axpy, &avx2::sum_abs_diff, &avx2::smape_sum};
#endif

bool cpu_has_avx2() {
#if defined(LATENTCAST_HAS_AVX2) && (defined(__GNUC__) || defined(__clang__))
	__builtin_cpu_init();
	return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
	return false;
#endif
}

Isa detect() {
	if (const char* env = std::getenv("LATENTCAST_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
		return Isa::Scalar;
	}
	return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
	static std::atomic<Isa> isa{detect()};
	return isa;
}

const Table& table() {
#if defined(LATENTCAST_HAS_AVX2)
	if (current().load(std::memory_order_relaxed) == Isa::Avx2) {
		return kAvx2;
	}
#endif
	return kScalar;
}

void require_same_size(std::size_t a, std::size_t b) {
	if (a != b) {
		throw std::invalid_argument("kernel operands differ in length");
	}
}

} // namespace

bool isa_available(Isa isa) {
	return isa == Isa::Scalar || cpu_has_avx2();
}

bool force_isa(Isa isa) {
	if (!isa_available(isa)) {
		return false;
	}
	current().store(isa);
	return true;
}

Isa active_isa() {
	return current().load();
}

std::string_view isa_name(Isa isa) {
	return isa == Isa::Avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
	require_same_size(a.size(), b.size());
	return table().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
	require_same_size(x.size(), y.size());
	table().axpy(alpha, x.data(), y.data(), x.size());
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
	require_same_size(a.size(), b.size());
	return table().sum_abs_diff(a.data(), b.data(), a.size());
}

double smape_sum(std::span<const double> actual, std::span<const double> forecast) {
	require_same_size(actual.size(), forecast.size());
	return table().smape_sum(actual.data(), forecast.data(), actual.size());
}

double seasonal_abs_diff(std::span<const double> y, std::size_t lag) {
	if (lag >= y.size()) {
		return 0.0;
	}
	const std::size_t n = y.size() - lag;
	return table().sum_abs_diff(y.data() + lag, y.data(), n);
}

void syr(double weight, std::span<const double> x, std::span<double> gram) {
	const std::size_t k = x.size();
	require_same_size(gram.size(), k * k);
	const auto& t = table();
	for (std::size_t j = 0; j < k; ++j) {
		t.axpy(weight * x[j], x.data(), gram.data() + j * k, k);
	}
}

} // namespace latentcast::kernels

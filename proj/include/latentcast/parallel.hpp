#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace latentcast {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// processed exactly once; the first exception thrown is rethrown here.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
	if (threads <= 1 || n < 2) {
		for (std::size_t i = 0; i < n; ++i) {
			fn(i);
		}
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr error;
	std::mutex error_mutex;
	auto worker = [&] {
		for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
			try {
				fn(i);
			} catch (...) {
				std::lock_guard lock(error_mutex);
				if (!error) {
					error = std::current_exception();
				}
			}
		}
	};
	{
		std::vector<std::jthread> pool;
		const std::size_t count = std::min(threads, n);
		pool.reserve(count);
		for (std::size_t w = 0; w < count; ++w) {
			pool.emplace_back(worker);
		}
	}
	if (error) {
		std::rethrow_exception(error);
	}
}

} // namespace latentcast

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "oqc/types.hpp"

namespace oqc {

/// Evaluates fn(i) for i = 0..count-1 on up to `workers` threads and returns the results
/// in index order. Results do not depend on the worker count as long as fn(i) is a pure
/// function of i; callers reduce the returned vector sequentially.
///
/// The first failure stops the remaining work; the exception is rethrown with the index
/// of the lowest failing state prefixed to its message.
template <class Fn>
auto parallel_map_initials(std::size_t count, Fn&& fn, int workers)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  if (workers < 1) throw InvalidSpec("worker count must be at least 1");
  std::vector<std::optional<Result>> slots(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const auto nthreads = std::min<std::size_t>(std::size_t(workers), count);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  if (error) {
    const std::string prefix = "initial state " + std::to_string(error_index) + ": ";
    try {
      std::rethrow_exception(error);
    } catch (const SolverError& e) {
      throw SolverError(prefix + e.what(), e.residual(), e.step());
    } catch (const InvalidSpec& e) {
      throw InvalidSpec(prefix + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(prefix + e.what());
    }
  }

  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace oqc

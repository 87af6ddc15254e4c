#include "spreadcast/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spreadcast {
namespace {

std::atomic<std::size_t> g_max_threads{0};
thread_local bool t_inside_parallel = false;

std::size_t worker_count(std::size_t count) {
  std::size_t hw = g_max_threads.load();
  if (hw == 0) hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::min(hw, count);
}

}  // namespace

void set_max_threads(std::size_t threads) { g_max_threads.store(threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = t_inside_parallel ? 1 : worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run = [&] {
    t_inside_parallel = true;
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
    t_inside_parallel = false;
  };

  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(run);
  run();
  threads.clear();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spreadcast

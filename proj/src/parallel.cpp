#include "ministra/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <atomic>
#include <memory>
#include <mutex>
#include <thread>

namespace ministra {
namespace {

std::atomic<std::size_t> g_threads{1};
std::mutex g_arena_mutex;
std::unique_ptr<tbb::task_arena> g_arena;
std::size_t g_arena_threads = 0;

tbb::task_arena& arena() {
  std::lock_guard<std::mutex> lock(g_arena_mutex);
  const std::size_t want = thread_count();
  if (!g_arena || g_arena_threads != want) {
    g_arena = std::make_unique<tbb::task_arena>(static_cast<int>(want));
    g_arena_threads = want;
  }
  return *g_arena;
}

}  // namespace

void set_thread_count(std::size_t n) {
  if (n == 0) n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  g_threads.store(n);
}

std::size_t thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  parallel_for_ranges(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

void parallel_for_ranges(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (thread_count() <= 1 || n < 64) {
    body(0, n);
    return;
  }
  arena().execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 32),
                      [&](const tbb::blocked_range<std::size_t>& r) { body(r.begin(), r.end()); });
  });
}

}  // namespace ministra

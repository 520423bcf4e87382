#include "saem/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace saem {

namespace {

int threads_from_env() {
  const char* env = std::getenv("SAEM_THREADS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (...) {
    return 1;
  }
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{threads_from_env()};
  return threads;
}

}  // namespace

int reduction_threads() { return thread_setting().load(); }

void set_reduction_threads(int threads) { thread_setting().store(std::max(1, threads)); }

void for_each_chunk(int count, int chunk_size, const std::function<void(int, int, int)>& fn) {
  const int chunks = num_chunks(count, chunk_size);
  const int threads = std::min(reduction_threads(), chunks);
  auto run = [&](int chunk) { fn(chunk, chunk * chunk_size, std::min(count, (chunk + 1) * chunk_size)); };
  if (threads <= 1) {
    for (int c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int c = next++; c < chunks; c = next++) run(c);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace saem

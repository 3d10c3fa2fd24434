#include "brth/parallel.hpp"

#include <cstdlib>
#include <string>

namespace brth::par {

namespace {

std::atomic<int> g_threads{-1};  // -1: not set, fall back to env / hardware

int from_env() {
  const char* raw = std::getenv("BRTH_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const int n = std::stoi(raw);
    return n >= 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

void set_threads(int n) { g_threads.store(n < 0 ? -1 : n, std::memory_order_relaxed); }

int max_threads() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n < 0) n = from_env();
  if (n == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return n < 1 ? 1 : n;
}

}  // namespace brth::par

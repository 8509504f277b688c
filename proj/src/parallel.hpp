#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "gdm/linalg.hpp"

namespace gdm::detail {

// Thread cap from GDM_THREADS; defaults to 1.
inline std::size_t assembly_threads() {
  const char* env = std::getenv("GDM_THREADS");
  if (env == nullptr) return 1;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<std::size_t>(v) : 1;
  } catch (...) {
    return 1;
  }
}

// Runs fn(begin, end, out) over contiguous chunks of [0, n) and concatenates
// the per-chunk triplets in chunk order, which reproduces the sequential
// order whatever the thread count.
template <class Fn>
std::vector<Triplet> gather_triplets(std::size_t n, Fn&& fn) {
  const std::size_t threads = std::max<std::size_t>(1, std::min(assembly_threads(), n / 1024 + 1));
  if (threads == 1) {
    std::vector<Triplet> out;
    fn(std::size_t{0}, n, out);
    return out;
  }
  std::vector<std::vector<Triplet>> parts(threads);
  std::vector<std::thread> pool;
  const std::size_t per = (n + threads - 1) / threads;
  for (std::size_t k = 0; k < threads; ++k) {
    const std::size_t b = std::min(n, k * per);
    const std::size_t e = std::min(n, b + per);
    pool.emplace_back([&fn, &parts, b, e, k] { fn(b, e, parts[k]); });
  }
  for (auto& t : pool) t.join();
  std::vector<Triplet> out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace gdm::detail

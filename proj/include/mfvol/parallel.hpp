#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mfvol {

// Worker count from MFVOL_THREADS, falling back to hardware concurrency.
std::size_t default_worker_count();

// Runs body(i) for i in [0, count) on up to `workers` threads with static
// contiguous chunking. The exception from the lowest-indexed failing chunk
// is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  if (workers > count) workers = count;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            errors[w] = std::current_exception();
            return;
          }
        }
      });
    }
  }
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
  }
}

}  // namespace mfvol

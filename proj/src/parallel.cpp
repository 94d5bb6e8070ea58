#include "lrmc/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lrmc {

void parallel_chunks(Index count, int threads,
                     const std::function<void(int, Index, Index)>& fn) {
  const int chunks =
      static_cast<int>(std::clamp<Index>(threads, 1, std::max<Index>(count, 1)));
  if (chunks == 1) {
    fn(0, 0, count);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](int chunk) {
    const Index begin = count * chunk / chunks;
    const Index end = count * (chunk + 1) / chunks;
    try {
      fn(chunk, begin, end);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(chunks - 1));
  for (int c = 1; c < chunks; ++c) workers.emplace_back(run, c);
  run(0);
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lrmc

/**
 * Copyright (c) 2026 The negfmini developers.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "negfmini/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "negfmini/common.hpp"

namespace negfmini {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NEGFMINI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (n <= 0) return;
  const int workers = std::min(std::max(1, threads), n);
  std::map<int, std::exception_ptr> failures;
  std::mutex mu;
  std::atomic<int> next{0};
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 0; t + 1 < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
  }
  if (failures.empty()) return;
  if (failures.size() == 1) std::rethrow_exception(failures.begin()->second);
  ErrorKind kind = ErrorKind::InvalidArgument;
  std::ostringstream os;
  os << failures.size() << " tasks failed";
  int shown = 0;
  for (auto& [idx, ep] : failures) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      if (shown == 0) kind = e.kind();
      if (shown < 4) os << "; " << e.what();
    } catch (const std::exception& e) {
      if (shown < 4) os << "; " << e.what();
    }
    ++shown;
  }
  throw Error(kind, os.str());
}

}  // namespace negfmini

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

#pragma once

#include <functional>

namespace negfmini {

/// Worker count: explicit request if positive, else NEGFMINI_THREADS, else hardware concurrency.
int resolve_threads(int requested);

/// Runs f(i) for i in [0, n) on up to `threads` workers. Callers write to disjoint outputs,
/// so results do not depend on the schedule. Failures are collected and rethrown together,
/// ordered by index.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace negfmini

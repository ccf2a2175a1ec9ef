/*
 * Copyright 2026 The crowdiq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CROWDIQ_PARALLEL_HPP_
#define CROWDIQ_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace crowdiq {

// 0 means "all hardware threads".
unsigned resolve_threads(unsigned requested);

// Calls body(i) for every i in [0, count) on up to `threads` workers. Work is
// handed out in index order; callers write results into per-index slots so the
// outcome never depends on scheduling. The first exception thrown by any call
// is rethrown after all workers have stopped.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace crowdiq

#endif  // CROWDIQ_PARALLEL_HPP_

// Copyright 2026 The xmrag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace xmrag {

//! Worker count for `jobs`: values < 1 mean "all hardware threads".
int ResolveJobs(int jobs);

/*! Calls fn(i) for every i in [0, n) on up to `jobs` threads, in contiguous
 *  chunks. With one job everything runs inline on the calling thread. The
 *  first exception thrown by any call is rethrown after all workers stop.
 */
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

}  // namespace xmrag

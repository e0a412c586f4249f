/*
 * Copyright 2026 LEML Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEML_THREADING_HPP
#define LEML_THREADING_HPP

namespace leml {

// Worker count consulted by the matrix kernels and the per-label H update.
// 1 (the default) is the reference mode: single-threaded, deterministic,
// bit-reproducible. Values > 1 enable row-partitioned OpenMP execution;
// results may differ from reference mode only by floating-point summation
// order (within 1e-10 relative).
int num_threads();
void set_num_threads(int n);

} // namespace leml

#endif // LEML_THREADING_HPP

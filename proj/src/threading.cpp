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

#include "leml/threading.hpp"

#include <atomic>

namespace leml {

namespace {
std::atomic<int> g_num_threads{1};
}

int num_threads() {
    return g_num_threads.load(std::memory_order_relaxed);
}

void set_num_threads(int n) {
    g_num_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed);
}

} // namespace leml

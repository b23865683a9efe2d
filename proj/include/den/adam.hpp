/*
 * Copyright 2026 the den authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <vector>

#include "den/tensor.hpp"

namespace den {

// Per-parameter Adam moments with bias correction.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step_count = 0;
  std::vector<double> first_moment;   // sized on first step
  std::vector<double> second_moment;

  explicit AdamState(double lr = 1e-3) : learning_rate(lr) {}
};

// One bias-corrected update; the parameter's gradient is zeroed afterward.
// Throws NumericError if the parameter has no gradient buffer.
void adam_step(AdamState& state, Tensor& param);

}  // namespace den

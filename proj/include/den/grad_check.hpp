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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "den/tensor.hpp"

namespace den {

struct GradCheckFailure {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t coordinates = 0;
  std::vector<GradCheckFailure> failures;
  bool passed = true;

  std::string summary() const;
};

// Central finite differences against the analytic gradients of a
// deterministic scalar function: f() must rebuild its forward pass from the
// current parameter values and return a 1x1 loss. Relative error per
// coordinate is |a - n| / max(|a|, |n|, floor); `floor` absorbs the noise
// on coordinates whose true derivative is zero.
GradCheckReport grad_check(const std::function<Tensor()>& f,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           double epsilon = 1e-5, double rtol = 1e-4, double floor = 1e-6);

}  // namespace den

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

#include "den/adam.hpp"

#include <cmath>

#include "den/error.hpp"

namespace den {

void adam_step(AdamState& state, Tensor& param) {
  if (!param.has_grad()) {
    throw NumericError("adam_step: parameter has no gradient");
  }
  const std::size_t n = param.size();
  if (state.first_moment.empty()) {
    state.first_moment.assign(n, 0.0);
    state.second_moment.assign(n, 0.0);
  }
  if (state.first_moment.size() != n) {
    throw NumericError("adam_step: state size does not match parameter");
  }

  ++state.step_count;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  std::vector<double>& theta = param.data();
  std::vector<double>& g = param.grad();
  for (std::size_t i = 0; i < n; ++i) {
    state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g[i];
    state.second_moment[i] =
        state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g[i] * g[i];
    const double m_hat = state.first_moment[i] / bc1;
    const double v_hat = state.second_moment[i] / bc2;
    theta[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    if (!std::isfinite(theta[i])) {
      throw NumericError("adam_step: parameter became non-finite");
    }
  }
  param.zero_grad();
}

}  // namespace den

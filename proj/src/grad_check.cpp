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

#include "den/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace den {

std::string GradCheckReport::summary() const {
  std::ostringstream out;
  out << (passed ? "PASS" : "FAIL") << ": " << coordinates
      << " coordinates, max relative error " << max_rel_err;
  if (!failures.empty()) {
    out << "; " << failures.size() << " failing, first at " << failures.front().param << "["
        << failures.front().index << "] analytic=" << failures.front().analytic
        << " numeric=" << failures.front().numeric;
  }
  return out.str();
}

GradCheckReport grad_check(const std::function<Tensor()>& f,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           double epsilon, double rtol, double floor) {
  GradCheckReport report;

  // Analytic pass.
  std::vector<std::vector<double>> analytic(params.size());
  {
    for (auto& [name, p] : params) {
      Tensor t = p;
      t.zero_grad();
    }
    Tensor loss = f();
    backward(loss);
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor t = params[i].second;
      t.ensure_grad();
      analytic[i] = t.grad();
      t.zero_grad();
    }
  }

  // Numeric pass; forwards only, no tape.
  NoGradScope no_grad;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor t = params[pi].second;
    std::vector<double>& data = t.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + epsilon;
      const double up = f().scalar_value();
      data[i] = saved - epsilon;
      const double down = f().scalar_value();
      data[i] = saved;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[pi][i];
      const double rel = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), floor});
      report.max_rel_err = std::max(report.max_rel_err, rel);
      ++report.coordinates;
      if (rel > rtol) {
        report.failures.push_back({params[pi].first, i, a, numeric, rel});
      }
    }
  }
  report.passed = report.failures.empty();
  return report;
}

}  // namespace den

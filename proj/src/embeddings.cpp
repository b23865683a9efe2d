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

#include "den/embeddings.hpp"

#include <cmath>
#include <cstdlib>

#include "den/error.hpp"
#include "den/rng.hpp"

namespace den {

namespace {

// Splits on single spaces; tolerates a trailing '\r'.
std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (start < line.size()) {
    std::size_t sp = line.find(' ', start);
    if (sp == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    if (sp > start) fields.push_back(line.substr(start, sp - start));
    start = sp + 1;
  }
  return fields;
}

double parse_component(std::string_view field, std::size_t line_no) {
  std::string buf(field);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) {
    throw DataError("embedding line " + std::to_string(line_no) + ": non-numeric component '" +
                    buf + "'");
  }
  if (!std::isfinite(v)) {
    throw DataError("embedding line " + std::to_string(line_no) + ": non-finite component");
  }
  return v;
}

}  // namespace

EmbeddingTable EmbeddingTable::load_text(std::string_view text,
                                         std::optional<std::size_t> expected_dim,
                                         std::uint64_t fallback_seed) {
  EmbeddingTable table;
  table.fallback_seed_ = fallback_seed;
  if (expected_dim) table.dim_ = *expected_dim;

  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::vector<std::string_view> fields = split_spaces(line);
    if (fields.size() < 2) {
      throw DataError("embedding line " + std::to_string(line_no) + ": expected 'word v1 ... vd'");
    }
    std::size_t dim = fields.size() - 1;
    if (table.dim_ == 0) {
      table.dim_ = dim;
    } else if (dim != table.dim_) {
      throw DataError("embedding line " + std::to_string(line_no) + ": dimension " +
                      std::to_string(dim) + " does not match " + std::to_string(table.dim_));
    }
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] = parse_component(fields[i + 1], line_no);
    }
    table.vectors_[std::string(fields[0])] = std::move(v);
  }

  if (table.dim_ == 0) {
    throw DataError("embedding file is empty and no expected dimension was given");
  }
  return table;
}

EmbeddingTable EmbeddingTable::all_fallback(std::size_t dim, std::uint64_t fallback_seed) {
  if (dim == 0) throw DataError("embedding dimension must be positive");
  EmbeddingTable table;
  table.dim_ = dim;
  table.fallback_seed_ = fallback_seed;
  return table;
}

std::vector<double> EmbeddingTable::embed(std::string_view word) const {
  if (word.empty()) throw DataError("embed: empty word");
  auto it = vectors_.find(std::string(word));
  if (it != vectors_.end()) return it->second;

  fallback_count_.fetch_add(1, std::memory_order_relaxed);
  SplitMix64 rng(mix64(fallback_seed_ ^ fnv1a64(word)));
  std::vector<double> v(dim_);
  double norm_sq = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm_sq += x * x;
  }
  if (norm_sq < 1e-30) {
    v[0] = 1.0;
    norm_sq = 1.0;
  }
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace den

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

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace den {

// Entity feature vectors, loaded from a GloVe-style plain-text file
// ("word v1 v2 ... vd" per line) or produced on demand.
//
// Out-of-vocabulary words get a deterministic fallback vector: a SplitMix64
// stream seeded with mix64(fallback_seed ^ fnv1a64(word)) draws `dim`
// Irwin-Hall normals which are then scaled to unit L2 norm. Only add/mul/
// sqrt arithmetic is involved, so the same (seed, word) pair yields the
// same bits on every platform. Zero rows are never produced; degenerate
// GCN inputs from all-zero features were the alternative.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(EmbeddingTable&& o) noexcept
      : dim_(o.dim_),
        fallback_seed_(o.fallback_seed_),
        vectors_(std::move(o.vectors_)),
        fallback_count_(o.fallback_count_.load()) {}
  EmbeddingTable& operator=(EmbeddingTable&& o) noexcept {
    dim_ = o.dim_;
    fallback_seed_ = o.fallback_seed_;
    vectors_ = std::move(o.vectors_);
    fallback_count_.store(o.fallback_count_.load());
    return *this;
  }

  static EmbeddingTable load_text(std::string_view text,
                                  std::optional<std::size_t> expected_dim = std::nullopt,
                                  std::uint64_t fallback_seed = 1);

  // No stored vectors: every lookup takes the fallback path.
  static EmbeddingTable all_fallback(std::size_t dim, std::uint64_t fallback_seed = 1);

  std::vector<double> embed(std::string_view word) const;

  bool contains(std::string_view word) const { return vectors_.count(std::string(word)) > 0; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  std::uint64_t fallback_seed() const { return fallback_seed_; }

  // Instrumentation: number of lookups that missed the table.
  std::uint64_t fallback_count() const { return fallback_count_.load(); }

 private:
  std::size_t dim_ = 0;
  std::uint64_t fallback_seed_ = 1;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  mutable std::atomic<std::uint64_t> fallback_count_{0};
};

}  // namespace den

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

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "den/error.hpp"
#include "den/rng.hpp"

namespace den {

// A user straight out of an import: label code, raw post strings, and
// optionally externally produced per-post vectors for the precomputed
// encoder. The canonical on-disk form is JSONL, one user per line.
struct RawUser {
  std::string user_id;
  std::string mbti;  // empty when unlabeled
  std::vector<std::string> posts;
  std::vector<std::vector<double>> post_vectors;
};

std::vector<RawUser> import_kaggle_csv(std::string_view text);
std::vector<RawUser> read_jsonl(std::string_view text);
std::string to_jsonl(const std::vector<RawUser>& users);

// Trait order E/I, S/N, T/F, J/P; bit 1 means the second letter of the pair.
std::array<int, 4> mbti_to_bits(std::string_view code);
std::string bits_to_mbti(const std::array<int, 4>& bits);
const std::array<std::string, 16>& all_mbti_codes();

// Lowercases, splits on whitespace, strips surrounding punctuation, keeps
// internal apostrophes and hyphens.
std::vector<std::string> tokenize(std::string_view post);

// Drops tokens equal to any of the 16 type codes, plus an optional extra
// stoplist (all lowercase).
std::vector<std::string> scrub_labels(std::vector<std::string> tokens,
                                      const std::set<std::string>& extra_stoplist = {});

struct Vocab {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;

  std::unordered_map<std::string, int> token_to_id;
  std::vector<std::string> id_to_token;  // includes the reserved rows
  int min_freq = 2;

  int id_of(std::string_view token) const;
  std::size_t size() const { return id_to_token.size(); }

  std::string to_tsv() const;
  static Vocab from_tsv(std::string_view text);
};

// Preprocessed user: scrubbed tokens capped at max_posts x max_tokens,
// token ids resolved against a vocabulary, bit labels when the import had
// a type code.
struct UserDocument {
  std::string user_id;
  std::vector<std::vector<int>> posts;             // token ids
  std::vector<std::vector<std::string>> raw_posts; // scrubbed surface tokens
  std::optional<std::array<int, 4>> labels;
  std::vector<std::vector<double>> post_vectors;
};

UserDocument prepare_document(const RawUser& user, std::size_t max_posts,
                              std::size_t max_post_tokens,
                              const std::set<std::string>& extra_stoplist = {});

// Ids assigned by descending frequency then lexicographic order; tokens
// below min_freq fall through to UNK.
Vocab build_vocab(const std::vector<UserDocument>& train_users, int min_freq = 2);

void apply_vocab(UserDocument& doc, const Vocab& vocab);
void apply_vocab(std::vector<UserDocument>& docs, const Vocab& vocab);

// Deterministic 6:2:2 partition: Fisher-Yates shuffle under SplitMix64
// (see rng.hpp), boundaries at floor(0.6 n) and floor(0.8 n).
template <typename T>
std::tuple<std::vector<T>, std::vector<T>, std::vector<T>> split_622(std::vector<T> users,
                                                                     std::uint64_t seed) {
  if (users.size() < 5) {
    throw DataError("split: need at least 5 users, got " + std::to_string(users.size()));
  }
  SplitMix64 rng = seeded_stream(seed, "split");
  shuffle(users, rng);
  const std::size_t n = users.size();
  const std::size_t train_end = (n * 6) / 10;
  const std::size_t val_end = (n * 8) / 10;
  std::vector<T> train(users.begin(), users.begin() + train_end);
  std::vector<T> val(users.begin() + train_end, users.begin() + val_end);
  std::vector<T> test(users.begin() + val_end, users.end());
  return {std::move(train), std::move(val), std::move(test)};
}

}  // namespace den

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
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "den/data.hpp"
#include "den/graph.hpp"
#include "den/tensor.hpp"

namespace den {

inline constexpr int kNumTraits = 4;

enum class EncoderKind { Toy, Precomputed };

// Which part of the pipeline a variant removes (or, for FullyConnected,
// replaces: the co-category adjacency becomes a complete graph).
enum class Ablation { None, NoShort, NoLong, NoGcn, NoInter, FullyConnected };

enum class GateMode { Learned, Fixed };

struct DENConfig {
  int hidden_dim = 32;       // width shared by both encoders
  int entity_dim = 50;       // entity embedding width
  int max_post_tokens = 70;  // token cap per post
  int max_posts = 50;        // post cap per user
  int gcn_layers = 2;
  int inter_layers = 2;
  double leaky_slope = 0.01;
  EncoderKind encoder = EncoderKind::Toy;
  int attention_heads = 2;
  int ff_dim = 0;  // 0 means 2 * hidden_dim
  bool self_loops = true;
  Ablation ablation = Ablation::None;
  GateMode gate_mode = GateMode::Learned;
  double gate_alpha = 0.5;  // used when gate_mode == Fixed

  int ff_width() const { return ff_dim > 0 ? ff_dim : 2 * hidden_dim; }
  int head_width() const { return hidden_dim / attention_heads; }
  void validate() const;

  nlohmann::json to_json() const;
  static DENConfig from_json(const nlohmann::json& j);
};

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);

// Every learnable tensor in the network. All variants share one layout and
// one name-keyed initialization, so identical seeds give identical shared
// parameters regardless of which parts a variant actually uses.
struct DENParams {
  std::vector<Tensor> long_gcn;    // [0] entity_dim x d, then d x d
  std::vector<Tensor> interaction; // d x d each
  Tensor input_projection;         // entity_dim x d; the projection-only variant
  Tensor fusion_weight;            // 2d x 1
  Tensor fusion_bias;              // 1 x 1
  std::array<Tensor, kNumTraits> head_weight;  // d x 2
  std::array<Tensor, kNumTraits> head_bias;    // 1 x 2
  Tensor sentinel;                 // 1 x entity_dim, stands in for empty entity sets

  // toy post encoder
  Tensor token_embedding;     // vocab x d
  Tensor position_embedding;  // (max_post_tokens + 1) x d; row 0 is the CLS slot
  Tensor cls_embedding;       // 1 x d
  std::vector<Tensor> attn_query, attn_key, attn_value;  // per head, d x head_width
  Tensor attn_output;         // d x d
  Tensor ff_in, ff_out;       // d x ff, ff x d

  std::size_t vocab_size = 0;

  static DENParams init(const DENConfig& cfg, std::size_t vocab_size, std::uint64_t seed);

  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<std::pair<std::string, Tensor>> named_encoder() const;
  // The subset a given variant reads during its forward pass.
  std::vector<std::pair<std::string, Tensor>> named_trainable(const DENConfig& cfg) const;

  DENParams clone() const;                 // deep copy with fresh leaves
  void copy_values_from(const DENParams&); // shapes must match
};

// A user with everything the forward pass needs precomputed. Graph and
// bipartite structure do not depend on the model config, so one prepared
// user can be shared across ablation variants and seeds.
struct PreparedUser {
  UserDocument doc;
  PsychGraph graph;        // K may be 0; the sentinel path covers that
  BipartiteGraph bipartite;
};

PreparedUser prepare_user(UserDocument doc, const Lexicon& lexicon, const EmbeddingTable& table);

struct UserForwardState {
  Tensor long_encoded;   // K x d after the long-term GCN (or projection)
  Tensor short_encoded;  // N x d of per-post encodings
  Tensor long_refined;   // after bipartite interaction (same as above when skipped)
  Tensor short_refined;
  Tensor pooled_long;    // 1 x d
  Tensor pooled_short;   // 1 x d
  Tensor fused;          // 1 x d
  Tensor probs;          // 1 x 4, class-1 probability per trait
  double gate_value = 0.0;
  std::array<double, kNumTraits> trait_probs{};
};

class DENModel {
 public:
  DENModel(DENConfig cfg, DENParams params);

  const DENConfig& config() const { return cfg_; }
  DENParams& params() { return params_; }
  const DENParams& params() const { return params_; }

  // Pipeline pieces, exposed for tests and probes.
  Tensor encode_long(const PsychGraph& graph) const;
  Tensor encode_post(const std::vector<int>& token_ids) const;
  Tensor encode_post_precomputed(const std::vector<double>& vec) const;
  Tensor encode_short(const PreparedUser& user) const;
  std::pair<Tensor, Tensor> interact(const Tensor& long_encoded, const Tensor& short_encoded,
                                     const Mat& bipartite_adjacency) const;
  std::pair<Tensor, Tensor> fuse(const Tensor& pooled_long, const Tensor& pooled_short) const;
  Tensor predict(const Tensor& fused) const;

  UserForwardState forward(const PreparedUser& user) const;

 private:
  DENConfig cfg_;
  DENParams params_;
};

// Mean pooling over entity rows and post rows.
std::pair<Tensor, Tensor> aggregate(const Tensor& long_refined, const Tensor& short_refined);

// Binary cross-entropy of the four trait probabilities against bit labels;
// probabilities are clamped to [1e-12, 1 - 1e-12] before the logs.
Tensor bce_loss(const Tensor& probs, const std::array<int, kNumTraits>& labels);

}  // namespace den

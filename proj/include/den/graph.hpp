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

#include <string>
#include <vector>

#include "den/embeddings.hpp"
#include "den/lexicon.hpp"
#include "den/mat.hpp"

namespace den {

// Per-user psychological graph: K entity nodes, embedding features, and a
// symmetric binary co-category adjacency with zero diagonal (an edge means
// the two entities share at least one lexicon category).
struct PsychGraph {
  EntitySet entities;
  Mat node_features;  // K x d_g
  Mat adjacency;      // K x K, binary, zero diagonal
};

// Entity-post bipartite adjacency, (K+N) x (K+N): rows 0..K-1 are
// entities, rows K..K+N-1 are posts; only entity<->post edges are nonzero.
struct BipartiteGraph {
  std::size_t n_entities = 0;
  std::size_t n_posts = 0;
  Mat adjacency;
};

// D^{-1/2} (A [+ I]) D^{-1/2}. Rows of isolated nodes stay zero when
// self-loops are off (zero degree contributes zero, not a division error).
struct NormalizedAdjacency {
  Mat matrix;
  bool self_loops = false;
};

PsychGraph build_psych_graph(const EntitySet& entities, const Lexicon& lexicon,
                             const EmbeddingTable& table);

BipartiteGraph build_bipartite(const EntitySet& entities,
                               const std::vector<std::vector<std::string>>& posts);

NormalizedAdjacency normalize_adjacency(const Mat& adjacency, bool self_loops);

// Complete graph on n nodes (zero diagonal), as used by the variant that
// replaces the co-category structure with a fully connected one.
Mat complete_adjacency(std::size_t n);

// Inspection dump: {"entities": [...], "edges": [[i,j],...],
// "bipartite_edges": [[entity,post],...]}.
std::string graph_to_json(const PsychGraph& graph, const BipartiteGraph& bipartite);

}  // namespace den

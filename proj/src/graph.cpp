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

#include "den/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "den/error.hpp"

namespace den {

namespace {

bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i; else ++j;
  }
  return false;
}

}  // namespace

PsychGraph build_psych_graph(const EntitySet& entities, const Lexicon& lexicon,
                             const EmbeddingTable& table) {
  const std::size_t k = entities.size();
  PsychGraph graph;
  graph.entities = entities;
  graph.node_features = Mat(k, table.dim());
  graph.adjacency = Mat(k, k);

  std::vector<std::vector<int>> categories(k);
  for (std::size_t i = 0; i < k; ++i) {
    categories[i] = lexicon.category_ids_of(entities.entities[i]);
    std::vector<double> v = table.embed(entities.entities[i]);
    std::copy(v.begin(), v.end(), graph.node_features.a.begin() + i * table.dim());
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (sorted_intersect(categories[i], categories[j])) {
        graph.adjacency.at(i, j) = 1.0;
        graph.adjacency.at(j, i) = 1.0;
      }
    }
  }
  return graph;
}

BipartiteGraph build_bipartite(const EntitySet& entities,
                               const std::vector<std::vector<std::string>>& posts) {
  const std::size_t k = entities.size();
  const std::size_t n = posts.size();
  BipartiteGraph bip;
  bip.n_entities = k;
  bip.n_posts = n;
  bip.adjacency = Mat(k + n, k + n);

  for (std::size_t j = 0; j < n; ++j) {
    std::unordered_set<std::string> members(posts[j].begin(), posts[j].end());
    for (std::size_t i = 0; i < k; ++i) {
      if (members.count(entities.entities[i])) {
        bip.adjacency.at(i, k + j) = 1.0;
        bip.adjacency.at(k + j, i) = 1.0;
      }
    }
  }
  return bip;
}

NormalizedAdjacency normalize_adjacency(const Mat& adjacency, bool self_loops) {
  const std::size_t n = adjacency.rows;
  if (adjacency.cols != n) {
    throw NumericError("normalize_adjacency: matrix is not square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = adjacency.at(i, j);
      if (v != 0.0 && v != 1.0) {
        throw NumericError("normalize_adjacency: adjacency is not binary");
      }
      if (v != adjacency.at(j, i)) {
        throw NumericError("normalize_adjacency: adjacency is not symmetric");
      }
    }
  }

  Mat work = adjacency;
  if (self_loops) {
    for (std::size_t i = 0; i < n; ++i) work.at(i, i) = 1.0;
  }

  std::vector<double> inv_sqrt_degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) degree += work.at(i, j);
    inv_sqrt_degree[i] = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
  }

  NormalizedAdjacency out;
  out.self_loops = self_loops;
  out.matrix = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.matrix.at(i, j) = inv_sqrt_degree[i] * work.at(i, j) * inv_sqrt_degree[j];
    }
  }
  return out;
}

Mat complete_adjacency(std::size_t n) {
  Mat a(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 0.0;
  return a;
}

std::string graph_to_json(const PsychGraph& graph, const BipartiteGraph& bipartite) {
  nlohmann::json j;
  j["entities"] = graph.entities.entities;
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < graph.adjacency.rows; ++i) {
    for (std::size_t k = i + 1; k < graph.adjacency.cols; ++k) {
      if (graph.adjacency.at(i, k) != 0.0) edges.push_back({i, k});
    }
  }
  j["edges"] = edges;
  nlohmann::json bedges = nlohmann::json::array();
  for (std::size_t i = 0; i < bipartite.n_entities; ++i) {
    for (std::size_t p = 0; p < bipartite.n_posts; ++p) {
      if (bipartite.adjacency.at(i, bipartite.n_entities + p) != 0.0) bedges.push_back({i, p});
    }
  }
  j["bipartite_edges"] = bedges;
  return j.dump(2);
}

}  // namespace den

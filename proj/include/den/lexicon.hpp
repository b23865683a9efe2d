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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace den {

// One dictionary entry: a lowercase pattern, optionally ending in a single
// '*' that matches any continuation (prefix match), and the category ids it
// maps to. Category ids within an entry are kept sorted and deduplicated.
struct LexiconEntry {
  std::string pattern;
  bool wildcard = false;  // pattern stored without the trailing '*'
  std::vector<int> category_ids;
};

// Word-pattern -> psychological-category dictionary in the tab-separated
// ".dic" layout. Immutable after parse; concurrent reads are safe.
//
// Matching is prefix-trie backed; a linear scan over every entry is kept
// behind match_brute_force() as the test oracle.
class Lexicon {
 public:
  static Lexicon parse_dic(std::string_view text);

  // Union of category names over all entries matching `token`. Exact
  // patterns match equal tokens; a wildcard pattern "abc*" matches any
  // token with prefix "abc", including "abc" itself. Empty set if no match.
  std::set<std::string> categories_of(std::string_view token) const;
  std::vector<int> category_ids_of(std::string_view token) const;

  // Oracle path: same contract as category_ids_of, computed by scanning
  // every entry. Kept for equivalence tests; not used in production code.
  std::vector<int> match_brute_force(std::string_view token) const;

  bool matches(std::string_view token) const { return !category_ids_of(token).empty(); }

  const std::map<int, std::string>& category_names() const { return category_names_; }
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  const std::vector<int>& category_order() const { return category_order_; }

  // Canonical ".dic" text; parsing the fixture and serializing it back
  // reproduces the input byte for byte.
  std::string to_dic_text() const;

  // Canonical JSON form (sorted keys) for debugging and golden tests.
  std::string to_json() const;

 private:
  struct TrieNode {
    std::map<char, int> children;
    std::vector<int> exact_entry;   // entries whose full pattern ends here
    std::vector<int> prefix_entry;  // wildcard entries whose stem ends here
  };

  void build_trie();
  void insert_pattern(const std::string& key, int entry_index, bool wildcard);

  std::map<int, std::string> category_names_;
  std::vector<int> category_order_;  // ids in file order
  std::vector<LexiconEntry> entries_;
  std::vector<TrieNode> trie_;
};

// Ordered list of distinct lowercase tokens that match the lexicon,
// in order of first occurrence across the posts.
struct EntitySet {
  std::vector<std::string> entities;
  std::size_t size() const { return entities.size(); }
};

EntitySet extract_entities(const Lexicon& lexicon,
                           const std::vector<std::vector<std::string>>& posts);

}  // namespace den

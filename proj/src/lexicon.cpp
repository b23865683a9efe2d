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

#include "den/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "den/error.hpp"

namespace den {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

int parse_category_id(const std::string& field, std::size_t line_no) {
  int id = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
  if (ec != std::errc() || ptr != field.data() + field.size() || id <= 0) {
    throw DataError("dic line " + std::to_string(line_no) + ": bad category id '" + field + "'");
  }
  return id;
}

}  // namespace

Lexicon Lexicon::parse_dic(std::string_view text) {
  Lexicon lex;

  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t nl = text.find('\n', start);
      std::string_view line =
          nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
    // a trailing newline leaves one empty pseudo-line; drop it
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
  }

  enum class Section { Preamble, Categories, Entries };
  Section section = Section::Preamble;
  std::unordered_set<std::string> seen_patterns;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t line_no = i + 1;
    if (line.empty()) continue;

    if (line == "%") {
      switch (section) {
        case Section::Preamble: section = Section::Categories; break;
        case Section::Categories: section = Section::Entries; break;
        case Section::Entries:
          throw DataError("dic line " + std::to_string(line_no) + ": unexpected '%'");
      }
      continue;
    }

    if (section == Section::Preamble) {
      throw DataError("dic line " + std::to_string(line_no) +
                      ": expected '%' before category section");
    }

    std::vector<std::string> fields = split_tabs(line);

    if (section == Section::Categories) {
      if (fields.size() != 2 || fields[1].empty()) {
        throw DataError("dic line " + std::to_string(line_no) +
                        ": category lines must be 'ID<TAB>name'");
      }
      int id = parse_category_id(fields[0], line_no);
      if (lex.category_names_.count(id)) {
        throw DataError("dic line " + std::to_string(line_no) + ": duplicate category id " +
                        std::to_string(id));
      }
      lex.category_names_[id] = fields[1];
      lex.category_order_.push_back(id);
      continue;
    }

    // entry line: pattern<TAB>ID[<TAB>ID...]
    if (fields.size() < 2 || fields[0].empty()) {
      throw DataError("dic line " + std::to_string(line_no) +
                      ": entry lines must be 'pattern<TAB>ID[<TAB>ID...]'");
    }
    LexiconEntry entry;
    entry.pattern = lower_ascii(fields[0]);

    if (entry.pattern == "*") {
      throw DataError("dic line " + std::to_string(line_no) + ": bare '*' pattern");
    }
    std::size_t star = entry.pattern.find('*');
    if (star != std::string::npos) {
      if (star != entry.pattern.size() - 1) {
        throw DataError("dic line " + std::to_string(line_no) +
                        ": '*' allowed only as the final character");
      }
      entry.wildcard = true;
      entry.pattern.pop_back();
    }

    std::string key = entry.pattern + (entry.wildcard ? "*" : "");
    if (!seen_patterns.insert(key).second) {
      throw DataError("dic line " + std::to_string(line_no) + ": duplicate pattern '" + key + "'");
    }

    for (std::size_t f = 1; f < fields.size(); ++f) {
      int id = parse_category_id(fields[f], line_no);
      if (!lex.category_names_.count(id)) {
        throw DataError("dic line " + std::to_string(line_no) + ": unknown category " +
                        std::to_string(id));
      }
      entry.category_ids.push_back(id);
    }
    std::sort(entry.category_ids.begin(), entry.category_ids.end());
    entry.category_ids.erase(
        std::unique(entry.category_ids.begin(), entry.category_ids.end()),
        entry.category_ids.end());
    lex.entries_.push_back(std::move(entry));
  }

  if (section == Section::Preamble) {
    throw DataError("dic file has no category section");
  }

  lex.build_trie();
  return lex;
}

void Lexicon::insert_pattern(const std::string& key, int entry_index, bool wildcard) {
  int node = 0;
  for (char c : key) {
    auto it = trie_[node].children.find(c);
    if (it == trie_[node].children.end()) {
      trie_.push_back(TrieNode{});
      it = trie_[node].children.emplace(c, static_cast<int>(trie_.size() - 1)).first;
    }
    node = it->second;
  }
  if (wildcard) {
    trie_[node].prefix_entry.push_back(entry_index);
  } else {
    trie_[node].exact_entry.push_back(entry_index);
  }
}

void Lexicon::build_trie() {
  trie_.clear();
  trie_.push_back(TrieNode{});
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    insert_pattern(entries_[i].pattern, static_cast<int>(i), entries_[i].wildcard);
  }
}

std::vector<int> Lexicon::category_ids_of(std::string_view token) const {
  std::vector<int> ids;
  int node = 0;
  for (std::size_t i = 0; i <= token.size(); ++i) {
    for (int e : trie_[node].prefix_entry) {
      ids.insert(ids.end(), entries_[e].category_ids.begin(), entries_[e].category_ids.end());
    }
    if (i == token.size()) {
      for (int e : trie_[node].exact_entry) {
        ids.insert(ids.end(), entries_[e].category_ids.begin(), entries_[e].category_ids.end());
      }
      break;
    }
    auto it = trie_[node].children.find(token[i]);
    if (it == trie_[node].children.end()) break;
    node = it->second;
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<int> Lexicon::match_brute_force(std::string_view token) const {
  std::vector<int> ids;
  for (const LexiconEntry& e : entries_) {
    bool hit = e.wildcard ? token.substr(0, e.pattern.size()) == e.pattern
                          : token == e.pattern;
    if (hit) ids.insert(ids.end(), e.category_ids.begin(), e.category_ids.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::set<std::string> Lexicon::categories_of(std::string_view token) const {
  std::set<std::string> names;
  for (int id : category_ids_of(token)) {
    names.insert(category_names_.at(id));
  }
  return names;
}

std::string Lexicon::to_dic_text() const {
  std::ostringstream out;
  out << "%\n";
  for (int id : category_order_) {
    out << id << '\t' << category_names_.at(id) << '\n';
  }
  out << "%\n";
  for (const LexiconEntry& e : entries_) {
    out << e.pattern;
    if (e.wildcard) out << '*';
    for (int id : e.category_ids) out << '\t' << id;
    out << '\n';
  }
  return out.str();
}

std::string Lexicon::to_json() const {
  nlohmann::json j;
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [id, name] : category_names_) {
    cats[std::to_string(id)] = name;
  }
  j["categories"] = cats;
  nlohmann::json entries = nlohmann::json::array();
  for (const LexiconEntry& e : entries_) {
    entries.push_back({{"pattern", e.pattern + (e.wildcard ? "*" : "")},
                       {"categories", e.category_ids}});
  }
  j["entries"] = entries;
  return j.dump(2);
}

EntitySet extract_entities(const Lexicon& lexicon,
                           const std::vector<std::vector<std::string>>& posts) {
  EntitySet set;
  std::unordered_set<std::string> seen;
  for (const auto& post : posts) {
    for (const auto& token : post) {
      if (token.empty() || seen.count(token)) continue;
      if (lexicon.matches(token)) {
        set.entities.push_back(token);
      }
      seen.insert(token);
    }
  }
  return set;
}

}  // namespace den

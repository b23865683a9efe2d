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

#include "den/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include <json.hpp>

namespace den {

namespace {

char lower_char(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower_char(c);
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

// RFC-4180-ish CSV: quoted fields may contain commas, newlines, and ""
// escapes. Returns rows of fields; `row_line` records the physical line a
// row started on for error messages.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',': end_field(); break;
      case '\r': break;
      case '\n': end_row(); break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<std::string> split_posts_field(const std::string& field) {
  std::vector<std::string> posts;
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t sep = field.find("|||", start);
    std::string post = sep == std::string::npos ? field.substr(start)
                                                : field.substr(start, sep - start);
    if (!is_blank(post)) posts.push_back(std::move(post));
    if (sep == std::string::npos) break;
    start = sep + 3;
  }
  return posts;
}

const std::set<std::string>& mbti_code_stoplist() {
  static const std::set<std::string> codes = [] {
    std::set<std::string> s;
    for (const std::string& code : all_mbti_codes()) s.insert(lower_ascii(code));
    return s;
  }();
  return codes;
}

}  // namespace

std::vector<RawUser> import_kaggle_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows = parse_csv(text);
  if (rows.empty()) throw DataError("csv: empty file");
  if (rows[0].size() != 2 || lower_ascii(rows[0][0]) != "type" ||
      lower_ascii(rows[0][1]) != "posts") {
    throw DataError("csv: expected header 'type,posts'");
  }

  std::vector<RawUser> users;
  users.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) {
      throw DataError("csv row " + std::to_string(r + 1) + ": expected 2 fields, got " +
                      std::to_string(rows[r].size()));
    }
    RawUser user;
    try {
      mbti_to_bits(rows[r][0]);
    } catch (const DataError& e) {
      throw DataError("csv row " + std::to_string(r + 1) + ": " + e.what());
    }
    for (char c : rows[r][0]) user.mbti.push_back(static_cast<char>(std::toupper(
        static_cast<unsigned char>(c))));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%05zu", r);
    user.user_id = buf;
    user.posts = split_posts_field(rows[r][1]);
    users.push_back(std::move(user));
  }
  return users;
}

std::vector<RawUser> read_jsonl(std::string_view text) {
  std::vector<RawUser> users;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (is_blank(line)) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    RawUser user;
    if (!j.contains("user_id") || !j["user_id"].is_string()) {
      throw DataError("jsonl line " + std::to_string(line_no) + ": missing string 'user_id'");
    }
    user.user_id = j["user_id"].get<std::string>();
    if (j.contains("mbti") && !j["mbti"].is_null()) {
      user.mbti = j["mbti"].get<std::string>();
      mbti_to_bits(user.mbti);  // validate
    }
    if (!j.contains("posts") || !j["posts"].is_array()) {
      throw DataError("jsonl line " + std::to_string(line_no) + ": missing array 'posts'");
    }
    for (const auto& p : j["posts"]) {
      if (!p.is_string()) {
        throw DataError("jsonl line " + std::to_string(line_no) + ": posts must be strings");
      }
      user.posts.push_back(p.get<std::string>());
    }
    if (j.contains("post_vectors")) {
      for (const auto& v : j["post_vectors"]) {
        user.post_vectors.push_back(v.get<std::vector<double>>());
      }
      if (user.post_vectors.size() != user.posts.size()) {
        throw DataError("jsonl line " + std::to_string(line_no) +
                        ": post_vectors count does not match posts");
      }
    }
    users.push_back(std::move(user));
  }
  return users;
}

std::string to_jsonl(const std::vector<RawUser>& users) {
  std::string out;
  for (const RawUser& user : users) {
    nlohmann::json j;
    j["user_id"] = user.user_id;
    if (!user.mbti.empty()) j["mbti"] = user.mbti;
    j["posts"] = user.posts;
    if (!user.post_vectors.empty()) j["post_vectors"] = user.post_vectors;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::array<int, 4> mbti_to_bits(std::string_view code) {
  if (code.size() != 4) {
    throw DataError("invalid MBTI code '" + std::string(code) + "': need 4 letters");
  }
  static constexpr const char* pairs[4] = {"ei", "sn", "tf", "jp"};
  std::array<int, 4> bits{};
  for (int t = 0; t < 4; ++t) {
    const char c = lower_char(code[t]);
    if (c == pairs[t][0]) {
      bits[t] = 0;
    } else if (c == pairs[t][1]) {
      bits[t] = 1;
    } else {
      throw DataError("invalid MBTI code '" + std::string(code) + "': letter " +
                      std::to_string(t + 1) + " must be one of '" + pairs[t] + "'");
    }
  }
  return bits;
}

std::string bits_to_mbti(const std::array<int, 4>& bits) {
  static constexpr const char* pairs[4] = {"EI", "SN", "TF", "JP"};
  std::string code;
  for (int t = 0; t < 4; ++t) {
    if (bits[t] != 0 && bits[t] != 1) throw DataError("bits_to_mbti: labels must be 0/1");
    code.push_back(pairs[t][bits[t]]);
  }
  return code;
}

const std::array<std::string, 16>& all_mbti_codes() {
  static const std::array<std::string, 16> codes = [] {
    std::array<std::string, 16> out;
    int i = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) out[i++] = bits_to_mbti({a, b, c, d});
    return out;
  }();
  return codes;
}

std::vector<std::string> tokenize(std::string_view post) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < post.size()) {
    while (i < post.size() && std::isspace(static_cast<unsigned char>(post[i]))) ++i;
    std::size_t start = i;
    while (i < post.size() && !std::isspace(static_cast<unsigned char>(post[i]))) ++i;
    if (i == start) break;
    std::string_view word = post.substr(start, i - start);

    auto is_punct = [](char c) {
      unsigned char u = static_cast<unsigned char>(c);
      return u < 128 && std::ispunct(u);
    };
    while (!word.empty() && is_punct(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_punct(word.back())) word.remove_suffix(1);
    if (word.empty()) continue;
    tokens.push_back(lower_ascii(word));
  }
  return tokens;
}

std::vector<std::string> scrub_labels(std::vector<std::string> tokens,
                                      const std::set<std::string>& extra_stoplist) {
  const std::set<std::string>& codes = mbti_code_stoplist();
  auto hit = [&](const std::string& t) {
    return codes.count(t) > 0 || extra_stoplist.count(t) > 0;
  };
  tokens.erase(std::remove_if(tokens.begin(), tokens.end(), hit), tokens.end());
  return tokens;
}

int Vocab::id_of(std::string_view token) const {
  auto it = token_to_id.find(std::string(token));
  return it == token_to_id.end() ? kUnk : it->second;
}

std::string Vocab::to_tsv() const {
  std::ostringstream out;
  for (std::size_t id = 0; id < id_to_token.size(); ++id) {
    out << id_to_token[id] << '\t' << id << '\n';
  }
  return out.str();
}

Vocab Vocab::from_tsv(std::string_view text) {
  Vocab vocab;
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

    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("vocab line " + std::to_string(line_no) + ": expected 'token<TAB>id'");
    }
    std::string token(line.substr(0, tab));
    std::string_view id_field = line.substr(tab + 1);
    int id = -1;
    auto [ptr, ec] = std::from_chars(id_field.data(), id_field.data() + id_field.size(), id);
    if (ec != std::errc() || ptr != id_field.data() + id_field.size() || id < 0) {
      throw DataError("vocab line " + std::to_string(line_no) + ": bad id");
    }
    if (static_cast<std::size_t>(id) != vocab.id_to_token.size()) {
      throw DataError("vocab line " + std::to_string(line_no) + ": ids must be dense from 0");
    }
    vocab.id_to_token.push_back(token);
    vocab.token_to_id[token] = id;
  }
  if (vocab.id_to_token.size() < 3 || vocab.id_to_token[0] != "<pad>" ||
      vocab.id_to_token[1] != "<unk>" || vocab.id_to_token[2] != "<cls>") {
    throw DataError("vocab: reserved rows <pad>, <unk>, <cls> must occupy ids 0..2");
  }
  return vocab;
}

UserDocument prepare_document(const RawUser& user, std::size_t max_posts,
                              std::size_t max_post_tokens,
                              const std::set<std::string>& extra_stoplist) {
  if (user.posts.empty()) {
    throw DataError("user '" + user.user_id + "' has no posts");
  }
  if (!user.post_vectors.empty() && user.post_vectors.size() != user.posts.size()) {
    throw DataError("user '" + user.user_id + "': post_vectors count does not match posts");
  }

  UserDocument doc;
  doc.user_id = user.user_id;
  if (!user.mbti.empty()) doc.labels = mbti_to_bits(user.mbti);

  const std::size_t n_posts = std::min(user.posts.size(), max_posts);
  for (std::size_t i = 0; i < n_posts; ++i) {
    std::vector<std::string> tokens = scrub_labels(tokenize(user.posts[i]), extra_stoplist);
    if (tokens.size() > max_post_tokens) tokens.resize(max_post_tokens);
    doc.raw_posts.push_back(std::move(tokens));
    if (!user.post_vectors.empty()) doc.post_vectors.push_back(user.post_vectors[i]);
  }
  return doc;
}

Vocab build_vocab(const std::vector<UserDocument>& train_users, int min_freq) {
  std::map<std::string, std::size_t> freq;
  for (const UserDocument& doc : train_users) {
    for (const auto& post : doc.raw_posts) {
      for (const std::string& token : post) ++freq[token];
    }
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [token, count] : freq) {
    if (count >= static_cast<std::size_t>(min_freq)) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab vocab;
  vocab.min_freq = min_freq;
  vocab.id_to_token = {"<pad>", "<unk>", "<cls>"};
  for (const auto& [token, count] : kept) {
    vocab.token_to_id[token] = static_cast<int>(vocab.id_to_token.size());
    vocab.id_to_token.push_back(token);
  }
  vocab.token_to_id["<pad>"] = Vocab::kPad;
  vocab.token_to_id["<unk>"] = Vocab::kUnk;
  vocab.token_to_id["<cls>"] = Vocab::kCls;
  return vocab;
}

void apply_vocab(UserDocument& doc, const Vocab& vocab) {
  doc.posts.clear();
  doc.posts.reserve(doc.raw_posts.size());
  for (const auto& post : doc.raw_posts) {
    std::vector<int> ids;
    ids.reserve(post.size());
    for (const std::string& token : post) ids.push_back(vocab.id_of(token));
    doc.posts.push_back(std::move(ids));
  }
}

void apply_vocab(std::vector<UserDocument>& docs, const Vocab& vocab) {
  for (UserDocument& doc : docs) apply_vocab(doc, vocab);
}

}  // namespace den

// Copyright 2026 The QMS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qms/storage/document_store.hpp"

#include "qms/common/error.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <shared_mutex>
#include <sstream>

namespace qms::storage {
namespace fs = std::filesystem;

struct DocumentStore::Collection {
  std::string name;
  fs::path dir;
  mutable std::shared_mutex mu;
  std::map<std::string, Document, std::less<>> docs;
  std::uint64_t next_sequence = 1;
};

namespace {

bool valid_collection_name(std::string_view name) {
  if (name.empty() || name.size() > 128) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

void require_finite(const Value& v) {
  switch (v.type()) {
    case Value::value_t::number_float:
      if (!std::isfinite(v.get<double>())) {
        throw Error(ErrorCode::kInvalidArgument, "document contains a non-finite number");
      }
      break;
    case Value::value_t::object:
    case Value::value_t::array:
      for (const auto& child : v) require_finite(child);
      break;
    case Value::value_t::binary:
      throw Error(ErrorCode::kInvalidArgument, "binary values are not storable");
    default:
      break;
  }
}

Value envelope(const Document& doc) {
  return {{"id", doc.id},
          {"collection", doc.collection},
          {"created_at", format_timestamp(doc.created_at)},
          {"updated_at", format_timestamp(doc.updated_at)},
          {"sequence", doc.sequence},
          {"body", doc.body}};
}

Document from_envelope(const Value& v) {
  Document doc;
  doc.id = v.at("id").get<std::string>();
  doc.collection = v.at("collection").get<std::string>();
  doc.created_at = parse_timestamp(v.at("created_at").get<std::string>());
  doc.updated_at = parse_timestamp(v.at("updated_at").get<std::string>());
  doc.sequence = v.at("sequence").get<std::uint64_t>();
  doc.body = v.at("body");
  return doc;
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kUnavailable, "write failed: " + path.string());
    }
    off += static_cast<std::size_t>(n);
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

// Serialization used on disk; also applied to detect bodies json can't encode
// (invalid UTF-8) before anything is written.
std::string serialize(const Value& v) {
  try {
    return v.dump(2);
  } catch (const Value::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("body not serializable: ") + e.what());
  }
}

}  // namespace

std::string generate_id() {
  static std::mutex mu;
  static std::mt19937_64 engine = [] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }();
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t hi, lo;
  {
    std::lock_guard lock(mu);
    hi = engine();
    lo = engine();
  }
  std::string id(24, '0');
  for (int i = 0; i < 8; ++i) id[i] = kHex[(hi >> (4 * i)) & 0xF];
  for (int i = 0; i < 16; ++i) id[8 + i] = kHex[(lo >> (4 * i)) & 0xF];
  return id;
}

bool is_valid_id(std::string_view id) {
  return id.size() == 24 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

DocumentStore::DocumentStore(fs::path root, Clock clock)
    : root_(std::move(root)), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw Error(ErrorCode::kUnavailable, "cannot open store at " + root_.string());
  }
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && valid_collection_name(entry.path().filename().string())) {
      collection(entry.path().filename().string());
    }
  }
}

DocumentStore::~DocumentStore() = default;

DocumentStore::Collection& DocumentStore::collection(std::string_view name) const {
  if (!valid_collection_name(name)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid collection name '" + std::string(name) + "'");
  }
  std::lock_guard lock(collections_mu_);
  if (auto it = collections_.find(name); it != collections_.end()) return *it->second;

  auto c = std::make_unique<Collection>();
  c->name = std::string(name);
  c->dir = root_ / c->name;
  if (fs::is_directory(c->dir)) {
    for (const auto& entry : fs::directory_iterator(c->dir)) {
      const auto& p = entry.path();
      if (p.extension() == ".tmp") {
        // Interrupted write: the previous version (if any) is still intact.
        std::error_code ec;
        fs::remove(p, ec);
        continue;
      }
      if (p.extension() != ".json" || !is_valid_id(p.stem().string())) continue;
      std::ifstream in(p, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      Document doc;
      try {
        doc = from_envelope(Value::parse(buf.str()));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kUnavailable, "corrupt document " + p.string() + ": " + e.what());
      }
      c->next_sequence = std::max(c->next_sequence, doc.sequence + 1);
      c->docs.emplace(doc.id, std::move(doc));
    }
  }
  auto& ref = *c;
  collections_.emplace(ref.name, std::move(c));
  return ref;
}

void DocumentStore::persist(const Collection& c, const Document& doc) const {
  std::error_code ec;
  fs::create_directories(c.dir, ec);
  if (ec || !fs::is_directory(c.dir)) {
    throw Error(ErrorCode::kUnavailable, "cannot create collection directory " + c.dir.string());
  }
  const auto target = c.dir / (doc.id + ".json");
  const auto tmp = c.dir / (doc.id + ".json.tmp");
  const auto data = serialize(envelope(doc));

  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kUnavailable, "cannot open " + tmp.string());
  try {
    write_all(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    throw Error(ErrorCode::kUnavailable, "cannot flush " + tmp.string());
  }
  if (::rename(tmp.c_str(), target.c_str()) != 0) {
    throw Error(ErrorCode::kUnavailable, "cannot commit " + target.string());
  }
  fsync_dir(c.dir);
}

std::string DocumentStore::insert(std::string_view name, Value body) {
  require_finite(body);
  serialize(body);
  auto& c = collection(name);
  std::unique_lock lock(c.mu);
  Document doc;
  do {
    doc.id = generate_id();
  } while (c.docs.contains(doc.id));
  doc.collection = c.name;
  doc.body = std::move(body);
  doc.created_at = doc.updated_at = clock_();
  doc.sequence = c.next_sequence;
  persist(c, doc);
  ++c.next_sequence;
  auto id = doc.id;
  c.docs.emplace(id, std::move(doc));
  return id;
}

std::optional<Document> DocumentStore::get(std::string_view name, std::string_view id) const {
  if (!is_valid_id(id)) return std::nullopt;
  auto& c = collection(name);
  std::shared_lock lock(c.mu);
  if (auto it = c.docs.find(id); it != c.docs.end()) return it->second;
  return std::nullopt;
}

std::vector<Document> DocumentStore::query(std::string_view name, const Value& filter) const {
  if (!filter.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "query filter must be an object");
  }
  auto& c = collection(name);
  std::vector<Document> out;
  {
    std::shared_lock lock(c.mu);
    for (const auto& [id, doc] : c.docs) {
      const bool match = std::all_of(filter.items().begin(), filter.items().end(), [&](const auto& kv) {
        if (!doc.body.is_object()) return false;
        auto it = doc.body.find(kv.key());
        return it != doc.body.end() && *it == kv.value();
      });
      if (match) out.push_back(doc);
    }
  }
  std::sort(out.begin(), out.end(), [](const Document& a, const Document& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.sequence < b.sequence;
  });
  return out;
}

bool DocumentStore::update(std::string_view name, std::string_view id, Value body) {
  require_finite(body);
  serialize(body);
  if (!is_valid_id(id)) return false;
  auto& c = collection(name);
  std::unique_lock lock(c.mu);
  auto it = c.docs.find(id);
  if (it == c.docs.end()) return false;
  Document next = it->second;
  next.body = std::move(body);
  next.updated_at = std::max(clock_(), next.created_at);
  persist(c, next);
  it->second = std::move(next);
  return true;
}

bool DocumentStore::remove(std::string_view name, std::string_view id) {
  if (!is_valid_id(id)) return false;
  auto& c = collection(name);
  std::unique_lock lock(c.mu);
  auto it = c.docs.find(id);
  if (it == c.docs.end()) return false;
  std::error_code ec;
  fs::remove(c.dir / (it->first + ".json"), ec);
  if (ec) throw Error(ErrorCode::kUnavailable, "cannot delete document " + it->first);
  fsync_dir(c.dir);
  c.docs.erase(it);
  return true;
}

std::vector<std::string> DocumentStore::collections() const {
  std::lock_guard lock(collections_mu_);
  std::vector<std::string> names;
  for (const auto& [name, c] : collections_) names.push_back(name);
  return names;
}

}  // namespace qms::storage

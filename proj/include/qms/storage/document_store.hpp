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

#pragma once

#include "qms/common/time.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qms::storage {

using Value = nlohmann::json;

struct Document {
  std::string id;
  std::string collection;
  Value body;
  Timestamp created_at;
  Timestamp updated_at;
  /// Insertion order within the collection; breaks created_at ties.
  std::uint64_t sequence = 0;
};

/// 24 lowercase hex characters from a cryptographically seeded generator.
std::string generate_id();
bool is_valid_id(std::string_view id);

/// Embedded document store rooted at one directory. Each collection is a
/// subdirectory holding one `<id>.json` file per document. Files are written
/// to a temporary name, flushed and renamed into place, so a reader (or a
/// restart after a crash) sees either the previous or the new version.
///
/// Writes within a collection are serialized; reads run concurrently with
/// each other and only ever observe complete documents.
class DocumentStore {
 public:
  explicit DocumentStore(std::filesystem::path root, Clock clock = system_clock());
  ~DocumentStore();

  DocumentStore(const DocumentStore&) = delete;
  DocumentStore& operator=(const DocumentStore&) = delete;

  /// Returns the fresh id. Throws kInvalidArgument for a bad collection name
  /// or non-serializable body, kUnavailable on I/O failure.
  std::string insert(std::string_view collection, Value body);

  std::optional<Document> get(std::string_view collection, std::string_view id) const;

  /// Documents whose top-level fields equal every entry of `filter` (a JSON
  /// object), ordered by creation. An empty filter matches everything.
  std::vector<Document> query(std::string_view collection,
                              const Value& filter = Value::object()) const;

  /// Full replacement. Returns false when the id does not exist.
  bool update(std::string_view collection, std::string_view id, Value body);

  bool remove(std::string_view collection, std::string_view id);

  std::vector<std::string> collections() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  struct Collection;

  Collection& collection(std::string_view name) const;
  void persist(const Collection& c, const Document& doc) const;

  std::filesystem::path root_;
  Clock clock_;
  mutable std::mutex collections_mu_;
  mutable std::map<std::string, std::unique_ptr<Collection>, std::less<>> collections_;
};

}  // namespace qms::storage

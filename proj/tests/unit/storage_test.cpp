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

#include "qms/common/error.hpp"
#include "qms/storage/document_store.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <thread>

namespace qms::storage {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

// Clock that advances one second per call, for deterministic ordering.
Clock stepping_clock(Timestamp start = Timestamp{} + std::chrono::hours(24 * 365 * 50)) {
  auto t = std::make_shared<Timestamp>(start);
  return [t] { return *t += std::chrono::seconds(1); };
}

Clock frozen_clock() {
  const Timestamp t = Timestamp{} + std::chrono::hours(24 * 365 * 50);
  return [t] { return t; };
}

TEST(DocumentIdTest, FormatIsTwentyFourLowercaseHex) {
  const auto id = generate_id();
  EXPECT_TRUE(is_valid_id(id)) << id;
  EXPECT_FALSE(is_valid_id("ABCDEF0123456789abcdef01"));
  EXPECT_FALSE(is_valid_id("0123"));
  EXPECT_FALSE(is_valid_id("../../etc/passwd00000000"));
}

TEST(DocumentIdTest, NoCollisionsInOneHundredThousandDraws) {
  std::set<std::string> seen;
  for (int i = 0; i < 100000; ++i) ASSERT_TRUE(seen.insert(generate_id()).second);
}

TEST(DocumentStoreTest, InsertGetRoundTrip) {
  TempDir dir;
  DocumentStore store(dir.path(), stepping_clock());
  const Value body = {{"name", "demo"}, {"scores", {0.5, 1.0}}, {"nested", {{"k", nullptr}}}};
  const auto id = store.insert("models", body);
  const auto doc = store.get("models", id);
  ASSERT_TRUE(doc.has_value());
  EXPECT_EQ(doc->body, body);
  EXPECT_EQ(doc->collection, "models");
  EXPECT_EQ(doc->created_at, doc->updated_at);
  EXPECT_TRUE(fs::exists(dir.path() / "models" / (id + ".json")));
}

TEST(DocumentStoreTest, MissingAndMalformedIdsAreNotFound) {
  TempDir dir;
  DocumentStore store(dir.path());
  EXPECT_FALSE(store.get("models", generate_id()).has_value());
  EXPECT_FALSE(store.get("models", "not-an-id").has_value());
  EXPECT_FALSE(store.update("models", generate_id(), Value::object()));
  EXPECT_FALSE(store.remove("models", "../x"));
}

TEST(DocumentStoreTest, RejectsBadCollectionNamesAndNonFiniteNumbers) {
  TempDir dir;
  DocumentStore store(dir.path());
  EXPECT_THROW(store.insert("../escape", Value::object()), Error);
  EXPECT_THROW(store.insert("", Value::object()), Error);
  EXPECT_THROW(store.insert("c", Value{{"x", std::numeric_limits<double>::infinity()}}), Error);
  EXPECT_THROW(store.insert("c", Value{{"x", std::string("\xff\xfe")}}), Error);
  EXPECT_TRUE(store.query("c").empty());
}

TEST(DocumentStoreTest, SurvivesReopen) {
  TempDir dir;
  std::string a, b;
  {
    DocumentStore store(dir.path(), stepping_clock());
    a = store.insert("users", {{"email", "a@example.com"}});
    b = store.insert("users", {{"email", "b@example.com"}});
    ASSERT_TRUE(store.update("users", a, {{"email", "a2@example.com"}}));
  }
  DocumentStore reopened(dir.path(), stepping_clock());
  const auto docs = reopened.query("users");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].id, a);
  EXPECT_EQ(docs[0].body["email"], "a2@example.com");
  EXPECT_GT(docs[0].updated_at, docs[0].created_at);
  EXPECT_EQ(docs[1].id, b);
  const auto c = reopened.insert("users", {{"email", "c@example.com"}});
  EXPECT_GT(reopened.get("users", c)->sequence, docs[1].sequence);
  EXPECT_EQ(reopened.collections(), (std::vector<std::string>{"users"}));
}

TEST(DocumentStoreTest, QueryFiltersOnTopLevelFieldsInCreationOrder) {
  TempDir dir;
  // A frozen clock makes every created_at equal; order must still follow
  // insertion.
  DocumentStore store(dir.path(), frozen_clock());
  std::vector<std::string> mine;
  for (int i = 0; i < 20; ++i) {
    const auto id = store.insert("assessments", {{"user_id", i % 2 ? "u1" : "u2"}, {"n", i}});
    if (i % 2) mine.push_back(id);
  }
  const auto docs = store.query("assessments", {{"user_id", "u1"}});
  ASSERT_EQ(docs.size(), mine.size());
  for (std::size_t i = 0; i < docs.size(); ++i) EXPECT_EQ(docs[i].id, mine[i]);
  EXPECT_TRUE(store.query("assessments", {{"user_id", "u3"}}).empty());
  EXPECT_EQ(store.query("assessments", {{"user_id", "u1"}, {"n", 3}}).size(), 1u);
  EXPECT_THROW(store.query("assessments", Value::array()), Error);
}

TEST(DocumentStoreTest, RemoveDeletesFile) {
  TempDir dir;
  DocumentStore store(dir.path());
  const auto id = store.insert("sessions", {{"k", 1}});
  EXPECT_TRUE(store.remove("sessions", id));
  EXPECT_FALSE(store.get("sessions", id).has_value());
  EXPECT_FALSE(fs::exists(dir.path() / "sessions" / (id + ".json")));
  DocumentStore reopened(dir.path());
  EXPECT_TRUE(reopened.query("sessions").empty());
}

// A crash between writing the temporary file and renaming it leaves the
// committed version in place; the stray file is discarded on open.
TEST(DocumentStoreTest, InterruptedWriteKeepsPreviousVersion) {
  TempDir dir;
  std::string id;
  {
    DocumentStore store(dir.path());
    id = store.insert("models", {{"version", 1}});
  }
  const auto tmp = dir.path() / "models" / (id + ".json.tmp");
  {
    std::ofstream partial(tmp);
    partial << R"({"id":")" << id << R"(","body":{"vers)";
  }
  DocumentStore reopened(dir.path());
  const auto doc = reopened.get("models", id);
  ASSERT_TRUE(doc.has_value());
  EXPECT_EQ(doc->body["version"], 1);
  EXPECT_FALSE(fs::exists(tmp));
}

TEST(DocumentStoreTest, CorruptCommittedFileIsReported) {
  TempDir dir;
  fs::create_directories(dir.path() / "models");
  std::ofstream(dir.path() / "models" / (generate_id() + ".json")) << "{not json";
  try {
    DocumentStore store(dir.path());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnavailable);
  }
}

TEST(DocumentStoreTest, UnwritableRootIsUnavailable) {
  TempDir dir;
  const auto file = dir.path() / "plain-file";
  std::ofstream(file) << "x";
  try {
    DocumentStore store(file);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnavailable);
  }
}

TEST(DocumentStoreTest, ConcurrentWritersAndReaders) {
  TempDir dir;
  DocumentStore store(dir.path());
  constexpr int kWriters = 100, kPerWriter = 5;
  std::vector<std::thread> threads;
  std::vector<std::vector<std::string>> ids(kWriters);
  std::atomic<bool> torn{false};
  for (int w = 0; w < kWriters; ++w) {
    threads.emplace_back([&, w] {
      for (int i = 0; i < kPerWriter; ++i) {
        ids[w].push_back(store.insert("stress", {{"writer", w}, {"i", i}, {"payload", std::string(256, 'x')}}));
      }
      for (const auto& d : store.query("stress")) {
        if (!d.body.contains("payload") || d.body["payload"].get<std::string>().size() != 256) torn = true;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_FALSE(torn);
  const auto all = store.query("stress");
  ASSERT_EQ(all.size(), static_cast<std::size_t>(kWriters * kPerWriter));
  std::set<std::uint64_t> sequences;
  for (const auto& d : all) sequences.insert(d.sequence);
  EXPECT_EQ(sequences.size(), all.size());
  // Per-writer insertion order is preserved.
  for (int w = 0; w < kWriters; ++w) {
    const auto mine = store.query("stress", {{"writer", w}});
    ASSERT_EQ(mine.size(), static_cast<std::size_t>(kPerWriter));
    for (int i = 0; i < kPerWriter; ++i) EXPECT_EQ(mine[i].id, ids[w][i]);
  }
  DocumentStore reopened(dir.path());
  EXPECT_EQ(reopened.query("stress").size(), all.size());
}

}  // namespace
}  // namespace qms::storage

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
#include "qms/common/http.hpp"
#include "qms/gateway/gateway.hpp"
#include "qms/gateway/route_table.hpp"
#include "support/temp_dir.hpp"
#include "support/test_server.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <thread>

namespace qms::gateway {
namespace {

using testing::TestServer;

RouteTable routes_from(const std::string& text) { return RouteTable::from_entries(parse_env(text, "routes.env"), "routes.env"); }

TEST(RouteTableTest, ParsesServiceLines) {
  const auto t = routes_from(
      "# services\nSERVICE_RMS=http://127.0.0.1:7002\nDATA_DIR=/tmp/x\nSERVICE_Auth=http://localhost:7001/\n");
  EXPECT_EQ(t.entries().size(), 2u);
  EXPECT_EQ(t.find("rms"), "http://127.0.0.1:7002");
  EXPECT_EQ(t.find("auth"), "http://localhost:7001");
  EXPECT_FALSE(t.find("RMS"));
  EXPECT_FALSE(t.find("data_dir"));
  EXPECT_EQ(t.loaded_from(), "routes.env");
}

TEST(RouteTableTest, DuplicatePrefixNamesBothLines) {
  try {
    routes_from("SERVICE_RMS=http://127.0.0.1:1\n\nSERVICE_rms=http://127.0.0.1:2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.details()["reason"], "duplicate-prefix");
    EXPECT_EQ(e.details()["lines"], nlohmann::json::array({1, 3}));
    EXPECT_NE(std::string(e.what()).find("lines 1 and 3"), std::string::npos);
  }
}

TEST(RouteTableTest, RejectsMalformedLines) {
  auto line_of = [](const std::string& text) {
    try {
      routes_from(text);
    } catch (const Error& e) {
      return e.details()["line"].get<int>();
    }
    return 0;
  };
  EXPECT_EQ(line_of("SERVICE_RMS=http://a:1\nSERVICE_X=not a url\n"), 2);
  EXPECT_EQ(line_of("SERVICE_X=ftp://host:1\n"), 1);
  EXPECT_EQ(line_of("SERVICE_=http://a:1\n"), 1);
  EXPECT_EQ(line_of("# ok\nSERVICE_RMS http://a:1\n"), 2);
}

TEST(RouteTableTest, LoadsFromFile) {
  testing::TempDir dir;
  const auto path = dir.path() / "qms.env";
  std::ofstream(path) << "SERVICE_STUB=http://127.0.0.1:9\n";
  EXPECT_EQ(RouteTable::load(path).find("stub"), "http://127.0.0.1:9");
  try {
    RouteTable::load(dir.path() / "missing.env");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnavailable);
  }
}

// Stand-ins: an auth service that knows one token and an echo service.
class GatewayTest : public ::testing::Test {
 protected:
  GatewayTest() {
    auto& auth = auth_.server();
    auth.Get("/auth/verify", [](const httplib::Request& req, httplib::Response& res) {
      if (http::bearer_token(req) == "good-token") {
        http::send_json(res, 200, {{"user_id", "u-alice"}});
      } else {
        http::send_json(res, 401, Error(ErrorCode::kUnauthorized, "bad token").to_json());
      }
    });
    auth.Post("/auth/signin", [](const httplib::Request& req, httplib::Response& res) {
      http::send_json(res, 200, {{"token", "good-token"}, {"saw_user", req.get_header_value(http::kUserIdHeader)}});
    });
    auth_.start();

    auto& stub = stub_.server();
    stub.Post("/stub/echo", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(req.body, req.get_header_value("Content-Type"));
    });
    stub.Get("/stub/whoami", [](const httplib::Request& req, httplib::Response& res) {
      http::send_json(res, 200, {{"user", req.get_header_value(http::kUserIdHeader)},
                                 {"users", req.get_header_value_count(http::kUserIdHeader)},
                                 {"target", req.target}});
    });
    stub.Get(R"(/stub/status/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      res.status = std::stoi(req.matches[1].str());
      res.set_content(req.get_param_value("body"), "text/plain");
    });
    stub.Get("/stub/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content("late", "text/plain");
    });
    stub_.start();
  }

  void start_gateway(const std::string& extra = "", std::chrono::milliseconds timeout = std::chrono::seconds(30)) {
    const auto text = "SERVICE_AUTH=" + auth_.url() + "\nSERVICE_STUB=" + stub_.url() + "\n" + extra;
    gateway_ = std::make_unique<Gateway>(routes_from(text), GatewayOptions{timeout, {"http://ui.local"}, "auth"});
    server_ = std::make_unique<TestServer>();
    gateway_->register_routes(server_->server());
    server_->start();
  }

  httplib::Client client() { return httplib::Client(server_->url()); }

  TestServer auth_, stub_;
  std::unique_ptr<Gateway> gateway_;
  std::unique_ptr<TestServer> server_;
  const httplib::Headers authorized_{{"Authorization", "Bearer good-token"}};
};

TEST_F(GatewayTest, UnknownPrefixAndMissingToken) {
  start_gateway();
  auto cli = client();
  EXPECT_EQ(cli.Get("/api/unknown/x", authorized_)->status, 404);
  EXPECT_EQ(cli.Get("/api/stub/whoami")->status, 401);
  EXPECT_EQ(cli.Get("/api/stub/whoami", {{"Authorization", "Bearer forged"}})->status, 401);
  EXPECT_EQ(cli.Get("/api/stub/whoami", authorized_)->status, 200);
}

TEST_F(GatewayTest, SigninNeedsNoToken) {
  start_gateway();
  auto r = client().Post("/api/auth/signin", R"({"email":"a@b.c"})", "application/json");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(nlohmann::json::parse(r->body)["saw_user"], "");
}

TEST_F(GatewayTest, MebibyteBodyIsEchoedByteForByte) {
  start_gateway();
  std::mt19937_64 rng(7);
  std::string body(1 << 20, '\0');
  for (auto& c : body) c = static_cast<char>(rng() & 0xff);
  auto r = client().Post("/api/stub/echo", authorized_, body, "application/octet-stream");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "application/octet-stream");
  EXPECT_TRUE(r->body == body);
}

TEST_F(GatewayTest, ClientUserIdIsReplaced) {
  start_gateway();
  auto headers = authorized_;
  headers.emplace(http::kUserIdHeader, "u-mallory");
  auto r = client().Get("/api/stub/whoami?x=1&y=a%20b", headers);
  const auto j = nlohmann::json::parse(r->body);
  EXPECT_EQ(j["user"], "u-alice");
  EXPECT_EQ(j["users"], 1);
  EXPECT_EQ(j["target"], "/stub/whoami?x=1&y=a%20b");
}

// For any upstream (status, body) the client observes the same pair.
TEST_F(GatewayTest, RelaysStatusAndBodyUnchanged) {
  start_gateway();
  auto cli = client();
  std::mt19937 rng(3);
  const std::vector<int> statuses{200, 201, 202, 204, 400, 403, 404, 409, 418, 422, 500, 503};
  for (int i = 0; i < 40; ++i) {
    const int status = statuses[rng() % statuses.size()];
    std::string body;
    if (status != 204) {
      for (int k = 0, n = static_cast<int>(rng() % 40); k < n; ++k) body += static_cast<char>('a' + rng() % 26);
    }
    auto r = cli.Get(http::with_query("/api/stub/status/" + std::to_string(status), {{"body", body}}), authorized_);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, status);
    EXPECT_EQ(r->body, body);
  }
}

TEST_F(GatewayTest, UpstreamFailures) {
  start_gateway("SERVICE_DEAD=http://127.0.0.1:1\n", std::chrono::milliseconds(200));
  auto cli = client();
  EXPECT_EQ(cli.Get("/api/dead/x", authorized_)->status, 502);
  const auto r = cli.Get("/api/stub/slow", authorized_);
  EXPECT_EQ(r->status, 504);
  EXPECT_NE(r->body.find("timeout"), std::string::npos);
  auth_.stop();
  EXPECT_EQ(cli.Get("/api/stub/whoami", authorized_)->status, 502);
}

TEST_F(GatewayTest, Cors) {
  start_gateway();
  auto cli = client();
  auto r = cli.Options("/api/stub/whoami", {{"Origin", "http://ui.local"}});
  EXPECT_EQ(r->status, 204);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "http://ui.local");
  r = cli.Get("/api/stub/whoami", {{"Origin", "http://evil.local"}, {"Authorization", "Bearer good-token"}});
  EXPECT_EQ(r->status, 200);
  EXPECT_FALSE(r->has_header("Access-Control-Allow-Origin"));
}

// Adding a route leaves existing prefixes alone, and a restarted gateway
// behaves like the old one.
TEST_F(GatewayTest, ExtraRouteAndRestart) {
  start_gateway();
  auto before = client().Get("/api/stub/whoami?q=1", authorized_)->body;
  server_->stop();
  start_gateway("SERVICE_EXTRA=http://127.0.0.1:1\n");
  EXPECT_EQ(client().Get("/api/stub/whoami?q=1", authorized_)->body, before);
  EXPECT_EQ(client().Get("/health")->status, 200);
}

}  // namespace
}  // namespace qms::gateway

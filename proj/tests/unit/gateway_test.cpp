#include <atomic>
#include <filesystem>
#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"
#include "yarn/embedding/embedder.hpp"
#include "yarn/embedding/remote_backend.hpp"
#include "yarn/llm/gateway.hpp"
#include "yarn/llm/http_provider.hpp"
#include "yarn/llm/mock_provider.hpp"
#include "yarn/llm/run_log.hpp"

namespace yarn::llm {
namespace {

ChatRequest req(std::string tag) {
  ChatRequest r;
  r.system_prompt = "sys";
  r.user_prompt = "user";
  r.tag = std::move(tag);
  return r;
}

GatewayOptions quick(int retries = 3) {
  GatewayOptions o;
  o.max_retries = retries;
  o.backoff_initial = std::chrono::milliseconds(0);
  return o;
}

TEST(PayloadTest, DelimiterRule) {
  auto a = extract_payload("Sure.\n<JSON>[\"x\", \"y\"]</JSON>\nHope that helps! [1, 2, 3, 4]");
  ASSERT_TRUE(a);
  EXPECT_EQ(*a, json::parse(R"(["x", "y"])"));
  auto b = extract_payload("<json> {\"a\": 1} </json>");
  ASSERT_TRUE(b);
  EXPECT_EQ((*b)["a"], 1);
  // Broken delimited content does not fall through to other brackets.
  EXPECT_FALSE(extract_payload("<JSON>[1, </JSON> [2]"));
}

TEST(PayloadTest, LongestBalancedWithoutDelimiters) {
  auto a = extract_payload("I think [1] but really {\"answer\": [2, 3], \"why\": \"]\"} okay");
  ASSERT_TRUE(a);
  EXPECT_EQ((*a)["answer"], json::parse("[2, 3]"));
  EXPECT_FALSE(extract_payload("no brackets at all"));
  EXPECT_FALSE(extract_payload("[unquoted, words]"));
}

TEST(GatewayTest, StructuredRetriesThenReportsFailure) {
  auto mock = std::make_shared<MockProvider>();
  mock->add("t", "not json");
  Gateway gw(mock, quick());
  auto r = gw.complete_structured(req("t"), schema::list_of_strings(), 3);
  EXPECT_FALSE(r.parse_ok);
  EXPECT_EQ(r.attempts, 3);
  EXPECT_TRUE(r.extracted_payload.is_null());
  EXPECT_EQ(mock->request_count(), 3u);

  mock->add("u", "<JSON>[1]</JSON>");
  EXPECT_FALSE(gw.complete_structured(req("u"), schema::list_of_strings(), 2).parse_ok);
  mock->add("v", "<JSON>{\"answer\": 2}</JSON> trailing words");
  auto ok = gw.complete_structured(req("v"), schema::object_with("answer"), 2);
  EXPECT_TRUE(ok.parse_ok);
  EXPECT_EQ(ok.attempts, 1);
}

TEST(GatewayTest, Preconditions) {
  auto mock = std::make_shared<MockProvider>();
  Gateway gw(mock, quick());
  auto r = req("t");
  r.temperature = -1;
  EXPECT_THROW(gw.complete(r), std::invalid_argument);
  r = req("t");
  r.user_prompt = "";
  r.system_prompt = "";
  EXPECT_THROW(gw.complete(r), std::invalid_argument);
  EXPECT_EQ(mock->request_count(), 0u);
  GatewayOptions bad;
  bad.max_in_flight = 0;
  EXPECT_THROW(Gateway(mock, bad), std::invalid_argument);
}

class FlakyProvider final : public Provider {
 public:
  explicit FlakyProvider(int failures) : failures_(failures) {}
  std::string complete(const ChatRequest&) override {
    ++calls;
    if (failures_-- > 0) throw TransportError("connection reset");
    return "ok";
  }
  std::string name() const override { return "flaky"; }
  std::atomic<int> calls{0};

 private:
  std::atomic<int> failures_;
};

TEST(GatewayTest, TransportRetries) {
  auto p = std::make_shared<FlakyProvider>(2);
  Gateway gw(p, quick(3));
  EXPECT_EQ(gw.complete(req("t")), "ok");
  EXPECT_EQ(p->calls, 3);

  auto dead = std::make_shared<FlakyProvider>(100);
  Gateway gw2(dead, quick(2));
  EXPECT_THROW(gw2.complete(req("t")), ProviderUnavailable);
  EXPECT_EQ(dead->calls, 3);
}

class SlowProvider final : public Provider {
 public:
  std::string complete(const ChatRequest&) override {
    int now = ++active;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --active;
    return "[]";
  }
  std::string name() const override { return "slow"; }
  std::atomic<int> active{0}, peak{0};
};

TEST(GatewayTest, InFlightBound) {
  auto p = std::make_shared<SlowProvider>();
  GatewayOptions o = quick();
  o.max_in_flight = 2;
  Gateway gw(p, o);
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i)
    ts.emplace_back([&] {
      for (int k = 0; k < 5; ++k) gw.complete(req("t"));
    });
  for (auto& t : ts) t.join();
  EXPECT_LE(p->peak.load(), 2);
  EXPECT_GE(p->peak.load(), 1);
  EXPECT_EQ(gw.provider_calls(), 40u);
}

TEST(MockTest, FixtureDirectoryLookup) {
  auto dir = std::filesystem::temp_directory_path() / "yarn_mock_fixture_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "events");
  std::ofstream(dir / "events" / "s1.txt") << "one";
  std::ofstream(dir / "events" / "_default.txt") << "events default";
  std::ofstream(dir / "_default.txt") << "root default";
  MockProvider m(dir);
  EXPECT_EQ(m.complete(req("events/s1")), "one");
  EXPECT_EQ(m.complete(req("events/s2")), "events default");
  EXPECT_EQ(m.complete(req("arc/s1")), "root default");
  EXPECT_THROW(m.complete(req("../etc/passwd")), ProviderUnavailable);
  std::filesystem::remove(dir / "_default.txt");
  EXPECT_THROW(m.complete(req("arc/s1")), ProviderUnavailable);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(MockProvider{dir}, ConfigError);
}

TEST(RunLogTest, HarvestReplaysRecordedReplies) {
  auto dir = std::filesystem::temp_directory_path() / "yarn_runlog_test";
  std::filesystem::remove_all(dir);
  auto live = std::make_shared<MockProvider>();
  live->add("events/a", "<JSON>[\"A ran\"]</JSON>");
  live->add("arc/a", "first");
  auto log = std::make_shared<RunLog>(dir / "run.jsonl");
  {
    Gateway gw(live, quick(), log);
    gw.complete(req("events/a"));
    gw.complete(req("arc/a"));
    live->add("arc/a", "second");
    gw.complete(req("arc/a"));
  }
  EXPECT_EQ(harvest_fixtures(dir / "run.jsonl", dir / "fixtures"), 2u);
  MockProvider replay(dir / "fixtures");
  EXPECT_EQ(replay.complete(req("events/a")), "<JSON>[\"A ran\"]</JSON>");
  EXPECT_EQ(replay.complete(req("arc/a")), "second");
  std::filesystem::remove_all(dir);
}

TEST(RequestHashTest, CoversPromptAndSettings) {
  auto a = req("t");
  auto b = a;
  EXPECT_EQ(request_hash(a), request_hash(b));
  b.user_prompt = "user!";
  EXPECT_NE(request_hash(a), request_hash(b));
  b = a;
  b.temperature = 0.5;
  EXPECT_NE(request_hash(a), request_hash(b));
}

// A local OpenAI-shaped server.
class LocalServer {
 public:
  LocalServer() {
    srv_.Post("/v1/chat/completions", [this](const httplib::Request& rq, httplib::Response& rs) {
      ++hits;
      last_auth = rq.get_header_value("Authorization");
      if (status != 200) {
        rs.status = status;
        rs.set_content("nope", "text/plain");
        return;
      }
      auto body = json::parse(rq.body);
      last_model = body["model"];
      last_temperature = body["temperature"];
      json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "echo:" + body["messages"][1]["content"].get<std::string>()}}}}}}};
      rs.set_content(reply.dump(), "application/json");
    });
    srv_.Post("/v1/embeddings", [this](const httplib::Request& rq, httplib::Response& rs) {
      ++hits;
      auto body = json::parse(rq.body);
      json data = json::array();
      for (const auto& t : body["input"]) data.push_back({{"embedding", {double(t.get<std::string>().size()), 1.0}}});
      rs.set_content(json{{"data", data}}.dump(), "application/json");
    });
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~LocalServer() {
    srv_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> hits{0};
  int status = 200;
  std::string last_auth, last_model;
  double last_temperature = -1;

 private:
  httplib::Server srv_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpProviderTest, RoundTrip) {
  LocalServer s;
  HttpProviderOptions o;
  o.base_url = s.url();
  o.model = "test-model";
  o.api_key = "secret";
  Gateway gw(std::make_shared<HttpProvider>(o), quick());
  EXPECT_EQ(gw.complete(req("t")), "echo:user");
  EXPECT_EQ(s.last_auth, "Bearer secret");
  EXPECT_EQ(s.last_model, "test-model");
  EXPECT_EQ(s.last_temperature, 0.0);
}

TEST(HttpProviderTest, ServerErrorsAreRetriedClientErrorsAreNot) {
  LocalServer s;
  HttpProviderOptions o;
  o.base_url = s.url();
  o.model = "m";
  s.status = 503;
  Gateway gw(std::make_shared<HttpProvider>(o), quick(2));
  EXPECT_THROW(gw.complete(req("t")), ProviderUnavailable);
  EXPECT_EQ(s.hits.load(), 3);
  s.status = 401;
  s.hits = 0;
  EXPECT_THROW(gw.complete(req("t")), ProviderUnavailable);
  EXPECT_EQ(s.hits.load(), 1);
}

TEST(HttpProviderTest, UnreachableEndpoint) {
  // Port 1 on loopback has no listener: connection refused.
  HttpProviderOptions o;
  o.base_url = "http://127.0.0.1:1";
  o.model = "m";
  o.timeout = std::chrono::seconds(2);
  Gateway gw(std::make_shared<HttpProvider>(o), quick(1));
  EXPECT_THROW(gw.complete(req("t")), ProviderUnavailable);
  EXPECT_THROW(HttpProvider(HttpProviderOptions{}), ConfigError);
}

TEST(RemoteEmbeddingTest, RoundTripAndCache) {
  LocalServer s;
  embedding::RemoteBackendOptions o;
  o.base_url = s.url();
  embedding::Embedder e(std::make_shared<embedding::RemoteBackend>(o));
  e.prefetch({"ab", "abcd"});
  EXPECT_EQ(s.hits.load(), 1);
  EXPECT_EQ(e.embed("abcd").values, (std::vector<double>{4.0, 1.0}));
  EXPECT_EQ(s.hits.load(), 1);
  EXPECT_EQ(e.model_id(), "sentence-transformers/all-MiniLM-L6-v2");
}

}  // namespace
}  // namespace yarn::llm

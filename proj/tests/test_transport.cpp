#include <gtest/gtest.h>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "textaug/error.hpp"
#include "textaug/providers/clients.hpp"
#include "textaug/providers/http.hpp"

using namespace textaug;
using namespace textaug::providers;
using nlohmann::json;
using textaug::testing::fixture;
using textaug::testing::TempDir;

namespace {

// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

struct EventLog {
  std::mutex mutex;
  std::vector<ChannelEvent> events;

  std::size_t count(ChannelEvent::Kind kind) {
    std::lock_guard lock(mutex);
    return std::count_if(events.begin(), events.end(), [&](const auto& e) { return e.kind == kind; });
  }
};

ChannelOptions quiet_options(EventLog& log, std::vector<std::chrono::milliseconds>* sleeps = nullptr) {
  ChannelOptions o;
  o.on_event = [&log](const ChannelEvent& e) {
    std::lock_guard lock(log.mutex);
    log.events.push_back(e);
  };
  o.sleep = [sleeps](std::chrono::milliseconds d) {
    if (sleeps) sleeps->push_back(d);
  };
  return o;
}

}  // namespace

TEST(RetryPolicy, DoublesAndCaps) {
  RetryPolicy p;
  EXPECT_EQ(p.delay_after(1).count(), 500);
  EXPECT_EQ(p.delay_after(2).count(), 1000);
  EXPECT_EQ(p.delay_after(4).count(), 4000);
  EXPECT_EQ(p.delay_after(5).count(), 8000);
  EXPECT_EQ(p.delay_after(9).count(), 8000);
}

TEST(HttpChannel, RetriesTooManyRequestsThenSucceeds) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 429;
      res.set_content(R"({"error":"slow down"})", "application/json");
      return;
    }
    res.set_content(R"({"choices":[{"message":{"content":"ok then"}}]})", "application/json");
  });
  EventLog log;
  std::vector<std::chrono::milliseconds> sleeps;
  auto channel = std::make_shared<HttpChannel>(std::make_shared<HttplibTransport>(srv.url()),
                                               quiet_options(log, &sleeps));
  ChatCompletionClient client(channel);
  ChatRequest req;
  req.model = "m";
  req.user_prompt = "hi";
  EXPECT_EQ(client.chat_complete(req).choices, std::vector<std::string>{"ok then"});
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(log.count(ChannelEvent::Kind::request), 3u);
  EXPECT_EQ(log.count(ChannelEvent::Kind::backoff), 2u);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[0].count(), 500);
  EXPECT_EQ(sleeps[1].count(), 1000);
}

TEST(HttpChannel, ClientErrorIsNotRetried) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/x", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  EventLog log;
  HttpChannel channel(std::make_shared<HttplibTransport>(srv.url()), quiet_options(log));
  EXPECT_THROW(channel.post_json("/x", json::object()), ProviderUnavailableError);
  EXPECT_EQ(hits.load(), 1);
  EXPECT_EQ(log.count(ChannelEvent::Kind::backoff), 0u);
}

TEST(HttpChannel, ServerErrorsExhaustRetries) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/x", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  EventLog log;
  auto opts = quiet_options(log);
  opts.retry.max_attempts = 3;
  HttpChannel channel(std::make_shared<HttplibTransport>(srv.url()), opts);
  try {
    channel.post_json("/x", json::object());
    FAIL() << "expected ProviderUnavailableError";
  } catch (const ProviderUnavailableError& e) {
    EXPECT_NE(std::string(e.what()).find("3 attempt"), std::string::npos) << e.what();
    EXPECT_EQ(e.exit_code(), ExitCode::provider);
  }
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(log.count(ChannelEvent::Kind::failure), 1u);
}

TEST(HttpChannel, ConnectionRefusedIsProviderUnavailable) {
  int port = 0;
  {
    LocalServer srv;
    port = std::stoi(srv.url().substr(srv.url().rfind(':') + 1));
  }
  EventLog log;
  auto opts = quiet_options(log);
  opts.retry.max_attempts = 2;
  HttpChannel channel(std::make_shared<HttplibTransport>("http://127.0.0.1:" + std::to_string(port),
                                                         std::chrono::seconds(2)),
                      opts);
  EXPECT_THROW(channel.post_json("/x", json::object()), ProviderUnavailableError);
  EXPECT_EQ(log.count(ChannelEvent::Kind::request), 2u);
}

TEST(HttpChannel, NonJsonBodyIsProtocolError) {
  LocalServer srv;
  srv.server().Post("/x", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html>gateway</html>", "text/html");
  });
  EventLog log;
  HttpChannel channel(std::make_shared<HttplibTransport>(srv.url()), quiet_options(log));
  try {
    channel.post_json("/x", json::object());
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(e.payload_excerpt().find("gateway"), std::string::npos);
  }
}

TEST(HttpChannel, RequestIdsIncreaseAndHeadersAreSent) {
  LocalServer srv;
  std::mutex mutex;
  std::vector<std::string> ids, auth;
  srv.server().Post("/x", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex);
    ids.push_back(req.get_header_value("X-Request-Id"));
    auth.push_back(req.get_header_value("Authorization"));
    res.set_content("{}", "application/json");
  });
  EventLog log;
  auto opts = quiet_options(log);
  opts.headers.emplace("Authorization", "Bearer test-key");
  HttpChannel channel(std::make_shared<HttplibTransport>(srv.url()), opts);
  for (int i = 0; i < 3; ++i) channel.post_json("/x", json::object());
  EXPECT_EQ(ids, (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_EQ(auth, std::vector<std::string>(3, "Bearer test-key"));
  EXPECT_EQ(channel.requests_issued(), 3u);
}

TEST(HttpChannel, InFlightBoundIsRespected) {
  LocalServer srv;
  std::atomic<int> current{0}, peak{0};
  srv.server().Post("/x", [&](const httplib::Request&, httplib::Response& res) {
    const int now = ++current;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --current;
    res.set_content("{}", "application/json");
  });
  EventLog log;
  auto opts = quiet_options(log);
  opts.max_in_flight = 2;
  HttpChannel channel(std::make_shared<HttplibTransport>(srv.url()), opts);
  std::vector<std::thread> threads;
  for (int i = 0; i < 6; ++i) threads.emplace_back([&] { channel.post_json("/x", json::object()); });
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST(TokenBucket, BurstIsBounded) {
  TokenBucket slow(60.0);  // one per second
  EXPECT_EQ(slow.reserve().count(), 0);
  EXPECT_GT(slow.reserve().count(), 0);
}

TEST(Replay, RecordedExchangesReplayIdentically) {
  LocalServer srv;
  srv.server().Post("/v2/translate", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    const auto text = body["text"][0].get<std::string>();
    res.set_content(json({{"translations", {{{"text", "[" + text + "]"}}}}}).dump(), "application/json");
  });
  TempDir dir;
  EventLog log;
  auto opts = quiet_options(log);
  opts.record_dir = dir.path() / "rec";
  DeepLClient live(std::make_shared<HttpChannel>(std::make_shared<HttplibTransport>(srv.url()), opts));
  const auto a = live.translate({"first", "en", "de"});
  const auto b = live.translate({"second", "en", "de"});
  EXPECT_EQ(a, "[first]");

  auto replay = std::make_shared<ReplayTransport>(dir.path() / "rec");
  EXPECT_EQ(replay->size(), 2u);
  DeepLClient offline(std::make_shared<HttpChannel>(replay, quiet_options(log)));
  EXPECT_EQ(offline.translate({"second", "en", "de"}), b);
  EXPECT_EQ(offline.translate({"first", "en", "de"}), a);
}

TEST(Replay, UnknownRequestFailsAfterRetries) {
  EventLog log;
  auto opts = quiet_options(log);
  opts.retry.max_attempts = 2;
  DeepLClient offline(
      std::make_shared<HttpChannel>(std::make_shared<ReplayTransport>(fixture("protocol/deepl")), opts));
  EXPECT_THROW(offline.translate({"never recorded", "en", "de"}), ProviderUnavailableError);
}

TEST(Replay, MissingDirectoryIsConfigError) {
  EXPECT_THROW(ReplayTransport("/nonexistent/replay/dir"), ConfigError);
}

TEST(ChatProtocol, FixtureReplaysVerbatim) {
  EventLog log;
  ChatCompletionClient client(
      std::make_shared<HttpChannel>(std::make_shared<ReplayTransport>(fixture("protocol/chat")), quiet_options(log)));
  ChatRequest req;
  req.model = "gpt-3.5-turbo";
  req.user_prompt = "Paraphrase the following sentence. Output only the paraphrase.\nI love this song so much.";
  const auto r = client.chat_complete(req);
  EXPECT_EQ(r.choices, std::vector<std::string>{"I absolutely adore this song."});
  EXPECT_EQ(r.model, "gpt-3.5-turbo-0613");
}

TEST(ChatProtocol, EncodeShape) {
  ChatRequest req;
  req.model = "m";
  req.system_message = "sys";
  req.user_prompt = "user";
  req.temperature = 0.5;
  req.n_choices = 3;
  req.seed = 9;
  const auto body = ChatCompletionClient::encode(req);
  EXPECT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "user");
  EXPECT_EQ(body["n"], 3);
  EXPECT_EQ(body["seed"], 9);
  req.system_message.clear();
  req.seed.reset();
  EXPECT_EQ(ChatCompletionClient::encode(req)["messages"].size(), 1u);
  EXPECT_FALSE(ChatCompletionClient::encode(req).contains("seed"));
}

TEST(ChatProtocol, DecodeRejectsWrongChoiceCounts) {
  const auto two = json::parse(R"({"choices":[{"message":{"content":"a"}},{"message":{"content":"b"}}]})");
  EXPECT_EQ(ChatCompletionClient::decode(two, 2).choices.size(), 2u);
  EXPECT_THROW(ChatCompletionClient::decode(two, 3), ProtocolError);
  EXPECT_THROW(ChatCompletionClient::decode(json::parse(R"({"choices":[{"text":"a"}]})"), 1), ProtocolError);
  EXPECT_THROW(ChatCompletionClient::decode(json::parse(R"({"error":"x"})"), 1), ProtocolError);
}

TEST(DeepLProtocol, FixtureReplay) {
  EventLog log;
  DeepLClient client(
      std::make_shared<HttpChannel>(std::make_shared<ReplayTransport>(fixture("protocol/deepl")), quiet_options(log)));
  EXPECT_EQ(client.translate({"Good day", "en", "de"}), "Guten Tag");
}

TEST(DeepLProtocol, EncodeUsesUppercaseCodes) {
  const auto out = DeepLClient::encode({"x", "en", "pl"});
  EXPECT_EQ(out["source_lang"], "EN");
  EXPECT_EQ(out["target_lang"], "PL");
  EXPECT_EQ(DeepLClient::encode({"x", "pl", "en"})["target_lang"], "EN-US");
  EXPECT_THROW(DeepLClient::decode(json::parse(R"({"translations":[]})")), ProtocolError);
  EXPECT_THROW(DeepLClient::decode(json::parse(R"({"translations":[{"text":"  "}]})")), ProtocolError);
}

TEST(EmbeddingProtocol, FixtureReplayHonoursIndexOrder) {
  EventLog log;
  EmbeddingClient client(
      std::make_shared<HttpChannel>(std::make_shared<ReplayTransport>(fixture("protocol/embedding")),
                                    quiet_options(log)),
      "sentence-transformers/all-mpnet-base-v2");
  const auto health = client.healthcheck();
  EXPECT_EQ(health.dimension, 3u);
  EXPECT_EQ(health.pooling, "mean");
  const std::vector<std::string> texts = {"so happy", "so sad"};
  const auto r = client.embed(texts, true);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].sentence_vector, (std::vector<double>{0.6, 0.8, 0.0}));
  EXPECT_EQ(r[1].sentence_vector, (std::vector<double>{0.0, 1.0, 0.0}));
  ASSERT_EQ(r[1].token_vectors.size(), 2u);
  EXPECT_EQ(r[1].token_vectors[1].token, "sad");
}

TEST(EmbeddingProtocol, DimensionMismatchIsProtocolError) {
  EventLog log;
  EmbeddingClient client(std::make_shared<HttpChannel>(
                             std::make_shared<ReplayTransport>(fixture("protocol/embedding_bad_dim")),
                             quiet_options(log)),
                         "m");
  const std::vector<std::string> texts = {"a", "b"};
  EXPECT_THROW(client.embed(texts, false), ProtocolError);
}

TEST(EmbeddingProtocol, LocalFakeSidecar) {
  // Minimal server speaking the sidecar protocol: letter-count vectors.
  LocalServer srv;
  auto vec = [](const std::string& s) {
    std::vector<double> v(4, 0.0);
    for (char c : s) v[static_cast<unsigned char>(c) % 4] += 1.0;
    return v;
  };
  srv.server().Get("/healthcheck", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"model":"fake","dimension":4})", "application/json");
  });
  srv.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    const auto in = json::parse(req.body);
    json data = json::array();
    for (std::size_t i = 0; i < in["input"].size(); ++i)
      data.push_back({{"index", i}, {"embedding", vec(in["input"][i].get<std::string>())}});
    res.set_content(json({{"data", data}, {"model", in["model"]}}).dump(), "application/json");
  });
  srv.server().Post("/token-embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    const auto in = json::parse(req.body);
    json data = json::array();
    for (const auto& t : in["input"]) {
      json tokens = json::array(), vectors = json::array();
      std::istringstream words(t.get<std::string>());
      for (std::string w; words >> w;) {
        tokens.push_back(w);
        vectors.push_back(vec(w));
      }
      data.push_back({{"tokens", tokens}, {"vectors", vectors}});
    }
    res.set_content(json({{"data", data}}).dump(), "application/json");
  });

  EventLog log;
  EmbeddingClient client(
      std::make_shared<HttpChannel>(std::make_shared<HttplibTransport>(srv.url()), quiet_options(log)), "fake");
  EXPECT_EQ(client.healthcheck().dimension, 4u);
  const std::vector<std::string> texts = {"ab cd", "x"};
  const auto r = client.embed(texts, true);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].sentence_vector, vec("ab cd"));
  EXPECT_EQ(r[0].token_vectors.size(), 2u);
  EXPECT_EQ(r[1].token_vectors.at(0).vector, vec("x"));
  EXPECT_TRUE(client.embed(texts, false)[0].token_vectors.empty());
}

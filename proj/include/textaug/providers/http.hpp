#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace textaug::providers {

using Headers = std::multimap<std::string, std::string>;

struct HttpResponse {
  int status = 0;  // 0 when the connection itself failed
  std::string body;
  std::string error;
};

/// One HTTP/1.1 round trip. Implementations must be safe for concurrent use.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body, const Headers& headers) = 0;
  virtual HttpResponse get(const std::string& path, const Headers& headers) = 0;
  virtual std::string base_url() const = 0;
};

/// Network transport over cpp-httplib ("http://host:port" or "https://...").
class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers) override;
  HttpResponse get(const std::string& path, const Headers& headers) override;
  std::string base_url() const override { return base_url_; }

 private:
  std::string base_url_;
  std::chrono::seconds timeout_;
};

/// Serves responses from a directory of recorded exchanges, matched on
/// (method, path, request body). Repeated identical requests consume the
/// recordings in request-id order and then keep returning the last one.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(const std::filesystem::path& directory);
  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers) override;
  HttpResponse get(const std::string& path, const Headers& headers) override;
  std::string base_url() const override { return base_; }
  std::size_t size() const noexcept { return count_; }

 private:
  HttpResponse lookup(const std::string& method, const std::string& path, const std::string& body);

  struct Entry {
    std::vector<HttpResponse> responses;
    std::size_t next = 0;
  };
  std::string base_;
  std::size_t count_ = 0;
  std::mutex mutex_;
  std::map<std::string, Entry> exchanges_;
};

struct RetryPolicy {
  std::size_t max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{8000};

  /// base_delay * 2^(attempt-1), capped at max_delay. attempt is 1-based.
  std::chrono::milliseconds delay_after(std::size_t attempt) const;
};

/// Observable events emitted by a channel; also logged through spdlog.
struct ChannelEvent {
  enum class Kind { request, response, backoff, failure };
  Kind kind;
  std::uint64_t request_id;
  std::size_t attempt;
  int status = 0;
  std::chrono::milliseconds delay{0};
  std::string path;
};

struct ChannelOptions {
  RetryPolicy retry;
  /// Token-bucket rate limit; 0 disables it.
  double requests_per_minute = 0.0;
  std::size_t max_in_flight = 4;
  /// When set, every completed exchange is written there as <id>.json.
  std::optional<std::filesystem::path> record_dir;
  Headers headers;
  std::function<void(const ChannelEvent&)> on_event;
  /// Replaced in tests to avoid real sleeping.
  std::function<void(std::chrono::milliseconds)> sleep;
};

/// Bounded counting semaphore.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit) : available_(limit == 0 ? 1 : limit) {}
  void acquire();
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t available_;
};

class TokenBucket {
 public:
  explicit TokenBucket(double requests_per_minute);
  /// Time the caller must wait before sending; reserves the token.
  std::chrono::milliseconds reserve();

 private:
  std::mutex mutex_;
  double rate_per_ms_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

/// JSON request/response channel adding retries with exponential backoff
/// (HTTP 429, 5xx and connection failures), rate limiting, an in-flight
/// bound, monotonically increasing request ids and optional recording.
class HttpChannel {
 public:
  HttpChannel(std::shared_ptr<Transport> transport, ChannelOptions options = {});

  /// Throws ProviderUnavailableError after exhausting retries or on a
  /// non-retryable status, ProtocolError when the body is not JSON.
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body);
  nlohmann::json get_json(const std::string& path);

  std::string base_url() const { return transport_->base_url(); }
  std::uint64_t requests_issued() const noexcept { return next_id_.load() - 1; }

 private:
  nlohmann::json exchange(const std::string& method, const std::string& path, const std::string& body);
  void emit(const ChannelEvent& event) const;
  void record(std::uint64_t id, const std::string& method, const std::string& path, const std::string& body,
              const HttpResponse& response) const;

  std::shared_ptr<Transport> transport_;
  ChannelOptions options_;
  std::atomic<std::uint64_t> next_id_{1};
  InFlightLimiter limiter_;
  std::optional<TokenBucket> bucket_;
};

}  // namespace textaug::providers

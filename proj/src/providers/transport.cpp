#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "textaug/error.hpp"
#include "textaug/providers/http.hpp"

namespace textaug::providers {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

httplib::Headers to_httplib(const Headers& headers) {
  return httplib::Headers(headers.begin(), headers.end());
}

HttpResponse from_result(const httplib::Result& res) {
  if (!res) return {0, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

// Request bodies are compared after a JSON round trip so key order and
// whitespace do not matter.
std::string canonical_body(const std::string& body) {
  if (body.empty()) return body;
  auto parsed = json::parse(body, nullptr, false);
  return parsed.is_discarded() ? body : parsed.dump();
}

std::string exchange_key(const std::string& method, const std::string& path, const std::string& body) {
  return method + " " + path + "\n" + canonical_body(body);
}

json body_as_json(const std::string& body) {
  auto parsed = json::parse(body, nullptr, false);
  return parsed.is_discarded() ? json(body) : parsed;
}

std::string body_from_json(const json& j) {
  if (j.is_null()) return {};
  return j.is_string() ? j.get<std::string>() : j.dump();
}

}  // namespace

HttplibTransport::HttplibTransport(std::string base_url, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

HttpResponse HttplibTransport::post(const std::string& path, const std::string& body, const Headers& headers) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  return from_result(client.Post(path, to_httplib(headers), body, "application/json"));
}

HttpResponse HttplibTransport::get(const std::string& path, const Headers& headers) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  return from_result(client.Get(path, to_httplib(headers)));
}

ReplayTransport::ReplayTransport(const fs::path& directory) : base_("replay:" + directory.string()) {
  if (!fs::is_directory(directory))
    throw ConfigError(fmt::format("replay directory '{}' does not exist", directory.string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("request") || !doc.contains("response"))
      throw ConfigError(fmt::format("'{}' is not a recorded exchange", f.string()));
    const auto& req = doc["request"];
    const auto& res = doc["response"];
    auto key = exchange_key(req.value("method", "POST"), req.value("path", ""),
                            body_from_json(req.value("body", json())));
    exchanges_[key].responses.push_back({res.value("status", 200), body_from_json(res.value("body", json())), {}});
    ++count_;
  }
}

HttpResponse ReplayTransport::lookup(const std::string& method, const std::string& path, const std::string& body) {
  std::lock_guard lock(mutex_);
  auto it = exchanges_.find(exchange_key(method, path, body));
  if (it == exchanges_.end()) return {0, {}, "no recorded exchange for " + method + " " + path};
  auto& entry = it->second;
  const auto idx = std::min(entry.next, entry.responses.size() - 1);
  if (entry.next < entry.responses.size()) ++entry.next;
  return entry.responses[idx];
}

HttpResponse ReplayTransport::post(const std::string& path, const std::string& body, const Headers&) {
  return lookup("POST", path, body);
}

HttpResponse ReplayTransport::get(const std::string& path, const Headers&) { return lookup("GET", path, {}); }

std::chrono::milliseconds RetryPolicy::delay_after(std::size_t attempt) const {
  auto delay = base_delay;
  for (std::size_t i = 1; i < attempt && delay < max_delay; ++i) delay *= 2;
  return std::min(delay, max_delay);
}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return available_ > 0; });
  --available_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    ++available_;
  }
  cv_.notify_one();
}

TokenBucket::TokenBucket(double requests_per_minute)
    : rate_per_ms_(requests_per_minute / 60000.0),
      capacity_(std::max(1.0, requests_per_minute / 60.0)),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

std::chrono::milliseconds TokenBucket::reserve() {
  std::lock_guard lock(mutex_);
  const auto now = std::chrono::steady_clock::now();
  const double elapsed = std::chrono::duration<double, std::milli>(now - last_).count();
  last_ = now;
  tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_ms_);
  tokens_ -= 1.0;
  if (tokens_ >= 0.0) return std::chrono::milliseconds(0);
  return std::chrono::milliseconds(static_cast<long long>(std::ceil(-tokens_ / rate_per_ms_)));
}

HttpChannel::HttpChannel(std::shared_ptr<Transport> transport, ChannelOptions options)
    : transport_(std::move(transport)), options_(std::move(options)), limiter_(options_.max_in_flight) {
  if (!transport_) throw ArgumentError("HttpChannel needs a transport");
  if (options_.retry.max_attempts == 0) options_.retry.max_attempts = 1;
  if (options_.requests_per_minute > 0.0) bucket_.emplace(options_.requests_per_minute);
  if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (options_.record_dir) fs::create_directories(*options_.record_dir);
}

json HttpChannel::post_json(const std::string& path, const json& body) { return exchange("POST", path, body.dump()); }

json HttpChannel::get_json(const std::string& path) { return exchange("GET", path, {}); }

void HttpChannel::emit(const ChannelEvent& e) const {
  switch (e.kind) {
    case ChannelEvent::Kind::request:
      spdlog::debug("request #{} attempt {} -> {}{}", e.request_id, e.attempt, transport_->base_url(), e.path);
      break;
    case ChannelEvent::Kind::response:
      spdlog::debug("request #{} attempt {} <- HTTP {}", e.request_id, e.attempt, e.status);
      break;
    case ChannelEvent::Kind::backoff:
      spdlog::warn("request #{} got HTTP {}; retrying in {} ms", e.request_id, e.status, e.delay.count());
      break;
    case ChannelEvent::Kind::failure:
      spdlog::error("request #{} failed after {} attempt(s) (HTTP {})", e.request_id, e.attempt, e.status);
      break;
  }
  if (options_.on_event) options_.on_event(e);
}

void HttpChannel::record(std::uint64_t id, const std::string& method, const std::string& path,
                         const std::string& body, const HttpResponse& response) const {
  if (!options_.record_dir) return;
  json doc = {
      {"id", id},
      {"request", {{"method", method}, {"path", path}, {"body", body.empty() ? json() : body_as_json(body)}}},
      {"response", {{"status", response.status}, {"body", body_as_json(response.body)}}},
  };
  const auto file = *options_.record_dir / fmt::format("{:06d}.json", id);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write exchange record '{}'", file.string()));
  out << doc.dump(2) << '\n';
}

json HttpChannel::exchange(const std::string& method, const std::string& path, const std::string& body) {
  const std::uint64_t id = next_id_.fetch_add(1);
  limiter_.acquire();
  struct Release {
    InFlightLimiter& l;
    ~Release() { l.release(); }
  } release{limiter_};

  auto headers = options_.headers;
  headers.emplace("X-Request-Id", std::to_string(id));
  HttpResponse response;
  const auto max_attempts = options_.retry.max_attempts;
  for (std::size_t attempt = 1;; ++attempt) {
    if (bucket_) {
      if (auto wait = bucket_->reserve(); wait.count() > 0) options_.sleep(wait);
    }
    emit({ChannelEvent::Kind::request, id, attempt, 0, {}, path});
    response = method == "GET" ? transport_->get(path, headers) : transport_->post(path, body, headers);
    emit({ChannelEvent::Kind::response, id, attempt, response.status, {}, path});

    if (response.status >= 200 && response.status < 300) break;
    const bool retryable = response.status == 0 || response.status == 429 || response.status >= 500;
    if (!retryable) {
      record(id, method, path, body, response);
      emit({ChannelEvent::Kind::failure, id, attempt, response.status, {}, path});
      throw ProviderUnavailableError(fmt::format("{}{} rejected request #{} with HTTP {}: {}",
                                                 transport_->base_url(), path, id, response.status,
                                                 response.body.substr(0, 200)));
    }
    if (attempt >= max_attempts) {
      record(id, method, path, body, response);
      emit({ChannelEvent::Kind::failure, id, attempt, response.status, {}, path});
      throw ProviderUnavailableError(fmt::format(
          "{}{} unavailable after {} attempt(s) (last: {})", transport_->base_url(), path, attempt,
          response.status == 0 ? response.error : fmt::format("HTTP {}", response.status)));
    }
    const auto delay = options_.retry.delay_after(attempt);
    emit({ChannelEvent::Kind::backoff, id, attempt, response.status, delay, path});
    options_.sleep(delay);
  }

  record(id, method, path, body, response);
  auto parsed = json::parse(response.body, nullptr, false);
  if (parsed.is_discarded()) throw ProtocolError("response body is not JSON", response.body);
  return parsed;
}

}  // namespace textaug::providers

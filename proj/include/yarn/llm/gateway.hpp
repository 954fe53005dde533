#pragma once

// Chat-completion access: a provider interface, retry/backoff, bounded
// in-flight requests, structured-output extraction, and the run log.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/text.hpp"
#include "yarn/llm/run_log.hpp"

namespace yarn::llm {

using json = nlohmann::json;

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::string tag;
};

inline void check_request(const ChatRequest& r) {
  if (r.temperature < 0) throw std::invalid_argument("temperature must be >= 0");
  if (text::is_blank(r.system_prompt) || text::is_blank(r.user_prompt))
    throw std::invalid_argument("chat request '" + r.tag + "' has an empty prompt");
}

// Stable content hash of everything that determines a reply.
inline std::string request_hash(const ChatRequest& r) {
  std::string key;
  key.reserve(r.system_prompt.size() + r.user_prompt.size() + r.tag.size() + 48);
  key += r.tag;
  key += '\x1f';
  key += r.system_prompt;
  key += '\x1f';
  key += r.user_prompt;
  key += '\x1f';
  key += std::to_string(r.temperature);
  key += '\x1f';
  key += std::to_string(r.max_tokens);
  return text::hex64(text::fnv1a64(key));
}

// A transient failure (connection refused, timeout, 5xx). The gateway retries
// these; everything else propagates at once.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error("transport: " + what) {}
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
  virtual std::string name() const = 0;
};

struct StructuredReply {
  std::string raw_text;
  json extracted_payload;
  bool parse_ok = false;
  int attempts = 0;
};

// Returns nullopt when the value is acceptable, otherwise the reason.
using Schema = std::function<std::optional<std::string>(const json&)>;
// Turns raw reply text into a structured value.
using PayloadParser = std::function<std::optional<json>(std::string_view)>;

namespace schema {

inline Schema any() {
  return [](const json&) -> std::optional<std::string> { return std::nullopt; };
}

inline Schema list_of_strings() {
  return [](const json& j) -> std::optional<std::string> {
    if (!j.is_array()) return "expected an array";
    for (const auto& e : j)
      if (!e.is_string()) return "expected only strings";
    return std::nullopt;
  };
}

inline Schema object_with(std::string key) {
  return [key = std::move(key)](const json& j) -> std::optional<std::string> {
    if (!j.is_object() || !j.contains(key)) return "expected an object with '" + key + "'";
    return std::nullopt;
  };
}

}  // namespace schema

namespace detail {

inline std::optional<json> try_parse(std::string_view s) {
  auto j = json::parse(s.begin(), s.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

// End of the bracket-balanced region starting at `start`, honouring JSON
// string literals. npos when unbalanced.
inline std::size_t balanced_end(std::string_view s, std::size_t start) {
  std::vector<char> stack;
  bool in_string = false, escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[' || c == '{') stack.push_back(c == '[' ? ']' : '}');
    else if (c == ']' || c == '}') {
      if (stack.empty() || stack.back() != c) return std::string_view::npos;
      stack.pop_back();
      if (stack.empty()) return i;
    }
  }
  return std::string_view::npos;
}

inline std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from = 0) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool eq = true;
    for (std::size_t k = 0; k < needle.size() && eq; ++k)
      eq = std::tolower(static_cast<unsigned char>(hay[i + k])) ==
           std::tolower(static_cast<unsigned char>(needle[k]));
    if (eq) return i;
  }
  return std::string_view::npos;
}

}  // namespace detail

// The text between the first <JSON> and the following </JSON>, if both exist.
inline std::optional<std::string> delimited_segment(std::string_view raw) {
  auto open = detail::find_ci(raw, "<JSON>");
  if (open == std::string_view::npos) return std::nullopt;
  auto body = open + 6;
  auto close = detail::find_ci(raw, "</JSON>", body);
  if (close == std::string_view::npos) return std::nullopt;
  return text::trim(raw.substr(body, close - body));
}

// Structured-payload extraction. The first <JSON>...</JSON> span wins when
// present (its content must parse); otherwise the longest bracket-balanced
// substring that parses as JSON is used.
inline std::optional<json> extract_payload(std::string_view raw) {
  if (auto seg = delimited_segment(raw)) return detail::try_parse(*seg);
  std::optional<json> best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '[' && raw[i] != '{') continue;
    auto end = detail::balanced_end(raw, i);
    if (end == std::string_view::npos) continue;
    std::size_t len = end - i + 1;
    if (len <= best_len) continue;
    if (auto j = detail::try_parse(raw.substr(i, len))) {
      best = std::move(j);
      best_len = len;
    }
  }
  return best;
}

struct GatewayOptions {
  int max_in_flight = 4;
  int max_retries = 3;  // transport retries per call, after the first try
  std::chrono::milliseconds backoff_initial{200};
  double backoff_factor = 2.0;
};

class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, GatewayOptions opts = {},
          std::shared_ptr<RunLog> log = nullptr)
      : provider_(std::move(provider)),
        opts_(opts),
        log_(std::move(log)),
        slots_(std::clamp(opts.max_in_flight, 1, kMaxInFlight)) {
    if (!provider_) throw std::invalid_argument("gateway needs a provider");
    if (opts_.max_in_flight < 1 || opts_.max_in_flight > kMaxInFlight)
      throw std::invalid_argument("max_in_flight out of range");
    if (opts_.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  }

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  std::string complete(const ChatRequest& req) {
    check_request(req);
    auto backoff = opts_.backoff_initial;
    for (int attempt = 0;; ++attempt) {
      std::string reply;
      try {
        slots_.acquire();
        SlotRelease release{slots_};
        ++calls_;
        reply = provider_->complete(req);
      } catch (const TransportError& e) {
        if (attempt >= opts_.max_retries)
          throw ProviderUnavailable(provider_->name() + " after " + std::to_string(attempt + 1) +
                                    " attempt(s): " + e.what());
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(
            static_cast<long long>(static_cast<double>(backoff.count()) * opts_.backoff_factor));
        continue;
      }
      if (log_) log_->append(req.tag, request_hash(req), reply);
      return reply;
    }
  }

  // Tries complete + parse up to max_attempts times with the identical
  // request. Malformed output yields parse_ok=false, never an exception.
  StructuredReply complete_structured(const ChatRequest& req, const Schema& schema,
                                      int max_attempts, const PayloadParser& parser = extract_payload) {
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
    StructuredReply out;
    for (int a = 1; a <= max_attempts; ++a) {
      out.attempts = a;
      out.raw_text = complete(req);
      auto payload = parser(out.raw_text);
      if (payload && !schema(*payload)) {
        out.extracted_payload = std::move(*payload);
        out.parse_ok = true;
        return out;
      }
    }
    out.extracted_payload = nullptr;
    out.parse_ok = false;
    return out;
  }

  std::uint64_t provider_calls() const noexcept { return calls_.load(); }
  Provider& provider() noexcept { return *provider_; }

 private:
  static constexpr int kMaxInFlight = 256;
  using Slots = std::counting_semaphore<kMaxInFlight>;
  struct SlotRelease {
    Slots& s;
    ~SlotRelease() { s.release(); }
  };

  std::shared_ptr<Provider> provider_;
  GatewayOptions opts_;
  std::shared_ptr<RunLog> log_;
  Slots slots_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace yarn::llm

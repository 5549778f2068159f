#pragma once

// HTTP adapters for real model services. Request and response shapes follow
// the common chat-completions and open-vocabulary-detector conventions; any
// transport or schema failure surfaces as BackendUnavailable after retries.

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "affordkit/backends.hpp"
#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/json_util.hpp"

namespace affordkit {

namespace detail {

// Splits "http://host:port/some/path" into client base and request path.
inline std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw ConfigError("endpoint must include a scheme: " + endpoint);
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

inline std::string base64_encode(const std::string& data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < data.size()) {
    const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                       (static_cast<unsigned char>(data[i + 1]) << 8) |
                       static_cast<unsigned char>(data[i + 2]);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += alphabet[v & 63];
    i += 3;
  }
  if (i + 1 == data.size()) {
    const unsigned v = static_cast<unsigned char>(data[i]) << 16;
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == data.size()) {
    const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                       (static_cast<unsigned char>(data[i + 1]) << 8);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_ms = 250;  // doubles per attempt
};

// POSTs JSON with retries and exponential backoff; returns the parsed body.
inline ojson post_json(const std::string& endpoint, const ojson& payload,
                       const RetryPolicy& retry) {
  const auto [base, path] = split_endpoint(endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(60, 0);
  if (const char* key = std::getenv("AFFORDKIT_API_KEY"))
    client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});

  std::string last_error;
  for (int attempt = 0; attempt < retry.max_attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(retry.backoff_ms << (attempt - 1)));
    auto res = client.Post(path, payload.dump(), "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    try {
      return ojson::parse(res->body);
    } catch (const nlohmann::json::exception& ex) {
      last_error = std::string("bad JSON in response: ") + ex.what();
      continue;
    }
  }
  throw BackendUnavailable(endpoint + ": " + last_error);
}

}  // namespace detail

struct HttpLlmOptions {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  detail::RetryPolicy retry;
};

// Chat-completions client: sends the whole session each turn, reads back
// choices[0].message.content.
class HttpLlm : public LlmBackend {
 public:
  explicit HttpLlm(HttpLlmOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) throw ConfigError("llm endpoint is empty");
  }

 protected:
  std::string complete(const ChatSession& session, const PromptText&) override {
    ojson payload;
    payload["model"] = options_.model;
    payload["temperature"] = options_.temperature;
    ojson msgs = ojson::array();
    for (const auto& m : session.messages()) {
      ojson mj;
      mj["role"] = role_name(m.role);
      mj["content"] = m.content;
      msgs.push_back(std::move(mj));
    }
    payload["messages"] = std::move(msgs);

    const ojson body = detail::post_json(options_.endpoint, payload, options_.retry);
    try {
      return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw BackendUnavailable(options_.endpoint + ": unexpected response shape: " + ex.what());
    }
  }

 private:
  HttpLlmOptions options_;
};

struct HttpDetectorOptions {
  std::string endpoint;
  detail::RetryPolicy retry;
};

// Open-vocabulary detector client. The request carries the query phrase and
// either the image bytes (base64, when the uri is a readable file) or the
// uri itself; the response lists parallel boxes/scores/labels arrays.
class HttpDetector : public DetectorBackend {
 public:
  HttpDetector(HttpDetectorOptions options, PropertyCatalog catalog)
      : options_(std::move(options)), catalog_(std::move(catalog)) {
    if (options_.endpoint.empty()) throw ConfigError("detector endpoint is empty");
    catalog_.validate();
  }

 protected:
  std::vector<Detection> run(const DetectorRequest& req) const override {
    ojson payload;
    std::error_code ec;
    if (std::filesystem::is_regular_file(req.uri, ec))
      payload["image"] = detail::base64_encode(read_file(req.uri));
    else
      payload["image_uri"] = req.uri;
    payload["queries"] = ojson::array({req.phrase});
    payload["box_threshold"] = req.threshold;

    const ojson body = detail::post_json(options_.endpoint, payload, options_.retry);
    std::vector<Detection> out;
    try {
      const auto& boxes = body.at("boxes");
      const auto& scores = body.at("scores");
      if (boxes.size() != scores.size())
        throw BackendUnavailable(options_.endpoint + ": boxes/scores length mismatch");
      const bool has_labels = body.contains("labels");
      if (has_labels && body.at("labels").size() != boxes.size())
        throw BackendUnavailable(options_.endpoint + ": boxes/labels length mismatch");

      const auto [object, property] = split_phrase(catalog_, req.phrase);
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (has_labels && body.at("labels")[i].get<std::string>() != req.phrase) continue;
        double score = scores[i].get<double>();
        if (score > 1.0) score /= 100.0;  // some servers report percentages
        if (!(score >= 0.0 && score <= 1.0))
          throw BackendUnavailable(options_.endpoint + ": score outside [0,1]");
        Detection d;
        d.image_id = req.image_id;
        d.box = BBox::from_json(boxes[i]);
        d.confidence = score;
        d.object = object;
        d.property = property;
        out.push_back(std::move(d));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw BackendUnavailable(options_.endpoint + ": unexpected response shape: " + ex.what());
    } catch (const DataError& ex) {
      throw BackendUnavailable(options_.endpoint + ": bad box in response: " + ex.what());
    }
    return out;
  }

 private:
  HttpDetectorOptions options_;
  PropertyCatalog catalog_;
};

}  // namespace affordkit

#pragma once

// Abstract LLM and detector backends plus the chat session that carries
// dialogue context. Sessions are append-only and alternate user/assistant;
// the base classes enforce this so no backend can corrupt the history.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/prompts.hpp"

namespace affordkit {

enum class Role { User, Assistant };

inline const char* role_name(Role r) { return r == Role::User ? "user" : "assistant"; }

struct ChatMessage {
  Role role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

// Grows by exactly one user and one assistant message per exchange.
class ChatSession {
 public:
  const std::vector<ChatMessage>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }

  void push_user(std::string content) {
    if (!messages_.empty() && messages_.back().role == Role::User)
      throw DataError("chat session: consecutive user messages");
    messages_.push_back({Role::User, std::move(content)});
  }

  void push_assistant(std::string content) {
    if (messages_.empty() || messages_.back().role != Role::User)
      throw DataError("chat session: assistant message without a preceding user message");
    messages_.push_back({Role::Assistant, std::move(content)});
  }

 private:
  std::vector<ChatMessage> messages_;
};

// LLM backends see the full session history on every call so earlier steps
// (notably the embodiment message) condition later answers. The prompt's
// step tag rides along for backends that dispatch on it; HTTP backends can
// ignore it since the text is already in the session.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;

  std::string chat(ChatSession& session, const PromptText& prompt) {
    session.push_user(prompt.text);
    std::string reply = complete(session, prompt);
    session.push_assistant(reply);
    return reply;
  }

 protected:
  // History ends with the pending user message; returns the assistant reply.
  virtual std::string complete(const ChatSession& session, const PromptText& prompt) = 0;
};

struct DetectorRequest {
  std::string image_id;
  std::string uri;
  std::string phrase;       // open-vocabulary query, e.g. "paper box"
  double threshold = 0.3;   // minimum confidence to report
};

class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;

  std::vector<Detection> detect(const DetectorRequest& req) const {
    if (!(req.threshold >= 0.0 && req.threshold <= 1.0))
      throw DataError("detection threshold must be in [0,1]");
    std::vector<Detection> dets = run(req);
    std::vector<Detection> kept;
    for (auto& d : dets) {
      d.validate();
      if (d.confidence >= req.threshold) kept.push_back(std::move(d));
    }
    return kept;
  }

 protected:
  virtual std::vector<Detection> run(const DetectorRequest& req) const = 0;
};

}  // namespace affordkit

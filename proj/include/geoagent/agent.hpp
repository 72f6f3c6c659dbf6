#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "geoagent/tools.hpp"

// The autonomous controller: builds a zero-shot prompt over the tool pool,
// drives think -> act -> observe against a chat backend, parses utterances,
// and keeps the scratchpad until a Final Answer.

namespace geoagent {

// ---------------------------------------------------------------------------
// utterance grammar

struct StepUtterance {
  std::string thought;
  std::string action;        // non-empty, never the literal "None"
  std::string action_input;  // may be empty
};

struct FinalUtterance {
  std::string answer;
};

struct NoneUtterance {
  std::string thought;
};

struct ParseFailure {
  std::string reason;
};

using ParsedUtterance =
    std::variant<StepUtterance, FinalUtterance, NoneUtterance, ParseFailure>;

namespace agent_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// position of `label` at the start of a line (or of the text)
inline std::size_t find_label(const std::string& text, const std::string& label,
                              std::size_t from = 0) {
  std::size_t pos = from;
  while ((pos = text.find(label, pos)) != std::string::npos) {
    if (pos == 0 || text[pos - 1] == '\n') return pos;
    pos += 1;
  }
  return std::string::npos;
}

inline std::string rest_of_line(const std::string& text, std::size_t from) {
  std::size_t eol = text.find('\n', from);
  return text.substr(from, eol == std::string::npos ? std::string::npos : eol - from);
}

}  // namespace agent_detail

// Never throws: any text maps to one of the four variants. A hallucinated
// "Observation:" and anything after it is cut off first.
inline ParsedUtterance parse_utterance(const std::string& raw) {
  using namespace agent_detail;
  std::string text = raw;
  if (std::size_t obs = find_label(text, "Observation:"); obs != std::string::npos)
    text = text.substr(0, obs);

  std::size_t final_pos = text.find("Final Answer:");
  std::size_t action_pos = find_label(text, "Action:");

  if (final_pos != std::string::npos &&
      (action_pos == std::string::npos || final_pos < action_pos)) {
    return FinalUtterance{trim(text.substr(final_pos + 13))};
  }
  if (action_pos == std::string::npos)
    return ParseFailure{"no \"Action:\" or \"Final Answer:\" found"};

  std::string thought = text.substr(0, action_pos);
  if (std::size_t t = thought.find("Thought:"); t != std::string::npos)
    thought = thought.substr(t + 8);
  thought = trim(thought);

  std::string action = trim(rest_of_line(text, action_pos + 7));
  std::string input;
  if (std::size_t in_pos = find_label(text, "Action Input:", action_pos);
      in_pos != std::string::npos)
    input = trim(rest_of_line(text, in_pos + 13));

  if (action == "None") return NoneUtterance{thought};
  if (action.empty()) return ParseFailure{"empty action name"};
  return StepUtterance{thought, action, input};
}

// ---------------------------------------------------------------------------
// transcript

enum class Termination { FinalAnswer, MaxSteps, BackendError };

struct TranscriptStep {
  std::string raw;  // exactly what the backend produced
  ParsedUtterance parsed;
  Observation observation;  // synthetic (empty text) for None/parse steps
};

struct AgentTranscript {
  std::string query;
  std::vector<TranscriptStep> steps;
  std::optional<std::string> final_answer;
  Termination termination = Termination::BackendError;
  std::string backend_error;
};

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::FinalAnswer: return "final_answer";
    case Termination::MaxSteps: return "max_steps";
    case Termination::BackendError: return "backend_error";
  }
  return "backend_error";
}

// JSON-lines serialization: one object per step, then a terminator line.
// Scripted runs use the step index as the ts field so reruns are
// byte-identical; cmd_run substitutes wall-clock stamps for remote backends.
inline std::string transcript_to_jsonl(const AgentTranscript& t) {
  using nlohmann::json;
  std::string out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TranscriptStep& s = t.steps[i];
    json line;
    line["ts"] = i;
    std::string thought, action, input;
    if (auto* step = std::get_if<StepUtterance>(&s.parsed)) {
      thought = step->thought;
      action = step->action;
      input = step->action_input;
    } else if (auto* none = std::get_if<NoneUtterance>(&s.parsed)) {
      thought = none->thought;
      action = "None";
    } else {
      thought = s.raw;
      action = "";
    }
    line["thought"] = thought;
    line["action"] = action;
    line["action_input"] = input;
    line["observation"] = s.observation.text;
    line["ok"] = s.observation.ok;
    out += line.dump();
    out += '\n';
  }
  nlohmann::json tail;
  tail["termination"] = termination_name(t.termination);
  if (t.final_answer) tail["final_answer"] = *t.final_answer;
  out += tail.dump();
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// prompt

inline constexpr const char* kPromptTemplateId = "react-zero-shot-v1";

inline constexpr const char* kCorrectiveObservation =
    "Invalid format, use Action/Action Input or Final Answer";

namespace agent_detail {

inline std::string serialize_step(const TranscriptStep& s) {
  std::string out;
  if (auto* step = std::get_if<StepUtterance>(&s.parsed)) {
    out += "Thought:";
    if (!step->thought.empty()) out += " " + step->thought;
    out += "\nAction: " + step->action;
    out += "\nAction Input: " + step->action_input;
    out += "\nObservation: " + s.observation.text;
    out += "\nThought:";
  } else if (auto* none = std::get_if<NoneUtterance>(&s.parsed)) {
    out += "Thought:";
    if (!none->thought.empty()) out += " " + none->thought;
    out += "\nAction: None";
    out += "\nThought:";
  } else {
    // unparseable reply: echo it, then the corrective observation
    out += "Thought: " + s.raw;
    out += "\nObservation: " + s.observation.text;
    out += "\nThought:";
  }
  return out;
}

}  // namespace agent_detail

inline std::string build_prompt(const ToolRegistry& registry, const std::string& query,
                                const AgentTranscript& transcript) {
  std::string tool_lines, tool_names;
  for (const auto& t : registry.tools()) {
    tool_lines += t.name + ": " + t.description + "\n";
    if (!tool_names.empty()) tool_names += ", ";
    tool_names += t.name;
  }
  std::string p;
  p += "Answer the following questions as best you can. You have access to the "
       "following tools:\n\n";
  p += tool_lines;
  p += "\nUse the following format:\n\n";
  p += "Question: the input question you must answer\n";
  p += "Thought: you should always think about what to do\n";
  p += "Action: the action to take, should be one of [" + tool_names + "]\n";
  p += "Action Input: the input to the action\n";
  p += "Observation: the result of the action\n";
  p += "... (this Thought/Action/Action Input/Observation can repeat N times)\n";
  p += "Thought: I now know the final answer\n";
  p += "Final Answer: the final answer to the original input question\n";
  p += "\nBegin!\n\n";
  p += "Question: " + query + "\n";
  if (transcript.steps.empty()) {
    p += "Thought:";
  } else {
    for (std::size_t i = 0; i < transcript.steps.size(); ++i) {
      std::string chunk = agent_detail::serialize_step(transcript.steps[i]);
      if (i + 1 < transcript.steps.size()) {
        // strip the trailing "Thought:"; the next step carries its own
        chunk.resize(chunk.size() - 8);
      }
      p += chunk;
    }
  }
  return p;
}

// Recover the step sequence from the scratchpad region of a prompt; used to
// check that serialization round-trips.
inline std::vector<ParsedUtterance> parse_scratchpad(const std::string& prompt,
                                                     const std::string& query) {
  std::string marker = "Question: " + query + "\n";
  std::size_t start = prompt.rfind(marker);
  if (start == std::string::npos) return {};
  std::string pad = prompt.substr(start + marker.size());
  std::vector<ParsedUtterance> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = agent_detail::find_label(pad, "Thought:", pos + 1);
    std::string chunk = pad.substr(pos, next == std::string::npos ? std::string::npos
                                                                  : next - pos);
    if (agent_detail::trim(chunk) != "Thought:" && !agent_detail::trim(chunk).empty()) {
      ParsedUtterance u = parse_utterance(chunk);
      if (!std::holds_alternative<ParseFailure>(u)) out.push_back(std::move(u));
    }
    if (next == std::string::npos) break;
    pos = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// backends

struct ChatBackend {
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Canned utterances consumed in order; running out is a backend error.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> utterances)
      : utterances_(std::move(utterances)) {}

  std::string complete(const std::string&) override {
    if (cursor_ >= utterances_.size())
      throw BackendError("script exhausted after " + std::to_string(cursor_) +
                         " utterances");
    return utterances_[cursor_++];
  }

  std::size_t consumed() const { return cursor_; }

 private:
  std::vector<std::string> utterances_;
  std::size_t cursor_ = 0;
};

struct RemoteChatConfig {
  std::string base_url;        // e.g. http://localhost:8089
  std::string path = "/v1/chat/completions";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::vector<std::string> stop = {"Observation:"};
};

// Request body for an OpenAI-style chat-completion endpoint; split out so it
// can be tested without a network.
inline std::string build_chat_request(const RemoteChatConfig& cfg,
                                      const std::string& prompt) {
  nlohmann::json body;
  body["model"] = cfg.model;
  body["temperature"] = cfg.temperature;
  body["stop"] = cfg.stop;
  body["messages"] = nlohmann::json::array(
      {{{"role", "system"},
        {"content",
         "You are an assistant that solves geospatial tasks by reasoning step "
         "by step and calling the provided tools."}},
       {{"role", "user"}, {"content", prompt}}});
  return body.dump();
}

class RemoteChat : public ChatBackend {
 public:
  explicit RemoteChat(RemoteChatConfig cfg) : cfg_(std::move(cfg)) {}

  std::string complete(const std::string& prompt) override {
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(15);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!cfg_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    auto res = client.Post(cfg_.path, headers, build_chat_request(cfg_, prompt),
                           "application/json");
    if (!res) throw BackendError("chat request to " + cfg_.base_url + " failed");
    if (res->status != 200)
      throw BackendError("chat endpoint returned " + std::to_string(res->status) +
                         ": " + res->body);
    try {
      auto doc = nlohmann::json::parse(res->body);
      const auto& choice = doc.at("choices").at(0);
      if (choice.contains("message")) return choice["message"].at("content");
      return choice.at("text");
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("malformed chat response: ") + e.what());
    }
  }

 private:
  RemoteChatConfig cfg_;
};

// ---------------------------------------------------------------------------
// the loop

struct AgentConfig {
  int max_steps = 15;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::vector<std::string> stop = {"Observation:"};
  std::string prompt_template = kPromptTemplateId;
};

// Optional observer for live step streaming.
using StepCallback = std::function<void(const TranscriptStep&)>;

inline AgentTranscript run_agent(const std::string& query, const ToolRegistry& registry,
                                 ChatBackend& backend, const AgentConfig& config = {},
                                 const StepCallback& on_step = {}) {
  if (config.max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (config.temperature < 0) throw ConfigError("temperature must be non-negative");

  AgentTranscript t;
  t.query = query;
  bool expecting_final = false;

  while (static_cast<int>(t.steps.size()) < config.max_steps) {
    std::string raw;
    try {
      raw = backend.complete(build_prompt(registry, query, t));
    } catch (const std::exception& e) {
      t.termination = Termination::BackendError;
      t.backend_error = e.what();
      return t;
    }
    ParsedUtterance parsed = parse_utterance(raw);

    if (auto* fin = std::get_if<FinalUtterance>(&parsed)) {
      t.final_answer = fin->answer;
      t.termination = Termination::FinalAnswer;
      return t;
    }

    TranscriptStep step;
    step.raw = raw;

    if (expecting_final) {
      // the one retry after "Action: None" did not produce a Final Answer
      expecting_final = false;
      step.parsed = ParseFailure{"expected a Final Answer"};
      step.observation = {kCorrectiveObservation, {}, false};
    } else if (auto* s = std::get_if<StepUtterance>(&parsed)) {
      step.parsed = parsed;
      step.observation = dispatch(registry, s->action, s->action_input);
    } else if (std::holds_alternative<NoneUtterance>(parsed)) {
      step.parsed = parsed;
      step.observation = {"", {}, true};  // placeholder; re-prompt for the answer
      expecting_final = true;
    } else {
      step.parsed = parsed;
      step.observation = {kCorrectiveObservation, {}, false};
    }

    t.steps.push_back(std::move(step));
    if (on_step) on_step(t.steps.back());
  }
  t.termination = Termination::MaxSteps;
  return t;
}

}  // namespace geoagent

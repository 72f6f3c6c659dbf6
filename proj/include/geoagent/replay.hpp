#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geoagent/agent.hpp"
#include "geoagent/tools.hpp"

// Trace replay: a fixture carries the scripted utterances of one recorded
// session plus the expected tool-call sequence. The agent runs against the
// script with mock providers, and the realized transcript is compared step
// by step: tool name, input binding, observation class, and (when the
// fixture pins it) the full observation text after path normalization.
//
// Fixture format, plain sections:
//   ### query        one query, possibly multi-line
//   ### config       key=value lines (loader overrides, flags)  [optional]
//   ### utterance    one scripted utterance, repeated per step
//   ### expect       action <TAB> input <TAB> class <TAB> observation
//   ### final        expected final answer                      [optional]
// Classes: success, T1, T2, T3, none, corrective.

namespace geoagent {

struct TraceFixture {
  std::string query;
  std::map<std::string, std::string> config;
  std::vector<std::string> utterances;
  struct Expect {
    std::string action;
    std::string input;
    std::string cls;
    std::string observation;  // empty = class check only
  };
  std::vector<Expect> expects;
  std::optional<std::string> final_answer;
};

inline TraceFixture parse_trace_fixture(const std::string& text) {
  TraceFixture fx;
  std::istringstream in(text);
  std::string line, section;
  std::vector<std::string> buf;
  auto flush = [&] {
    while (!buf.empty() && buf.back().empty()) buf.pop_back();
    std::string joined;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      if (i) joined += '\n';
      joined += buf[i];
    }
    if (section == "query") {
      fx.query = joined;
    } else if (section == "utterance") {
      fx.utterances.push_back(joined);
    } else if (section == "config") {
      for (const auto& l : buf) {
        if (l.empty()) continue;
        std::size_t eq = l.find('=');
        if (eq == std::string::npos)
          throw FormatError("config line needs key=value: " + l);
        fx.config[l.substr(0, eq)] = l.substr(eq + 1);
      }
    } else if (section == "expect") {
      for (const auto& l : buf) {
        if (l.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : l) {
          if (c == '\t') {
            fields.push_back(cur);
            cur.clear();
          } else {
            cur += c;
          }
        }
        fields.push_back(cur);
        if (fields.size() < 3)
          throw FormatError("expect line needs at least 3 tab-separated fields: " + l);
        TraceFixture::Expect e;
        e.action = fields[0];
        e.input = fields[1];
        e.cls = fields[2];
        if (fields.size() > 3) e.observation = fields[3];
        fx.expects.push_back(std::move(e));
      }
    } else if (section == "final") {
      fx.final_answer = joined;
    } else if (!section.empty()) {
      throw FormatError("unknown section: " + section);
    }
    buf.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("### ", 0) == 0) {
      flush();
      section = line.substr(4);
      continue;
    }
    buf.push_back(line);
  }
  flush();
  if (fx.query.empty()) throw FormatError("fixture has no query");
  if (fx.utterances.empty()) throw FormatError("fixture has no utterances");
  return fx;
}

inline TraceFixture load_trace_fixture(const std::string& path) {
  return parse_trace_fixture(io_detail::slurp(path));
}

// ---------------------------------------------------------------------------

namespace replay_detail {

// Replace `from` with `to`, skipping spots where `to` is already in place
// (keeps roots like "data_use" from double-prefixing "./data_use").
inline void replace_all(std::string& s, const std::string& from, const std::string& to) {
  if (from.empty() || from == to) return;
  std::size_t guard = to.size() > from.size() &&
                              to.compare(to.size() - from.size(), from.size(), from) == 0
                          ? to.size() - from.size()
                          : 0;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    if (guard > 0 && pos >= guard && s.compare(pos - guard, to.size(), to) == 0) {
      pos += 1;
      continue;
    }
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace replay_detail

// Map configured roots back to the conventional spellings so fixtures can be
// written with "./data_use" / "./data_output" paths regardless of layout.
// Roots are matched with their trailing slash; tool outputs always render
// them that way.
inline std::string normalize_paths(std::string text, const RegistryOptions& opts) {
  replay_detail::replace_all(text, opts.output_root + "/", "./data_output/");
  replay_detail::replace_all(text, opts.data_use_root + "/", "./data_use/");
  return text;
}

inline std::string classify_observation(const TranscriptStep& step,
                                        const ToolContext& ctx) {
  if (std::holds_alternative<NoneUtterance>(step.parsed)) return "none";
  const std::string& text = step.observation.text;
  if (text == kCorrectiveObservation) return "corrective";
  if (text == ctx.failure_text(FailureTemplate::Generic)) return "T1";
  if (text == ctx.failure_text(FailureTemplate::Mapping)) return "T2";
  const std::string t3_tail = " is not a valid tool, try another one.";
  if (text.size() > t3_tail.size() &&
      text.compare(text.size() - t3_tail.size(), t3_tail.size(), t3_tail) == 0)
    return "T3";
  return step.observation.ok ? "success" : "other";
}

struct ReplayReport {
  bool pass = false;
  int divergence_step = -1;  // -1 when none
  std::vector<std::string> lines;
  AgentTranscript transcript;
};

inline void apply_fixture_config(const TraceFixture& fx, RegistryOptions& opts,
                                 AgentConfig& agent_cfg) {
  for (const auto& [key, value] : fx.config) {
    if (opts.loader_paths.count(key)) {
      opts.loader_paths[key] = value;
    } else if (key == "extras") {
      opts.include_extras = value == "true";
    } else if (key == "auto_close_poi_ring") {
      opts.auto_close_poi_ring = value == "true";
    } else if (key == "max_steps") {
      agent_cfg.max_steps = std::stoi(value);
    } else {
      throw FormatError("unknown fixture config key: " + key);
    }
  }
}

inline ReplayReport run_replay(const TraceFixture& fx, ProviderBinding providers,
                               RegistryOptions opts, AgentConfig agent_cfg = {}) {
  apply_fixture_config(fx, opts, agent_cfg);
  if (agent_cfg.max_steps < static_cast<int>(fx.utterances.size()))
    agent_cfg.max_steps = static_cast<int>(fx.utterances.size());
  ToolRegistry registry = register_default_pool(std::move(providers), opts);
  ScriptedBackend backend{fx.utterances};

  ReplayReport report;
  report.transcript = run_agent(fx.query, registry, backend, agent_cfg);

  const auto& steps = report.transcript.steps;
  bool ok = true;
  std::size_t n = std::max(steps.size(), fx.expects.size());
  for (std::size_t i = 0; i < n && ok; ++i) {
    if (i >= steps.size()) {
      report.lines.push_back("step " + std::to_string(i + 1) + ": MISSING, expected " +
                             fx.expects[i].action);
      report.divergence_step = static_cast<int>(i);
      ok = false;
      break;
    }
    if (i >= fx.expects.size()) {
      report.lines.push_back("step " + std::to_string(i + 1) + ": UNEXPECTED extra step");
      report.divergence_step = static_cast<int>(i);
      ok = false;
      break;
    }
    const TranscriptStep& s = steps[i];
    const TraceFixture::Expect& e = fx.expects[i];
    std::string action, input;
    if (auto* st = std::get_if<StepUtterance>(&s.parsed)) {
      action = st->action;
      input = st->action_input;
    } else if (std::holds_alternative<NoneUtterance>(s.parsed)) {
      action = "None";
    }
    std::string cls = classify_observation(s, registry.context());
    std::string obs_norm =
        normalize_paths(s.observation.text, registry.context().opts);
    std::string diff;
    if (action != e.action)
      diff = "action \"" + action + "\" != \"" + e.action + "\"";
    else if (normalize_paths(input, registry.context().opts) != e.input)
      diff = "input \"" + input + "\" != \"" + e.input + "\"";
    else if (cls != e.cls)
      diff = "observation class " + cls + " != " + e.cls;
    else if (!e.observation.empty() && obs_norm != e.observation)
      diff = "observation \"" + obs_norm + "\" != \"" + e.observation + "\"";
    if (diff.empty()) {
      report.lines.push_back("step " + std::to_string(i + 1) + ": OK " +
                             (action.empty() ? "(unparsed)" : action) + " [" + cls + "]");
    } else {
      report.lines.push_back("step " + std::to_string(i + 1) + ": FAIL " + diff);
      report.divergence_step = static_cast<int>(i);
      ok = false;
    }
  }
  if (ok && fx.final_answer) {
    if (report.transcript.termination != Termination::FinalAnswer) {
      report.lines.push_back(std::string("final: FAIL terminated by ") +
                             termination_name(report.transcript.termination));
      ok = false;
    } else {
      std::string got =
          normalize_paths(*report.transcript.final_answer, registry.context().opts);
      if (got != *fx.final_answer) {
        report.lines.push_back("final: FAIL \"" + got + "\" != \"" + *fx.final_answer +
                               "\"");
        ok = false;
      } else {
        report.lines.push_back("final: OK");
      }
    }
  }
  report.pass = ok;
  report.lines.push_back(report.pass
                             ? "PASS " + std::to_string(fx.expects.size()) + "/" +
                                   std::to_string(fx.expects.size()) + " calls matched"
                             : "FAIL at step " +
                                   std::to_string(report.divergence_step + 1));
  return report;
}

}  // namespace geoagent

#include <catch_amalgamated.hpp>

#include <thread>

#include "test_support.hpp"

using namespace geoagent;
using test_support::fresh_dir;
using test_support::make_test_registry;

TEST_CASE("utterance grammar handles the canonical shapes") {
  auto step = parse_utterance(
      "Thought: I need to buffer the stations\nAction: Buffer\nAction Input: ./a.shp, 500");
  auto* s = std::get_if<StepUtterance>(&step);
  REQUIRE(s);
  REQUIRE(s->thought == "I need to buffer the stations");
  REQUIRE(s->action == "Buffer");
  REQUIRE(s->action_input == "./a.shp, 500");

  auto none = parse_utterance("Thought:\nAction: None");
  REQUIRE(std::holds_alternative<NoneUtterance>(none));

  auto fin = parse_utterance("Thought: done\n\nFinal Answer: The result is ./x.shp.");
  auto* f = std::get_if<FinalUtterance>(&fin);
  REQUIRE(f);
  REQUIRE(f->answer == "The result is ./x.shp.");

  REQUIRE(std::holds_alternative<ParseFailure>(parse_utterance("lorem ipsum")));
  REQUIRE(std::holds_alternative<ParseFailure>(parse_utterance("")));
}

TEST_CASE("parser details: missing labels, continuations, precedence") {
  // missing Action Input means an empty input
  auto step = parse_utterance("Action: Load_Subway_Data");
  auto* s = std::get_if<StepUtterance>(&step);
  REQUIRE(s);
  REQUIRE(s->action_input.empty());

  // leading Thought label is optional (the prompt ends with "Thought:")
  auto bare = parse_utterance(" I should load data\nAction: Load_Subway_Data\nAction Input: None");
  auto* b = std::get_if<StepUtterance>(&bare);
  REQUIRE(b);
  REQUIRE(b->thought == "I should load data");

  // hallucinated observation is cut off
  auto guard = parse_utterance(
      "Thought: x\nAction: Buffer\nAction Input: a, 1\nObservation: I made this up\n"
      "Thought: and continued\nAction: Erase");
  auto* g = std::get_if<StepUtterance>(&guard);
  REQUIRE(g);
  REQUIRE(g->action == "Buffer");

  // Final Answer before any Action wins
  auto fin = parse_utterance("Final Answer: done\nAction: Buffer");
  REQUIRE(std::holds_alternative<FinalUtterance>(fin));
  // ... but an Action first makes it a step
  auto act = parse_utterance("Action: Buffer\nAction Input: x, 1\nFinal Answer: no");
  REQUIRE(std::holds_alternative<StepUtterance>(act));

  // empty action name is a parse failure, not a step
  REQUIRE(std::holds_alternative<ParseFailure>(parse_utterance("Action:\nAction Input: x")));
}

TEST_CASE("parser never crashes on random or mutated text") {
  std::mt19937 rng(4242);
  const std::string seedtext =
      "Thought: I need to buffer\nAction: Buffer\nAction Input: ./a.shp, 500\n"
      "Final Answer: done Observation: x";
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    if (i % 2 == 0) {
      int len = static_cast<int>(rng() % 120);
      for (int k = 0; k < len; ++k) text += static_cast<char>(rng() % 256);
    } else {
      text = seedtext;
      int edits = 1 + static_cast<int>(rng() % 6);
      for (int e = 0; e < edits && !text.empty(); ++e) {
        std::size_t pos = rng() % text.size();
        switch (rng() % 3) {
          case 0: text.erase(pos, 1 + rng() % 5); break;
          case 1: text.insert(pos, 1, static_cast<char>(rng() % 256)); break;
          default: std::swap(text[pos], text[rng() % text.size()]);
        }
      }
    }
    auto u = parse_utterance(text);
    bool valid = std::holds_alternative<StepUtterance>(u) ||
                 std::holds_alternative<FinalUtterance>(u) ||
                 std::holds_alternative<NoneUtterance>(u) ||
                 std::holds_alternative<ParseFailure>(u);
    REQUIRE(valid);
    if (auto* st = std::get_if<StepUtterance>(&u)) {
      REQUIRE_FALSE(st->action.empty());
      REQUIRE(st->action != "None");
    }
  }
}

TEST_CASE("the prompt lists every tool and ends at the thought cursor") {
  auto reg = make_test_registry(fresh_dir("prompt"));
  AgentTranscript empty;
  std::string p = build_prompt(reg, "find hotels", empty);
  REQUIRE(p.ends_with("Question: find hotels\nThought:"));
  for (const auto& t : reg.tools()) {
    REQUIRE(p.find(t.name + ": " + t.description + "\n") != std::string::npos);
  }
  REQUIRE(p.find("Action: the action to take, should be one of [") != std::string::npos);
  // registration order is preserved in the description block
  std::size_t prev = 0;
  for (const auto& t : reg.tools()) {
    std::size_t pos = p.find(t.name + ": ");
    REQUIRE(pos != std::string::npos);
    REQUIRE(pos > prev);
    prev = pos;
  }
}

TEST_CASE("prior steps appear verbatim in the scratchpad") {
  auto reg = make_test_registry(fresh_dir("prompt"));
  AgentTranscript t;
  t.query = "q";
  TranscriptStep step;
  step.parsed = StepUtterance{"I need subway data", "Load_Subway_Data", "None"};
  step.observation = {"I obtain the dataset of subway stations, it is stored in x.shp",
                      {},
                      true};
  t.steps.push_back(step);
  std::string p = build_prompt(reg, "q", t);
  REQUIRE(p.find("Thought: I need subway data\n"
                 "Action: Load_Subway_Data\n"
                 "Action Input: None\n"
                 "Observation: I obtain the dataset of subway stations, it is stored "
                 "in x.shp\n"
                 "Thought:") != std::string::npos);
  REQUIRE(p.ends_with("Thought:"));
}

TEST_CASE("scratchpad serialization round-trips through the parser") {
  auto reg = make_test_registry(fresh_dir("pad"));
  AgentTranscript t;
  t.query = "roundtrip";
  TranscriptStep s1;
  s1.parsed = StepUtterance{"first", "Buffer", "./a.shp, 500"};
  s1.observation = {"obs one", {}, true};
  TranscriptStep s2;
  s2.parsed = StepUtterance{"", "Load_Hotel_Data", "None"};
  s2.observation = {"obs two", {}, true};
  TranscriptStep s3;
  s3.parsed = NoneUtterance{"wrapping up"};
  s3.observation = {"", {}, true};
  t.steps = {s1, s2, s3};
  std::string prompt = build_prompt(reg, "roundtrip", t);
  auto recovered = parse_scratchpad(prompt, "roundtrip");
  REQUIRE(recovered.size() == 3);
  auto* r1 = std::get_if<StepUtterance>(&recovered[0]);
  REQUIRE(r1);
  REQUIRE(r1->thought == "first");
  REQUIRE(r1->action == "Buffer");
  REQUIRE(r1->action_input == "./a.shp, 500");
  auto* r2 = std::get_if<StepUtterance>(&recovered[1]);
  REQUIRE(r2);
  REQUIRE(r2->thought.empty());
  REQUIRE(r2->action == "Load_Hotel_Data");
  REQUIRE(std::holds_alternative<NoneUtterance>(recovered[2]));
}

TEST_CASE("a lone final answer ends the run with zero tool calls") {
  auto reg = make_test_registry(fresh_dir("run"));
  ScriptedBackend backend{{"Final Answer: nothing to do"}};
  auto t = run_agent("noop", reg, backend);
  REQUIRE(t.termination == Termination::FinalAnswer);
  REQUIRE(t.steps.empty());
  REQUIRE(*t.final_answer == "nothing to do");
}

TEST_CASE("a scripted polygon download makes exactly one tool call") {
  std::string out = fresh_dir("run");
  auto opts = test_support::test_registry_options(out);
  opts.auto_close_poi_ring = true;
  auto reg = register_default_pool(make_mock_providers(test_support::data_use()), opts);
  ScriptedBackend backend{
      {"Thought:\nAction: Get_POI_By_Polygon\nAction Input: "
       "\"39.820,116.260|39.990,116.260|39.990,116.490|39.820,116.490\"",
       "Thought: Review original question and check my total process\n\n"
       "Final Answer: The POI data can be found in the file " + out + "/POI/POI.csv."}};
  auto t = run_agent("download poi", reg, backend);
  REQUIRE(t.termination == Termination::FinalAnswer);
  REQUIRE(t.steps.size() == 1);
  auto* s = std::get_if<StepUtterance>(&t.steps[0].parsed);
  REQUIRE(s);
  REQUIRE(s->action == "Get_POI_By_Polygon");
  REQUIRE(t.steps[0].observation.ok);
  REQUIRE(t.final_answer->find("POI.csv") != std::string::npos);
}

TEST_CASE("none action re-prompts once for the final answer") {
  auto reg = make_test_registry(fresh_dir("run"));
  ScriptedBackend backend{{"Thought:\nAction: None", "Final Answer: all done"}};
  auto t = run_agent("noop", reg, backend);
  REQUIRE(t.termination == Termination::FinalAnswer);
  REQUIRE(t.steps.size() == 1);
  REQUIRE(std::holds_alternative<NoneUtterance>(t.steps[0].parsed));
  REQUIRE(*t.final_answer == "all done");
}

TEST_CASE("a non-final reply after none is treated as a format problem") {
  auto reg = make_test_registry(fresh_dir("run"));
  ScriptedBackend backend{{"Thought:\nAction: None",
                           "Thought:\nAction: Load_Subway_Data\nAction Input: None",
                           "Final Answer: ok"}};
  auto t = run_agent("noop", reg, backend);
  REQUIRE(t.termination == Termination::FinalAnswer);
  REQUIRE(t.steps.size() == 2);
  REQUIRE(t.steps[1].observation.text == kCorrectiveObservation);
}

TEST_CASE("unparseable replies get the corrective observation and the run continues") {
  auto reg = make_test_registry(fresh_dir("run"));
  ScriptedBackend backend{{"complete gibberish", "Final Answer: recovered"}};
  auto t = run_agent("noop", reg, backend);
  REQUIRE(t.termination == Termination::FinalAnswer);
  REQUIRE(t.steps.size() == 1);
  REQUIRE(t.steps[0].observation.text == kCorrectiveObservation);
  REQUIRE(*t.final_answer == "recovered");
}

TEST_CASE("the step limit bounds a runaway script") {
  auto reg = make_test_registry(fresh_dir("run"));
  std::vector<std::string> script(
      20, "Thought:\nAction: Load_Subway_Data\nAction Input: None");
  ScriptedBackend backend{script};
  AgentConfig cfg;
  cfg.max_steps = 15;
  auto t = run_agent("loop", reg, backend, cfg);
  REQUIRE(t.termination == Termination::MaxSteps);
  REQUIRE(t.steps.size() == 15);
  REQUIRE(backend.consumed() == 15);
}

TEST_CASE("script exhaustion surfaces as a backend error with a partial transcript") {
  auto reg = make_test_registry(fresh_dir("run"));
  ScriptedBackend backend{{"Thought:\nAction: Load_Subway_Data\nAction Input: None"}};
  auto t = run_agent("incomplete", reg, backend);
  REQUIRE(t.termination == Termination::BackendError);
  REQUIRE(t.steps.size() == 1);
  REQUIRE_FALSE(t.backend_error.empty());
}

TEST_CASE("transcripts alternate utterance and observation") {
  std::string out = fresh_dir("run");
  auto reg = make_test_registry(out);
  ScriptedBackend backend{
      {"Thought: load\nAction: Load_Subway_Data\nAction Input: None",
       "Thought: buffer\nAction: Buffer\nAction Input: ./data_use/case2/subway_station.shp, 500",
       "Final Answer: done"}};
  auto t = run_agent("two steps", reg, backend);
  REQUIRE(t.steps.size() == 2);
  for (const auto& step : t.steps) {
    REQUIRE(std::holds_alternative<StepUtterance>(step.parsed));
    REQUIRE_FALSE(step.observation.text.empty());
  }
}

TEST_CASE("scripted runs are a pure function of script and fixtures") {
  auto run_once = [&] {
    std::string out = fresh_dir("det");
    auto reg = make_test_registry(out);
    ScriptedBackend backend{
        {"Thought: load\nAction: Load_Subway_Data\nAction Input: None",
         "Thought:\nAction: Buffer\nAction Input: ./data_use/case2/subway_station.shp, 500",
         "Final Answer: stored"}};
    auto t = run_agent("same", reg, backend);
    // normalize the per-run output root before comparing
    return normalize_paths(transcript_to_jsonl(t), test_support::test_registry_options(out));
  };
  REQUIRE(run_once() == run_once());
}

TEST_CASE("recovery: an invalid tool name yields the T3 observation and the run completes") {
  auto reg = make_test_registry(fresh_dir("rec"));
  ScriptedBackend backend{
      {"Thought: try a made-up tool\nAction: Load_Hubei_University_Data\nAction Input: None",
       "Thought: fall back\nAction: Load_Subway_Data\nAction Input: None",
       "Final Answer: recovered with the subway dataset"}};
  auto t = run_agent("recover", reg, backend);
  REQUIRE(t.termination == Termination::FinalAnswer);
  REQUIRE(t.steps.size() == 2);
  REQUIRE(t.steps[0].observation.text ==
          "Load_Hubei_University_Data is not a valid tool, try another one.");
  REQUIRE(t.steps[1].observation.ok);
}

TEST_CASE("chat request bodies pin model, temperature, stop, and both messages") {
  RemoteChatConfig cfg;
  cfg.model = "gpt-3.5-turbo";
  cfg.temperature = 0.0;
  auto body = nlohmann::json::parse(build_chat_request(cfg, "PROMPT TEXT"));
  REQUIRE(body["model"] == "gpt-3.5-turbo");
  REQUIRE(body["temperature"] == 0.0);
  REQUIRE(body["stop"][0] == "Observation:");
  REQUIRE(body["messages"].size() == 2);
  REQUIRE(body["messages"][0]["role"] == "system");
  REQUIRE(body["messages"][1]["role"] == "user");
  REQUIRE(body["messages"][1]["content"] == "PROMPT TEXT");
}

TEST_CASE("the remote backend speaks to a chat-completion endpoint") {
  httplib::Server server;
  std::string seen_auth, seen_body;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_auth = req.get_header_value("Authorization");
                seen_body = req.body;
                res.set_content(
                    R"({"choices":[{"message":{"role":"assistant","content":"Final Answer: ok"}}]})",
                    "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteChatConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.api_key = "sk-test";
  RemoteChat backend(cfg);
  std::string reply = backend.complete("hello");
  REQUIRE(reply == "Final Answer: ok");
  REQUIRE(seen_auth == "Bearer sk-test");
  REQUIRE(nlohmann::json::parse(seen_body)["messages"][1]["content"] == "hello");

  server.stop();
  worker.join();
}

TEST_CASE("fixture parsing reads sections and expectations") {
  auto fx = load_trace_fixture(test_support::trace("table6.trace"));
  REQUIRE(fx.utterances.size() == 9);
  REQUIRE(fx.expects.size() == 8);
  REQUIRE(fx.expects[0].action == "Load_Subway_Data");
  REQUIRE(fx.expects[7].action == "Intersect");
  REQUIRE(fx.final_answer.has_value());
}

TEST_CASE("a swapped tool order is caught by replay conformance") {
  auto fx = load_trace_fixture(test_support::trace("table6.trace"));
  std::swap(fx.expects[1], fx.expects[6]);  // Buffer <-> Erase
  auto report = run_replay(fx, make_mock_providers(test_support::data_use()),
                           test_support::test_registry_options(fresh_dir("neg")));
  REQUIRE_FALSE(report.pass);
  REQUIRE(report.divergence_step == 1);
}

// Command-line entry point.
//
//   geoagent run "query"        run the agent once, stream the steps
//   geoagent replay trace.file  conformance-check a recorded session
//   geoagent tool NAME INPUT    dispatch a single tool directly
//   geoagent chat               interactive session, one run per line
//
// Exit codes for `run`: 0 final answer, 1 configuration error, 2 step limit
// reached, 3 backend failure. `replay`: 0 conformant, 4 divergence.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "geoagent/geoagent.hpp"

namespace {

using namespace geoagent;

struct CliOptions {
  std::string backend = "scripted";  // scripted | remote
  std::string endpoint;
  std::string token_env = "GEOAGENT_API_KEY";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_steps = 15;
  std::string fixtures = "./data_use";
  std::string out = "./data_output";
  std::string providers = "mock";  // mock | live
  std::string provider_endpoint;
  std::string script;
  bool verbatim_templates = true;
  bool extras = false;
  bool auto_close_poi_ring = false;
  int classes = 5;
  unsigned seed = 42;
};

RegistryOptions make_registry_options(const CliOptions& cli) {
  RegistryOptions opts;
  opts.output_root = cli.out;
  opts.data_use_root = cli.fixtures;
  opts.verbatim_templates = cli.verbatim_templates;
  opts.include_extras = cli.extras;
  opts.auto_close_poi_ring = cli.auto_close_poi_ring;
  opts.classify.k = cli.classes;
  opts.classify.seed = cli.seed;
  return opts;
}

ProviderBinding make_providers(const CliOptions& cli) {
  if (cli.providers == "mock") return make_mock_providers(cli.fixtures);
  if (cli.provider_endpoint.empty())
    throw ConfigError("--provider-endpoint is required with --providers live");
  ProviderBinding b;
  b.poi = std::make_shared<HttpPoiProvider>(cli.provider_endpoint);
  b.roads = std::make_shared<HttpRoadProvider>(cli.provider_endpoint);
  b.rs = std::make_shared<HttpRsProvider>(cli.provider_endpoint);
  b.geocoder = std::make_shared<HttpGeocoder>(cli.provider_endpoint);
  return b;
}

std::unique_ptr<ChatBackend> make_backend(const CliOptions& cli) {
  if (cli.backend == "scripted") {
    if (cli.script.empty())
      throw ConfigError("--script is required with the scripted backend");
    TraceFixture fx = load_trace_fixture(cli.script);
    return std::make_unique<ScriptedBackend>(fx.utterances);
  }
  if (cli.backend == "remote") {
    if (cli.endpoint.empty())
      throw ConfigError("--endpoint is required with the remote backend");
    const char* token = std::getenv(cli.token_env.c_str());
    if (!token)
      throw ConfigError("auth token environment variable " + cli.token_env +
                        " is not set");
    RemoteChatConfig cfg;
    cfg.base_url = cli.endpoint;
    cfg.api_key = token;
    cfg.model = cli.model;
    cfg.temperature = cli.temperature;
    return std::make_unique<RemoteChat>(cfg);
  }
  throw ConfigError("unknown backend: " + cli.backend);
}

AgentConfig make_agent_config(const CliOptions& cli) {
  AgentConfig cfg;
  cfg.max_steps = cli.max_steps;
  cfg.model = cli.model;
  cfg.temperature = cli.temperature;
  return cfg;
}

void print_step(const TranscriptStep& s) {
  if (auto* step = std::get_if<StepUtterance>(&s.parsed)) {
    std::printf("Thought: %s\n", step->thought.c_str());
    std::printf("Action: %s\n", step->action.c_str());
    std::printf("Action Input: %s\n", step->action_input.c_str());
    std::printf("Observation: %s\n\n", s.observation.text.c_str());
  } else if (auto* none = std::get_if<NoneUtterance>(&s.parsed)) {
    std::printf("Thought: %s\n", none->thought.c_str());
    std::printf("Action: None\n\n");
  } else {
    std::printf("(unparseable reply)\n%s\n", s.raw.c_str());
    std::printf("Observation: %s\n\n", s.observation.text.c_str());
  }
  std::fflush(stdout);
}

void persist_transcript(const AgentTranscript& t, const std::string& out_root,
                        const std::string& name) {
  std::string dir = out_root + "/transcripts";
  std::filesystem::create_directories(dir);
  io_detail::spit(dir + "/" + name, transcript_to_jsonl(t));
}

int run_once(const CliOptions& cli, const std::string& query,
             const std::string& transcript_name) {
  ToolRegistry registry =
      register_default_pool(make_providers(cli), make_registry_options(cli));
  auto backend = make_backend(cli);
  AgentTranscript t =
      run_agent(query, registry, *backend, make_agent_config(cli), print_step);
  persist_transcript(t, cli.out, transcript_name);
  switch (t.termination) {
    case Termination::FinalAnswer:
      std::printf("Final Answer: %s\n", t.final_answer->c_str());
      return 0;
    case Termination::MaxSteps:
      std::printf("(stopped: step limit %d reached)\n", cli.max_steps);
      return 2;
    case Termination::BackendError:
      std::printf("(stopped: backend error: %s)\n", t.backend_error.c_str());
      return 3;
  }
  return 3;
}

int cmd_run(const CliOptions& cli, const std::string& query) {
  return run_once(cli, query, "transcript.jsonl");
}

int cmd_replay(const CliOptions& cli, const std::string& trace_path) {
  TraceFixture fx = load_trace_fixture(trace_path);
  ReplayReport report =
      run_replay(fx, make_providers(cli), make_registry_options(cli),
                 make_agent_config(cli));
  for (const auto& line : report.lines) std::printf("%s\n", line.c_str());
  return report.pass ? 0 : 4;
}

int cmd_tool(const CliOptions& cli, const std::string& name, const std::string& input) {
  ToolRegistry registry =
      register_default_pool(make_providers(cli), make_registry_options(cli));
  Observation obs = dispatch(registry, name, input);
  std::printf("%s\n", obs.text.c_str());
  return 0;
}

int cmd_chat(const CliOptions& cli) {
  ToolRegistry registry =
      register_default_pool(make_providers(cli), make_registry_options(cli));
  std::printf("geoagent chat — /tools lists the pool, /quit exits\n");
  std::string line;
  int counter = 0;
  while (true) {
    std::printf("> ");
    std::fflush(stdout);
    if (!std::getline(std::cin, line)) break;
    if (line.empty()) continue;
    if (line == "/quit") break;
    if (line == "/tools") {
      for (const auto& t : registry.tools())
        std::printf("%s: %s\n", t.name.c_str(), t.description.c_str());
      continue;
    }
    try {
      auto backend = make_backend(cli);
      AgentTranscript t =
          run_agent(line, registry, *backend, make_agent_config(cli), print_step);
      ++counter;
      persist_transcript(t, cli.out, "transcript-" + std::to_string(counter) + ".jsonl");
      if (t.termination == Termination::FinalAnswer)
        std::printf("Final Answer: %s\n", t.final_answer->c_str());
      else if (t.termination == Termination::MaxSteps)
        std::printf("(stopped: step limit reached)\n");
      else
        std::printf("(backend error: %s)\n", t.backend_error.c_str());
    } catch (const std::exception& e) {
      std::printf("error: %s\n", e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions cli;
  CLI::App app{"natural-language geospatial agent"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  app.add_option("--backend", cli.backend, "chat backend: scripted | remote")
      ->check(CLI::IsMember({"scripted", "remote"}));
  app.add_option("--endpoint", cli.endpoint, "chat completion base URL");
  app.add_option("--token-env", cli.token_env,
                 "environment variable holding the API token");
  app.add_option("--model", cli.model, "model name sent to the remote backend");
  app.add_option("--temperature", cli.temperature, "sampling temperature");
  app.add_option("--max-steps", cli.max_steps, "step limit per run");
  app.add_option("--fixtures", cli.fixtures, "dataset root (data_use layout)");
  app.add_option("--out", cli.out, "output root for tool artifacts");
  app.add_option("--providers", cli.providers, "data providers: mock | live")
      ->check(CLI::IsMember({"mock", "live"}));
  app.add_option("--provider-endpoint", cli.provider_endpoint,
                 "base URL for live data providers");
  app.add_option("--script", cli.script, "utterance script for the scripted backend");
  app.add_option("--verbatim-templates", cli.verbatim_templates,
                 "keep the original exception wording (default true)");
  app.add_flag("--extras", cli.extras, "register the Union and Composite_Bands tools");
  app.add_flag("--auto-close-poi-ring", cli.auto_close_poi_ring,
               "close an open POI polygon ring instead of failing");
  app.add_option("--classes", cli.classes, "land-use class count");
  app.add_option("--seed", cli.seed, "classification seed");

  std::string query, trace_path, tool_name, tool_input;
  CLI::App* run = app.add_subcommand("run", "run the agent on one query");
  run->add_option("query", query, "natural-language request")->required();
  CLI::App* replay = app.add_subcommand("replay", "check a recorded trace");
  replay->add_option("trace", trace_path, "trace fixture file")->required();
  CLI::App* tool = app.add_subcommand("tool", "invoke one tool directly");
  tool->add_option("name", tool_name, "tool name")->required();
  tool->add_option("input", tool_input, "action input string")->required();
  app.add_subcommand("chat", "interactive session");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(cli, query);
    if (app.got_subcommand("replay")) return cmd_replay(cli, trace_path);
    if (app.got_subcommand("tool")) return cmd_tool(cli, tool_name, tool_input);
    if (app.got_subcommand("chat")) return cmd_chat(cli);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using test_support::data_use;
using test_support::fresh_dir;
using test_support::run_cli;
using test_support::trace;

namespace {

std::string base_flags(const std::string& out) {
  return "--fixtures \"" + data_use() + "\" --out \"" + out + "\"";
}

}  // namespace

TEST_CASE("replay subcommand passes on a conformant trace") {
  std::string out = fresh_dir("cli");
  auto res = run_cli("replay \"" + trace("table6.trace") + "\" " + base_flags(out));
  INFO(res.output);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("PASS 8/8 calls matched") != std::string::npos);
}

TEST_CASE("replay subcommand flags the first divergence with a nonzero exit") {
  std::string out = fresh_dir("cli");
  // fixture whose expected second step disagrees with the script
  std::string text = geoagent::io_detail::slurp(trace("table6.trace"));
  std::size_t pos = text.find("Buffer\t./data_use/case2/subway_station.shp, 500");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 6, "Erase\t");
  std::string bad = fresh_dir("fixture") + "/swapped.trace";
  geoagent::io_detail::spit(bad, text);
  auto res = run_cli("replay \"" + bad + "\" " + base_flags(out));
  INFO(res.output);
  REQUIRE(res.exit_code == 4);
  REQUIRE(res.output.find("step 2: FAIL") != std::string::npos);
}

TEST_CASE("replay rejects unreadable fixtures with exit 1") {
  std::string out = fresh_dir("cli");
  auto res = run_cli("replay /no/such/fixture.trace " + base_flags(out));
  REQUIRE(res.exit_code == 1);
}

TEST_CASE("tool subcommand prints the observation verbatim") {
  std::string out = fresh_dir("cli");
  auto t1 = run_cli("tool Buffer \"nonexistent.shp, 500\" " + base_flags(out));
  REQUIRE(t1.exit_code == 0);
  REQUIRE(t1.output ==
          "An exception occurred using this tool, I need to check whether the input "
          "file exists, or whether the input contains excessive content, or whether "
          "the input format is correct, or whether the input file order is correct, "
          "or and whether I have selected the wrong tool\n");
  auto t2 = run_cli("tool Mapping ./data_use/case4/data.tif " + base_flags(out));
  REQUIRE(t2.output ==
          "An exception occurred using this tool, I need to check whether the input "
          "file is a vector file, whether the input file is exists, and whether I "
          "have selected the wrong tool\n");
  auto t3 = run_cli("tool Imaginary_Tool x " + base_flags(out));
  REQUIRE(t3.output == "Imaginary_Tool is not a valid tool, try another one.\n");
  auto ok = run_cli("tool Buffer \"./data_use/case2/subway_station.shp, 500\" " +
                    base_flags(out));
  REQUIRE(ok.output.find("I obtain the neighboring area with a distance of 500.0") == 0);
  REQUIRE(std::filesystem::exists(out + "/subway_station_neighborhood_500.0.shp"));
}

TEST_CASE("run executes a scripted session and reports the final answer") {
  std::string out = fresh_dir("cli");
  auto res = run_cli("run \"find hotels near subways and supermarkets\" "
                     "--backend scripted --script \"" + trace("table7.trace") + "\" " +
                     base_flags(out));
  INFO(res.output);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("Action: Clip") != std::string::npos);
  REQUIRE(res.output.find("Final Answer: The hotels that locate meanwhile within") !=
          std::string::npos);
  REQUIRE(std::filesystem::exists(out + "/transcripts/transcript.jsonl"));
  REQUIRE(std::filesystem::exists(out + "/clip.shp"));
}

TEST_CASE("an exhausted script exits 3 and still persists the partial transcript") {
  std::string out = fresh_dir("cli");
  std::string script = fresh_dir("fixture") + "/short.trace";
  geoagent::io_detail::spit(script,
                            "### query\nx\n### utterance\n"
                            "Thought:\nAction: Load_Subway_Data\nAction Input: None\n");
  auto res = run_cli("run \"anything\" --backend scripted --script \"" + script + "\" " +
                     base_flags(out));
  REQUIRE(res.exit_code == 3);
  REQUIRE(std::filesystem::exists(out + "/transcripts/transcript.jsonl"));
}

TEST_CASE("remote backend without the token env var is a configuration error") {
  std::string out = fresh_dir("cli");
  auto res = run_cli("run q --backend remote --endpoint http://localhost:1 "
                     "--token-env GEOAGENT_TEST_NO_SUCH_VAR " + base_flags(out));
  REQUIRE(res.exit_code == 1);
  REQUIRE(res.output.find("GEOAGENT_TEST_NO_SUCH_VAR") != std::string::npos);
}

TEST_CASE("chat lists the tool pool and runs one agent per line") {
  std::string out = fresh_dir("cli");
  std::string script = fresh_dir("fixture") + "/final.trace";
  geoagent::io_detail::spit(script, "### query\nx\n### utterance\nFinal Answer: done\n");
#ifdef GEOAGENT_CLI_PATH
  std::string cmd = std::string("printf '/tools\\nrun something\\n/quit\\n' | ") +
                    GEOAGENT_CLI_PATH + " chat --backend scripted --script \"" + script +
                    "\" " + base_flags(out) + " 2>&1";
  test_support::CliResult res;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    res.output.append(buf.data(), n);
  int status = ::pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("Buffer: Input \"shapefile, number\"") != std::string::npos);
  REQUIRE(res.output.find("Final Answer: done") != std::string::npos);
  REQUIRE(std::filesystem::exists(out + "/transcripts/transcript-1.jsonl"));
#endif
}

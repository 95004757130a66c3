#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "cayrs/cli.hpp"
#include "cayrs/serialize.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cayrs;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = runCli(args, out, err);
  return {status, out.str(), err.str()};
}

Run tool(const std::string& args) {
  const std::string command = std::string(CAYRS_TOOL) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out, ""};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const std::string four = dataPath("fourbar.json");
const std::string three = dataPath("threestep.json");

}  // namespace

TEST_CASE("check") {
  const Run r = cli({"check", four});
  REQUIRE(r.status == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["tdLow"] == true);
  CHECK(doc["steps"] == 2);
  CHECK(doc["completeCayleyVector"] == Json::parse(R"([["a","c"],["b","d"]])"));
  CHECK(doc["warnings"] == Json::array());

  const Run swapped = cli({"check", four, "--base", "b,d"});
  CHECK(Json::parse(swapped.out)["baseNonedge"] == Json::parse(R"(["b","d"])"));

  const Run notLow = cli({"check", dataPath("notlow.json")});
  CHECK(notLow.status == 0);
  CHECK(Json::parse(notLow.out)["tdLow"] == false);
}

TEST_CASE("ccs and components") {
  const Json ccs = Json::parse(cli({"ccs", four}).out);
  CHECK(std::abs(ccs["nonOriented"][0][0].get<double>() - 4.0) <= 1e-9);
  CHECK(std::abs(ccs["nonOriented"][0][1].get<double>() - 7.5) <= 1e-9);
  CHECK(ccs["oriented"].size() == 2);

  const Json comps = Json::parse(cli({"components", three}).out);
  REQUIRE(comps["components"].size() == 2);
  CHECK(comps["components"][1]["motion"]["kind"] == "component");
}

TEST_CASE("realize") {
  const Json r = Json::parse(cli({"realize", four, "5:++"}).out);
  CHECK(std::abs(r["points"]["b"][0].get<double>() + 0.7) <= 1e-12);
  const Json typed = Json::parse(cli({"realize", four, "5", "--type", "-+"}).out);
  CHECK(typed["type"] == "+-");
  const Run far = cli({"realize", four, "9:++"});
  CHECK(far.status == 1);
  CHECK(Json::parse(far.out)["error"] == "Unrealizable");
  CHECK(far.err.find("Unrealizable") != std::string::npos);
  const Run both = cli({"realize", four, "5:++", "--type", "+-"});
  CHECK(both.status == 2);
  CHECK(Json::parse(both.out)["error"] == "InvalidArgument");
}

TEST_CASE("path and closest") {
  const Json paths = Json::parse(cli({"path", four, "--from", "5:++", "--to", "5:+-"}).out);
  REQUIRE(paths["paths"].size() == 2);
  CHECK(paths["paths"][0]["legs"].size() == 2);
  CHECK(paths["paths"][0]["legs"][0]["exitAt"] == "lower");

  const Json comps = Json::parse(cli({"components", three}).out)["components"];
  auto mid = [&](std::size_t i) {
    const Json& iv = comps[i]["intervals"][0];
    return formatDouble(0.5 * (iv["lower"].get<double>() + iv["upper"].get<double>())) + ":" +
           iv["type"].get<std::string>();
  };
  const Run refused = cli({"path", three, "--from", mid(0), "--to", mid(1)});
  CHECK(refused.status == 1);
  const Json err = Json::parse(refused.out);
  CHECK(err["error"] == "NotConnected");
  CHECK(err["nearest"]["distance"].get<double>() > 0.0);

  const Run closest = cli({"closest", three, "--component", "0", "--component", "1"});
  CHECK(closest.status == 0);
  CHECK(Json::parse(closest.out)["distance"] == err["nearest"]["distance"]);
  CHECK(cli({"closest", three, "--component", "0"}).status == 2);
  CHECK(cli({"closest", three, "--component", "0", "--component", "5"}).status == 2);
}

TEST_CASE("curve exports") {
  const Run csv = cli({"curve3d", three, "--component", "1", "--nonedges", "a,b", "c,d", "a,e", "--format", "csv",
                       "--samples", "4"});
  REQUIRE(csv.status == 0);
  const auto rows = lines(csv.out);
  CHECK(rows.at(0) == "param,leg,type,x,y,z");
  CHECK(rows.size() == 1 + 6);
  const Json doc = Json::parse(cli({"curve3d", three, "--nonedges", "a,b", "c,d", "a,e"}).out);
  CHECK(doc["points"].size() == 126);
  CHECK(cli({"curve3d", four, "--nonedges", "a,c", "b,d", "a,b"}).status == 2);

  const Run trace = cli({"trace", four, "--vertex", "d", "--format", "csv", "--samples", "3"});
  REQUIRE(trace.status == 0);
  CHECK(lines(trace.out).at(0) == "param,leg,type,x,y");
  const Json traced = Json::parse(cli({"trace", four, "--vertex", "b", "--vertex", "d"}).out);
  CHECK(traced["curves"].size() == 2);
  CHECK(cli({"trace", four, "--vertex", "b", "--vertex", "d", "--format", "csv"}).status == 2);
  CHECK(cli({"ccs", four, "--format", "csv"}).status == 2);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).status == 2);
  CHECK(cli({"frobnicate", four}).status == 2);
  CHECK(cli({"ccs"}).status == 2);
  CHECK(cli({"ccs", "/no/such/file.json"}).status == 2);
  CHECK(cli({"ccs", four, "--samples", "1"}).status == 2);
  CHECK(cli({"ccs", four, "--bogus"}).status == 2);
  CHECK(cli({"check", four, "--base", "a"}).status == 2);
  const Run help = cli({"--help"});
  CHECK(help.status == 0);
  CHECK(help.out.find("curve3d") != std::string::npos);
  const Run notLow = cli({"ccs", dataPath("notlow.json")});
  CHECK(notLow.status == 1);
  CHECK(Json::parse(notLow.out)["error"] == "NotLowComplexity");
}

TEST_CASE("installed tool") {
  const Run check = tool("check " + four);
  CHECK(check.status == 0);
  CHECK(Json::parse(check.out)["tdLow"] == true);
  CHECK(tool("realize " + four + " 9:++").status == 1);
  CHECK(tool("realize " + four + " 5:+x").status == 2);
  CHECK(tool("bogus").status == 2);

  // Byte-identical output across runs.
  const std::string args = "path " + four + " --from 5:++ --to 5:+-";
  CHECK(tool(args).out == tool(args).out);
  CHECK(tool("trace " + four + " --vertex d --format csv").out == tool("trace " + four + " --vertex d --format csv").out);

  setenv("CAYRS_MAX_TYPES", "2", 1);
  const Run capped = tool("ccs " + three);
  unsetenv("CAYRS_MAX_TYPES");
  CHECK(capped.status == 1);
  CHECK(Json::parse(capped.out)["error"] == "TooManySteps");
}

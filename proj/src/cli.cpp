#include "cayrs/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cayrs/errors.hpp"
#include "cayrs/linkage_io.hpp"
#include "cayrs/motion.hpp"
#include "cayrs/serialize.hpp"
#include "cayrs/service.hpp"

namespace cayrs {

namespace {

struct Options {
  std::string file;
  std::string base;
  std::string format = "json";
  std::size_t samples = 64;
  double tolGeom = Tolerances{}.geometric;
  double tolEndpoint = Tolerances{}.endpoint;
  std::string literal;
  std::string typeSigns;
  std::string from;
  std::string to;
  std::vector<std::size_t> components;
  std::vector<std::string> nonedges;
  std::vector<std::string> vertices;
  std::string host = "127.0.0.1";
  int port = 8080;
};

std::pair<std::string, std::string> splitPair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw inputError("InvalidArgument", "vertex pair '" + text + "' must look like u,v");
  return {text.substr(0, comma), text.substr(comma + 1)};
}

Tolerances tolerancesFrom(const Options& o) {
  Tolerances tol;
  tol.geometric = o.tolGeom;
  tol.endpoint = o.tolEndpoint;
  if (const char* cap = std::getenv("CAYRS_MAX_TYPES")) {
    const std::string text(cap);
    std::size_t value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value == 0)
      throw inputError("InvalidArgument", "CAYRS_MAX_TYPES must be a positive integer");
    tol.maxTypes = value;
  }
  return tol;
}

std::shared_ptr<const TDLinkage> loadAnalyzed(const Options& o) {
  std::optional<std::pair<std::string, std::string>> base;
  if (!o.base.empty()) base = splitPair(o.base);
  return TDLinkage::create(loadLinkage(o.file), tolerancesFrom(o), base);
}

Realization realizationOf(const std::shared_ptr<const TDLinkage>& linkage, const std::string& literal) {
  const RealizationLiteral lit = parseRealizationLiteral(literal);
  return realize(linkage, lit.baseLength, RealizationType::parse(lit.signs));
}

const ContinuousMotion& pickComponent(const std::vector<ContinuousMotion>& all, std::size_t index) {
  if (index >= all.size())
    throw inputError("InvalidArgument", "component " + std::to_string(index) + " does not exist; the linkage has " +
                                            std::to_string(all.size()) + " components");
  return all[index];
}

void requireJson(const Options& o, const std::string& verb) {
  if (o.format != "json") throw inputError("InvalidArgument", verb + " only supports --format json");
}

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

int execute(const std::string& verb, const Options& o, std::ostream& out) {
  if (verb == "serve") {
    Service service(64, tolerancesFrom(o));
    std::cerr << "listening on " << o.host << ":" << o.port << std::endl;
    return service.listen(o.host, o.port) ? 0 : 2;
  }

  auto linkage = loadAnalyzed(o);
  if (verb == "check") {
    requireJson(o, verb);
    emit(out, checkReportJson(*linkage, genericityWarnings(*linkage)));
    return 0;
  }
  if (verb == "realize") {
    requireJson(o, verb);
    std::string literal = o.literal;
    if (!o.typeSigns.empty()) {
      if (literal.find(':') != std::string::npos)
        throw inputError("InvalidArgument", "give the type either in L:signs or with --type, not both");
      literal += ":" + o.typeSigns;
    }
    emit(out, toJson(realizationOf(linkage, literal)));
    return 0;
  }

  auto ccs = computeCCS(linkage);
  const UniformSampler sampler(o.samples);
  if (verb == "ccs") {
    requireJson(o, verb);
    emit(out, toJson(*ccs));
    return 0;
  }
  if (verb == "components") {
    requireJson(o, verb);
    Json list = Json::array();
    const auto all = findAllComponents(ccs);
    for (std::size_t i = 0; i < all.size(); ++i) {
      Json c = componentSummaryJson(all[i], i);
      c["motion"] = toJson(all[i]);
      list.push_back(c);
    }
    emit(out, Json{{"components", list}});
    return 0;
  }
  if (verb == "path") {
    requireJson(o, verb);
    const Realization r1 = realizationOf(linkage, o.from);
    const Realization r2 = realizationOf(linkage, o.to);
    Json list = Json::array();
    for (const auto& p : findPath(ccs, r1, r2, sampler)) list.push_back(toJson(p));
    emit(out, Json{{"paths", list}});
    return 0;
  }
  if (verb == "closest") {
    requireJson(o, verb);
    if (o.components.size() != 2) throw inputError("InvalidArgument", "closest needs --component twice");
    const auto all = findAllComponents(ccs);
    emit(out, toJson(nearestRealizations(pickComponent(all, o.components[0]), pickComponent(all, o.components[1]),
                                         sampler)));
    return 0;
  }

  if (o.components.size() > 1) throw inputError("InvalidArgument", verb + " takes a single --component");
  const auto all = findAllComponents(ccs);
  const ContinuousMotion& motion = pickComponent(all, o.components.empty() ? 0 : o.components[0]);
  if (verb == "curve3d") {
    if (o.nonedges.size() != 3) throw inputError("InvalidArgument", "curve3d needs exactly three --nonedges");
    const Graph& g = linkage->graph();
    std::array<VertexPair, 3> f;
    for (std::size_t i = 0; i < 3; ++i) {
      auto [u, v] = splitPair(o.nonedges[i]);
      f[i] = VertexPair(g.id(u), g.id(v));
    }
    const Curve3D curve = curve3D(motion, f[0], f[1], f[2], sampler);
    if (o.format == "csv")
      out << curveCsv(curve);
    else
      emit(out, toJson(curve, g, f));
    return 0;
  }
  if (verb == "trace") {
    if (o.vertices.empty()) throw inputError("InvalidArgument", "trace needs at least one --vertex");
    const TracedCurves curves = tracedCurves(motion, o.vertices, sampler);
    if (o.format == "csv") {
      if (o.vertices.size() != 1) throw inputError("InvalidArgument", "CSV output traces exactly one --vertex");
      out << traceCsv(curves, o.vertices[0]);
    } else {
      emit(out, toJson(curves));
    }
    return 0;
  }
  throw inputError("InvalidArgument", "unknown verb '" + verb + "'");
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Cayley configuration spaces of 1-dof tree-decomposable linkages", "cayrs"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool withFile) {
    if (withFile) sub->add_option("file", o.file, "linkage JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--base", o.base, "base non-edge u,v");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--samples", o.samples, "samples per leg")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--tol-geom", o.tolGeom, "geometric tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-endpoint", o.tolEndpoint, "endpoint bracket tolerance")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "construction, low-complexity test and genericity warnings");
  common(check, true);
  auto* ccsCmd = app.add_subcommand("ccs", "oriented and non-oriented Cayley configuration space");
  common(ccsCmd, true);
  auto* components = app.add_subcommand("components", "connected components");
  common(components, true);
  auto* realizeCmd = app.add_subcommand("realize", "realization for L:signs");
  common(realizeCmd, true);
  realizeCmd->add_option("realization", o.literal, "L:signs, or L together with --type")->required();
  realizeCmd->add_option("--type", o.typeSigns, "signs over +, - and 0");
  auto* path = app.add_subcommand("path", "continuous motion paths between two realizations");
  common(path, true);
  path->add_option("--from", o.from, "L:signs")->required();
  path->add_option("--to", o.to, "L:signs")->required();
  auto* closest = app.add_subcommand("closest", "nearest realizations of two components");
  common(closest, true);
  closest->add_option("--component", o.components, "component index (twice)")->required();
  auto* curve = app.add_subcommand("curve3d", "Cayley curve projected on three non-edges");
  common(curve, true);
  curve->add_option("--component", o.components, "component index");
  curve->add_option("--nonedges", o.nonedges, "three non-edges u,v")->required()->expected(3);
  auto* trace = app.add_subcommand("trace", "curves traced by vertices over a component");
  common(trace, true);
  trace->add_option("--component", o.components, "component index");
  trace->add_option("--vertex", o.vertices, "vertex to trace")->required();
  auto* serve = app.add_subcommand("serve", "HTTP service");
  common(serve, false);
  serve->add_option("--port", o.port, "port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", o.host, "bind address");

  std::vector<std::string> reversedArgs(args.rbegin(), args.rend());
  try {
    app.parse(reversedArgs);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return execute(verb, o, out);
  } catch (const Error& e) {
    emit(out, errorJson(e));
    err << e.name() << ": " << e.what() << '\n';
    return e.category() == ErrorCategory::Input ? 2 : 1;
  } catch (const std::exception& e) {
    emit(out, errorJson(e));
    err << e.what() << '\n';
    return 1;
  }
}

int runCli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return runCli(args, std::cout, std::cerr);
}

}  // namespace cayrs

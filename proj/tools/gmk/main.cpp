#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gmk/errors.hpp"
#include "gmk/parallel.hpp"
#include "gmk/version.hpp"

namespace {

using gmk::Json;
using Runner = std::function<bool(const gmk::cli::RunConfig&)>;

struct Flags {
  std::string input, output = "out", config, format = "json,csv,svg";
  long long seed = 0;
  int threads = 0;
};

std::vector<std::string> split_formats(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string f; std::getline(in, f, ',');) {
    if (f != "json" && f != "csv" && f != "svg") throw gmk::ParseError("unknown format " + f);
    out.push_back(f);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, Runner> runners{
      {"generate", gmk::cli::run_generate},   {"bundle", gmk::cli::run_bundle},
      {"decompose", gmk::cli::run_decompose}, {"conecurve", gmk::cli::run_conecurve},
      {"nondiff", gmk::cli::run_nondiff},     {"difftest", gmk::cli::run_difftest},
      {"verify-currents", gmk::cli::run_verify_currents}};

  CLI::App app{"Geometric measure toolkit"};
  app.set_version_flag("--version", std::string(gmk::kVersion));
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, run] : runners) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--input", flags.input, "input file");
    sub->add_option("--output", flags.output, "output directory");
    sub->add_option("--config", flags.config, "JSON settings file");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--format", flags.format, "comma separated subset of json,csv,svg");
    sub->add_option("--threads", flags.threads, "worker threads, 0 for hardware concurrency")->check(CLI::NonNegativeNumber);
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;
  CLI::App* sub = subs.at(command);

  try {
    gmk::cli::RunConfig cfg;
    cfg.command = command;
    cfg.params = gmk::cli::command_defaults(command);
    if (!flags.config.empty()) {
      const Json file = gmk::read_json(flags.config);
      if (!file.is_object()) throw gmk::ParseError("config must be a JSON object");
      for (const char* k : {"output", "format", "threads"}) {
        if (!file.contains(k)) continue;
        if (std::string(k) == "output") flags.output = sub->count("--output") ? flags.output : gmk::cli::get_string(file, k);
        if (std::string(k) == "format") flags.format = sub->count("--format") ? flags.format : gmk::cli::get_string(file, k);
        if (std::string(k) == "threads") flags.threads = sub->count("--threads") ? flags.threads : gmk::cli::get_int(file, k);
      }
      Json rest = file;
      for (const char* k : {"output", "format", "threads"}) rest.erase(k);
      gmk::cli::overlay(cfg.params, rest);
    }
    if (sub->count("--input")) cfg.params["input"] = flags.input;
    if (sub->count("--seed")) cfg.params["seed"] = flags.seed;
    cfg.output = flags.output;
    cfg.formats = split_formats(flags.format);
    cfg.threads = flags.threads;
    gmk::set_num_threads(cfg.threads);
    return runners.at(command)(cfg) ? 0 : 3;
  } catch (const gmk::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const gmk::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const gmk::ResourceError& e) {
    std::cerr << "resource bound: " << e.what() << "\n";
    return 4;
  } catch (const gmk::ResolutionError& e) {
    std::cerr << "resolution: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

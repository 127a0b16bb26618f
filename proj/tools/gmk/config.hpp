#pragma once

#include <string>
#include <vector>

#include "gmk/io.hpp"

namespace gmk::cli {

// Resolved settings: command defaults, then the --config file, then explicit flags.
struct RunConfig {
  std::string command;
  Json params;                       // embedded in every report
  std::string output = "out";        // not embedded
  std::vector<std::string> formats;  // subset of json, csv, svg
  int threads = 0;

  bool wants(const std::string& f) const;
};

Json command_defaults(const std::string& command);
// Overlays `over` onto `base` key by key; nested objects are replaced whole.
void overlay(Json& base, const Json& over);

// Typed accessors; wrong types raise ParseError naming the key.
double get_double(const Json& p, const char* key);
int get_int(const Json& p, const char* key);
bool get_bool(const Json& p, const char* key);
std::string get_string(const Json& p, const char* key);
std::vector<double> get_doubles(const Json& p, const char* key);
std::vector<std::string> get_strings(const Json& p, const char* key);
std::vector<Point> get_points(const Json& p, const char* key, int n);
double get_degrees(const Json& p, const char* key);  // stored in degrees, returned in radians

}  // namespace gmk::cli

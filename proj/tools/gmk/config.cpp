#include "config.hpp"

#include <algorithm>
#include <numbers>

#include "gmk/errors.hpp"

namespace gmk::cli {
namespace {

const Json& at(const Json& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end()) throw ParseError(std::string("missing setting \"") + key + "\"");
  return *it;
}

}  // namespace

bool RunConfig::wants(const std::string& f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

Json command_defaults(const std::string& command) {
  Json d = {{"input", ""}, {"seed", 0}};
  if (command == "generate") {
    d.update(Json{{"kind", "cantor_dust"}, {"depth", 3}, {"n", 2}, {"m", 16}, {"k", 64}, {"radius", 1.0},
                  {"center", Json::array({0.0, 0.0})}, {"a", Json::array({0.0, 0.0})}, {"b", Json::array({1.0, 0.0})},
                  {"delta", 0.0}, {"jitter", 0.0}});
  } else if (command == "bundle") {
    d.update(Json{{"families", Json::array()}, {"currents", Json::array()}, {"cones", "default"},
                  {"radius", 0.0}, {"step_min", 0.0}, {"step_max", 0.0}, {"min_gain", 1e-3}, {"min_density", 0.8},
                  {"angle_tol_deg", 3.0}, {"certificate", true}, {"certificate_threshold", 0.2},
                  {"expect_dim", -1}, {"expect_fraction", 0.99}});
  } else if (command == "decompose") {
    d.update(Json{{"quant", kDefaultQuant}, {"mass_tol", 1e-12}, {"reconstruction_tol", 1e-12},
                  {"expect_loops", -1}, {"expect_paths", -1}});
  } else if (command == "conecurve") {
    d.update(Json{{"e", Json::array()}, {"alpha_deg", 30.0}, {"step_min", 0.0}, {"step_max", 0.0},
                  {"certificate", true}, {"certificate_threshold", 0.2}});
  } else if (command == "nondiff") {
    d.update(Json{{"bundle", ""}, {"families", Json::array()}, {"rounds", 3}, {"spacing", 0.0}, {"margin", 0.0},
                  {"patch_angle_deg", 5.0}, {"cone_angle_deg", 30.0}, {"eps", 0.0}, {"c_cut", 2.0}, {"r0", 0.0},
                  {"radius_levels", 10}, {"max_failures", 2}, {"lip_budget", 2.0}, {"max_patches", 64},
                  {"directions", Json::array()}, {"sigmas", Json::array()}, {"tol", 0.02}, {"grid_format", "binary"},
                  {"lip_max", 4.001}, {"min_pass", 0.75}});
  } else if (command == "difftest") {
    d.update(Json{{"measure", ""}, {"bundle", ""}, {"function", "zero"}, {"coeffs", Json::array()},
                  {"spacing", 0.0}, {"directions", Json::array()}, {"sigmas", Json::array()}, {"tol", 0.02},
                  {"expect_u_max", -1.0}, {"expect_pass_min", -1.0}});
  } else if (command == "verify-currents") {
    d.update(Json{{"checks", Json::array()}});
  } else {
    throw ParseError("unknown command " + command);
  }
  return d;
}

void overlay(Json& base, const Json& over) {
  if (!over.is_object()) throw ParseError("config must be a JSON object");
  for (auto it = over.begin(); it != over.end(); ++it) base[it.key()] = it.value();
}

double get_double(const Json& p, const char* key) {
  const Json& v = at(p, key);
  if (!v.is_number()) throw ParseError(std::string("setting \"") + key + "\" must be a number");
  return v.get<double>();
}

int get_int(const Json& p, const char* key) {
  const Json& v = at(p, key);
  if (!v.is_number_integer()) throw ParseError(std::string("setting \"") + key + "\" must be an integer");
  return v.get<int>();
}

bool get_bool(const Json& p, const char* key) {
  const Json& v = at(p, key);
  if (!v.is_boolean()) throw ParseError(std::string("setting \"") + key + "\" must be true or false");
  return v.get<bool>();
}

std::string get_string(const Json& p, const char* key) {
  const Json& v = at(p, key);
  if (!v.is_string()) throw ParseError(std::string("setting \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::vector<double> get_doubles(const Json& p, const char* key) {
  const Json& v = at(p, key);
  if (!v.is_array()) throw ParseError(std::string("setting \"") + key + "\" must be an array");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw ParseError(std::string("setting \"") + key + "\" must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> get_strings(const Json& p, const char* key) {
  const Json& v = at(p, key);
  if (!v.is_array()) throw ParseError(std::string("setting \"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const Json& x : v) {
    if (!x.is_string()) throw ParseError(std::string("setting \"") + key + "\" must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::vector<Point> get_points(const Json& p, const char* key, int n) {
  const Json& v = at(p, key);
  if (!v.is_array()) throw ParseError(std::string("setting \"") + key + "\" must be an array");
  std::vector<Point> out;
  for (const Json& x : v) out.push_back(point_from_json(x, n));
  return out;
}

double get_degrees(const Json& p, const char* key) { return get_double(p, key) * std::numbers::pi / 180.0; }

}  // namespace gmk::cli

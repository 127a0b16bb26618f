#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmk/currents.hpp"
#include "gmk/grassmannian.hpp"
#include "gmk/grid_field.hpp"
#include "gmk/measures.hpp"
#include "gmk/quotients.hpp"

namespace gmk {

using Json = nlohmann::ordered_json;

// All readers throw ParseError on malformed input.
Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string dump(const Json& j);

Json point_to_json(const Point& x);
Point point_from_json(const Json& j, int n);

// {"n", "quant", "atoms": [{"x", "w"}]}
Json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const Json& j);

// {"n", "members": [{"dt", "mult", "vertices"}]}
Json to_json(const CurveFamily& family);
CurveFamily family_from_json(const Json& j);

// {"n", "k": 1, "pieces": [{"m", "vertices"}]}; k = 2 pieces are triangles with three vertices.
Json to_json(const PolylineCurrent1& t);
Json to_json(const TriangleMeshCurrent2& t);
int current_degree(const Json& j);
PolylineCurrent1 current1_from_json(const Json& j);
TriangleMeshCurrent2 current2_from_json(const Json& j);

// {"atoms": [{"x", "w"}]}
Json to_json(const ZeroCurrent& z);

// [{"atom_index", "frame": [[column], ...]}]
Json to_json(const Bundle& b);
Bundle bundle_from_json(const Json& j, int n);

// {"origin", "spacing", "shape", "values"}
Json to_json(const GridField& f);
GridField grid_from_json(const Json& j);
// Little-endian: "GMKF", u32 n, f64 origin[n], f64 spacing, i32 shape[n], f64 values[].
void write_grid_binary(const std::string& path, const GridField& f);
GridField read_grid_binary(const std::string& path);

// atom,v,sigma,Tplus,Tminus,U,Dplus,Dminus,rhs,pass
std::string quotient_csv(const std::vector<QuotientRow>& rows);

// Shortest round-trip decimal text of x.
std::string format_double(double x);

}  // namespace gmk

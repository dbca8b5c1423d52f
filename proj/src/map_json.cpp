#include "distortion/map_json.hpp"

#include <cstdlib>
#include <cstring>

namespace distortion {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError((where.empty() ? std::string("/") : where) + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

long integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long>();
}

std::optional<Point> opt_center(const Json& j, int dim, const std::string& where) {
  auto it = j.find("center");
  if (it == j.end()) return std::nullopt;
  return point_from_json(*it, dim, where + "/center");
}

Json knots_to_json(const MonotonePL& p) {
  Json out = Json::array();
  for (std::size_t i = 0; i < p.xs().size(); ++i)
    out.push_back(Json::array({real_to_json(p.xs()[i]), real_to_json(p.ys()[i])}));
  return out;
}

MonotonePL knots_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "knots must be an array of [x, y] pairs");
  std::vector<Real> xs, ys;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].size() != 2) fail(w, "knot must be [x, y]");
    xs.push_back(real_from_json(j[i][0], w + "/0"));
    ys.push_back(real_from_json(j[i][1], w + "/1"));
  }
  try {
    return MonotonePL(std::move(xs), std::move(ys));
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
}

void put_center(Json& j, const Point& c) {
  if (c.norm2() != 0) j["center"] = point_to_json(c);
}

Json node_to_json(const MapExpr& m) {
  using namespace nodes;
  Json j;
  j["kind"] = std::string(to_string(m.kind()));
  switch (m.kind()) {
    case MapKind::identity:
      break;
    case MapKind::radial: {
      const auto& r = *m.node_as<Radial>();
      if (r.origin) {
        j = Json{{"kind", "power"}, {"map", node_to_json(r.origin->base)},
                 {"k", r.origin->k}};
        break;
      }
      j["knots"] = knots_to_json(r.profile);
      put_center(j, r.center);
      break;
    }
    case MapKind::translation: {
      const auto& t = *m.node_as<Translation>();
      j["vector"] = point_to_json(t.a);
      j["r_in"] = real_to_json(t.cutoff.r_in);
      j["r_out"] = real_to_json(t.cutoff.r_out);
      put_center(j, t.center);
      break;
    }
    case MapKind::push: {
      const auto& p = *m.node_as<Push>();
      j["axis"] = p.axis;
      j["knots"] = knots_to_json(p.profile);
      j["r_in"] = real_to_json(p.transverse.r_in);
      j["r_out"] = real_to_json(p.transverse.r_out);
      if (p.power != 1) j["power"] = p.power;
      put_center(j, p.center);
      break;
    }
    case MapKind::twist: {
      const auto& t = *m.node_as<Twist>();
      j["plane"] = Json::array({t.i, t.j});
      j["angle"] = real_to_json(t.angle);
      j["r_in"] = real_to_json(t.cutoff.r_in);
      j["r_out"] = real_to_json(t.cutoff.r_out);
      put_center(j, t.center);
      break;
    }
    case MapKind::affine: {
      const auto& a = *m.node_as<Affine>();
      j["scale"] = real_to_json(a.scale);
      j["shift"] = point_to_json(a.shift);
      break;
    }
    case MapKind::compose: {
      Json maps = Json::array();
      for (const auto& c : m.node_as<Compose>()->maps) maps.push_back(node_to_json(c));
      j["maps"] = std::move(maps);
      break;
    }
    case MapKind::inverse:
      j["map"] = node_to_json(m.node_as<Inverse>()->child);
      break;
    case MapKind::piecewise_union: {
      Json parts = Json::array();
      for (const auto& p : m.node_as<PiecewiseUnion>()->parts) {
        Json region{{"map", node_to_json(p.region.map)},
                    {"radius", real_to_json(p.region.radius)}};
        if (p.region.hint_center)
          region["hint"] = Json{{"center", point_to_json(*p.region.hint_center)},
                                {"radius", real_to_json(p.region.hint_radius)}};
        parts.push_back(Json{{"region", std::move(region)}, {"map", node_to_json(p.map)}});
      }
      j["parts"] = std::move(parts);
      break;
    }
    case MapKind::stack: {
      const auto& s = *m.node_as<Stack>();
      j["map"] = node_to_json(s.inner);
      j["outer_radius"] = real_to_json(s.outer_radius);
      break;
    }
    case MapKind::external:
      throw UnsupportedError("external map '" +
                             m.node_as<External>()->impl->name() +
                             "' cannot be serialized");
  }
  return j;
}

Ramp ramp_from(const Json& j, const std::string& where) {
  Ramp r{real_from_json(field(j, "r_in", where), where + "/r_in"),
         real_from_json(field(j, "r_out", where), where + "/r_out")};
  try {
    r.validate();
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
  return r;
}

}  // namespace

Json real_to_json(const Real& x) {
  double d = to_double(x);
  if (Real(d) == x && std::isfinite(d)) return d;
  return format_real(x, 21);
}

Real real_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return Real(j.get<double>());
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    char* end = nullptr;
#ifdef DISTORTION_HIGH_PRECISION
    try {
      Real v(s);
      if (rm::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    (void)end;
#else
    Real v = std::strtold(s.c_str(), &end);
    if (end && *end == '\0' && !s.empty() && rm::isfinite(v)) return v;
#endif
  }
  fail(where, "expected a finite number");
}

Json point_to_json(const Point& p) {
  Json out = Json::array();
  for (int i = 0; i < p.dim(); ++i) out.push_back(real_to_json(p[i]));
  return out;
}

Point point_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a coordinate array");
  if (dim >= 0 && static_cast<int>(j.size()) != dim)
    fail(where, "expected " + std::to_string(dim) + " coordinates, got " +
                    std::to_string(j.size()));
  if (j.size() > static_cast<std::size_t>(kMaxDim)) fail(where, "too many coordinates");
  Point p(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    p[static_cast<int>(i)] = real_from_json(j[i], where + "/" + std::to_string(i));
  return p;
}

Json map_to_json(const MapExpr& m) {
  Json j = node_to_json(m);
  j["dim"] = m.dim();
  return j;
}

MapExpr map_from_json(const Json& j) {
  int dim = static_cast<int>(integer(field(j, "dim", ""), "/dim"));
  if (dim < 1 || dim > kMaxDim) fail("/dim", "dimension out of range");
  return map_from_json(j, dim, "");
}

MapExpr map_from_json(const Json& j, int dim, const std::string& where) {
  const Json& kind_j = field(j, "kind", where);
  if (!kind_j.is_string()) fail(where + "/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "identity") return identity(dim);
    if (kind == "radial")
      return radial(dim, knots_from_json(field(j, "knots", where), where + "/knots"),
                    opt_center(j, dim, where));
    if (kind == "translation")
      return localized_translation(
          point_from_json(field(j, "vector", where), dim, where + "/vector"),
          ramp_from(j, where), opt_center(j, dim, where));
    if (kind == "push") {
      int axis = static_cast<int>(integer(field(j, "axis", where), where + "/axis"));
      MapExpr m = axis_push(dim, axis,
                            knots_from_json(field(j, "knots", where), where + "/knots"),
                            ramp_from(j, where), opt_center(j, dim, where));
      auto it = j.find("power");
      long k = it == j.end() ? 1 : integer(*it, where + "/power");
      return k == 1 ? m : power_exact(m, k);
    }
    if (kind == "twist") {
      const Json& plane = field(j, "plane", where);
      if (!plane.is_array() || plane.size() != 2) fail(where + "/plane", "expected [i, j]");
      return twist(dim, static_cast<int>(integer(plane[0], where + "/plane/0")),
                   static_cast<int>(integer(plane[1], where + "/plane/1")),
                   real_from_json(field(j, "angle", where), where + "/angle"),
                   ramp_from(j, where), opt_center(j, dim, where));
    }
    if (kind == "affine") {
      std::optional<Point> shift;
      if (j.contains("shift")) shift = point_from_json(j["shift"], dim, where + "/shift");
      return affine(dim, real_from_json(field(j, "scale", where), where + "/scale"), shift);
    }
    if (kind == "compose") {
      const Json& maps = field(j, "maps", where);
      if (!maps.is_array()) fail(where + "/maps", "expected an array");
      std::vector<MapExpr> out;
      for (std::size_t i = 0; i < maps.size(); ++i)
        out.push_back(map_from_json(maps[i], dim, where + "/maps/" + std::to_string(i)));
      MapExpr m = compose(std::move(out));
      return m.dim() == 0 ? identity(dim) : m;
    }
    if (kind == "inverse")
      return inverse(map_from_json(field(j, "map", where), dim, where + "/map"));
    if (kind == "power")
      return power_exact(map_from_json(field(j, "map", where), dim, where + "/map"),
                         integer(field(j, "k", where), where + "/k"));
    if (kind == "union") {
      const Json& parts = field(j, "parts", where);
      if (!parts.is_array()) fail(where + "/parts", "expected an array");
      std::vector<UnionPart> out;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string w = where + "/parts/" + std::to_string(i);
        const Json& region = field(parts[i], "region", w);
        UnionPart part;
        part.region.map = map_from_json(field(region, "map", w + "/region"), dim,
                                        w + "/region/map");
        part.region.radius =
            real_from_json(field(region, "radius", w + "/region"), w + "/region/radius");
        if (region.contains("hint")) {
          const Json& hint = region["hint"];
          part.region.hint_center = point_from_json(field(hint, "center", w), dim,
                                                    w + "/region/hint/center");
          part.region.hint_radius = real_from_json(field(hint, "radius", w),
                                                   w + "/region/hint/radius");
        }
        part.map = map_from_json(field(parts[i], "map", w), dim, w + "/map");
        out.push_back(std::move(part));
      }
      return piecewise_union(dim, std::move(out));
    }
    if (kind == "stack")
      return annular_stack(map_from_json(field(j, "map", where), dim, where + "/map"),
                           real_from_json(field(j, "outer_radius", where),
                                          where + "/outer_radius"));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
  fail(where + "/kind", "unknown map kind '" + kind + "'");
}

std::string serialize_map(const MapExpr& m) { return map_to_json(m).dump(); }

MapExpr parse_map(std::string_view text) { return map_from_json(parse_json_text(text)); }

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
}

}  // namespace distortion

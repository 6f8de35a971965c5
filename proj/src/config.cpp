#include "lnt/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lnt {

namespace {

using nlohmann::json;

void require_known_keys(const json& j, std::initializer_list<const char*> keys,
                        const char* where) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known)
      throw std::invalid_argument(std::string("config: unknown key \"") + key +
                                  "\" in " + where);
  }
}

Point3 point_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument(std::string("config: ") + what +
                                " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Domain domain_from(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("config: domain must be an object with a kind");
  const std::string kind = j.at("kind").get<std::string>();
  Point3 center{0, 0, 0};
  if (j.contains("center")) center = point_from(j.at("center"), "center");
  if (kind == "ball") {
    require_known_keys(j, {"kind", "radius", "center"}, "domain");
    const double radius =
        j.contains("radius") ? j.at("radius").get<double>() : 1.0;
    return Domain::ball(center, radius);
  }
  if (kind == "star") {
    require_known_keys(j, {"kind", "harmonics", "center"}, "domain");
    if (!j.contains("harmonics") || !j.at("harmonics").is_array())
      throw std::invalid_argument(
          "config: star domain needs a harmonics array of [l, m, coeff]");
    std::vector<Harmonic> hs;
    for (const auto& row : j.at("harmonics")) {
      if (!row.is_array() || row.size() != 3)
        throw std::invalid_argument(
            "config: each harmonic must be [l, m, coeff]");
      hs.push_back({row[0].get<int>(), row[1].get<int>(),
                    row[2].get<double>()});
    }
    return Domain::star(center, std::move(hs));
  }
  throw std::invalid_argument("config: domain kind must be ball or star");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: not a JSON object");
  require_known_keys(j,
                     {"domain", "solver", "lambda", "tol", "grid_res",
                      "mu_list", "out"},
                     "the top level");

  RunConfig cfg;
  if (j.contains("domain")) cfg.domain = domain_from(j.at("domain"));
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    require_known_keys(s, {"n", "inflation", "svd_cut", "residual_threshold"},
                       "solver");
    if (s.contains("n")) cfg.solver.n = s.at("n").get<int>();
    if (s.contains("inflation"))
      cfg.solver.inflation = s.at("inflation").get<double>();
    if (s.contains("svd_cut")) cfg.solver.svd_cut = s.at("svd_cut").get<double>();
    if (s.contains("residual_threshold"))
      cfg.solver.residual_threshold = s.at("residual_threshold").get<double>();
  }
  if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("grid_res")) cfg.grid_res = j.at("grid_res").get<int>();
  if (j.contains("mu_list")) {
    cfg.mu_list.clear();
    for (const auto& v : j.at("mu_list"))
      cfg.mu_list.push_back(v.get<double>());
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();

  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("config: lambda must be positive");
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("config: tol must be positive");
  if (cfg.grid_res < 3)
    throw std::invalid_argument("config: grid_res must be at least 3");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.good())
      throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

}  // namespace lnt

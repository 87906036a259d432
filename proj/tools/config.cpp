#include "config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "macpower/error.hpp"

namespace macpower::cli {

namespace {

using nlohmann::json;

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidConfig, std::string("missing ") + key);
  const json& a = j.at(key);
  if (!a.is_array()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

InstanceConfig parse_instance(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, source + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, source + ": top level must be an object");

  InstanceConfig c;
  c.source = source;
  const double s2 = number(j, "sigma_s2", 1.0);
  const double w2 = number(j, "sigma_w2", 1.0);
  if (j.contains("D")) c.d = number(j, "D", 0.0);

  if (j.contains("topology")) {
    const json& t = j.at("topology");
    LinearTopology topo;
    topo.d0 = number(t, "d0", topo.d0);
    topo.positions = numbers(t, "positions");
    topo.beta_c = number(t, "beta_c", topo.beta_c);
    topo.beta_s = number(t, "beta_s", topo.beta_s);
    topo.kappa_c = number(t, "kappa_c", topo.kappa_c);
    topo.kappa_s = number(t, "kappa_s", topo.kappa_s);
    topo.sigma_s2 = s2;
    topo.sigma_w2 = w2;
    c.network = build_linear_topology(topo);
    c.topology = topo;
  } else {
    c.network = make_network(s2, w2, numbers(j, "gains"), numbers(j, "noise_vars"));
  }
  return c;
}

InstanceConfig load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_instance(os.str(), path);
}

}  // namespace macpower::cli

#include "wentzell/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wentzell {

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt(v[k]);
  return s;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    const std::string tok = item.substr(b, e - b + 1);
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("not a number: " + tok);
    out.push_back(v);
  }
  return out;
}

void ExperimentConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  need(n_r >= 1 && n_theta >= 3, "mesh.n_r >= 1 and mesh.n_theta >= 3");
  need(jko_n_r >= 1 && jko_n_theta >= 3, "jko.n_r >= 1 and jko.n_theta >= 3");
  need(!a.empty(), "model.a must list at least one value");
  for (double x : a) need(x > 0.0 && std::isfinite(x), "model.a values must be positive");
  need(dt > 0.0 && std::isfinite(dt), "time.dt must be positive");
  need(T > 0.0 && std::isfinite(T), "time.T must be positive");
  need(!jko_h.empty(), "jko.h must list at least one value");
  for (double h : jko_h) need(h > 0.0 && std::isfinite(h), "jko.h values must be positive");
  need(jko_epsilon >= 0.0, "jko.epsilon must be nonnegative");
  need(jko_max_iter > 0, "jko.max_iter must be positive");
  need(resolution >= 8, "metric.resolution must be at least 8");
  need(trace_tol > 0.0, "model.trace_tol must be positive");
  need(!out_dir.empty(), "output.dir must be set");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  o << "mesh.n_r=" << n_r << "\nmesh.n_theta=" << n_theta << "\nmodel.a=" << fmt(a)
    << "\nmodel.trace_tol=" << fmt(trace_tol) << "\ntime.dt=" << fmt(dt) << "\ntime.T=" << fmt(T)
    << "\njko.h=" << fmt(jko_h) << "\njko.epsilon=" << fmt(jko_epsilon) << "\njko.max_iter=" << jko_max_iter
    << "\njko.n_r=" << jko_n_r << "\njko.n_theta=" << jko_n_theta << "\nmetric.resolution=" << resolution
    << "\nseed=" << seed << "\n";
  return o.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

ExperimentConfig load_config(const std::string& path) {
  boost::property_tree::ptree pt;
  boost::property_tree::ini_parser::read_ini(path, pt);
  ExperimentConfig c;
  auto get_size = [&](const char* key, std::size_t& dst) {
    if (auto v = pt.get_optional<long long>(key)) {
      if (*v < 0) throw std::invalid_argument(std::string("config: negative count for ") + key);
      dst = static_cast<std::size_t>(*v);
    }
  };
  auto get_double = [&](const char* key, double& dst) {
    if (auto v = pt.get_optional<double>(key)) dst = *v;
  };
  auto get_list = [&](const char* key, std::vector<double>& dst) {
    if (auto v = pt.get_optional<std::string>(key)) dst = parse_list(*v);
  };
  get_size("mesh.n_r", c.n_r);
  get_size("mesh.n_theta", c.n_theta);
  get_list("model.a", c.a);
  get_double("model.trace_tol", c.trace_tol);
  get_double("time.dt", c.dt);
  get_double("time.T", c.T);
  get_list("jko.h", c.jko_h);
  get_double("jko.epsilon", c.jko_epsilon);
  get_size("jko.max_iter", c.jko_max_iter);
  get_size("jko.n_r", c.jko_n_r);
  get_size("jko.n_theta", c.jko_n_theta);
  get_size("metric.resolution", c.resolution);
  if (auto v = pt.get_optional<std::string>("output.dir")) c.out_dir = *v;
  if (auto v = pt.get_optional<unsigned long long>("seed")) c.seed = *v;
  if (auto v = pt.get_optional<unsigned long long>("run.seed")) c.seed = *v;
  c.validate();
  return c;
}

ExperimentConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return {};
  return load_config(path);
}

}  // namespace wentzell

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wentzell {

struct ExperimentConfig {
  std::size_t n_r = 16, n_theta = 48;
  std::vector<double> a = {0.5, 1.0, 4.0};
  double dt = 1e-4, T = 0.1;
  std::vector<double> jko_h = {1e-3};
  double jko_epsilon = 0.0;  // 0 means 1e-3 * median(C)
  std::size_t jko_max_iter = 100000;
  std::size_t jko_n_r = 6, jko_n_theta = 16;
  std::size_t resolution = 256;
  double trace_tol = 1e-2;
  std::string out_dir = "out";
  std::uint64_t seed = 20240611;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  // Stable "key=value" lines; the config hash is taken over this text.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// INI file with sections [mesh] [model] [time] [jko] [metric] [output];
// `seed` may sit at top level or under [run]. Missing keys keep defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig load_config_or_default(const std::string& path);

std::vector<double> parse_list(const std::string& text);
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace wentzell

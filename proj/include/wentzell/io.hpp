#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "wentzell/metric.hpp"

namespace wentzell {

// Shortest round-trip decimal form; identical doubles give identical bytes.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
            std::uint64_t config_hash);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

nlohmann::json geodesic_json(const GeodesicPath& path);

// <stem>.bin holds n*n little-endian doubles; <stem>.json the metadata.
void write_cost_matrix(const std::filesystem::path& stem, const CostMatrix& C);
CostMatrix read_cost_matrix(const std::filesystem::path& stem);

}  // namespace wentzell

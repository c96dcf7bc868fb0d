#include "wentzell/io.hpp"

#include <bit>
#include <charconv>
#include <stdexcept>

#include "wentzell/config.hpp"

namespace wentzell {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& columns,
                     std::uint64_t config_hash)
    : width_(columns.size()) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << "# config_hash=" << hex64(config_hash) << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_double(values[k]);
  out_ << '\n';
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

nlohmann::json geodesic_json(const GeodesicPath& path) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : path.points) pts.push_back({p.x, p.y});
  nlohmann::json tags = nlohmann::json::array();
  for (auto t : path.tags) tags.push_back(t == SegmentTag::Boundary ? "boundary" : "interior");
  nlohmann::json j = {{"a", path.a},
                      {"weighted_length", path.weighted_length},
                      {"fallback", path.fallback},
                      {"points", pts},
                      {"tags", tags}};
  if (auto ang = snell_angle(path)) j["entry_angle_deg"] = *ang;
  return j;
}

void write_cost_matrix(const fs::path& stem, const CostMatrix& C) {
  static_assert(std::endian::native == std::endian::little, "cost matrix files are little-endian");
  fs::path bin = stem, meta = stem;
  bin += ".bin";
  meta += ".json";
  if (bin.has_parent_path()) fs::create_directories(bin.parent_path());
  std::ofstream out(bin, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + bin.string());
  out.write(reinterpret_cast<const char*>(C.C.data()), static_cast<std::streamsize>(C.C.size() * sizeof(double)));
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& p : C.nodes) nodes.push_back({p.x, p.y});
  write_json(meta, {{"n", C.size()}, {"a", C.a}, {"resolution", C.resolution}, {"nodes", nodes}});
}

CostMatrix read_cost_matrix(const fs::path& stem) {
  fs::path bin = stem, meta = stem;
  bin += ".bin";
  meta += ".json";
  const auto j = read_json(meta);
  CostMatrix C;
  C.a = j.at("a").get<double>();
  C.resolution = j.at("resolution").get<std::size_t>();
  for (const auto& p : j.at("nodes")) C.nodes.push_back({p[0].get<double>(), p[1].get<double>()});
  const std::size_t n = j.at("n").get<std::size_t>();
  if (n != C.nodes.size()) throw std::runtime_error("cost matrix sidecar is inconsistent");
  C.C.resize(n * n);
  std::ifstream in(bin, std::ios::binary);
  in.read(reinterpret_cast<char*>(C.C.data()), static_cast<std::streamsize>(C.C.size() * sizeof(double)));
  if (!in) throw std::runtime_error("short read on " + bin.string());
  return C;
}

}  // namespace wentzell

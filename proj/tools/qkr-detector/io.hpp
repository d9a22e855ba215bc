#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cli {

std::string sha256_hex(const std::string& data);

// "# qkr-detector v<version> config-sha=<sha>"
std::string provenance_line(const std::string& config_sha);

// Shortest text that round-trips a double (17 significant digits).
std::string num(double v);

// Collects the whole file in memory, then writes a sibling temp file and
// renames it over the target so readers never see a partial file.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target) : target_(std::move(target)) {}
  AtomicFile& line(const std::string& text);
  void commit() const;

 private:
  std::filesystem::path target_;
  std::string body_;
};

// Writes a JSON document whose first two keys carry the provenance line.
void write_json(const std::filesystem::path& path, const std::string& config_sha, nlohmann::ordered_json doc);

struct CsvTable {
  std::string config_sha;  // from the provenance line, empty if absent
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace cli

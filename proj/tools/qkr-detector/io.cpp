#include "io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "qkrdet/qkrdet.h"
#include "run_config.hpp"

namespace cli {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string provenance_line(const std::string& config_sha) {
  return std::string("# qkr-detector v") + qkr_version() + " config-sha=" + config_sha;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

AtomicFile& AtomicFile::line(const std::string& text) {
  body_ += text;
  body_ += '\n';
  return *this;
}

void AtomicFile::commit() const {
  auto tmp = target_;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << body_;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target_, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place: " + ec.message());
  }
}

void write_json(const std::filesystem::path& path, const std::string& config_sha, nlohmann::ordered_json doc) {
  nlohmann::ordered_json out;
  out["generator"] = provenance_line(config_sha).substr(2);
  out["config_sha"] = config_sha;
  for (auto& [key, value] : doc.items()) out[key] = value;
  AtomicFile(path).line(out.dump(2)).commit();
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
  throw ConfigError("input has no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input '" + path.string() + "'");
  CsvTable table;
  std::string line;
  const std::string tag = "config-sha=";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (const auto pos = line.find(tag); pos != std::string::npos) table.config_sha = line.substr(pos + tag.size());
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (table.header.empty()) {
      table.header = fields;
      continue;
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        // Non-numeric cells (flags) read as NaN.
        v = std::numeric_limits<double>::quiet_NaN();
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ConfigError("input '" + path.string() + "' has no header");
  return table;
}

}  // namespace cli

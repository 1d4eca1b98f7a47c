#include "nlslab/io.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nlslab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), ncols_(columns.size()) {
  std::ofstream os(path_, std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path_);
  for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw ConfigError("csv row width mismatch");
  std::ofstream os(path_, std::ios::app);
  for (size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << format_double(values[i]);
  os << "\n";
}

void save_field(const std::string& path, const ComplexField& u, double t) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path);
  nlohmann::json hdr = {{"n", u.n()}, {"L", u.grid->length()}, {"t", t}};
  os << "# " << hdr.dump() << "\n";
  os << "x,re,im\n";
  for (int j = 0; j < u.n(); ++j)
    os << format_double(u.grid->x()[j]) << "," << format_double(u.v[j].real()) << ","
       << format_double(u.v[j].imag()) << "\n";
}

ComplexField load_field(const std::string& path, double* t_out) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("# ", 0) != 0) throw ConfigError("missing snapshot header in " + path);
  auto hdr = nlohmann::json::parse(line.substr(2));
  const int n = hdr.at("n");
  const double L = hdr.at("L");
  if (t_out) *t_out = hdr.value("t", 0.0);
  ComplexField u(make_grid(n, L));
  std::getline(is, line);  // column names
  for (int j = 0; j < n; ++j) {
    if (!std::getline(is, line)) throw ConfigError("snapshot truncated: " + path);
    double x, re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
      throw ConfigError("bad snapshot row: " + line);
    u.v[j] = cplx(re, im);
  }
  return u;
}

std::string content_hash(const std::string& content) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

std::string code_version() { return "nlslab 0.1.0"; }

void write_manifest(const std::string& dir, const RunManifest& m, const std::string& config_dump) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["code_version"] = m.code_version;
  j["created_utc"] = m.created_utc;
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["config"] = nlohmann::json::parse(config_dump, nullptr, false).is_discarded()
                    ? nlohmann::json(config_dump)
                    : nlohmann::json::parse(config_dump);
  std::ofstream os(dir + "/manifest.json", std::ios::trunc);
  os << j.dump(2) << "\n";
}

}  // namespace nlslab

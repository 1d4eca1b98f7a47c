#ifndef NLSLAB_IO_HPP
#define NLSLAB_IO_HPP

#include <string>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// One CSV writer for all observer streams: deterministic formatting,
/// no timestamps.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  size_t ncols_;
};

/// Field snapshot as CSV (x, Re u, Im u) with a JSON header line
/// '# {"n":..,"L":..,"t":..}'.
void save_field(const std::string& path, const ComplexField& u, double t);
ComplexField load_field(const std::string& path, double* t_out = nullptr);

/// FNV-1a of a canonical string (config hashing for manifests).
std::string content_hash(const std::string& content);

/// Every output directory carries the manifest that produced it.
struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::string created_utc;
  unsigned long seed = 0;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& dir, const RunManifest& m, const std::string& config_dump);

std::string code_version();

}  // namespace nlslab

#endif

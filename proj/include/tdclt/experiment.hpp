#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tdclt/config.hpp"

namespace tdclt {

//! Release string written into manifests.
std::string_view tool_version();

//! FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

//! %.17g: round-trips every double.
std::string format_double(double v);

//! Accumulates a CSV file in memory; fields are written as given.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& cell(std::string_view s);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  CsvWriter& cell(int v);
  void end_row();
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
  bool fresh_ = true;
};

struct RunManifest {
  //! Hash of the canonical config with `workers` and `output-dir` removed,
  //! which do not affect output bytes.
  std::string config_hash;
  std::string tool_version;
  double wall_seconds = 0;
  //! File name to FNV-1a checksum of its bytes.
  std::map<std::string, std::string> checksums;
};

//! Output file name to contents, before anything touches the disk.
using OutputSet = std::map<std::string, std::string>;

//! Runs the experiment and returns its outputs. Throws ConfigError when
//! validate() reports violations.
OutputSet compute_outputs(const ExperimentConfig& config);

//! compute_outputs, then writes each file plus manifest.json into
//! config.output_dir (created if missing).
RunManifest run(const ExperimentConfig& config);

std::string config_hash(const ExperimentConfig& config);

}  // namespace tdclt

#pragma once

// Named, reproducible experiment pipelines.  A manifest (name + canonical
// string parameters) fully determines every output byte: outputs embed the
// manifest JSON and its FNV-1a-64 hash in the CSV header, doubles print with
// %.17g, and rerunning the same manifest yields byte-identical CSV.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aixilab {

struct experiment_manifest {
  std::string experiment;
  std::map<std::string, std::string> params;  // canonical, sorted by key
  std::string version = "aixilab-1";          // code-version stamp

  std::string to_json() const;  // canonical single-line JSON, sorted keys
  std::uint64_t hash() const;   // FNV-1a 64 of to_json()
  static experiment_manifest from_json(const std::string& text);  // config_error on junk
};

struct experiment_result {
  experiment_manifest manifest;
  std::string csv;  // complete file content: header comments + data rows
  std::map<std::string, double> summary;  // headline numbers, also in the header
};

struct experiment_info {
  std::string name;
  std::string description;
  experiment_manifest defaults;
};

// The four registered experiments: convergence, selected-bits, selfplay,
// prediction-gap.
const std::vector<experiment_info>& experiment_registry();
const experiment_info& experiment_lookup(const std::string& name);  // config_error

// Applies key=value overrides to a copy of `base` (unknown keys rejected).
experiment_manifest with_overrides(const experiment_manifest& base,
                                   const std::vector<std::string>& overrides);

// Dispatches on manifest.experiment; validates every parameter before running.
experiment_result run_experiment(const experiment_manifest& manifest);

// Write-to-temp + atomic rename in the destination directory; no partial
// files on error.
void write_file_atomic(const std::string& path, const std::string& content);

// %.17g rendering used for every floating-point value in CSV output.
std::string fmt_double(double x);

}  // namespace aixilab

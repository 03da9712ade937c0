#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "chansim/rates.hpp"
#include "chansim/redistribution.hpp"

namespace chansim {

using Json = nlohmann::json;

// File formats are documented in docs/formats.md; matrices are row-major,
// complex entries are [re, im] pairs.

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

// Every parse_* accepts either the inline object or {"file": "path"}, with
// relative paths resolved against base_dir.
Ensemble parse_ensemble(const Json& j, const std::string& base_dir);
Channel parse_channel(const Json& j, const std::string& base_dir);
FourPartyPureState parse_state(const Json& j, const std::string& base_dir);
DistortionMeasure parse_distortion(const Json& j);
Distribution parse_distribution(const Json& j);
RMat parse_rmat(const Json& j);
Mat parse_cmat(const Json& j);

Json rmat_to_json(const RMat& m);
Json cmat_to_json(const Mat& m);
Json ensemble_to_json(const Ensemble& e);
Json channel_to_json(const Channel& w);
Json state_to_json(const FourPartyPureState& psi);

// Persisted metrics are rounded to 12 significant digits so reruns are
// byte-identical.
std::string format_metric(double v);
double round_metric(double v);
Json round_metrics(Json j);  // recursively rounds every float

// Append-only CSV sink with a fixed header; `append` resumes an existing
// file after validating its header.
class CsvWriter {
 public:
  CsvWriter(std::string path, std::vector<std::string> columns, bool append);
  ~CsvWriter();

  void row(const std::vector<std::string>& cells);
  std::int64_t existing_rows() const { return existing_rows_; }

  // Data rows already present (0 when the file is missing or header-only).
  static std::int64_t count_rows(const std::string& path);

 private:
  std::string path_;
  std::vector<std::string> columns_;
  std::int64_t existing_rows_ = 0;
  void* out_ = nullptr;  // FILE*
};

// Data rows of a previously written sweep table, split on commas.
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path);

}  // namespace chansim

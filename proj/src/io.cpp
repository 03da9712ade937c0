#include "chansim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace chansim {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

// Follows one level of {"file": ...} indirection.
Json deref(const Json& j, const std::string& base_dir, std::string* new_base) {
  *new_base = base_dir;
  if (j.is_object() && j.contains("file")) {
    std::string path = resolve(base_dir, j.at("file").get<std::string>());
    *new_base = std::filesystem::path(path).parent_path().string();
    return load_json_file(path);
  }
  return j;
}

double as_number(const Json& j, const char* what) {
  if (!j.is_number())
    throw ValidationError(std::string(what) + ": expected a number");
  return j.get<double>();
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

RMat parse_rmat(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ValidationError("matrix: expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  RMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw ValidationError("matrix: ragged rows");
    for (int c = 0; c < cols; ++c) m(r, c) = as_number(j[r][c], "matrix entry");
  }
  return m;
}

Mat parse_cmat(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ValidationError("complex matrix: expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw ValidationError("complex matrix: ragged rows");
    for (int c = 0; c < cols; ++c) {
      const Json& cell = j[r][c];
      if (!cell.is_array() || cell.size() != 2)
        throw ValidationError("complex matrix: entries must be [re, im]");
      m(r, c) = Cplx(as_number(cell[0], "re"), as_number(cell[1], "im"));
    }
  }
  return m;
}

Distribution parse_distribution(const Json& j) {
  if (!j.is_array() || j.empty())
    throw ValidationError("distribution: expected a non-empty array");
  RVec p(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = as_number(j[i], "probability");
  return Distribution(p);
}

Ensemble parse_ensemble(const Json& spec, const std::string& base_dir) {
  std::string base;
  Json j = deref(spec, base_dir, &base);
  if (!j.is_object() || !j.contains("prior") || !j.contains("states"))
    throw ValidationError("ensemble: need fields 'prior' and 'states'");
  Distribution prior = parse_distribution(j.at("prior"));
  std::vector<DensityOperator> states;
  for (const Json& s : j.at("states")) states.emplace_back(parse_cmat(s));
  return Ensemble(std::move(prior), std::move(states));
}

Channel parse_channel(const Json& spec, const std::string& base_dir) {
  std::string base;
  Json j = deref(spec, base_dir, &base);
  if (j.is_object() && j.contains("matrix"))
    return Channel(parse_rmat(j.at("matrix")));
  return Channel(parse_rmat(j));
}

FourPartyPureState parse_state(const Json& spec, const std::string& base_dir) {
  std::string base;
  Json j = deref(spec, base_dir, &base);
  if (!j.is_object() || !j.contains("dims") || !j.contains("amplitudes"))
    throw ValidationError("state: need fields 'dims' and 'amplitudes'");
  std::vector<int> dims;
  for (const Json& d : j.at("dims")) dims.push_back(d.get<int>());
  const Json& amps = j.at("amplitudes");
  CVec v(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (!amps[i].is_array() || amps[i].size() != 2)
      throw ValidationError("state: amplitudes must be [re, im] pairs");
    v[static_cast<Eigen::Index>(i)] =
        Cplx(as_number(amps[i][0], "re"), as_number(amps[i][1], "im"));
  }
  return make_four_party(std::move(v), std::move(dims));
}

DistortionMeasure parse_distortion(const Json& j) {
  return DistortionMeasure(parse_rmat(j));
}

Json rmat_to_json(const RMat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json cmat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ensemble_to_json(const Ensemble& e) {
  Json j;
  j["prior"] = Json::array();
  for (int x = 0; x < e.size(); ++x) j["prior"].push_back(e.prior[x]);
  j["states"] = Json::array();
  for (const DensityOperator& s : e.states)
    j["states"].push_back(cmat_to_json(s.matrix()));
  return j;
}

Json channel_to_json(const Channel& w) {
  Json j;
  j["matrix"] = rmat_to_json(w.matrix());
  return j;
}

Json state_to_json(const FourPartyPureState& psi) {
  Json j;
  j["dims"] = psi.dims;
  Json amps = Json::array();
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i)
    amps.push_back(
        Json::array({psi.amplitudes[i].real(), psi.amplitudes[i].imag()}));
  j["amplitudes"] = std::move(amps);
  return j;
}

std::string format_metric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round_metric(double v) { return std::strtod(format_metric(v).c_str(), nullptr); }

Json round_metrics(Json j) {
  if (j.is_number_float()) return round_metric(j.get<double>());
  if (j.is_array() || j.is_object())
    for (auto& el : j) el = round_metrics(el);
  return j;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns,
                     bool append)
    : path_(std::move(path)), columns_(std::move(columns)) {
  bool resume = append && std::filesystem::exists(path_);
  if (resume) {
    std::ifstream in(path_);
    std::string header;
    std::getline(in, header);
    std::string expected;
    for (std::size_t i = 0; i < columns_.size(); ++i)
      expected += (i ? "," : "") + columns_[i];
    if (header != expected)
      throw ValidationError(path_ + ": existing header does not match sweep");
    existing_rows_ = count_rows(path_);
  }
  out_ = std::fopen(path_.c_str(), resume ? "ab" : "wb");
  if (!out_) throw ValidationError("cannot write " + path_);
  if (!resume) {
    std::string header;
    for (std::size_t i = 0; i < columns_.size(); ++i)
      header += (i ? "," : "") + columns_[i];
    header += "\n";
    std::fwrite(header.data(), 1, header.size(), static_cast<FILE*>(out_));
  }
}

CsvWriter::~CsvWriter() {
  if (out_) std::fclose(static_cast<FILE*>(out_));
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw ValidationError(path_ + ": row width does not match header");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i)
    line += (i ? "," : "") + cells[i];
  line += "\n";
  std::fwrite(line.data(), 1, line.size(), static_cast<FILE*>(out_));
  std::fflush(static_cast<FILE*>(out_));
}

std::int64_t CsvWriter::count_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) return 0;
  std::string line;
  std::int64_t rows = -1;  // skip the header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return std::max<std::int64_t>(0, rows);
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace chansim

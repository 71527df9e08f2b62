#pragma once

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gzsl/data_model.hpp"
#include "gzsl/calibration.hpp"
#include "gzsl/pipeline.hpp"

namespace gzsl {

inline constexpr char kMatrixMagic[8] = {'G', 'Z', 'S', 'L', 'M', 'A', 'T', '1'};
inline constexpr const char* kToolVersion = "1.0.0";

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                        static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

inline std::uint32_t get_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

inline double get_f64_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

inline bool has_extension(const std::string& path, const char* ext) {
  return std::filesystem::path(path).extension() == ext;
}

}  // namespace detail

inline void write_matrix_binary(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(kMatrixMagic, 8);
  detail::put_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) detail::put_f64_le(out, m(r, c));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline Matrix load_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMatrixMagic, 8) != 0)
    throw Error(ErrorCode::BadMagic, path);
  std::uint32_t rows = detail::get_u32_le(bytes.data() + 8);
  std::uint32_t cols = detail::get_u32_le(bytes.data() + 12);
  std::size_t expected = 16 + 8ull * rows * cols;
  if (bytes.size() != expected)
    throw Error(ErrorCode::TruncatedPayload,
                path + ": expected " + std::to_string(expected) + " bytes, got " +
                    std::to_string(bytes.size()));
  Matrix m(rows, cols);
  const unsigned char* p = bytes.data() + 16;
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c, p += 8) m(r, c) = detail::get_f64_le(p);
  return m;
}

inline void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << "\n";
  }
}

inline Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::NonNumericCell,
                    path + " line " + std::to_string(line_no) + " col " + std::to_string(col));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::NonNumericCell,
                  path + " line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyDataset, path + " is empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

/// Binary by default, CSV when the extension is .csv.
inline Matrix load_matrix(const std::string& path) {
  return detail::has_extension(path, ".csv") ? load_matrix_csv(path) : load_matrix_binary(path);
}

inline void write_matrix(const Matrix& m, const std::string& path) {
  if (detail::has_extension(path, ".csv"))
    write_matrix_csv(m, path);
  else
    write_matrix_binary(m, path);
}

inline void write_labels(const Labels& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  for (int l : labels) out << l << "\n";
}

inline Labels load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path);
  Labels labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      int v = std::stoi(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos != line.size()) throw std::invalid_argument(line);
      labels.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::NonNumericCell, path + " line " + std::to_string(line_no));
    }
  }
  return labels;
}

namespace detail {

inline std::string find_matrix_file(const std::string& dir, const std::string& stem) {
  for (const char* ext : {".bin", ".csv"}) {
    std::string path = dir + "/" + stem + ext;
    if (std::filesystem::exists(path)) return path;
  }
  throw Error(ErrorCode::MissingFile, dir + "/" + stem + ".{bin,csv}");
}

}  // namespace detail

/// Dataset directory layout: features.{bin,csv}, labels.txt, prototypes.{bin,csv}.
inline Dataset load_dataset(const std::string& dir, bool normalize = true) {
  Dataset d;
  d.features = load_matrix(detail::find_matrix_file(dir, "features"));
  d.prototypes = load_matrix(detail::find_matrix_file(dir, "prototypes"));
  std::string labels_path = dir + "/labels.txt";
  if (!std::filesystem::exists(labels_path)) throw Error(ErrorCode::MissingFile, labels_path);
  d.labels = load_labels(labels_path);
  d.class_count = static_cast<int>(d.prototypes.rows());
  validate_dataset(d);
  if (normalize) d.prototypes = normalize_prototypes(d.prototypes);
  return d;
}

inline void write_dataset(const Dataset& d, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_matrix_binary(d.features, dir + "/features.bin");
  write_matrix_binary(d.prototypes, dir + "/prototypes.bin");
  write_labels(d.labels, dir + "/labels.txt");
}

/// Trade-off CSV: header plus one row per point, sorted by gamma.
inline void write_curve(std::vector<TradeoffPoint> points, const std::string& path) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "no trade-off points");
  std::sort(points.begin(), points.end(),
            [](const TradeoffPoint& a, const TradeoffPoint& b) { return a.gamma < b.gamma; });
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << "gamma,acc_unseen,acc_seen\n" << std::setprecision(17);
  for (const auto& p : points)
    out << p.gamma << "," << p.acc_unseen_in_all << "," << p.acc_seen_in_all << "\n";
}

inline std::vector<TradeoffPoint> load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<TradeoffPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    TradeoffPoint p;
    std::getline(ss, cell, ',');
    p.gamma = std::stod(cell);
    std::getline(ss, cell, ',');
    p.acc_unseen_in_all = std::stod(cell);
    std::getline(ss, cell, ',');
    p.acc_seen_in_all = std::stod(cell);
    points.push_back(p);
  }
  return points;
}

// -- JSON split file -------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json split_to_json(const GzslSplit& s) {
  nlohmann::ordered_json j;
  j["train_classes"] = s.partition.train_classes;
  j["val_classes"] = s.partition.val_classes;
  j["test_classes"] = s.partition.test_classes;
  j["train_idx"] = s.train_idx;
  j["seen_val_idx"] = s.seen_val_idx;
  j["seen_test_idx"] = s.seen_test_idx;
  j["unseen_val_idx"] = s.unseen_val_idx;
  j["unseen_test_idx"] = s.unseen_test_idx;
  return j;
}

inline GzslSplit split_from_json(const nlohmann::json& j) {
  GzslSplit s;
  s.partition.train_classes = j.at("train_classes").get<ClassSet>();
  s.partition.val_classes = j.at("val_classes").get<ClassSet>();
  s.partition.test_classes = j.at("test_classes").get<ClassSet>();
  s.train_idx = j.at("train_idx").get<IndexSet>();
  s.seen_val_idx = j.at("seen_val_idx").get<IndexSet>();
  s.seen_test_idx = j.at("seen_test_idx").get<IndexSet>();
  s.unseen_val_idx = j.at("unseen_val_idx").get<IndexSet>();
  s.unseen_test_idx = j.at("unseen_test_idx").get<IndexSet>();
  return s;
}

}  // namespace detail

/// Split file: the test split plus its validation folds, as JSON.
inline void write_split_file(const GzslSplit& split, const std::vector<GzslSplit>& folds,
                             std::uint64_t seed, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "gzsl-split-v1";
  j["seed"] = seed;
  j["split"] = detail::split_to_json(split);
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : folds) j["folds"].push_back(detail::split_to_json(f));
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

inline std::pair<GzslSplit, std::vector<GzslSplit>> load_split_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, path + ": " + e.what());
  }
  if (j.value("format", "") != "gzsl-split-v1")
    throw Error(ErrorCode::BadMagic, path + ": not a gzsl split file");
  GzslSplit split = detail::split_from_json(j.at("split"));
  std::vector<GzslSplit> folds;
  for (const auto& f : j.at("folds")) folds.push_back(detail::split_from_json(f));
  return {split, folds};
}

// -- JSON reports ----------------------------------------------------------

inline nlohmann::ordered_json report_to_json(const GzslReport& r) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["acc_unseen_in_all"] = r.acc_unseen_in_all;
  j["acc_unseen_std"] = r.acc_unseen_std;
  j["acc_seen_in_all"] = r.acc_seen_in_all;
  j["acc_seen_std"] = r.acc_seen_std;
  j["harmonic_mean"] = r.harmonic_mean;
  j["harmonic_mean_std"] = r.harmonic_mean_std;
  j["ausuc"] = r.ausuc;
  j["ausuc_std"] = r.ausuc_std;
  j["gamma_star"] = r.gamma_star;
  j["lambda_star"] = r.lambda_star;
  j["seed"] = r.seed;
  j["lambda_grid"] = r.grid;
  j["n_runs"] = r.n_runs;
  return j;
}

inline nlohmann::ordered_json report_to_json(const ZslReport& r) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["acc_unseen"] = r.acc_unseen;
  j["acc_unseen_std"] = r.acc_unseen_std;
  j["lambda_star"] = r.lambda_star;
  j["seed"] = r.seed;
  j["lambda_grid"] = r.grid;
  j["n_runs"] = r.n_runs;
  return j;
}

inline GzslReport report_from_json(const nlohmann::json& j) {
  GzslReport r;
  r.acc_unseen_in_all = j.at("acc_unseen_in_all").get<double>();
  r.acc_unseen_std = j.at("acc_unseen_std").get<double>();
  r.acc_seen_in_all = j.at("acc_seen_in_all").get<double>();
  r.acc_seen_std = j.at("acc_seen_std").get<double>();
  r.harmonic_mean = j.at("harmonic_mean").get<double>();
  r.harmonic_mean_std = j.at("harmonic_mean_std").get<double>();
  r.ausuc = j.at("ausuc").get<double>();
  r.ausuc_std = j.at("ausuc_std").get<double>();
  r.gamma_star = j.at("gamma_star").get<double>();
  r.lambda_star = j.at("lambda_star").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.grid = j.at("lambda_grid").get<std::vector<double>>();
  r.n_runs = j.at("n_runs").get<int>();
  return r;
}

}  // namespace gzsl

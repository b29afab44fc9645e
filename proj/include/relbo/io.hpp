#pragma once

// Serialization helpers: diff-stable floating-point formatting (17
// significant digits), CSV emission, the versioned model JSON document,
// and headerless data-matrix CSV files.

#include <Eigen/Dense>
#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "relbo/ppca.hpp"

namespace relbo {

/// Formats a double with 17 significant digits (scientific), so files are
/// byte-stable across runs and round-trip exactly. Infinities render as
/// "inf" / "-inf".
inline std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.16e}", v);
}

/// Minimal CSV emitter: one header row, then rows of preformatted fields.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) {
      throw std::runtime_error("CsvWriter: cannot open " + path);
    }
    write_row(columns);
  }

  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline constexpr int kModelJsonVersion = 1;

/// Serializes a model as the versioned JSON document
/// {version, n_x, n_y, sigma, loading (row-major)}.
inline nlohmann::json model_to_json(const PpcaModel& model) {
  nlohmann::json j;
  j["version"] = kModelJsonVersion;
  j["n_x"] = model.n_x();
  j["n_y"] = model.n_y();
  j["sigma"] = model.noise_std();
  std::vector<double> loading;
  loading.reserve(model.n_x() * model.n_y());
  for (Eigen::Index r = 0; r < model.n_x(); ++r) {
    for (Eigen::Index c = 0; c < model.n_y(); ++c) {
      loading.push_back(model.loading()(r, c));
    }
  }
  j["loading"] = loading;
  return j;
}

inline PpcaModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j["version"].get<int>() != kModelJsonVersion) {
    throw std::invalid_argument("model_from_json: unsupported document version");
  }
  const Eigen::Index n_x = j.at("n_x").get<Eigen::Index>();
  const Eigen::Index n_y = j.at("n_y").get<Eigen::Index>();
  const auto loading = j.at("loading").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(loading.size()) != n_x * n_y) {
    throw std::invalid_argument("model_from_json: loading size mismatch");
  }
  Eigen::MatrixXd c(n_x, n_y);
  for (Eigen::Index r = 0; r < n_x; ++r) {
    for (Eigen::Index col = 0; col < n_y; ++col) {
      c(r, col) = loading[r * n_y + col];
    }
  }
  // Serialized models may legitimately be rank deficient (fitted isotropic
  // data, degenerate study configurations), so only shape and noise are
  // validated here.
  return PpcaModel::unchecked_rank(std::move(c), j.at("sigma").get<double>());
}

inline void save_model(const PpcaModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << model_to_json(model).dump(2) << '\n';
}

inline PpcaModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

/// Writes a data matrix as headerless CSV, one row per sample.
inline void write_matrix_csv(const Eigen::MatrixXd& data,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (c) out << ',';
      out << fmt17(data(r, c));
    }
    out << '\n';
  }
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      row.push_back(std::stod(field));
    }
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw std::invalid_argument("read_matrix_csv: ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd data(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      data(r, c) = rows[r][c];
    }
  }
  return data;
}

}  // namespace relbo

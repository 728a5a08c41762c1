// Copyright 2026 The tamp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tamp/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"

#include "tamp/error.hpp"

namespace tamp::io {

namespace {

static_assert(std::endian::native == std::endian::little, "tensor payload I/O assumes a little-endian host");

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_tensor(const std::filesystem::path& path, const DenseTensor& tensor, std::optional<double> delta) {
  nlohmann::json header;
  header["dims"] = tensor.shape().dims();
  header["dtype"] = "f64le";
  if (delta) header["delta"] = *delta;

  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kTensorMagic, sizeof(kTensorMagic));
  const std::string text = header.dump();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.put('\n');
  out.write(reinterpret_cast<const char*>(tensor.data()),
            static_cast<std::streamsize>(tensor.values().size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

TensorFile read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[sizeof(kTensorMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kTensorMagic, sizeof(magic)) != 0)
    throw Error(ErrorCode::kIo, "bad magic in " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, "missing header in " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("bad tensor header: ") + e.what());
  }
  if (header.value("dtype", std::string()) != "f64le")
    throw Error(ErrorCode::kIo, "unsupported dtype in " + path.string());
  TensorShape shape = make_shape(header.at("dims").get<std::vector<std::size_t>>());

  std::vector<double> values(shape.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double)))
    throw Error(ErrorCode::kIo, "truncated payload in " + path.string());

  TensorFile file{DenseTensor(std::move(shape), std::move(values)), std::nullopt};
  if (header.contains("delta")) file.delta = header["delta"].get<double>();
  return file;
}

std::filesystem::path factor_file(const std::filesystem::path& dir, int mode) {
  return dir / ("factors_mode" + std::to_string(mode + 1) + ".csv");
}

void write_matrix_csv(const std::filesystem::path& path, const RowMatrix& m) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

RowMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, "bad number '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::kIo, "ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kIo, "empty matrix file " + path.string());
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_factors(const std::filesystem::path& dir, const FactorSet& factors) {
  std::filesystem::create_directories(dir);
  for (int a = 0; a < factors.order(); ++a) write_matrix_csv(factor_file(dir, a), factors.factor(a));
}

FactorSet read_factors(const std::filesystem::path& dir, const TensorShape& shape) {
  std::vector<RowMatrix> mats;
  for (int a = 0; a < shape.order(); ++a) mats.push_back(read_matrix_csv(factor_file(dir, a)));
  const auto rank = static_cast<int>(mats.front().cols());
  return FactorSet(shape, rank, std::move(mats));
}

}  // namespace tamp::io

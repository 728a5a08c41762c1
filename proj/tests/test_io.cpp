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

#include <cstring>
#include <filesystem>
#include <fstream>

#include "brute_force.hpp"
#include "doctest.h"
#include "tamp/error.hpp"
#include "tamp/tensor_io.hpp"

using namespace tamp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tamp_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("tensor files round-trip bit for bit") {
  const TensorShape s = make_shape({3, 5, 2});
  const DenseTensor t = testing::random_tensor(s, 17);
  const fs::path path = scratch("t.tamp");
  io::write_tensor(path, t, 0.125);
  const io::TensorFile back = io::read_tensor(path);
  CHECK(back.tensor.shape() == s);
  REQUIRE(back.delta.has_value());
  CHECK(*back.delta == 0.125);
  CHECK(std::memcmp(back.tensor.data(), t.data(), s.size() * sizeof(double)) == 0);

  io::write_tensor(path, t);
  CHECK_FALSE(io::read_tensor(path).delta.has_value());
}

TEST_CASE("tensor file layout: magic, JSON header line, f64le payload") {
  const TensorShape s = make_shape({2, 2});
  const DenseTensor t(s, {1.0, -2.0, 0.5, 3.0});
  const fs::path path = scratch("layout.tamp");
  io::write_tensor(path, t);
  std::ifstream in(path, std::ios::binary);
  char magic[16];
  in.read(magic, 16);
  CHECK(std::memcmp(magic, io::kTensorMagic, 16) == 0);
  CHECK(std::string(magic, 8) == "TAMPDT01");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("\"dims\":[2,2]") != std::string::npos);
  CHECK(header.find("f64le") != std::string::npos);
  double payload[4];
  in.read(reinterpret_cast<char*>(payload), sizeof payload);
  CHECK(payload[1] == -2.0);
  CHECK(payload[3] == 3.0);
}

TEST_CASE("corrupt tensor files are rejected") {
  const fs::path path = scratch("bad.tamp");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTATENSORFILE!!{\"dims\":[2]}\n";
  }
  CHECK_THROWS_AS(io::read_tensor(path), Error);

  const TensorShape s = make_shape({4, 4});
  io::write_tensor(path, testing::random_tensor(s, 1));
  fs::resize_file(path, fs::file_size(path) - 8);
  CHECK_THROWS_AS(io::read_tensor(path), Error);
  CHECK_THROWS_AS(io::read_tensor(scratch("missing.tamp")), Error);
}

TEST_CASE("factor CSV files are named per mode and round-trip") {
  const TensorShape s = make_shape({4, 3, 5});
  const FactorSet f = testing::random_factors(s, 2, 23);
  const fs::path dir = scratch("factors");
  io::write_factors(dir, f);
  CHECK(io::factor_file(dir, 0).filename() == "factors_mode1.csv");
  for (int a = 0; a < 3; ++a) CHECK(fs::exists(io::factor_file(dir, a)));
  const FactorSet back = io::read_factors(dir, s);
  for (int a = 0; a < 3; ++a) CHECK(back.factor(a) == f.factor(a));
}

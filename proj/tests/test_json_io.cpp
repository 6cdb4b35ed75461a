// Copyright 2026 The revquant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "revquant/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

using namespace revquant;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(matrix_json, round_trip_is_exact) {
  Rng rng(1);
  const Matrix m = haar_isometry(3, 2, rng);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m), 3, 2), m);
  EXPECT_EQ(matrix_from_json(Json::parse(matrix_to_json(m).dump()), 3, 2), m);
}

TEST(matrix_json, accepts_nested_and_real_entries) {
  const Matrix flat = matrix_from_json(Json::parse("[[1, 0], [0, 2], [0, -2], 4]"));
  const Matrix nested = matrix_from_json(Json::parse("[[[1, 0], [0, 2]], [[0, -2], [4, 0]]]"));
  Matrix expected(2, 2);
  expected << Complex(1, 0), Complex(0, 2), Complex(0, -2), Complex(4, 0);
  EXPECT_EQ(flat, expected);
  EXPECT_EQ(nested, expected);
}

TEST(matrix_json, rejects_bad_shapes) {
  EXPECT_THROW(matrix_from_json(Json::parse("[]")), InputError);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 0], [2, 0], [3, 0]]")), InputError);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 0, 0]]")), InputError);
  EXPECT_THROW(matrix_from_json(Json::parse("[1, 2]"), 2, 2), InputError);
}

TEST(channel_json, round_trip) {
  const auto c = random_channel(2, 3, 2, 5);
  const auto back = channel_from_json(Json::parse(channel_to_json(c).dump()));
  EXPECT_EQ(back.d_in(), 2);
  EXPECT_EQ(back.d_out(), 3);
  EXPECT_LT(choi_distance(c, back), 1e-15);
}

TEST(channel_json, schema_errors) {
  EXPECT_THROW(channel_from_json(Json::parse(R"({"d_in": 2, "kraus": []})")), InputError);
  // Not trace-preserving but flagged as such.
  EXPECT_THROW(channel_from_json(Json::parse(R"({"d_in": 1, "d_out": 1, "kraus": [[[0.5, 0]]]})")), Error);
  EXPECT_NO_THROW(channel_from_json(
      Json::parse(R"({"d_in": 1, "d_out": 1, "kraus": [[[0.5, 0]]], "trace_preserving": false})")));
}

TEST(ensemble_json, round_trip_and_labels) {
  Rng rng(2);
  const auto e = random_commuting_ensemble(3, 2, rng);
  const auto j = ensemble_to_json(e, true);
  EXPECT_EQ(j.at("labels"), "computational");
  const auto back = ensemble_from_json(Json::parse(j.dump()));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].p, e[i].p);
    EXPECT_LE((back[i].rho.matrix() - e[i].rho.matrix()).norm(), 1e-15);
  }
  EXPECT_THROW(ensemble_from_json(Json::parse(R"({"members": [{"p": 1, "rho": [1]}], "labels": "other"})")),
               InputError);
  EXPECT_THROW(ensemble_from_json(Json::parse(R"({"members": [{"p": 1}]})")), InputError);
}

TEST(load_json_file, reports_path_and_position) {
  EXPECT_THROW(
      {
        try {
          load_json_file("/nonexistent/instance.json");
        } catch (const InputError& ex) {
          EXPECT_NE(std::string(ex.what()).find("/nonexistent/instance.json"), std::string::npos);
          throw;
        }
      },
      InputError);
  const auto path = write_temp("revquant_bad.json", "{\n  \"d_in\": 2,\n  \"d_out\": ,\n}\n");
  try {
    load_json_file(path);
    FAIL() << "expected InputError";
  } catch (const InputError& ex) {
    EXPECT_NE(std::string(ex.what()).find(path + ":3:"), std::string::npos) << ex.what();
  }
  std::remove(path.c_str());
}

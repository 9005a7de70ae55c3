#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "swl/config.hpp"

using namespace swl;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("swl_config_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

std::string error_of(const std::string& name, const std::string& text) {
  try {
    load_config(write_temp(name, text));
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const RunConfig c = load_config(write_temp("empty", "  \n"));
  const RunConfig d;
  EXPECT_EQ(to_json_value(c), to_json_value(d));
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.N, 64);
  EXPECT_DOUBLE_EQ(std::pow(c.ladder_ratio, 4.0), 2.0);
}

TEST(Config, OverridesApply) {
  const RunConfig c = load_config(write_temp("override", R"({"n": 3, "potential": "square", "lambda": 0.25})"));
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.potential, "square");
  ASSERT_TRUE(c.lambda.has_value());
  EXPECT_DOUBLE_EQ(*c.lambda, 0.25);
  EXPECT_FALSE(c.A.has_value());
}

TEST(Config, UnknownFieldIsNamed) {
  EXPECT_NE(error_of("unknown", R"({"thetta": 1})").find("'thetta'"), std::string::npos);
}

TEST(Config, TypeErrorNamesTheField) {
  EXPECT_NE(error_of("type", R"({"N": "sixty-four"})").find("field 'N'"), std::string::npos);
  EXPECT_NE(error_of("int", R"({"K": 2.5})").find("field 'K'"), std::string::npos);
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_NE(error_of("odd", R"({"N": 33})").find("field 'N'"), std::string::npos);
  EXPECT_NE(error_of("dim", R"({"n": 0})").find("field 'n'"), std::string::npos);
  EXPECT_NE(error_of("L", R"({"L": -1})").find("field 'L'"), std::string::npos);
  EXPECT_NE(error_of("ratio", R"({"ladder_ratio": 1.0})").find("field 'ladder_ratio'"), std::string::npos);
}

TEST(Config, ParseErrorAndMissingFile) {
  EXPECT_NE(error_of("broken", "{\"n\": ").find("parse error"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/swl.json"), Error);
}

TEST(Config, OutIsNotRecorded) {
  RunConfig a, b;
  b.out = "elsewhere";
  EXPECT_EQ(to_json_value(a), to_json_value(b));
}

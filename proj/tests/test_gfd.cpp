#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "swl/gfd.hpp"
#include "swl/verify.hpp"

using namespace swl;

namespace {
std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("swl_gfd_" + name);
  std::filesystem::create_directories(d);
  return d;
}
}  // namespace

TEST(Gfd, FileRoundTripIsBitExact) {
  const GridSpec s(3, 1.5, 8);
  const auto f = random_function(s, 4, 2);
  const auto path = gfd::write(f, scratch("rt") / "f", {{"note", "x"}});
  const auto g = gfd::read(path);
  ASSERT_TRUE(g.spec() == s);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], g[i]);
}

TEST(Gfd, InlineRoundTrip) {
  const GridSpec s(2, 2.0, 6);
  const auto f = random_function(s, 1, 5);
  const auto g = gfd::from_json(gfd::to_inline_json(f));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], g[i]);
}

TEST(Gfd, LengthMismatchRejected) {
  const GridSpec s(2, 1.0, 8);
  auto m = gfd::to_inline_json(GridFunction::constant(GridSpec(2, 1.0, 6), 1.0));
  m["points_per_axis"] = 8;
  try {
    gfd::from_json(m);
    FAIL() << "expected a length error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("payload length"), std::string::npos);
  }
}

TEST(Gfd, MissingFieldNamed) {
  auto m = gfd::to_inline_json(GridFunction::constant(GridSpec(1, 1.0, 4), 1.0));
  m.erase("dtype");
  try {
    gfd::from_json(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("dtype"), std::string::npos);
  }
}

TEST(Gfd, TruncatedPayloadFileRejected) {
  const GridSpec s(2, 1.0, 8);
  const auto dir = scratch("trunc");
  const auto path = gfd::write(GridFunction::constant(s, 1.0), dir / "g");
  std::filesystem::resize_file(dir / "g.f64", 8 * 10);
  EXPECT_THROW(gfd::read(path), Error);
}

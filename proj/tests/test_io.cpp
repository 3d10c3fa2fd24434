#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "brth/field.hpp"
#include "brth/grid.hpp"
#include "brth/io.hpp"
#include "doctest.h"

using namespace brth;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "brth_io_test";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("csv numbers carry 17 significant digits in scientific form") {
  CHECK(io::csv_number(1.0) == "1.0000000000000000e+00");
  CHECK(io::csv_number(-0.5) == "-5.0000000000000000e-01");
  CHECK(io::csv_number(62.8) == "6.2799999999999997e+01");
  // Round trip is exact for doubles.
  const double x = 0.1 + 0.2;
  CHECK(std::stod(io::csv_number(x)) == x);
}

TEST_CASE("csv files have one header line and newline-only endings") {
  const fs::path p = scratch_dir() / "t.csv";
  io::write_csv(p.string(), {"a", "b"}, {{1.0, 2.0}, {3.0, 0.25}});
  const std::string text = slurp(p);
  CHECK(text == "a,b\n"
                "1.0000000000000000e+00,2.0000000000000000e+00\n"
                "3.0000000000000000e+00,2.5000000000000000e-01\n");
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("csv writer rejects ragged rows") {
  const fs::path p = scratch_dir() / "ragged.csv";
  CHECK_THROWS(io::write_csv(p.string(), {"a", "b"}, {{1.0}}));
}

TEST_CASE("field files round trip bit-exactly") {
  const SpacetimeGrid g = build_grid({Axis{"t", 0.0, 1.0, 4}, Axis{"r", 0.0, 2.0, 9}});
  std::vector<cplx> vals(g.size());
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : vals) v = cplx{u(rng), u(rng)};
  const ComplexField f(g, vals, Quantity::Psi);

  const fs::path p = scratch_dir() / "f.brth";
  io::write_field(p.string(), f);
  const ComplexField back = io::read_field(p.string(), Quantity::Psi);
  REQUIRE(back.grid() == g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

  // Header layout: magic, version, axis count.
  const std::string raw = slurp(p);
  REQUIRE(raw.size() > 12u);
  CHECK(raw.substr(0, 4) == "BRTH");
  CHECK(raw[4] == 1);   // version 1, little endian
  CHECK(raw[5] == 0);
  CHECK(raw[8] == 2);   // two axes
}

TEST_CASE("field reader rejects corrupt input") {
  const fs::path good = scratch_dir() / "ok.brth";
  const SpacetimeGrid g = build_grid({Axis{"r", 0.0, 1.0, 5}});
  io::write_field(good.string(), ComplexField(g, std::vector<cplx>(5), Quantity::Psi));

  const std::string raw = slurp(good);

  const fs::path bad_magic = scratch_dir() / "bad_magic.brth";
  {
    std::string r = raw;
    r[0] = 'X';
    std::ofstream(bad_magic, std::ios::binary) << r;
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(io::read_field(bad_magic.string(), Quantity::Psi)),
                       doctest::Contains("magic"), std::runtime_error);

  const fs::path truncated = scratch_dir() / "trunc.brth";
  std::ofstream(truncated, std::ios::binary) << raw.substr(0, raw.size() - 7);
  CHECK_THROWS(static_cast<void>(io::read_field(truncated.string(), Quantity::Psi)));

  CHECK_THROWS(static_cast<void>(io::read_field((scratch_dir() / "absent.brth").string(),
                                                Quantity::Psi)));
}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brthcli/run.hpp"
#include "doctest.h"

using namespace brth::cli;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "brth_cli_test" / leaf;
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("flags parse into the run configuration") {
  const RunConfig cfg = parse_config(
      {"construct", "--alpha", "0.7", "--solution", "spinning", "--l", "2", "--n", "1",
       "--out", "outdir", "--seed", "42"});
  CHECK(cfg.command == "construct");
  CHECK(cfg.alpha == doctest::Approx(0.7));
  CHECK(cfg.solution == "spinning");
  CHECK(cfg.mode_l == 2);
  CHECK(cfg.mode_n == 1);
  CHECK(cfg.out_dir == "outdir");
  CHECK(cfg.seed == 42u);
}

TEST_CASE("defaults fill in unstated physics") {
  const RunConfig cfg = parse_config({"evolve"});
  CHECK(cfg.params.m == 1.0);
  CHECK(cfg.params.c == 1.0);
  CHECK(cfg.params.hbar == 1.0);
  CHECK(cfg.alpha == doctest::Approx(0.5));
  CHECK(cfg.half_width == doctest::Approx(40.0));
  CHECK(cfg.grid_spacing == doctest::Approx(0.05));
  CHECK(cfg.dt == doctest::Approx(0.02));
  CHECK(cfg.periods == 10);
  CHECK(cfg.boundary == "analytic");

  const RunConfig boosted = parse_config({"verify", "--solution", "boosted-breather"});
  CHECK(boosted.velocity.x == doctest::Approx(0.6));  // default 0.6 c along x
}

TEST_CASE("unknown and malformed flags are usage errors naming the flag") {
  CHECK_THROWS_WITH_AS(parse_config({"construct", "--alhpa", "0.5"}),
                       doctest::Contains("--alhpa"), UsageError);
  CHECK_THROWS_AS(parse_config({"construct", "--alpha", "not_a_number"}), UsageError);
  CHECK_THROWS_AS(parse_config({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_config({}), UsageError);
  CHECK_THROWS_AS(parse_config({"verify", "--equation", "navier-stokes"}), UsageError);
  CHECK_THROWS_AS(parse_config({"verify", "--spacings", "0.1"}), UsageError);  // need >= 2
  CHECK_THROWS_AS(parse_config({"evolve", "--boundary", "absorbing"}), UsageError);
}

TEST_CASE("config files merge under explicit flags") {
  const fs::path file = scratch("merge.cfg");
  std::ofstream(file) << "# evolution preset\n"
                         "alpha = 0.25\n"
                         "half-width = 30\n"
                         "\n"
                         "periods = 4   # short run\n";
  const RunConfig cfg =
      parse_config({"evolve", "--config", file.string(), "--alpha", "0.9"});
  CHECK(cfg.alpha == doctest::Approx(0.9));        // flag wins
  CHECK(cfg.half_width == doctest::Approx(30.0));  // file fills the rest
  CHECK(cfg.periods == 4);
  CHECK(cfg.config_file.has_value());
}

TEST_CASE("unknown config keys are rejected with their line number") {
  const fs::path file = scratch("unknown.cfg");
  std::ofstream(file) << "alpha = 0.25\nalpa = 0.5\n";
  CHECK_THROWS_WITH_AS(parse_config({"evolve", "--config", file.string()}),
                       doctest::Contains("alpa"), UsageError);
  try {
    parse_config({"evolve", "--config", file.string()});
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  const fs::path garbled = scratch("garbled.cfg");
  std::ofstream(garbled) << "alpha 0.25\n";  // no '='
  CHECK_THROWS_WITH_AS(parse_config({"evolve", "--config", garbled.string()}),
                       doctest::Contains("line 1"), UsageError);
}

TEST_CASE("construct writes declared outputs with matching checksums") {
  const fs::path out = scratch("construct_out");
  fs::remove_all(out);
  const RunConfig cfg = parse_config({"construct", "--alpha", "0.5", "--out", out.string()});
  const RunManifest man = execute(cfg);
  CHECK(man.command == "construct");
  REQUIRE_FALSE(man.outputs.empty());
  for (const OutputRecord& rec : man.outputs) {
    const fs::path p = out / rec.name;
    REQUIRE_MESSAGE(fs::exists(p), rec.name);
    CHECK(fs::file_size(p) == rec.bytes);
    CHECK(sha256_hex_file(p.string()) == rec.sha256);
  }
  CHECK(fs::exists(out / "run_manifest.json"));

  // Nothing beyond the declared outputs and the manifest itself.
  std::size_t on_disk = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    (void)entry;
    ++on_disk;
  }
  CHECK(on_disk == man.outputs.size() + 1u);
}

TEST_CASE("repeated runs are byte-identical") {
  const fs::path o1 = scratch("repeat1");
  const fs::path o2 = scratch("repeat2");
  fs::remove_all(o1);
  fs::remove_all(o2);
  execute(parse_config({"construct", "--alpha", "0.5", "--out", o1.string(), "--seed", "9"}));
  execute(parse_config({"construct", "--alpha", "0.5", "--out", o2.string(), "--seed", "9"}));
  CHECK(slurp(o1 / "profile.csv") == slurp(o2 / "profile.csv"));
}

TEST_CASE("run_main maps outcomes onto exit codes") {
  CHECK(run_main({"--help"}) == 0);
  CHECK(run_main({"construct", "--no-such-flag"}) == 1);

  // A detuned frequency must fail verification with the dedicated code.
  const fs::path out = scratch("verify_fail");
  fs::remove_all(out);
  CHECK(run_main({"verify", "--equation", "kg", "--omega-override", "1.9", "--spacings",
                  "0.1,0.05", "--out", out.string()}) == 2);

  const fs::path ok = scratch("verify_ok");
  fs::remove_all(ok);
  CHECK(run_main({"verify", "--equation", "kg", "--spacings", "0.1,0.05", "--out",
                  ok.string()}) == 0);
}

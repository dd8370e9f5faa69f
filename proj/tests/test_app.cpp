#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "monsoon/app.hpp"
#include "monsoon/transitions.hpp"
#include "support.hpp"

using namespace monsoon;
namespace fs = std::filesystem;

namespace {

void write_config(const fs::path& path, const std::string& extra = "") {
  std::ofstream out(path);
  out << "# small pipeline run\n"
         "data = synth/rainfall.csv\n"
         "geometry = synth/geometry.csv\n"
         "synth.rows = 4\nsynth.cols = 4\nsynth.years = 2\nsynth.patterns = 3\n"
         "max_clusters_u = 3\nmax_clusters_v = 3\n"
         "n_sweeps = 30\nburn_in = 10\nseed = 5\n"
         "prominence = four_of_eight\n"
         "sim.seasons = 2\nsim.length = 20\n"
      << extra;
}

}  // namespace

TEST_CASE("config parsing resolves paths and overrides") {
  testing::TempDir dir("app_config");
  write_config(dir.path / "run.cfg", "family_override.2 = 3\nworkers = 2\n");
  const auto cfg = app::load_run_config(dir.path / "run.cfg", {{"seed", "9"}});
  CHECK(cfg.data == dir.path / "synth/rainfall.csv");
  CHECK(cfg.sampler.seed == 9);
  CHECK(cfg.sampler.n_sweeps == 30);
  CHECK(cfg.sampler.worker_count == 2);
  CHECK(cfg.model.max_clusters_u == 3);
  CHECK(cfg.family_overrides.at(2) == 3);
  CHECK(cfg.prominence == ProminenceRule::four_of_eight);
  CHECK(cfg.stamp("fit").find("workers") == std::string::npos);
  CHECK(cfg.stamp("fit").find("seed=9") != std::string::npos);

  write_config(dir.path / "bad.cfg", "init = sideways\n");
  CHECK_THROWS_AS(app::load_run_config(dir.path / "bad.cfg"), DataError);
  write_config(dir.path / "bad2.cfg", "n_sweeps = ten\n");
  CHECK_THROWS_AS(app::load_run_config(dir.path / "bad2.cfg"), DataError);
}

TEST_CASE("full pipeline writes every artifact") {
  testing::TempDir dir("app_pipeline");
  write_config(dir.path / "run.cfg");
  auto cfg = app::load_run_config(dir.path / "run.cfg", {{"out", (dir.path / "synth").string()}});
  REQUIRE(app::cmd_synth(cfg) == 0);
  CHECK(fs::exists(dir.path / "synth/truth.csv"));

  cfg = app::load_run_config(dir.path / "run.cfg", {{"out", (dir.path / "fit").string()}});
  REQUIRE(app::cmd_fit(cfg) == 0);
  for (const char* name : {"model_params.txt", "state_z.csv", "state_u.csv", "state_v.csv",
                           "diagnostics.csv", "patterns_spatial.csv", "patterns_summary.csv",
                           "patterns_temporal.csv", "prototypes_pi.csv"})
    CHECK_MESSAGE(fs::exists(dir.path / "fit" / name), name);
  CHECK(testing::slurp(dir.path / "fit/state_u.csv").rfind("# monsoon fit", 0) == 0);

  const auto field = load_rainfall(cfg.data, cfg.geometry);
  const auto state = app::read_state(dir.path / "fit", field);
  CHECK(state.u.size() == field.n_days());
  CHECK(state.z.rows() == 16);

  REQUIRE(app::cmd_analyze(cfg) == 0);
  for (const char* name :
       {"transitions.csv", "transition_counts.csv", "transitions_zero_diag.csv", "transitions_family.csv",
        "subsequences.csv", "pattern_spells.csv", "monthly_distribution.csv", "year_classes.csv",
        "spells_all_india.csv", "act_brk_days.csv", "spell_comparison.txt", "spells_local.csv",
        "local_spell_summary.csv", "spells_regional.csv", "coherence.txt", "hamming_similarity.csv",
        "hamming_similarity_by_year.csv", "analysis_report.txt", "pattern_summary.csv"})
    CHECK_MESSAGE(fs::exists(dir.path / "fit" / name), name);
  const auto model = read_transition_csv(dir.path / "fit/transitions.csv");
  CHECK(model.size() >= 1);

  REQUIRE(app::cmd_simulate(cfg) == 0);
  CHECK(fs::exists(dir.path / "fit/simulated_seasons.csv"));
  REQUIRE(app::cmd_evaluate(cfg) == 0);
  const auto report = csv::read(dir.path / "fit/eval_report.csv",
                                {"method", "axis", "k", "std_yy", "l2_theta", "hamm_theta_d",
                                 "self_transitions"});
  CHECK(report.rows.size() == 8);
}

TEST_CASE("fit output does not depend on worker count") {
  testing::TempDir dir("app_workers");
  write_config(dir.path / "run.cfg");
  auto cfg = app::load_run_config(dir.path / "run.cfg", {{"out", (dir.path / "synth").string()}});
  REQUIRE(app::cmd_synth(cfg) == 0);
  for (const char* w : {"1", "4"}) {
    cfg = app::load_run_config(dir.path / "run.cfg",
                               {{"out", (dir.path / (std::string("w") + w)).string()}, {"workers", w}});
    REQUIRE(app::cmd_fit(cfg) == 0);
  }
  for (const char* name : {"state_z.csv", "state_u.csv", "diagnostics.csv", "model_params.txt"})
    CHECK(testing::slurp(dir.path / "w1" / name) == testing::slurp(dir.path / "w4" / name));
}

TEST_CASE("missing inputs fail with a clear error") {
  testing::TempDir dir("app_missing");
  write_config(dir.path / "run.cfg");
  const auto cfg = app::load_run_config(dir.path / "run.cfg", {{"out", (dir.path / "out").string()}});
  CHECK_THROWS_AS(app::cmd_fit(cfg), DataError);
  CHECK_THROWS_AS(app::read_state(dir.path / "nowhere", testing::tiny_field(1, 1, 1, 1)), DataError);
}

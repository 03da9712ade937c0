#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "chansim/cli.hpp"
#include "chansim/io.hpp"
#include "doctest.h"

using namespace chansim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("chansim_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv_s = args;
  argv_s.insert(argv_s.begin(), "chansim");
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  return run_main(static_cast<int>(argv.size()), argv.data());
}

Json load_stripped(const fs::path& p) {
  Json j = load_json_file(p.string());
  j.erase("wall_ms");
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kEnsembleJson = R"({
  "prior": [0.5, 0.5],
  "states": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]]
})";

}  // namespace

TEST_SUITE("io_cli") {
  TEST_CASE("metric formatting is stable at 12 significant digits") {
    CHECK(format_metric(1.0 / 3.0) == "0.333333333333");
    CHECK(format_metric(0.0) == "0");
    CHECK(format_metric(-2.5) == "-2.5");
    CHECK(round_metric(1.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
    CHECK(format_metric(round_metric(1.0 / 3.0)) == format_metric(1.0 / 3.0));
    Json j = {{"a", 1.0 / 3.0}, {"b", {{"c", 2.0 / 3.0}}}, {"n", 7}, {"s", "x"}};
    Json r = round_metrics(j);
    CHECK(r["a"].get<double>() == round_metric(1.0 / 3.0));
    CHECK(r["b"]["c"].get<double>() == round_metric(2.0 / 3.0));
    CHECK(r["n"].get<int>() == 7);
    CHECK(r["s"].get<std::string>() == "x");
  }

  TEST_CASE("csv writer appends and counts") {
    fs::path dir = fresh_dir("csv");
    fs::path table = dir / "t.csv";
    {
      CsvWriter w(table.string(), {"a", "b"}, false);
      CHECK(w.existing_rows() == 0);
      w.row({"1", "x"});
      w.row({"2", "y"});
    }
    CHECK(CsvWriter::count_rows(table.string()) == 2);
    {
      CsvWriter w(table.string(), {"a", "b"}, true);
      CHECK(w.existing_rows() == 2);
      w.row({"3", "z"});
    }
    auto rows = read_csv_rows(table.string());
    REQUIRE(rows.size() == 3);
    CHECK(rows[2][0] == "3");
    CHECK(rows[2][1] == "z");
    CHECK_THROWS_AS(CsvWriter(table.string(), {"a", "c"}, true), ValidationError);
  }

  TEST_CASE("parsers accept inline objects and file references") {
    fs::path dir = fresh_dir("parse");
    write_text(dir / "ens.json", kEnsembleJson);
    Json ref = {{"file", "ens.json"}};
    Ensemble e = parse_ensemble(ref, dir.string());
    CHECK(e.size() == 2);
    CHECK(e.states[1].matrix()(0, 1).real() == doctest::Approx(0.5));

    Json wj = {{"matrix", {{0.9, 0.1}, {0.1, 0.9}}}};
    Channel w = parse_channel(wj, dir.string());
    CHECK(w(0, 1) == doctest::Approx(0.1));
    Json badw = {{"matrix", {{0.9, 0.3}, {0.1, 0.9}}}};
    CHECK_THROWS_AS(parse_channel(badw, dir.string()), ValidationError);

    Json dj = Json::array({{0, 1}, {1, 0}});
    DistortionMeasure dist = parse_distortion(dj);
    CHECK(dist(1, 0) == 1.0);

    Json sj = {{"dims", {2, 1, 2, 1}},
               {"amplitudes", {{0.70710678118654752, 0}, {0, 0}, {0, 0}, {0.70710678118654752, 0}}}};
    FourPartyPureState psi = parse_state(sj, dir.string());
    CHECK(psi.dims[0] == 2);
    CHECK(std::abs(psi.amplitudes.norm() - 1.0) < 1e-9);

    // Round trips.
    Json back = ensemble_to_json(e);
    Ensemble e2 = parse_ensemble(back, dir.string());
    CHECK((e2.states[1].matrix() - e.states[1].matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((parse_cmat(cmat_to_json(psi.density())) - psi.density()).cwiseAbs().maxCoeff() <
          1e-15);
  }

  TEST_CASE("cli runs a small typicality sweep reproducibly") {
    fs::path dir = fresh_dir("cli_typ");
    write_text(dir / "cfg.json", R"({
      "p": [0.5, 0.5],
      "n": [2, 3],
      "delta": [0.2, 0.4]
    })");
    fs::path out1 = dir / "out1";
    fs::path out2 = dir / "out2";
    CHECK(run_cli({"--config", (dir / "cfg.json").string(), "--seed", "9", "--out",
                   out1.string(), "typicality"}) == 0);
    CHECK(run_cli({"--config", (dir / "cfg.json").string(), "--seed", "9", "--out",
                   out2.string(), "typicality"}) == 0);
    CHECK(fs::exists(out1 / "typicality.csv"));
    CHECK(fs::exists(out1 / "typicality.json"));
    CHECK(slurp(out1 / "typicality.csv") == slurp(out2 / "typicality.csv"));
    CHECK(load_stripped(out1 / "typicality.json") == load_stripped(out2 / "typicality.json"));
    auto rows = read_csv_rows((out1 / "typicality.csv").string());
    CHECK(rows.size() == 4);  // two n times two delta
    Json summary = load_json_file((out1 / "typicality.json").string());
    CHECK(summary["subcommand"] == "typicality");
    CHECK(summary["seed"] == 9);
    CHECK(summary["metrics"]["marginal_all_pass"].get<bool>());
  }

  TEST_CASE("cli resume skips completed cells and matches a fresh run") {
    fs::path dir = fresh_dir("cli_resume");
    write_text(dir / "cfg.json", R"({
      "q": [0.5, 0.5],
      "n": 4,
      "m_exponent": 6,
      "delta": 0.3,
      "eps": 0.2,
      "trials": 3
    })");
    fs::path out = dir / "out";
    CHECK(run_cli({"--config", (dir / "cfg.json").string(), "--seed", "11", "--out",
                   out.string(), "lemma", "dilution"}) == 0);
    std::string csv_first = slurp(out / "dilution.csv");
    Json json_first = load_stripped(out / "dilution.json");
    CHECK(run_cli({"--config", (dir / "cfg.json").string(), "--seed", "11", "--out",
                   out.string(), "--resume", "lemma", "dilution"}) == 0);
    CHECK(slurp(out / "dilution.csv") == csv_first);
    CHECK(load_stripped(out / "dilution.json") == json_first);
  }

  TEST_CASE("cli maps failures to documented exit codes") {
    fs::path dir = fresh_dir("cli_err");
    // Unreadable config.
    CHECK(run_cli({"--config", (dir / "missing.json").string(), "typicality"}) == 2);
    // Unknown subcommand is a parse error.
    write_text(dir / "cfg.json", R"({"p": [0.5, 0.5], "n": [2], "delta": [0.2]})");
    CHECK(run_cli({"--config", (dir / "cfg.json").string(), "nonsense"}) == 2);
    // Enumeration guard.
    write_text(dir / "guard.json", R"({"p": [0.5, 0.5], "n": [40], "delta": [0.2]})");
    CHECK(run_cli({"--config", (dir / "guard.json").string(), "--out",
                   (dir / "g").string(), "typicality"}) == 3);
    // Infeasible distortion budget.
    write_text(dir / "wz.json", R"({
      "joint": [[0.5], [0.5]],
      "distortion": [[0.2, 1.0], [1.0, 0.2]],
      "grid": [0.05],
      "starts": 2,
      "iterations": 40
    })");
    CHECK(run_cli({"--config", (dir / "wz.json").string(), "--out",
                   (dir / "wz").string(), "wyner-ziv"}) == 4);
    // Help exits cleanly.
    CHECK(run_cli({"--help"}) == 0);
  }

  TEST_CASE("cli redistribute emits corner and bound metrics") {
    fs::path dir = fresh_dir("cli_redist");
    write_text(dir / "cfg.json", R"({
      "state": {
        "dims": [2, 1, 2, 1],
        "amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]
      }
    })");
    fs::path out = dir / "out";
    CHECK(run_cli({"--config", (dir / "cfg.json").string(), "--out", out.string(),
                   "redistribute"}) == 0);
    Json j = load_json_file((out / "redistribute.json").string());
    CHECK(j["metrics"]["q_min"].get<double>() == doctest::Approx(1.0));
    CHECK(j["metrics"]["qe_sum_min"].get<double>() == doctest::Approx(1.0));
    REQUIRE(j["metrics"]["corners"].size() == 2);
    CHECK(j["metrics"]["corners"][0]["label"] == "fqsw");
    CHECK(j["metrics"]["corners"][0]["q"].get<double>() == doctest::Approx(1.0));
    CHECK(j["metrics"]["corners"][0]["contained"].get<bool>());
    CHECK(j["metrics"]["fqsw_tight"].get<bool>());
  }
}

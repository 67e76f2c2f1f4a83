// Configuration layer and subcommand drivers: parsing, serialization,
// presets, and the artifact contract of each driver, plus end-to-end checks
// through the installed binary.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "../tools/cli.hpp"
#include "cif/version.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

namespace fs = std::filesystem;
using namespace cif;
using namespace cif::cli;

namespace {

// Self-deleting unique directory under the system temp root.
struct TempDir {
  fs::path path;

  TempDir() {
    std::string tpl = (fs::temp_directory_path() / "cif_cli_XXXXXX").string();
    REQUIRE(mkdtemp(tpl.data()) != nullptr);
    path = tpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

struct CmdResult {
  int status = -1;
  std::string output;
};

// Runs a shell command with stderr folded into stdout.
CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

ExperimentConfig parse_text(const std::string& text, const std::string& name = "cfg",
                            ExperimentConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, name, std::move(base));
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("presets carry the four reference parameter sets") {
  const ExperimentConfig a = preset("example5.1");
  CHECK(a.params.nu == 0.1);
  CHECK(a.params.gamma == 9.0);
  CHECK(a.params.delta == 9.0);
  CHECK(a.params.mu == 20.0);
  CHECK(a.params.c_p == 1.0);
  CHECK(a.bc == BoundaryCondition::Mixed);
  CHECK(a.interpolant == "nodal");
  CHECK(a.initial == "x(1-x)");
  CHECK(a.N == 100);
  CHECK(a.M == 1000);
  CHECK(a.T == 5.0);

  const ExperimentConfig b = preset("example5.2a");
  CHECK(b.params.nu == 0.5);
  CHECK(b.params.gamma == 1.0);
  CHECK(b.params.mu == 30.0);
  CHECK(b.initial == "sin(pi x/2)");

  const ExperimentConfig c = preset("example5.2b");
  CHECK(c.params.gamma == 50.0);
  CHECK(c.params.delta == 50.0);
  CHECK(c.params.mu == 120.0);

  const ExperimentConfig d = preset("example5.3");
  CHECK(d.params.nu == 1.0);
  CHECK(d.params.gamma == 150.0);
  CHECK(d.params.mu == 500.0);
  CHECK(d.bc == BoundaryCondition::Neumann);
  CHECK(d.interpolant == "fourier");
  CHECK(d.fourier_modes == 6);
  CHECK(d.initial == "cos(3 pi x)");
  CHECK(d.M == 5000);

  CHECK_THROWS_AS((void)preset("example9.9"), std::invalid_argument);
}

TEST_CASE("interpolant_spec resolves names, rules and observation partitions") {
  ExperimentConfig cfg;
  SUBCASE("defaults to nodal midpoint on the mesh partition") {
    const auto s = cfg.interpolant_spec();
    CHECK(s.is_nodal());
    CHECK(!s.partition.has_value());
    CHECK(std::get<NodalValues>(s.kind).sample_rule == SampleRule::Midpoint);
  }
  SUBCASE("sample rule names map through") {
    cfg.sample_rule = "left";
    CHECK(std::get<NodalValues>(cfg.interpolant_spec().kind).sample_rule == SampleRule::Left);
    cfg.sample_rule = "right";
    CHECK(std::get<NodalValues>(cfg.interpolant_spec().kind).sample_rule == SampleRule::Right);
    cfg.sample_rule = "simpson";
    CHECK_THROWS_AS((void)cfg.interpolant_spec(), std::invalid_argument);
  }
  SUBCASE("volumes and fourier kinds") {
    cfg.interpolant = "volumes";
    CHECK(cfg.interpolant_spec().is_volumes());
    cfg.interpolant = "fourier";
    cfg.fourier_modes = 7;
    const auto s = cfg.interpolant_spec();
    CHECK(s.is_fourier());
    CHECK(std::get<FourierModes>(s.kind).mode_count == 7);
  }
  SUBCASE("observation_intervals installs a uniform coarse partition") {
    cfg.observation_intervals = 8;
    const auto s = cfg.interpolant_spec();
    REQUIRE(s.partition.has_value());
    REQUIRE(s.partition->size() == 9);
    CHECK((*s.partition)[0] == 0.0);
    CHECK((*s.partition)[8] == 1.0);
    CHECK((*s.partition)[2] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("fourier ignores observation_intervals") {
    cfg.interpolant = "fourier";
    cfg.observation_intervals = 8;
    CHECK(!cfg.interpolant_spec().partition.has_value());
  }
  SUBCASE("unknown interpolant name") {
    cfg.interpolant = "wavelet";
    CHECK_THROWS_AS((void)cfg.interpolant_spec(), std::invalid_argument);
  }
}

TEST_CASE("initial_data parses the expression field") {
  ExperimentConfig cfg;
  const auto y0 = cfg.initial_data();
  CHECK(y0(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  cfg.initial = "x + ";
  CHECK_THROWS((void)cfg.initial_data());
}

TEST_CASE("alpha_or_max falls back to the admissible maximum") {
  ExperimentConfig cfg = preset("example5.1");
  CHECK(cfg.alpha_or_max(0.01) == doctest::Approx(0.9).epsilon(1e-14));
  cfg.alpha = 0.37;
  CHECK(cfg.alpha_or_max(0.01) == 0.37);
  cfg.alpha = 0.0;
  CHECK(cfg.alpha_or_max(0.01) == 0.0);
}

TEST_CASE("serialize -> parse round-trips every field bit-identically") {
  ExperimentConfig cfg;
  cfg.params = ModelParams{0.1, 9.0 / 7.0, 0.3, std::nextafter(20.0, 21.0), 1.0 / 3.0};
  cfg.bc = BoundaryCondition::Dirichlet;
  cfg.interpolant = "volumes";
  cfg.sample_rule = "left";
  cfg.fourier_modes = 7;
  cfg.observation_intervals = 13;
  cfg.initial = "sin(pi x / 2) + 0.125 x(1-x)";
  cfg.N = 37;
  cfg.M = 211;
  cfg.T = 0.1 + 0.2;  // 0.30000000000000004: not a round decimal
  cfg.space_ladder = {3, 5, 9};
  cfg.N_ref = 27;
  cfg.M_fixed = 19;
  cfg.time_ladder = {7, 11};
  cfg.M_ref = 4097;
  cfg.N_fixed = 5;
  cfg.T_study = 1.0 / 7.0;
  cfg.alpha = 2.0 / 3.0;
  cfg.snapshot_times = {0.1, 1.0 / 3.0, 0.5000000000000001};
  cfg.out_dir = "some/out";

  const std::string text = serialize_config(cfg, "converge-control");
  CAPTURE(text);
  const ExperimentConfig rt = parse_text(text, "roundtrip");

  CHECK(same_bits(rt.params.nu, cfg.params.nu));
  CHECK(same_bits(rt.params.gamma, cfg.params.gamma));
  CHECK(same_bits(rt.params.delta, cfg.params.delta));
  CHECK(same_bits(rt.params.mu, cfg.params.mu));
  CHECK(same_bits(rt.params.c_p, cfg.params.c_p));
  CHECK(rt.bc == cfg.bc);
  CHECK(rt.interpolant == cfg.interpolant);
  CHECK(rt.sample_rule == cfg.sample_rule);
  CHECK(rt.fourier_modes == cfg.fourier_modes);
  CHECK(rt.observation_intervals == cfg.observation_intervals);
  CHECK(rt.initial == cfg.initial);
  CHECK(rt.N == cfg.N);
  CHECK(rt.M == cfg.M);
  CHECK(same_bits(rt.T, cfg.T));
  CHECK(rt.space_ladder == cfg.space_ladder);
  CHECK(rt.N_ref == cfg.N_ref);
  CHECK(rt.M_fixed == cfg.M_fixed);
  CHECK(rt.time_ladder == cfg.time_ladder);
  CHECK(rt.M_ref == cfg.M_ref);
  CHECK(rt.N_fixed == cfg.N_fixed);
  CHECK(same_bits(rt.T_study, cfg.T_study));
  CHECK(same_bits(rt.alpha, cfg.alpha));
  REQUIRE(rt.snapshot_times.size() == cfg.snapshot_times.size());
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i)
    CHECK(same_bits(rt.snapshot_times[i], cfg.snapshot_times[i]));
  CHECK(rt.out_dir == cfg.out_dir);
  CHECK(rt.study == "converge-control");  // [study] type records the subcommand
}

TEST_CASE("parse_config handles comments, layering and sections") {
  SUBCASE("comments, blank lines and whitespace") {
    const auto cfg = parse_text(
        "\n"
        "# leading comment\n"
        "  [model]  \n"
        "  nu = 0.25   # inline comment\n"
        "gamma=3 ; semicolon comment\n"
        "\n"
        "[space]\n"
        "N = 12\n");
    CHECK(cfg.params.nu == 0.25);
    CHECK(cfg.params.gamma == 3.0);
    CHECK(cfg.N == 12);
    CHECK(cfg.M == 1000);  // untouched default
  }
  SUBCASE("partial files override the supplied base selectively") {
    const auto cfg = parse_text("[model]\ngamma = 5\n", "partial", preset("example5.1"));
    CHECK(cfg.params.gamma == 5.0);
    CHECK(cfg.params.mu == 20.0);
    CHECK(cfg.initial == "x(1-x)");
    CHECK(cfg.N == 100);
  }
  SUBCASE("integer lists split on whitespace") {
    const auto cfg = parse_text("[study]\nspace_ladder = 4 8   16\n");
    CHECK(cfg.space_ladder == std::vector<int>{4, 8, 16});
  }
}

TEST_CASE("parse_config diagnostics carry source name and line number") {
  const auto message_of = [](const std::string& text) -> std::string {
    try {
      (void)parse_text(text, "mycfg");
      return "";
    } catch (const std::invalid_argument& e) {
      return e.what();
    }
  };

  SUBCASE("unknown key") {
    const std::string m = message_of("[model]\nnu = 0.1\nviscosity = 2\n");
    CHECK(m.find("mycfg:3:") == 0);
    CHECK(m.find("viscosity") != std::string::npos);
  }
  SUBCASE("known key in the wrong section") {
    const std::string m = message_of("[space]\nmu = 2\n");
    CHECK(m.find("mycfg:2:") == 0);
  }
  SUBCASE("key before any section header") {
    CHECK(message_of("nu = 0.1\n").find("mycfg:1:") == 0);
  }
  SUBCASE("missing equals sign") {
    const std::string m = message_of("[model]\nnu 0.1\n");
    CHECK(m.find("mycfg:2:") == 0);
    CHECK(m.find("key = value") != std::string::npos);
  }
  SUBCASE("unterminated section header") {
    CHECK(message_of("[model\n").find("unterminated") != std::string::npos);
  }
  SUBCASE("malformed double") {
    const std::string m = message_of("[model]\nnu = fast\n");
    CHECK(m.find("mycfg:2:") == 0);
    CHECK(m.find("bad value") != std::string::npos);
  }
  SUBCASE("trailing characters after a number") {
    CHECK(message_of("[space]\nN = 12x\n").find("bad value") != std::string::npos);
  }
  SUBCASE("integer out of range") {
    const std::string m = message_of("[space]\nN = 99999999999999999999\n");
    CHECK(m.find("out of range") != std::string::npos);
  }
}

TEST_CASE("load_config rejects missing files") {
  CHECK_THROWS_AS((void)load_config("/nonexistent/cif.cfg"), std::invalid_argument);
}

TEST_CASE("write_file_atomic leaves no temporary and overwrites cleanly") {
  TempDir tmp;
  const fs::path target = tmp / "data.txt";
  write_file_atomic(target, "first\n");
  CHECK(slurp(target) == "first\n");
  write_file_atomic(target, "second\n");
  CHECK(slurp(target) == "second\n");
  CHECK(!fs::exists(tmp / "data.txt.tmp"));
}

TEST_CASE("run_simulate writes the full artifact set") {
  TempDir tmp;
  ExperimentConfig cfg = preset("example5.1");
  cfg.N = 16;
  cfg.M = 40;
  cfg.T = 0.2;
  cfg.snapshot_times = {0.1};
  cfg.out_dir = (tmp / "run1").string();

  std::ostringstream log;
  REQUIRE(run_simulate(cfg, log) == 0);
  CHECK(log.str().find("steps: 40") != std::string::npos);

  const fs::path dir = tmp / "run1";
  for (const char* name :
       {"manifest.cfg", "trajectory.csv", "diagnostics.csv", "final_state.tsv",
        "snapshot_0.1.tsv"})
    CHECK(fs::exists(dir / name));

  const auto traj = lines_of(slurp(dir / "trajectory.csv"));
  REQUIRE(traj.size() == 42);  // header + M+1 samples
  CHECK(traj[0] == "t,l2_norm,h1_norm,control_l2,newton_iters");
  CHECK(lines_of(slurp(dir / "final_state.tsv")).size() == 17);

  SUBCASE("the manifest reproduces the run byte-for-byte") {
    ExperimentConfig again = load_config(dir / "manifest.cfg");
    again.out_dir = (tmp / "run2").string();
    std::ostringstream log2;
    REQUIRE(run_simulate(again, log2) == 0);
    CHECK(slurp(tmp / "run2" / "trajectory.csv") == slurp(dir / "trajectory.csv"));
    CHECK(slurp(tmp / "run2" / "diagnostics.csv") == slurp(dir / "diagnostics.csv"));
    CHECK(slurp(tmp / "run2" / "final_state.tsv") == slurp(dir / "final_state.tsv"));
  }
}

TEST_CASE("run_modes lists the linearized spectrum with stability flags") {
  TempDir tmp;
  ExperimentConfig cfg = preset("example5.1");
  cfg.out_dir = tmp.path.string();
  std::ostringstream log;
  REQUIRE(run_modes(cfg, log) == 0);
  CHECK(log.str().find("3 unstable mode(s)") != std::string::npos);

  const auto rows = lines_of(slurp(tmp / "modes.csv"));
  REQUIRE(rows.size() == 9);  // header + max(3 + 4, 8) modes
  CHECK(rows[0] == "n,lambda,rate,unstable");
  for (int i = 1; i <= 8; ++i) {
    CHECK(rows[i].rfind(std::to_string(i - 1) + ",", 0) == 0);
    const bool unstable = i <= 3;  // modes 0..2 grow for these parameters
    CHECK(rows[i].substr(rows[i].size() - 2) == (unstable ? ",1" : ",0"));
  }
}

TEST_CASE("run_stability_check gates on the admissibility conditions") {
  SUBCASE("conditions hold: decay bound verified") {
    TempDir tmp;
    ExperimentConfig cfg = preset("example5.1");
    cfg.N = 40;
    cfg.M = 100;
    cfg.T = 0.5;
    cfg.out_dir = tmp.path.string();
    std::ostringstream log;
    REQUIRE(run_stability_check(cfg, log) == 0);
    const std::string text = slurp(tmp / "stability.txt");
    CHECK(text.find("nu_lower_ok: yes") != std::string::npos);
    CHECK(text.find("mu_lower_ok: yes") != std::string::npos);
    CHECK(text.find("alpha_max: 0.9") != std::string::npos);
    CHECK(text.find("unstable_modes: 3") != std::string::npos);
    CHECK(text.find("decay_violations: 0 ") != std::string::npos);
    CHECK(text.find("decay_check: PASS") != std::string::npos);
    CHECK(fs::exists(tmp / "diagnostics.csv"));
  }
  SUBCASE("feedback too weak: reported and decay skipped") {
    TempDir tmp;
    ExperimentConfig cfg = preset("example5.1");
    cfg.params.mu = 10.0;  // < 2 (gamma + nu)
    cfg.N = 40;
    cfg.out_dir = tmp.path.string();
    std::ostringstream log;
    CHECK(run_stability_check(cfg, log) == 1);
    const std::string text = slurp(tmp / "stability.txt");
    CHECK(text.find("mu_lower_ok: no") != std::string::npos);
    CHECK(text.find("SKIPPED") != std::string::npos);
    CHECK(!fs::exists(tmp / "diagnostics.csv"));
  }
}

TEST_CASE("convergence drivers emit their order CSVs") {
  TempDir tmp;
  ExperimentConfig cfg = preset("example5.1");
  cfg.space_ladder = {4, 8};
  cfg.N_ref = 16;
  cfg.M_fixed = 10;
  cfg.time_ladder = {4, 8};
  cfg.M_ref = 32;
  cfg.N_fixed = 8;
  cfg.T_study = 0.1;

  SUBCASE("converge-space") {
    cfg.out_dir = tmp.path.string();
    std::ostringstream log;
    REQUIRE(run_converge_space(cfg, log) == 0);
    const auto rows = lines_of(slurp(tmp / "space_orders.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "resolution,error_l2,oc_l2,error_linf,oc_linf");
    CHECK(rows[1].rfind("1/4,", 0) == 0);
    CHECK(rows[1].find(",--,") != std::string::npos);
    CHECK(rows[2].rfind("1/8,", 0) == 0);
    CHECK(log.str().find("mean of last two orders") != std::string::npos);
  }
  SUBCASE("converge-time") {
    cfg.out_dir = tmp.path.string();
    std::ostringstream log;
    REQUIRE(run_converge_time(cfg, log) == 0);
    const auto rows = lines_of(slurp(tmp / "time_orders.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("4,", 0) == 0);
    CHECK(rows[2].rfind("8,", 0) == 0);
  }
  SUBCASE("converge-control emits both axes") {
    cfg.out_dir = tmp.path.string();
    std::ostringstream log;
    REQUIRE(run_converge_control(cfg, log) == 0);
    CHECK(fs::exists(tmp / "control_space_orders.csv"));
    CHECK(fs::exists(tmp / "control_time_orders.csv"));
    CHECK(lines_of(slurp(tmp / "control_space_orders.csv")).size() == 3);
  }
}

TEST_CASE("run_table_repro rejects unknown table ids") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.out_dir = tmp.path.string();
  std::ostringstream log;
  CHECK_THROWS_AS((void)run_table_repro(3, cfg, log), std::invalid_argument);
}

#ifdef CIF_BIN_PATH
TEST_CASE("binary: --version prints the library version") {
  const auto r = run_cmd(std::string(CIF_BIN_PATH) + " --version");
  CHECK(r.status == 0);
  CHECK(r.output == std::string(kVersion) + "\n");
}

TEST_CASE("binary: a small simulate run succeeds end to end") {
  TempDir tmp;
  const auto r = run_cmd(std::string(CIF_BIN_PATH) +
                         " simulate --preset example5.1 --N 16 --M 20 --T 0.2 --out " +
                         (tmp / "out").string());
  CHECK(r.status == 0);
  CHECK(r.output.find("alpha_max = 0.9") != std::string::npos);
  CHECK(fs::exists(tmp / "out" / "trajectory.csv"));
}

TEST_CASE("binary: flag overrides layer on top of the preset") {
  TempDir tmp;
  const auto r = run_cmd(std::string(CIF_BIN_PATH) +
                         " modes --preset example5.1 --bc neumann --out " + tmp.path.string());
  CHECK(r.status == 0);
  CHECK(r.output.find("4 unstable mode(s)") != std::string::npos);
}

TEST_CASE("binary: config errors exit nonzero with no partial artifacts") {
  TempDir tmp;
  const fs::path cfg = tmp / "bad.cfg";
  write_file_atomic(cfg, "[model]\nviscosity = 2\n");
  const fs::path out = tmp / "out";
  const auto r = run_cmd(std::string(CIF_BIN_PATH) + " simulate --config " + cfg.string() +
                         " --out " + out.string());
  CHECK(r.status != 0);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find(":2:") != std::string::npos);
  CHECK(!fs::exists(out));
}

TEST_CASE("binary: bad invocations are rejected") {
  CHECK(run_cmd(std::string(CIF_BIN_PATH) + " frobnicate").status != 0);
  CHECK(run_cmd(std::string(CIF_BIN_PATH)).status != 0);
  CHECK(run_cmd(std::string(CIF_BIN_PATH) + " table-repro 3 --out /tmp/unused").status != 0);
  const auto r = run_cmd(std::string(CIF_BIN_PATH) +
                         " simulate --preset example5.1 --N 8 --M 4 --T 0.1 --y0 'x + '");
  CHECK(r.status != 0);
  CHECK(r.output.find("error:") != std::string::npos);
}
#endif  // CIF_BIN_PATH

TEST_SUITE_END();

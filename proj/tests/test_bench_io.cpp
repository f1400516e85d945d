// Benchmark-infrastructure tests: the portable random generator against
// frozen reference outputs and statistical sanity bounds, synthetic instance
// bookkeeping, the three file formats (correspondence CSV, ASCII point
// clouds, instance JSON) with byte-exact round trips and line-accurate
// errors, and the Monte Carlo sweep with its self-checking report CSV.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <certrot/io.hpp>
#include <certrot/pipeline.hpp>
#include <certrot/quaternion.hpp>
#include <certrot/rng.hpp>
#include <certrot/sweep.hpp>
#include <certrot/synthetic.hpp>

using namespace certrot;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int thrown_line(const std::string& path, void (*fn)(const std::string&)) {
  try {
    fn(path);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

// ---------------------------------------------------------------- generator

TEST_CASE("random stream matches the frozen reference sequence", "[bench-io]") {
  // First outputs of the published splitmix64 mixing function.
  SplitMix64 rng(0);
  REQUIRE(rng.next_u64() == 0xe220a8397b1dcdafULL);
  REQUIRE(rng.next_u64() == 0x6e789e6aa1b965f4ULL);
  REQUIRE(rng.next_u64() == 0x06c45d188009454fULL);
  REQUIRE(rng.next_u64() == 0xf88bb8a8724c81ecULL);

  SplitMix64 rng2(1234567);
  REQUIRE(rng2.next_u64() == 0x599ed017fb08fc85ULL);
  REQUIRE(rng2.next_u64() == 0x2c73f08458540fa5ULL);
  REQUIRE(rng2.next_u64() == 0x883ebce5a3f27c77ULL);

  // The uniform map is the exact top-53-bit construction.
  SplitMix64 rng3(0);
  const double expected = static_cast<double>(0xe220a8397b1dcdafULL >> 11) * 0x1.0p-53;
  REQUIRE(rng3.next_double() == expected);
}

TEST_CASE("random streams are reproducible and seed-sensitive", "[bench-io]") {
  SplitMix64 a(42), b(42), c(43);
  bool all_equal_ac = true;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next_u64();
    REQUIRE(va == b.next_u64());
    if (va != c.next_u64()) all_equal_ac = false;
  }
  REQUIRE_FALSE(all_equal_ac);
}

TEST_CASE("uniform, bounded, and unit-norm draws satisfy their contracts", "[bench-io]") {
  SplitMix64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(rng.next_below(17) < 17u);
  }
  REQUIRE(rng.next_below(1) == 0u);
  REQUIRE_THROWS_AS(rng.next_below(0), std::invalid_argument);

  // Bounded draws are unbiased: six bins stay within 5% of the share.
  std::vector<int> bins(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++bins[static_cast<std::size_t>(rng.next_below(6))];
  for (int b : bins) {
    REQUIRE(std::abs(b - draws / 6) <= draws / 6 * 0.05);
  }

  for (int i = 0; i < 200; ++i) {
    REQUIRE(rng.next_unit_vec().norm() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rng.next_unit_quat4().norm() == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("normal draws have the right moments and no pair coupling", "[bench-io]") {
  SplitMix64 rng(11);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0, lag = 0.0;
  double prev = rng.next_normal();
  sum += prev;
  sum_sq += prev * prev;
  for (int i = 1; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sum_sq += x * x;
    lag += prev * x;  // adjacent draws straddle the cached half of each pair
    prev = x;
  }
  REQUIRE(std::abs(sum / n) <= 0.02);
  REQUIRE(sum_sq / n == Catch::Approx(1.0).epsilon(0.05));
  REQUIRE(std::abs(lag / (n - 1)) <= 0.02);
}

TEST_CASE("direction and rotation sampling is isotropic", "[bench-io]") {
  SplitMix64 rng(13);
  const int n = 100000;
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) mean += rng.next_unit_vec();
  mean /= static_cast<double>(n);
  REQUIRE(mean.norm() < 0.02);

  // Uniform rotations: the trace averages to zero with unit second moment.
  double tr_sum = 0.0, tr2_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double tr = quat_to_rot(UnitQuaternion(rng.next_unit_quat4())).matrix().trace();
    tr_sum += tr;
    tr2_sum += tr * tr;
  }
  REQUIRE(std::abs(tr_sum / n) <= 0.02);
  REQUIRE(tr2_sum / n == Catch::Approx(1.0).epsilon(0.05));
}

TEST_CASE("instance generation is reproducible with exact bookkeeping", "[bench-io]") {
  SyntheticConfig cfg;
  cfg.n = 16;
  cfg.sigma = 0.01;
  cfg.outlier_ratio = 0.25;
  cfg.seed = 77;
  const SyntheticInstance a = generate_instance(cfg);
  const SyntheticInstance b = generate_instance(cfg);

  REQUIRE(a.outlier_count == 4);  // round(0.25 * 16)
  REQUIRE(std::count(a.theta_true.begin(), a.theta_true.end(), -1) == a.outlier_count);
  REQUIRE(a.problem.size() == cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    const Correspondence& ca = a.problem.correspondences()[static_cast<std::size_t>(i)];
    const Correspondence& cb = b.problem.correspondences()[static_cast<std::size_t>(i)];
    REQUIRE((ca.a.array() == cb.a.array()).all());
    REQUIRE((ca.b.array() == cb.b.array()).all());
    REQUIRE(ca.sigma == cb.sigma);
    REQUIRE(ca.a.norm() == Catch::Approx(1.0).margin(1e-12));
  }
  REQUIRE((a.q_true.coeffs().array() == b.q_true.coeffs().array()).all());

  // Planted labels agree with the residual gate at the true rotation.
  REQUIRE(classify_inliers(a.r_true, a.problem) == a.theta_true);

  // Rounding rule boundary: 3/10 -> 3 outliers despite the inexact double.
  cfg.n = 10;
  cfg.outlier_ratio = 0.3;
  REQUIRE(generate_instance(cfg).outlier_count == 3);
}

TEST_CASE("exact instances fit their ground truth to machine precision", "[bench-io]") {
  SyntheticConfig cfg;
  cfg.n = 8;
  cfg.sigma = 0.0;
  cfg.seed = 5;
  const SyntheticInstance inst = generate_instance(cfg);
  for (const Correspondence& c : inst.problem.correspondences()) {
    REQUIRE((c.b - inst.r_true.matrix() * c.a).norm() <= 1e-14);
    REQUIRE(c.sigma == 0.01);  // gate scale stays positive for exact data
  }
}

TEST_CASE("invalid generator configurations are rejected", "[bench-io]") {
  SyntheticConfig cfg;
  cfg.n = 1;
  REQUIRE_THROWS_AS(generate_instance(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.outlier_ratio = 1.0;
  REQUIRE_THROWS_AS(generate_instance(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.outlier_ratio = -0.1;
  REQUIRE_THROWS_AS(generate_instance(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.sigma = -1.0;
  REQUIRE_THROWS_AS(generate_instance(cfg), std::invalid_argument);
}

// ------------------------------------------------------- correspondence CSV

TEST_CASE("correspondence CSV round-trips byte-for-byte", "[bench-io]") {
  SyntheticConfig cfg;
  cfg.n = 12;
  cfg.sigma = 0.037;
  cfg.seed = 3;
  const SyntheticInstance inst = generate_instance(cfg);

  const std::string p1 = "/tmp/certrot_t_corr1.csv";
  const std::string p2 = "/tmp/certrot_t_corr2.csv";
  save_correspondences(p1, inst.problem.correspondences());
  const std::vector<Correspondence> loaded = load_correspondences(p1);
  REQUIRE(loaded.size() == inst.problem.correspondences().size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const Correspondence& want = inst.problem.correspondences()[i];
    REQUIRE((loaded[i].a.array() == want.a.array()).all());
    REQUIRE((loaded[i].b.array() == want.b.array()).all());
    REQUIRE(loaded[i].sigma == want.sigma);
  }
  save_correspondences(p2, loaded);
  REQUIRE(read_file(p1) == read_file(p2));
}

TEST_CASE("CSV without a noise column defaults it to one", "[bench-io]") {
  const std::string path = "/tmp/certrot_t_nosigma.csv";
  write_file(path,
             "ax,ay,az,bx,by,bz\n"
             "1,0,0,0,1,0\n"
             "\n"  // blank lines are skipped
             "0,1,0,-1,0,0\n");
  const auto corrs = load_correspondences(path);
  REQUIRE(corrs.size() == 2u);
  REQUIRE(corrs[0].sigma == 1.0);
  REQUIRE(corrs[1].sigma == 1.0);
  REQUIRE(corrs[1].b == Vec3(-1, 0, 0));

  // Windows line endings parse identically.
  const std::string crlf = "/tmp/certrot_t_crlf.csv";
  write_file(crlf, "ax,ay,az,bx,by,bz,sigma\r\n1,0,0,0,1,0,0.5\r\n");
  const auto win = load_correspondences(crlf);
  REQUIRE(win.size() == 1u);
  REQUIRE(win[0].sigma == 0.5);
}

TEST_CASE("CSV errors carry the offending line number", "[bench-io]") {
  const std::string path = "/tmp/certrot_t_bad.csv";

  write_file(path, "wrong,header\n");
  REQUIRE(thrown_line(path, +[](const std::string& p) { (void)load_correspondences(p); }) == 1);

  write_file(path, "ax,ay,az,bx,by,bz\n1,0,0,0,1,0\n1,2,3\n");
  REQUIRE(thrown_line(path, +[](const std::string& p) { (void)load_correspondences(p); }) == 3);

  write_file(path, "ax,ay,az,bx,by,bz\n1,oops,0,0,1,0\n");
  REQUIRE(thrown_line(path, +[](const std::string& p) { (void)load_correspondences(p); }) == 2);

  // Invalid physical values surface as parse errors too (bad sigma).
  write_file(path, "ax,ay,az,bx,by,bz,sigma\n1,0,0,0,1,0,1\n1,0,0,0,1,0,-2\n");
  REQUIRE(thrown_line(path, +[](const std::string& p) { (void)load_correspondences(p); }) == 3);

  write_file(path, "");
  REQUIRE(thrown_line(path, +[](const std::string& p) { (void)load_correspondences(p); }) == 1);
  REQUIRE(thrown_line("/tmp/certrot_does_not_exist.csv",
                      +[](const std::string& p) { (void)load_correspondences(p); }) == 0);
}

// ----------------------------------------------------------------- PLY files

TEST_CASE("ASCII point clouds parse with extra columns and elements", "[bench-io]") {
  const std::string path = "/tmp/certrot_t_cloud.ply";
  write_file(path,
             "ply\n"
             "format ascii 1.0\n"
             "comment made by a parser check\n"
             "element vertex 3\n"
             "property float x\n"
             "property float y\n"
             "property float z\n"
             "property uchar red\n"
             "element face 1\n"
             "property list uchar int vertex_indices\n"
             "end_header\n"
             "0.5 1.25 -3 200\n"
             "-1 0 2.5 100\n"
             "4 5 6 50\n"
             "3 0 1 2\n");
  const std::vector<Vec3> pts = parse_ply(path);
  REQUIRE(pts.size() == 3u);
  REQUIRE(pts[0] == Vec3(0.5, 1.25, -3));
  REQUIRE(pts[1] == Vec3(-1, 0, 2.5));
  REQUIRE(pts[2] == Vec3(4, 5, 6));

  // Coordinates are picked by column position, not order of appearance.
  const std::string scrambled = "/tmp/certrot_t_scrambled.ply";
  write_file(scrambled,
             "ply\n"
             "format ascii 1.0\n"
             "element vertex 2\n"
             "property float intensity\n"
             "property float z\n"
             "property float x\n"
             "property float y\n"
             "end_header\n"
             "9 3 1 2\n"
             "8 6 4 5\n");
  const std::vector<Vec3> sc = parse_ply(scrambled);
  REQUIRE(sc.size() == 2u);
  REQUIRE(sc[0] == Vec3(1, 2, 3));
  REQUIRE(sc[1] == Vec3(4, 5, 6));
}

TEST_CASE("binary point clouds are refused with a distinct error", "[bench-io]") {
  const std::string path = "/tmp/certrot_t_binary.ply";
  write_file(path,
             "ply\n"
             "format binary_little_endian 1.0\n"
             "element vertex 1\n"
             "property float x\n"
             "property float y\n"
             "property float z\n"
             "end_header\n");
  REQUIRE_THROWS_AS(parse_ply(path), UnsupportedFormatError);
}

TEST_CASE("malformed point clouds report parse errors", "[bench-io]") {
  const std::string path = "/tmp/certrot_t_badply.ply";

  write_file(path, "solid\n");
  REQUIRE_THROWS_AS(parse_ply(path), ParseError);  // wrong magic

  write_file(path, "ply\nformat ascii 1.0\nelemant vertex 1\nend_header\n");
  REQUIRE_THROWS_AS(parse_ply(path), ParseError);  // unknown header token

  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 1\n"
             "property float y\nproperty float z\nend_header\n0 0\n");
  REQUIRE_THROWS_AS(parse_ply(path), ParseError);  // no x property

  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 2\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n1 2 3\n");
  REQUIRE_THROWS_AS(parse_ply(path), ParseError);  // truncated vertex list

  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n1 2\n");
  REQUIRE_THROWS_AS(parse_ply(path), ParseError);  // short vertex row

  write_file(path,
             "ply\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n1 2 3\n");
  REQUIRE_THROWS_AS(parse_ply(path), ParseError);  // no format line
}

// ------------------------------------------------------------ instance JSON

TEST_CASE("instance JSON round-trips data and ground truth", "[bench-io]") {
  SyntheticConfig cfg;
  cfg.n = 9;
  cfg.sigma = 0.02;
  cfg.outlier_ratio = 0.33;
  cfg.seed = 15;
  const SyntheticInstance inst = generate_instance(cfg);

  const std::string path = "/tmp/certrot_t_inst.json";
  save_instance(path, instance_to_json(inst));
  const LoadedInstance back = load_instance(path);

  REQUIRE(back.problem.size() == cfg.n);
  REQUIRE(back.problem.cbar_sq() == inst.problem.cbar_sq());
  for (int i = 0; i < cfg.n; ++i) {
    const Correspondence& want = inst.problem.correspondences()[static_cast<std::size_t>(i)];
    const Correspondence& got = back.problem.correspondences()[static_cast<std::size_t>(i)];
    REQUIRE((got.a.array() == want.a.array()).all());
    REQUIRE((got.b.array() == want.b.array()).all());
    REQUIRE(got.sigma == want.sigma);
  }
  REQUIRE(back.q_true.has_value());
  REQUIRE((back.q_true->coeffs() - inst.q_true.coeffs()).norm() <= 1e-15);
  REQUIRE(back.theta_true.has_value());
  REQUIRE(*back.theta_true == inst.theta_true);

  // Without truth both optionals stay empty.
  save_instance(path, problem_to_json(inst.problem));
  const LoadedInstance plain = load_instance(path);
  REQUIRE_FALSE(plain.q_true.has_value());
  REQUIRE_FALSE(plain.theta_true.has_value());
}

TEST_CASE("malformed instance JSON is rejected as a parse error", "[bench-io]") {
  const std::string path = "/tmp/certrot_t_badinst.json";

  write_file(path, "this is not json");
  REQUIRE_THROWS_AS(load_instance(path), ParseError);
  REQUIRE_THROWS_AS(load_instance("/tmp/certrot_missing_inst.json"), ParseError);

  nlohmann::json good;
  good["n"] = 2;
  good["cbar_sq"] = 1.5;
  good["correspondences"] = {{{"a", {1, 0, 0}}, {"b", {0, 1, 0}}, {"sigma", 0.1}},
                             {{"a", {0, 1, 0}}, {"b", {1, 0, 0}}, {"sigma", 0.1}}};
  REQUIRE_NOTHROW(instance_from_json(good));

  nlohmann::json bad = good;
  bad["n"] = 3;  // count mismatch
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);

  bad = good;
  bad["correspondences"][0]["a"] = {1, 0};  // short vector
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);

  bad = good;
  bad["correspondences"][0].erase("sigma");
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);

  bad = good;
  bad["correspondences"][1]["sigma"] = -0.5;  // invalid value
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);

  bad = good;
  bad["truth"]["q"] = {0, 0, 1};  // short quaternion
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);

  bad = good;
  bad["truth"]["q"] = {0, 0, 0, 1};
  bad["truth"]["theta"] = {1};  // wrong length
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);

  bad = good;
  bad.erase("cbar_sq");
  REQUIRE_THROWS_AS(instance_from_json(bad), ParseError);
}

// ------------------------------------------------------------------- sweeps

namespace {

SweepGrid small_grid() {
  SweepGrid grid;
  grid.outlier_ratios = {0.0, 1.0 / 3.0};
  grid.sigmas = {0.01};
  grid.n = 6;
  grid.mc_runs = 2;
  grid.methods = {"wahba", "brute"};
  grid.seed = 100;
  grid.max_workers = 1;
  return grid;
}

void require_rows_equal(const BenchRow& a, const BenchRow& b) {
  REQUIRE(a.method == b.method);
  REQUIRE(a.outlier_ratio == b.outlier_ratio);
  REQUIRE(a.sigma == b.sigma);
  REQUIRE(a.seed == b.seed);
  REQUIRE(((a.rotation_error_rad == b.rotation_error_rad) ||
           (std::isnan(a.rotation_error_rad) && std::isnan(b.rotation_error_rad))));
  REQUIRE(((a.f_qcqp == b.f_qcqp) || (std::isnan(a.f_qcqp) && std::isnan(b.f_qcqp))));
  REQUIRE(((a.gap == b.gap) || (std::isnan(a.gap) && std::isnan(b.gap))));
  REQUIRE(((a.rank == b.rank) || (std::isnan(a.rank) && std::isnan(b.rank))));
  REQUIRE(((a.stable_rank == b.stable_rank) ||
           (std::isnan(a.stable_rank) && std::isnan(b.stable_rank))));
  REQUIRE(a.status == b.status);
  // wall_time_s is timing noise by definition and is deliberately not compared
}

}  // namespace

TEST_CASE("sweeps lay out rows deterministically and share instances", "[bench-io]") {
  const SweepGrid grid = small_grid();
  const BenchReport rep = run_sweep(grid);

  // cells (2 ratios x 1 sigma) x 2 runs x 2 methods
  REQUIRE(rep.rows.size() == 8u);
  // Row order: instance-major (ratio, sigma, run), then method.
  const std::vector<std::string> want_methods = {"wahba", "brute", "wahba", "brute",
                                                 "wahba", "brute", "wahba", "brute"};
  const std::vector<std::uint64_t> want_seeds = {100, 100, 101, 101, 102, 102, 103, 103};
  const std::vector<double> want_ratios = {0.0, 0.0, 0.0, 0.0,
                                           1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    REQUIRE(rep.rows[i].method == want_methods[i]);
    REQUIRE(rep.rows[i].seed == want_seeds[i]);
    REQUIRE(rep.rows[i].outlier_ratio == want_ratios[i]);
    REQUIRE(rep.rows[i].status == "ok");
    REQUIRE(std::isfinite(rep.rows[i].rotation_error_rad));
    REQUIRE(std::isfinite(rep.rows[i].f_qcqp));
    // Baselines issue no certificate: those columns stay empty.
    REQUIRE(std::isnan(rep.rows[i].gap));
    REQUIRE(std::isnan(rep.rows[i].rank));
  }

  // Methods see identical instances: on clean cells both recover the same
  // rotation, so the exhaustive optimum's cost can't exceed the direct fit's.
  for (std::size_t i = 0; i + 1 < 4; i += 2) {
    REQUIRE(rep.rows[i + 1].f_qcqp <=
            rep.rows[i].f_qcqp + 1e-9 * (1.0 + std::abs(rep.rows[i].f_qcqp)));
  }

  // One mean and one sd per (method, cell).
  REQUIRE(rep.means.size() == 4u);
  REQUIRE(rep.sds.size() == 4u);
  for (const BenchAggregate& m : rep.means) REQUIRE(m.runs == 2);

  // Aggregates match a direct recomputation from the rows.
  for (const BenchAggregate& m : rep.means) {
    double sum = 0.0;
    int count = 0;
    for (const BenchRow& r : rep.rows) {
      if (r.method == m.method && r.outlier_ratio == m.outlier_ratio && r.sigma == m.sigma) {
        sum += r.rotation_error_rad;
        ++count;
      }
    }
    REQUIRE(count == m.runs);
    REQUIRE(m.rotation_error_rad == Catch::Approx(sum / count).margin(1e-15));
  }
}

TEST_CASE("sweep results do not depend on the worker count", "[bench-io]") {
  SweepGrid serial = small_grid();
  SweepGrid parallel = small_grid();
  parallel.max_workers = 3;
  const BenchReport a = run_sweep(serial);
  const BenchReport b = run_sweep(parallel);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) require_rows_equal(a.rows[i], b.rows[i]);
}

TEST_CASE("report CSV round-trips and re-derives its aggregates", "[bench-io]") {
  const BenchReport rep = run_sweep(small_grid());
  const std::string path = "/tmp/certrot_t_report.csv";
  write_report_csv(path, rep);
  const BenchReport back = load_report_csv(path);

  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    REQUIRE(back.rows[i].wall_time_s == rep.rows[i].wall_time_s);  // CSV is 17-digit exact
    require_rows_equal(back.rows[i], rep.rows[i]);
  }
  REQUIRE(back.means.size() == rep.means.size());
  REQUIRE(back.sds.size() == rep.sds.size());

  // A second write of the loaded report is byte-identical.
  const std::string path2 = "/tmp/certrot_t_report2.csv";
  write_report_csv(path2, back);
  REQUIRE(read_file(path) == read_file(path2));
}

TEST_CASE("tampered report aggregates are detected on load", "[bench-io]") {
  const BenchReport rep = run_sweep(small_grid());
  const std::string path = "/tmp/certrot_t_tampered.csv";
  write_report_csv(path, rep);

  // Corrupt the rotation-error mean of the first aggregate record.
  std::istringstream is(read_file(path));
  std::ostringstream os;
  std::string line;
  bool done = false;
  while (std::getline(is, line)) {
    if (!done && line.rfind("mean,", 0) == 0) {
      std::vector<std::string> fields = detail::split_csv_line(line);
      fields[5] = "123.0";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        os << fields[i] << (i + 1 < fields.size() ? "," : "");
      }
      os << '\n';
      done = true;
    } else {
      os << line << '\n';
    }
  }
  REQUIRE(done);
  write_file(path, os.str());
  REQUIRE_THROWS_AS(load_report_csv(path), ParseError);

  // Structural damage is caught line-accurately too.
  write_file(path, "kind,method\n");
  REQUIRE_THROWS_AS(load_report_csv(path), ParseError);
  write_file(path,
             "kind,method,outlier_ratio,sigma,seed_or_runs,rotation_error_rad,f_qcqp,gap,rank,"
             "stable_rank,wall_time_s,status\n"
             "bogus,wahba,0,0.01,1,0,0,nan,nan,nan,0,ok\n");
  REQUIRE_THROWS_AS(load_report_csv(path), ParseError);
}

TEST_CASE("sweep configuration is validated", "[bench-io]") {
  SweepGrid grid = small_grid();
  grid.mc_runs = 0;
  REQUIRE_THROWS_AS(run_sweep(grid), std::invalid_argument);
  grid = small_grid();
  grid.methods.clear();
  REQUIRE_THROWS_AS(run_sweep(grid), std::invalid_argument);
  grid = small_grid();
  grid.outlier_ratios.clear();
  REQUIRE_THROWS_AS(run_sweep(grid), std::invalid_argument);
  grid = small_grid();
  grid.methods = {"gradient-descent"};
  REQUIRE_THROWS_AS(run_sweep(grid), std::invalid_argument);
}

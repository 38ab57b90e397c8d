// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Thresholds are fixed here; budgets are sized so the whole run stays
// within a few minutes on a laptop-class machine.

#include <Eigen/QR>
#include <Eigen/SVD>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "popspace/cli.hpp"
#include "popspace/colspace.hpp"
#include "popspace/factnorm.hpp"
#include "popspace/io.hpp"
#include "popspace/isometry.hpp"
#include "popspace/verify.hpp"

using namespace popspace;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int id, const std::string& label, bool ok,
               const std::string& detail) {
  std::printf("criterion %d [%s]: %s%s%s\n", id, label.c_str(),
              ok ? "PASS" : "FAIL", detail.empty() ? "" : " - ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"popspace"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// snapshot of every regular file under a path (file or directory)
std::map<std::string, std::string> snapshot(const fs::path& target) {
  std::map<std::string, std::string> bytes;
  if (fs::is_directory(target)) {
    for (const auto& entry : fs::recursive_directory_iterator(target)) {
      if (entry.is_regular_file()) {
        bytes[entry.path().string()] = slurp(entry.path());
      }
    }
  } else if (fs::exists(target)) {
    bytes[target.string()] = slurp(target);
  }
  // factnorm writes sibling witness files next to its report
  const fs::path parent = target.parent_path();
  if (!fs::is_directory(target) && fs::exists(parent)) {
    for (const auto& entry : fs::directory_iterator(parent)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind(target.filename().string() + ".", 0) == 0) {
        bytes[entry.path().string()] = slurp(entry.path());
      }
    }
  }
  return bytes;
}

struct RecordedRun {
  std::vector<std::string> args;
  fs::path output;
  std::map<std::string, std::string> bytes;
  int exit_code = 0;
};

std::vector<RecordedRun> recorded_runs;

int run_recorded(const std::vector<std::string>& args, const fs::path& output) {
  RecordedRun run;
  run.args = args;
  run.output = output;
  run.exit_code = cli(args);
  run.bytes = snapshot(output);
  recorded_runs.push_back(run);
  return run.exit_code;
}

double spread(const std::vector<double>& values) {
  double lo = values[0], hi = values[0], sum = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  return (hi - lo) / (sum / values.size());
}

Matrix random_disjoint_isometry(Rng& rng, Index r, Index n, const Exponent& e) {
  Matrix tau = Matrix::Zero(r, n);
  for (Index k = 0; k < n; ++k) tau(k, k) = rng.complex_normal() + Scalar(0.3);
  for (Index i = n; i < r; ++i) {
    tau(i, rng.uniform_int(0, n - 1)) = rng.complex_normal() + Scalar(0.3);
  }
  for (Index k = 0; k < n; ++k) tau.col(k) /= vec_p_norm(tau.col(k), e.p());
  return tau;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "popspace-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string plist = "1.2,1.5,2,3,4";

  // 1. proved-inequality sweeps, sound direction, seed 42
  {
    const auto start = std::chrono::steady_clock::now();
    const int a = run_recorded(
        {"verify", "--suite", "p-comparison", "--p", plist, "--nmax", "8",
         "--trials", "10000", "--seed", "42", "--out",
         (work / "c1-pcomparison").string()},
        work / "c1-pcomparison");
    const int b = run_recorded(
        {"verify", "--suite", "opnorm-bounds", "--p", plist, "--nmax", "8",
         "--trials", "1000", "--seed", "42", "--restarts", "3", "--out",
         (work / "c1-opnorm-bounds").string()},
        work / "c1-opnorm-bounds");
    const int c = run_recorded(
        {"verify", "--suite", "norm1-axioms", "--p", plist, "--nmax", "4",
         "--trials", "1000", "--seed", "42", "--restarts", "2",
         "--iterations", "30", "--out", (work / "c1-norm1-axioms").string()},
        work / "c1-norm1-axioms");
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "p-comparison=%d opnorm-bounds=%d norm1-axioms=%d (%.1fs)",
                  a, b, c, seconds);
    criterion(1, "inequality sweeps", a == 0 && b == 0 && c == 0 && seconds < 300.0,
              detail);
  }

  // 2. p = 2 calibration against singular values
  {
    bool ok = true;
    double worst_bracket = 0.0;
    Rng rng = Rng(42).fork(0xa2);
    const Exponent e2(2.0);
    for (Index n : {3, 4}) {
      for (int t = 0; t < 100; ++t) {
        Rng stream = rng.fork(static_cast<std::uint64_t>(n) * 1000 +
                              static_cast<std::uint64_t>(t));
        const Matrix v = random_matrix(stream, n, n);
        const double nuclear = nuclear_oracle_p2(v);
        FactNormOptions opts;
        opts.seed = stream.seed();
        FactNormResult r = factnorm1(v, e2, opts);
        worst_bracket = std::max(
            {worst_bracket, (nuclear - r.estimate.lower) / nuclear,
             (r.estimate.upper - nuclear) / nuclear});
        ok = ok && r.estimate.lower >= nuclear * 0.98 &&
             r.estimate.upper <= nuclear * 1.02;
      }
    }
    double worst_sigma = 0.0;
    for (int t = 0; t < 100; ++t) {
      Rng stream = rng.fork(0x5000 + static_cast<std::uint64_t>(t));
      const Index n = 1 + stream.uniform_int(0, 7);
      const Index m = 1 + stream.uniform_int(0, 7);
      const Matrix a = random_matrix(stream, m, n);
      Eigen::JacobiSVD<Matrix> svd(a);
      const double sigma = svd.singularValues()(0);
      OpNormOptions opts;
      opts.seed = stream.seed();
      const double lower = opnorm_lower(a, e2, opts).lower;
      worst_sigma = std::max(worst_sigma, std::abs(lower - sigma) / sigma);
      ok = ok && std::abs(lower - sigma) <= 1e-8 * sigma;
    }
    char detail[120];
    std::snprintf(detail, sizeof detail,
                  "max bracket error %.3g, max sigma error %.3g",
                  worst_bracket, worst_sigma);
    criterion(2, "p=2 calibration", ok, detail);
  }

  // 3. closed-form closure on identities and rank-one matrices
  {
    bool ok = true;
    double worst = 0.0;
    Rng rng = Rng(42).fork(0xa3);
    for (double p : {1.5, 3.0, 4.0}) {
      const Exponent e(p);
      for (Index n : {1, 2, 3, 4}) {
        FactNormResult id = factnorm1(Matrix::Identity(n, n), e);
        const double gap = id.estimate.upper - id.estimate.lower;
        ok = ok && gap <= 1e-4 * n &&
             std::abs(id.estimate.upper - n) <= 1e-6 * n &&
             std::abs(id.estimate.lower - n) <= 1e-6 * n;
        worst = std::max(worst, gap / n);
        if (n < 2) continue;
        for (int t = 0; t < 5; ++t) {
          Rng stream = rng.fork(static_cast<std::uint64_t>(n) * 100 +
                                static_cast<std::uint64_t>(t) + 10000 * p);
          const Vector x = random_vector(stream, n);
          const Vector y = random_vector(stream, n);
          const double value = vec_p_norm(x, e.conjugate()) * vec_p_norm(y, e.p());
          FactNormOptions opts;
          opts.seed = stream.seed();
          FactNormResult r = factnorm1(Matrix(x * y.transpose()), e, opts);
          const double err = std::max(
              {(r.estimate.upper - r.estimate.lower) / value,
               std::abs(r.estimate.upper - value) / value,
               std::abs(r.estimate.lower - value) / value});
          ok = ok && err <= 1e-4;
          worst = std::max(worst, err);
        }
      }
    }
    char detail[80];
    std::snprintf(detail, sizeof detail, "max closure error %.3g", worst);
    criterion(3, "closed-form closure", ok, detail);
  }

  // 4. polar round-trip and generic rejection (1000 of each)
  {
    const int code = run_recorded(
        {"verify", "--suite", "polar-roundtrip", "--p", "1.2,1.5,3,4",
         "--nmax", "4", "--trials", "250", "--seed", "42", "--out",
         (work / "c4-polar").string()},
        work / "c4-polar");
    const Json report = load_json(work / "c4-polar" / "polar-roundtrip.json");
    const long long cases = report["casesRun"].get<long long>();
    char detail[80];
    std::snprintf(detail, sizeof detail, "exit=%d cases=%lld", code, cases);
    criterion(4, "polar round-trip", code == 0 && cases == 2000, detail);
  }

  // 5. isometry criterion cross-check against the oracle
  {
    bool ok = true;
    double worst_oracle = 0.0;
    double worst_preserve = 0.0;
    Rng rng = Rng(42).fork(0xa5);
    int x_checks = 0;
    for (double p : {1.5, 3.0}) {
      const Exponent e(p);
      for (int t = 0; t < 15; ++t) {
        Rng stream = rng.fork(static_cast<std::uint64_t>(t) + 100000 * p);
        const Index n = 1 + t % 3;
        const Index r = n + stream.uniform_int(0, 3);
        const Matrix tau = random_disjoint_isometry(stream, r, n, e);
        if (!is_lp_isometry(tau, e).isometry) {
          ok = false;
          continue;
        }
        const double oracle = opnorm_oracle_small(tau, e, 12);
        worst_oracle = std::max(worst_oracle, std::abs(oracle - 1.0));
        ok = ok && std::abs(oracle - 1.0) <= 1e-4;
        for (int k = 0; k < 34; ++k) {
          const Vector x = random_vector(stream, n);
          const double nx = vec_p_norm(x, p);
          if (nx == 0.0) continue;
          const double err = std::abs(vec_p_norm(Vector(tau * x), p) - nx) / nx;
          worst_preserve = std::max(worst_preserve, err);
          ok = ok && err <= 1e-10;
          ++x_checks;
        }
      }
    }
    char detail[140];
    std::snprintf(detail, sizeof detail,
                  "max oracle dev %.3g, max ||tau x|| dev %.3g over %d vectors",
                  worst_oracle, worst_preserve, x_checks);
    criterion(5, "isometry cross-check", ok && x_checks >= 1000, detail);
  }

  // 6. the non-extension harness at finite scale
  {
    const int phi_psi_code = run_recorded(
        {"verify", "--suite", "phi-psi", "--p", "1.5,3", "--nmax", "3",
         "--trials", "20", "--seed", "42", "--out",
         (work / "c6-phi-psi").string()},
        work / "c6-phi-psi");

    bool proj_ok = true;
    // coordinate subspaces are 1-complemented at every p
    Matrix coords = Matrix::Zero(4, 2);
    coords(0, 0) = 1;
    coords(2, 1) = 1;
    for (double p : {1.5, 3.0, 4.0}) {
      SubspaceEmbedding emb(coords, Exponent(p));
      const double best = projection_constant(emb, 16, 120, 42).best_upper;
      proj_ok = proj_ok && std::abs(best - 1.0) <= 1e-6;
    }
    // orthonormal subspaces at p = 2
    Rng rng = Rng(42).fork(0xa6);
    for (int t = 0; t < 3; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Matrix raw = random_matrix(stream, 4, 2);
      Eigen::HouseholderQR<Matrix> qr(raw);
      const Matrix q = Matrix(qr.householderQ()).leftCols(2);
      SubspaceEmbedding emb(q, Exponent(2.0));
      const double best = projection_constant(emb, 16, 120, 42).best_upper;
      proj_ok = proj_ok && std::abs(best - 1.0) <= 1e-6;
    }
    // non-coordinate subspace at p = 4: margin observed and seed-stable
    Matrix skew(4, 2);
    skew << 1, 1, 1, -1, 1, 0, 1, 1;
    std::vector<double> observed;
    for (std::uint64_t seed : {42ULL, 43ULL, 44ULL}) {
      SubspaceEmbedding emb(skew, Exponent(4.0));
      observed.push_back(projection_constant(emb, 32, 200, seed).best_upper);
    }
    const bool skew_ok = observed[0] >= 1.0 - 1e-9 && spread(observed) <= 0.01;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "phi-psi exit=%d, projection closed forms %s, observed "
                  "p=4 margin %.6f (spread %.2g%%)",
                  phi_psi_code, proj_ok ? "ok" : "FAIL", observed[0] - 1.0,
                  spread(observed) * 100.0);
    criterion(6, "section-2 harness", phi_psi_code == 0 && proj_ok && skew_ok,
              detail);
  }

  // 7. ordering and direct-sum subadditivity
  {
    bool ok = true;
    Rng rng = Rng(42).fork(0xa7);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const Exponent e(p);
      for (int t = 0; t < 50; ++t) {
        Rng stream = rng.fork(static_cast<std::uint64_t>(t) + 100000 * p);
        const Index n = 1 + stream.uniform_int(0, 3);
        const Matrix v =
            random_matrix(stream, n, n, static_cast<Ensemble>(t % 3));
        FactNormOptions opts;
        opts.seed = stream.seed();
        opts.restarts = 2;
        opts.iterations = 30;
        const double lower1 = factnorm1_lower(v, e, opts).estimate.lower;
        const double upper2 = factnorm2_upper(v, e, opts).estimate.upper;
        ok = ok && lower1 <= upper2 * (1.0 + 1e-9);
      }
    }
    int pairs = 0;
    for (double p : {1.5, 3.0}) {
      const Exponent e(p);
      for (int t = 0; t < 500; ++t) {
        Rng stream = rng.fork(0x9000 + static_cast<std::uint64_t>(t) + 7 * p);
        const Index n1 = 1 + stream.uniform_int(0, 2);
        const Index n2 = 1 + stream.uniform_int(0, 2);
        FactNormOptions opts;
        opts.seed = stream.seed();
        opts.restarts = 2;
        opts.iterations = 20;
        FactNormResult f1 =
            factnorm1_upper(random_matrix(stream, n1, n1), e, opts);
        FactNormResult f2 =
            factnorm1_upper(random_matrix(stream, n2, n2), e, opts);
        Factorization combined =
            direct_sum_combine(*f1.factorization, *f2.factorization, e);
        ok = ok &&
             combined.value <= f1.estimate.upper + f2.estimate.upper + 1e-9;
        ++pairs;
      }
    }
    char detail[80];
    std::snprintf(detail, sizeof detail, "%d direct-sum pairs", pairs);
    criterion(7, "ordering and subadditivity", ok && pairs >= 1000, detail);
  }

  // 8. byte-identical reports under replay, plus every other subcommand
  {
    const fs::path single = work / "c8";
    fs::create_directories(single);
    save_matrix(single / "id2.json", Matrix::Identity(2, 2));
    Matrix beta = Matrix::Zero(3, 2);
    beta(0, 0) = 1;
    beta(1, 0) = 2;
    beta(2, 1) = 3;
    save_matrix(single / "beta.json", beta);
    Rng rng = Rng(42).fork(0xa8);
    save_matrix(single / "m3.json", random_matrix(rng, 3, 3));
    Matrix stacked(6, 2);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 2; ++j)
        stacked(i, j) = rng.complex_normal();
    save_matrix(single / "stacked.json", stacked);
    Matrix coords = Matrix::Zero(3, 2);
    coords(0, 0) = 1;
    coords(1, 1) = 1;
    save_matrix(single / "coords.json", coords);
    Matrix e11 = Matrix::Zero(2, 2);
    e11(0, 0) = 1;
    Matrix e22 = Matrix::Zero(2, 2);
    e22(1, 1) = 1;
    save_json_atomic(single / "space.json",
                     Json{{"basis", {matrix_to_json(e11), matrix_to_json(e22)}},
                          {"images",
                           {matrix_to_json(e11), matrix_to_json(e22)}}});

    run_recorded({"opnorm", "--p", "3", "--matrix",
                  (single / "id2.json").string(), "--seed", "42", "--out",
                  (single / "opnorm.json").string()},
                 single / "opnorm.json");
    run_recorded({"entrywise", "--q", "3", "--matrix",
                  (single / "beta.json").string(), "--out",
                  (single / "entrywise.json").string()},
                 single / "entrywise.json");
    run_recorded({"isometry-check", "--p", "3", "--matrix",
                  (single / "id2.json").string(), "--out",
                  (single / "isometry.json").string()},
                 single / "isometry.json");
    run_recorded({"polar", "--p", "3", "--matrix",
                  (single / "beta.json").string(), "--out",
                  (single / "polar.json").string()},
                 single / "polar.json");
    run_recorded({"factnorm", "--which", "1", "--p", "3", "--matrix",
                  (single / "m3.json").string(), "--seed", "42", "--out",
                  (single / "factnorm1.json").string()},
                 single / "factnorm1.json");
    run_recorded({"factnorm", "--which", "2", "--p", "3", "--matrix",
                  (single / "m3.json").string(), "--seed", "42", "--out",
                  (single / "factnorm2.json").string()},
                 single / "factnorm2.json");
    run_recorded({"colnorm", "--p", "3", "--matrix",
                  (single / "stacked.json").string(), "--entry-dim", "3",
                  "--seed", "42", "--out", (single / "colnorm.json").string()},
                 single / "colnorm.json");
    run_recorded({"counterexample", "--p", "3", "--subspace",
                  (single / "coords.json").string(), "--nmax", "2", "--trials",
                  "4", "--seed", "42", "--out",
                  (single / "counterexample.json").string()},
                 single / "counterexample.json");
    run_recorded({"extension-gap", "--p", "3", "--space",
                  (single / "space.json").string(), "--level", "2", "--seed",
                  "42", "--out", (single / "extension.json").string()},
                 single / "extension.json");
    run_recorded({"verify", "--suite", "norm1-vs-norm2", "--p", "1.5,3",
                  "--nmax", "3", "--trials", "40", "--seed", "42",
                  "--restarts", "2", "--iterations", "20", "--out",
                  (work / "c8-ordering").string()},
                 work / "c8-ordering");
    run_recorded({"verify", "--suite", "norm2-triangle-search", "--p", "3",
                  "--nmax", "2", "--trials", "25", "--seed", "42",
                  "--restarts", "2", "--iterations", "20", "--out",
                  (work / "c8-triangle").string()},
                 work / "c8-triangle");
    run_recorded({"verify", "--suite", "extension-gap", "--p", "3", "--nmax",
                  "2", "--trials", "1", "--seed", "42", "--restarts", "2",
                  "--iterations", "15", "--out",
                  (work / "c8-extension").string()},
                 work / "c8-extension");

    bool ok = true;
    int replayed = 0;
    std::string first_mismatch;
    for (const auto& run : recorded_runs) {
      const int code = cli(run.args);
      if (code != run.exit_code) {
        ok = false;
        first_mismatch = "exit code changed for " + run.args.front();
        break;
      }
      const auto replay = snapshot(run.output);
      if (replay != run.bytes) {
        ok = false;
        first_mismatch = "bytes changed under " + run.output.string();
        break;
      }
      ++replayed;
    }
    char detail[200];
    std::snprintf(detail, sizeof detail, "replayed %d invocations%s%s",
                  replayed, first_mismatch.empty() ? "" : ": ",
                  first_mismatch.c_str());
    criterion(8, "determinism", ok, detail);
  }

  std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASSED"
                                    : "SOME CRITERIA FAILED");
  return failures;
}

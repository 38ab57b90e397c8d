#include "popspace/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "popspace/colspace.hpp"
#include "popspace/factnorm.hpp"
#include "popspace/io.hpp"
#include "popspace/isometry.hpp"
#include "popspace/verify.hpp"

namespace popspace {

namespace {

// exponents accept decimals and the literal form "a/b"; the conjugate is
// always computed, never user-supplied
double parse_exponent(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(text.substr(0, slash));
      const double den = std::stod(text.substr(slash + 1));
      if (den == 0.0) throw InputError("exponent denominator is zero");
      return num / den;
    }
    return std::stod(text);
  } catch (const std::exception&) {
    throw InputError("cannot parse exponent: " + text);
  }
}

std::vector<double> parse_exponent_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_exponent(item));
  }
  if (out.empty()) throw InputError("empty exponent list");
  return out;
}

Json estimate_to_json(const NormEstimate& est) {
  Json witness = Json::array();
  for (Index i = 0; i < est.lower_witness.size(); ++i) {
    witness.push_back(Json{{"re", est.lower_witness[i].real()},
                           {"im", est.lower_witness[i].imag()}});
  }
  return Json{{"lower", est.lower},
              {"upper", est.upper},
              {"method", to_string(est.method)},
              {"restarts", est.restarts},
              {"witness", witness}};
}

void emit(const Json& report, const std::string& out_path,
          const std::string& format) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  if (format == "csv" && report.contains("csv")) {
    save_text_atomic(out_path, report["csv"].get<std::string>());
  } else {
    save_json_atomic(out_path, report);
  }
}

struct CommonFlags {
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 42;
  double tol = 1e-9;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--out", flags.out, "output path (stdout when omitted)");
  cmd->add_option("--format", flags.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", flags.seed, "deterministic seed");
  cmd->add_option("--tol", flags.tol, "tolerance override");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"matrix p-norms, factorization norms, and l_p polar "
               "decomposition at finite scale"};
  app.require_subcommand(1);

  // opnorm
  auto* opnorm_cmd = app.add_subcommand("opnorm", "two-sided operator p-norm estimate");
  std::string opnorm_p, opnorm_matrix;
  int opnorm_restarts = 8;
  CommonFlags opnorm_flags;
  opnorm_cmd->add_option("--p", opnorm_p, "exponent")->required();
  opnorm_cmd->add_option("--matrix", opnorm_matrix, "matrix JSON file")->required();
  opnorm_cmd->add_option("--restarts", opnorm_restarts, "random restarts");
  add_common(opnorm_cmd, opnorm_flags);

  // entrywise
  auto* entry_cmd = app.add_subcommand("entrywise", "entrywise q-norm");
  std::string entry_q, entry_matrix;
  CommonFlags entry_flags;
  entry_cmd->add_option("--q", entry_q, "exponent")->required();
  entry_cmd->add_option("--matrix", entry_matrix, "matrix JSON file")->required();
  add_common(entry_cmd, entry_flags);

  // isometry-check
  auto* iso_cmd = app.add_subcommand("isometry-check",
                                     "decide whether a matrix is an l_p isometry");
  std::string iso_p, iso_matrix;
  CommonFlags iso_flags;
  iso_cmd->add_option("--p", iso_p, "exponent")->required();
  iso_cmd->add_option("--matrix", iso_matrix, "matrix JSON file")->required();
  add_common(iso_cmd, iso_flags);

  // polar
  auto* polar_cmd = app.add_subcommand("polar", "l_p polar decomposition");
  std::string polar_p, polar_matrix;
  CommonFlags polar_flags;
  polar_cmd->add_option("--p", polar_p, "exponent")->required();
  polar_cmd->add_option("--matrix", polar_matrix, "matrix JSON file")->required();
  add_common(polar_cmd, polar_flags);

  // factnorm
  auto* fact_cmd = app.add_subcommand("factnorm", "predual factorization norms");
  std::string fact_p, fact_matrix;
  int fact_which = 1;
  int fact_rmax = 0;
  int fact_restarts = 8;
  CommonFlags fact_flags;
  fact_cmd->add_option("--which", fact_which, "1 or 2")
      ->check(CLI::IsMember({1, 2}));
  fact_cmd->add_option("--p", fact_p, "exponent")->required();
  fact_cmd->add_option("--matrix", fact_matrix, "matrix JSON file")->required();
  fact_cmd->add_option("--rmax", fact_rmax, "inner dimension cap");
  fact_cmd->add_option("--restarts", fact_restarts, "search restarts");
  add_common(fact_cmd, fact_flags);

  // colnorm
  auto* col_cmd = app.add_subcommand(
      "colnorm", "column p-operator space matrix norm (stacked (n*m) x n input)");
  std::string col_p, col_matrix;
  int col_entry_dim = 0;
  int col_restarts = 8;
  CommonFlags col_flags;
  col_cmd->add_option("--p", col_p, "exponent")->required();
  col_cmd->add_option("--matrix", col_matrix, "stacked matrix JSON file")->required();
  col_cmd->add_option("--entry-dim", col_entry_dim, "ambient dimension m")->required();
  col_cmd->add_option("--restarts", col_restarts, "random restarts");
  add_common(col_cmd, col_flags);

  // counterexample
  auto* cex_cmd = app.add_subcommand(
      "counterexample", "phi/psi harness and projection-constant search");
  std::string cex_p, cex_subspace;
  int cex_nmax = 3;
  int cex_trials = 25;
  CommonFlags cex_flags;
  cex_cmd->add_option("--p", cex_p, "exponent")->required();
  cex_cmd->add_option("--subspace", cex_subspace, "basis matrix JSON file")->required();
  cex_cmd->add_option("--nmax", cex_nmax, "largest amplification level");
  cex_cmd->add_option("--trials", cex_trials, "samples per level");
  add_common(cex_cmd, cex_flags);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "seeded property-test campaign");
  std::string verify_suite, verify_p = "1.5,3";
  int verify_nmax = 4;
  long long verify_trials = 100;
  int verify_restarts = 4;
  int verify_iterations = 80;
  CommonFlags verify_flags;
  verify_cmd->add_option("--suite", verify_suite, "campaign suite")->required();
  verify_cmd->add_option("--p", verify_p, "comma-separated exponent list");
  verify_cmd->add_option("--nmax", verify_nmax, "largest size");
  verify_cmd->add_option("--trials", verify_trials, "trials per case");
  verify_cmd->add_option("--restarts", verify_restarts, "search restarts");
  verify_cmd->add_option("--iterations", verify_iterations, "search iterations");
  add_common(verify_cmd, verify_flags);

  // extension-gap
  auto* ext_cmd = app.add_subcommand(
      "extension-gap", "extension-norm gap search for a map on a subspace of M_k");
  std::string ext_p, ext_space;
  int ext_level = 2;
  CommonFlags ext_flags;
  ext_cmd->add_option("--p", ext_p, "exponent")->required();
  ext_cmd->add_option("--space", ext_space,
                      "JSON file with basis and images arrays")->required();
  ext_cmd->add_option("--level", ext_level, "amplification level L");
  add_common(ext_cmd, ext_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (opnorm_cmd->parsed()) {
      const Exponent e(parse_exponent(opnorm_p));
      const Matrix a = load_matrix(opnorm_matrix);
      OpNormOptions opts;
      opts.restarts = opnorm_restarts;
      opts.seed = opnorm_flags.seed;
      emit(estimate_to_json(opnorm_estimate(a, e, opts)), opnorm_flags.out,
           opnorm_flags.format);
      return 0;
    }
    if (entry_cmd->parsed()) {
      const Matrix a = load_matrix(entry_matrix);
      const double value = entrywise_norm(a, parse_exponent(entry_q));
      emit(Json{{"value", value}}, entry_flags.out, entry_flags.format);
      return 0;
    }
    if (iso_cmd->parsed()) {
      const Exponent e(parse_exponent(iso_p));
      const Matrix a = load_matrix(iso_matrix);
      IsometryCertificate cert = is_lp_isometry(a, e, iso_flags.tol);
      Json supports = Json::array();
      for (const auto& s : cert.column_supports) supports.push_back(s);
      Json out{{"isometry", cert.isometry},
               {"columnSupports", supports},
               {"columnNorms", cert.column_norms},
               {"gramResidual", cert.gram_residual},
               {"reason", cert.reason}};
      emit(out, iso_flags.out, iso_flags.format);
      return cert.isometry ? 0 : 1;
    }
    if (polar_cmd->parsed()) {
      const Exponent e(parse_exponent(polar_p));
      const Matrix a = load_matrix(polar_matrix);
      PolarDecomposition pd = polar_decompose(a, e, polar_flags.tol);
      Json groups = Json::array();
      for (std::size_t i = 0; i < pd.grouping.class_of.size(); ++i) {
        groups.push_back(Json{{"row", i},
                              {"class", pd.grouping.class_of[i]},
                              {"scaleRe", pd.grouping.scale_of[i].real()},
                              {"scaleIm", pd.grouping.scale_of[i].imag()}});
      }
      Json out{{"tau", matrix_to_json(pd.tau)},
               {"beta0", matrix_to_json(pd.beta0)},
               {"lambda", pd.lambda},
               {"groups", groups},
               {"pivots", pd.grouping.pivots},
               {"zeroRows", pd.grouping.zero_rows}};
      emit(out, polar_flags.out, polar_flags.format);
      return 0;
    }
    if (fact_cmd->parsed()) {
      const Exponent e(parse_exponent(fact_p));
      const Matrix v = load_matrix(fact_matrix);
      FactNormOptions opts;
      opts.r_max = fact_rmax;
      opts.restarts = fact_restarts;
      opts.seed = fact_flags.seed;
      FactNormResult result = fact_which == 1 ? factnorm1(v, e, opts)
                                              : factnorm2_upper(v, e, opts);
      Json out{{"lower", result.estimate.lower},
               {"upper", result.estimate.upper},
               {"gap", result.estimate.upper - result.estimate.lower},
               {"bestR", result.best_r}};
      if (!fact_flags.out.empty()) {
        const std::string stem =
            std::filesystem::path(fact_flags.out).filename().string();
        Json witness_files = Json::object();
        if (result.factorization) {
          const auto& f = *result.factorization;
          witness_files["alpha"] = stem + ".alpha.json";
          witness_files["w"] = stem + ".w.json";
          witness_files["beta"] = stem + ".beta.json";
          save_matrix(fact_flags.out + ".alpha.json", f.alpha);
          save_matrix(fact_flags.out + ".w.json", f.w);
          save_matrix(fact_flags.out + ".beta.json", f.beta);
        }
        if (result.witness) {
          witness_files["dual"] = stem + ".dual.json";
          save_matrix(fact_flags.out + ".dual.json", result.witness->f);
        }
        out["witnessFiles"] = witness_files;
      }
      emit(out, fact_flags.out, fact_flags.format);
      return 0;
    }
    if (col_cmd->parsed()) {
      const Exponent e(parse_exponent(col_p));
      const Matrix s = load_matrix(col_matrix);
      ColumnMatrix x = ColumnMatrix::from_stacked(s, col_entry_dim);
      NormEstimate est = col_matrix_norm(x, e, col_restarts, col_flags.seed);
      est.upper = col_matrix_norm_upper(x, e);
      emit(estimate_to_json(est), col_flags.out, col_flags.format);
      return 0;
    }
    if (cex_cmd->parsed()) {
      const Exponent e(parse_exponent(cex_p));
      SubspaceEmbedding emb(load_matrix(cex_subspace), e);
      CounterexampleOptions opts;
      opts.n_max = cex_nmax;
      opts.trials = cex_trials;
      opts.seed = cex_flags.seed;
      CounterexampleReport report = counterexample_report(emb, opts);
      Json violations = Json::array();
      for (const auto& v : report.phi_psi.violations) {
        violations.push_back(Json{{"level", v.level},
                                  {"trial", v.trial},
                                  {"lhs", v.lhs},
                                  {"rhs", v.rhs},
                                  {"which", v.which}});
      }
      Json out{{"phiPsi",
                Json{{"maxPhiRatio", report.phi_psi.max_phi_ratio},
                     {"maxPsiRatio", report.phi_psi.max_psi_ratio},
                     {"roundtripDeviation", report.phi_psi.roundtrip_deviation},
                     {"violations", violations}}},
               {"projection",
                Json{{"bestValue", report.projection.best_upper},
                     {"P", matrix_to_json(report.projection.projection)}}},
               {"flags", report.flags}};
      emit(out, cex_flags.out, cex_flags.format);
      return report.phi_psi.ok() ? 0 : 2;
    }
    if (verify_cmd->parsed()) {
      Campaign campaign;
      campaign.suite = suite_from_string(verify_suite);
      campaign.p_list = parse_exponent_list(verify_p);
      campaign.n_max = verify_nmax;
      campaign.trials = verify_trials;
      campaign.seed = verify_flags.seed;
      campaign.budgets.restarts = verify_restarts;
      campaign.budgets.iterations = verify_iterations;
      CampaignReport report = run_campaign(campaign);
      std::cerr << "suite " << report.suite << ": " << report.cases_run
                << " cases, " << report.violations.size() << " violations, "
                << report.findings << " findings ("
                << report.wall_clock_ms << " ms)\n";
      Json out = report.to_json();
      if (!verify_flags.out.empty()) {
        std::filesystem::create_directories(verify_flags.out);
        save_json_atomic(std::filesystem::path(verify_flags.out) /
                             (report.suite + ".json"),
                         out);
        save_text_atomic(std::filesystem::path(verify_flags.out) /
                             (report.suite + ".csv"),
                         report.to_csv());
      } else {
        std::cout << out.dump(2) << "\n";
      }
      if (!report.ok()) return 2;
      if (report.findings > 0) return 3;
      return 0;
    }
    if (ext_cmd->parsed()) {
      const Exponent e(parse_exponent(ext_p));
      const Json space_json = load_json(ext_space);
      if (!space_json.contains("basis") || !space_json.contains("images")) {
        throw InputError("space file must contain 'basis' and 'images'");
      }
      std::vector<Matrix> basis, images;
      for (const auto& j : space_json["basis"]) basis.push_back(matrix_from_json(j));
      for (const auto& j : space_json["images"]) images.push_back(matrix_from_json(j));
      Budgets budgets;
      ExtensionGapResult r =
          extension_gap(basis, images, e, ext_level, budgets, ext_flags.seed);
      Json out{{"originLower", r.origin_lower},
               {"bestExtensionUpper", r.best_extension_upper},
               {"gap", r.gap},
               {"inconclusive", r.inconclusive},
               {"level", r.level}};
      emit(out, ext_flags.out, ext_flags.format);
      return r.inconclusive ? 3 : 0;
    }
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace popspace

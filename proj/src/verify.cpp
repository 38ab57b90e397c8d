#include "popspace/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "popspace/colspace.hpp"
#include "popspace/factnorm.hpp"
#include "popspace/isometry.hpp"

namespace popspace {

const char* to_string(Suite s) {
  switch (s) {
    case Suite::PComparison: return "p-comparison";
    case Suite::OpnormBounds: return "opnorm-bounds";
    case Suite::Norm1Axioms: return "norm1-axioms";
    case Suite::Norm1VsNorm2: return "norm1-vs-norm2";
    case Suite::Norm2TriangleSearch: return "norm2-triangle-search";
    case Suite::PolarRoundtrip: return "polar-roundtrip";
    case Suite::PhiPsi: return "phi-psi";
    case Suite::ExtensionGap: return "extension-gap";
  }
  return "unknown";
}

Suite suite_from_string(const std::string& name) {
  for (Suite s : {Suite::PComparison, Suite::OpnormBounds, Suite::Norm1Axioms,
                  Suite::Norm1VsNorm2, Suite::Norm2TriangleSearch,
                  Suite::PolarRoundtrip, Suite::PhiPsi, Suite::ExtensionGap}) {
    if (name == to_string(s)) return s;
  }
  throw InputError("unknown suite: " + name);
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_matrix(const Matrix& a, std::uint64_t h) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      h = fnv1a(&re, sizeof re, h);
      h = fnv1a(&im, sizeof im, h);
    }
  }
  return h;
}

std::uint64_t hash_values(std::initializer_list<double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) h = fnv1a(&v, sizeof v, h);
  return h;
}

std::string case_id(const char* tag, double p, int n, long long t) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s/p=%g/n=%d/t=%lld", tag, p, n, t);
  return buf;
}

void push_case(CampaignReport& report, CaseRecord record,
               const Json& repro_inputs, std::uint64_t repro_seed) {
  report.cases_run += 1;
  report.max_margin = std::max(report.max_margin, record.margin);
  if (record.finding) report.findings += 1;
  if (record.violation) {
    report.violations.push_back({record.id, repro_seed, repro_inputs});
  }
  report.cases.push_back(std::move(record));
}

// ratio-minus-one margin, safe at rhs = 0
double margin_of(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs - 1.0;
}

void run_p_comparison(const Campaign& c, CampaignReport& report) {
  for (double p : c.p_list) {
    const Exponent e(p);
    for (int n = 1; n <= c.n_max; ++n) {
      const std::uint64_t seed = Rng(c.seed).fork(hash_values({p, 1.0 * n})).seed();
      SweepReport sweep = check_p_comparison(n, e, c.trials, seed);
      CaseRecord record;
      record.id = case_id("p-comparison", p, n, c.trials);
      record.input_hash = hash_values({p, 1.0 * n, 1.0 * c.trials, 1.0 * seed});
      record.lhs = sweep.max_ratio;
      record.rhs = 1.0;
      record.margin = sweep.max_ratio - 1.0;
      record.violation = !sweep.ok();
      push_case(report, std::move(record),
                Json{{"p", p}, {"n", n}, {"trials", c.trials}, {"seed", seed}},
                seed);
    }
  }
}

void run_opnorm_bounds(const Campaign& c, CampaignReport& report) {
  OpNormOptions opts;
  opts.restarts = c.budgets.restarts;
  for (double p : c.p_list) {
    const Exponent e(p);
    Rng rng = Rng(c.seed).fork(hash_values({p, 2.0}));
    for (long long t = 0; t < c.trials; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Index rows = stream.uniform_int(1, c.n_max);
      const Index cols = stream.uniform_int(1, c.n_max);
      const Ensemble ens = static_cast<Ensemble>(t % 3);
      const Matrix a = random_matrix(stream, rows, cols, ens);
      opts.seed = stream.seed();
      OpNormBoundReport r = check_opnorm_bounds(a, e, opts);
      CaseRecord record;
      record.id = case_id("opnorm-bounds", p, static_cast<int>(rows), t);
      record.input_hash = hash_matrix(a, hash_values({p}));
      record.lhs = std::max(r.lower_as_domain_map, r.lower_transposed);
      record.rhs = std::max(r.bound_as_domain_map, r.bound_transposed);
      record.margin = std::max(margin_of(r.lower_as_domain_map, r.bound_as_domain_map),
                               margin_of(r.lower_transposed, r.bound_transposed));
      record.violation = !r.ok;
      push_case(report, std::move(record),
                Json{{"p", p}, {"matrix", matrix_to_json(a)}, {"seed", opts.seed}},
                opts.seed);
    }
  }
}

FactNormOptions fact_options(const Campaign& c, std::uint64_t seed) {
  FactNormOptions opts;
  opts.restarts = c.budgets.restarts;
  opts.iterations = c.budgets.iterations;
  opts.r_max = c.budgets.r_max;
  opts.seed = seed;
  return opts;
}

void run_norm1_axioms(const Campaign& c, CampaignReport& report) {
  for (double p : c.p_list) {
    const Exponent e(p);
    Rng rng = Rng(c.seed).fork(hash_values({p, 3.0}));
    for (long long t = 0; t < c.trials; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Index n = stream.uniform_int(1, c.n_max);
      const Ensemble ens = static_cast<Ensemble>(t % 3);
      const Matrix v = random_matrix(stream, n, n, ens);
      const FactNormOptions opts = fact_options(c, stream.seed());

      // ||v|| <= n^{2 delta} ||v||_{1,n}
      NormLowerInequalityReport ineq = check_norm_lower_inequality(v, e, opts);
      CaseRecord record;
      record.id = case_id("norm1-lower-ineq", p, static_cast<int>(n), t);
      record.input_hash = hash_matrix(v, hash_values({p}));
      record.lhs = ineq.op_lower;
      record.rhs = ineq.bound;
      record.margin = margin_of(ineq.op_lower, ineq.bound);
      record.violation = !ineq.ok;
      push_case(report, std::move(record),
                Json{{"p", p}, {"matrix", matrix_to_json(v)}, {"seed", opts.seed}},
                opts.seed);

      // exact absolute homogeneity under a power-of-two scale
      const double scale = 4.0;
      const double u1 = factnorm1_upper(v, e, opts).estimate.upper;
      const double u2 = factnorm1_upper(Matrix(scale * v), e, opts).estimate.upper;
      CaseRecord hom;
      hom.id = case_id("norm1-homogeneity", p, static_cast<int>(n), t);
      hom.input_hash = record.input_hash;
      hom.lhs = u2;
      hom.rhs = scale * u1;
      hom.margin = std::abs(margin_of(u2, scale * u1));
      hom.violation = hom.margin > 1e-12;
      push_case(report, std::move(hom),
                Json{{"p", p}, {"matrix", matrix_to_json(v)}, {"seed", opts.seed}},
                opts.seed);

      // triangle bookkeeping: the combined factorization of two best
      // factorizations reconstructs the sum at the summed value
      if (t % 4 == 0) {
        const Matrix v2 = random_matrix(stream, n, n);
        FactNormResult f1 = factnorm1_upper(v, e, opts);
        FactNormResult f2 = factnorm1_upper(v2, e, opts);
        Factorization combined =
            sum_combine(*f1.factorization, *f2.factorization, e);
        const double sum_scale =
            std::max(entrywise_norm(Matrix(v + v2), 2.0), 1e-300);
        const double recon =
            entrywise_norm(Matrix(combined.alpha * combined.w * combined.beta -
                                  (v + v2)),
                           2.0) /
            sum_scale;
        const double target = f1.estimate.upper + f2.estimate.upper;
        // sound direction: a certified lower bound for the sum may not
        // exceed the summed upper bounds
        const double lower_sum =
            factnorm1_lower(Matrix(v + v2), e, opts).estimate.lower;
        CaseRecord tri;
        tri.id = case_id("norm1-triangle", p, static_cast<int>(n), t);
        tri.input_hash = hash_matrix(v2, record.input_hash);
        tri.lhs = std::max(combined.value, lower_sum);
        tri.rhs = target;
        tri.margin = margin_of(tri.lhs, target);
        tri.violation = combined.value > target * (1.0 + 1e-9) ||
                        lower_sum > target * (1.0 + 1e-9) || recon > 1e-8;
        push_case(report, std::move(tri),
                  Json{{"p", p},
                       {"matrix", matrix_to_json(v)},
                       {"matrix2", matrix_to_json(v2)},
                       {"seed", opts.seed}},
                  opts.seed);
      }
    }
  }
}

void run_norm1_vs_norm2(const Campaign& c, CampaignReport& report) {
  for (double p : c.p_list) {
    const Exponent e(p);
    Rng rng = Rng(c.seed).fork(hash_values({p, 4.0}));
    for (long long t = 0; t < c.trials; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Index n = stream.uniform_int(1, c.n_max);
      const Ensemble ens = static_cast<Ensemble>(t % 3);
      const Matrix v = random_matrix(stream, n, n, ens);
      const FactNormOptions opts = fact_options(c, stream.seed());
      const double lower1 = factnorm1_lower(v, e, opts).estimate.lower;
      const double upper2 = factnorm2_upper(v, e, opts).estimate.upper;
      CaseRecord record;
      record.id = case_id("norm1-vs-norm2", p, static_cast<int>(n), t);
      record.input_hash = hash_matrix(v, hash_values({p}));
      record.lhs = lower1;
      record.rhs = upper2;
      record.margin = margin_of(lower1, upper2);
      record.violation = lower1 > upper2 * (1.0 + 1e-9);
      // exploratory: a closed sandwich would witness norm1 = norm2
      // (1 x 1 matrices close trivially and are not reported)
      const double upper1 = factnorm1_upper(v, e, opts).estimate.upper;
      record.finding = n >= 2 && upper2 <= lower1 * (1.0 + 1e-6) &&
                       upper2 <= upper1 * (1.0 + 1e-6);
      push_case(report, std::move(record),
                Json{{"p", p}, {"matrix", matrix_to_json(v)}, {"seed", opts.seed}},
                opts.seed);
    }
  }
}

void run_norm2_triangle_search(const Campaign& c, CampaignReport& report) {
  for (double p : c.p_list) {
    const Exponent e(p);
    Rng rng = Rng(c.seed).fork(hash_values({p, 5.0}));
    for (long long t = 0; t < c.trials; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Index n = 2;
      const Matrix v1 = random_matrix(stream, n, n);
      const Matrix v2 = random_matrix(stream, n, n);
      const FactNormOptions opts = fact_options(c, stream.seed());
      const double lower_sum = factnorm1_lower(Matrix(v1 + v2), e, opts).estimate.lower;
      const double upper_parts = factnorm2_upper(v1, e, opts).estimate.upper +
                                 factnorm2_upper(v2, e, opts).estimate.upper;
      CaseRecord record;
      record.id = case_id("norm2-triangle", p, static_cast<int>(n), t);
      record.input_hash = hash_matrix(v2, hash_matrix(v1, hash_values({p})));
      record.lhs = lower_sum;
      record.rhs = upper_parts;
      record.margin = margin_of(lower_sum, upper_parts);
      // a certified-lower exceeding the summed uppers would witness a
      // genuine triangle failure for the polar-restricted norm; recorded
      // as a finding, never asserted
      record.finding = lower_sum > upper_parts * (1.0 + 1e-9);
      push_case(report, std::move(record),
                Json{{"p", p},
                     {"matrix", matrix_to_json(v1)},
                     {"matrix2", matrix_to_json(v2)},
                     {"seed", opts.seed}},
                opts.seed);
    }
  }
}

// random isometry with disjoint supports: partition r rows into n groups
Matrix random_disjoint_isometry(Rng& rng, Index r, Index n, const Exponent& e) {
  std::vector<Index> owner(static_cast<std::size_t>(r));
  for (Index k = 0; k < n; ++k) owner[static_cast<std::size_t>(k)] = k;
  for (Index i = n; i < r; ++i) {
    owner[static_cast<std::size_t>(i)] = rng.uniform_int(0, n - 1);
  }
  // deterministic shuffle
  for (Index i = r - 1; i > 0; --i) {
    std::swap(owner[static_cast<std::size_t>(i)],
              owner[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  }
  Matrix tau = Matrix::Zero(r, n);
  for (Index i = 0; i < r; ++i) {
    Scalar z = rng.complex_normal();
    if (std::abs(z) < 0.05) z = Scalar(0.5, -0.5);  // keep entries nonzero
    tau(i, owner[static_cast<std::size_t>(i)]) = z;
  }
  for (Index k = 0; k < n; ++k) {
    tau.col(k) /= vec_p_norm(tau.col(k), e.p());
  }
  return tau;
}

void run_polar_roundtrip(const Campaign& c, CampaignReport& report) {
  for (double p : c.p_list) {
    const Exponent e(p);
    if (e.p() == 2.0) continue;  // the combinatorial criterion assumes p != 2
    Rng rng = Rng(c.seed).fork(hash_values({p, 6.0}));
    for (long long t = 0; t < c.trials; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Index n = stream.uniform_int(1, std::min(c.n_max, 4));
      const Index r = stream.uniform_int(n, 2 * c.n_max);
      const Matrix tau = random_disjoint_isometry(stream, r, n, e);
      const Matrix beta0 = random_matrix(stream, n, n);
      const Matrix beta = tau * beta0;

      CaseRecord record;
      record.id = case_id("polar-roundtrip", p, static_cast<int>(n), t);
      record.input_hash = hash_matrix(beta, hash_values({p}));
      double margin = 0.0;
      bool violation = false;
      try {
        PolarDecomposition pd = polar_decompose(beta, e, 1e-9);
        const double scale = std::max(entrywise_norm(beta, 2.0), 1e-300);
        const double recon =
            entrywise_norm(Matrix(pd.tau * pd.beta0 - beta), 2.0) / scale;
        const double norm_gap =
            std::abs(entrywise_norm(pd.beta0, p) - entrywise_norm(beta, p)) /
            std::max(entrywise_norm(beta, p), 1e-300);
        const bool iso = is_lp_isometry(pd.tau, e, 1e-9).isometry;
        // regrouping the reconstruction reproduces the class structure
        const RowGrouping g1 = group_rows(beta, 1e-9);
        const RowGrouping g2 = group_rows(Matrix(pd.tau * pd.beta0), 1e-9);
        const bool idempotent = g1.pivots == g2.pivots;
        margin = std::max(recon, norm_gap);
        violation = recon > 1e-10 || norm_gap > 1e-10 || !iso || !idempotent;
      } catch (const std::exception&) {
        violation = true;
        margin = std::numeric_limits<double>::infinity();
      }
      record.lhs = margin;
      record.rhs = 1e-10;
      record.margin = margin;
      record.violation = violation;
      push_case(report, std::move(record),
                Json{{"p", p}, {"matrix", matrix_to_json(beta)},
                     {"seed", stream.seed()}},
                stream.seed());

      // generic full-support wide matrices are not decomposable
      const Index n2 = stream.uniform_int(2, std::max(2, std::min(c.n_max, 4)));
      const Index r2 = n2 + stream.uniform_int(1, c.n_max);
      Matrix dense = random_matrix(stream, r2, n2);
      CaseRecord neg;
      neg.id = case_id("polar-generic-reject", p, static_cast<int>(n2), t);
      neg.input_hash = hash_matrix(dense, hash_values({p, 7.0}));
      const bool decomposable = is_polar_decomposable(dense, e, 1e-9).decomposable;
      neg.lhs = decomposable ? 1.0 : 0.0;
      neg.rhs = 0.0;
      neg.margin = neg.lhs;
      neg.violation = decomposable;
      push_case(report, std::move(neg),
                Json{{"p", p}, {"matrix", matrix_to_json(dense)},
                     {"seed", stream.seed()}},
                stream.seed());
    }
  }
}

void run_phi_psi(const Campaign& c, CampaignReport& report) {
  for (double p : c.p_list) {
    const Exponent e(p);
    Rng rng = Rng(c.seed).fork(hash_values({p, 8.0}));
    const long long subspaces = std::max<long long>(1, c.trials);
    for (long long t = 0; t < subspaces; ++t) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(t));
      const Index m = 4;
      const Index k = 2;
      const Matrix basis = random_matrix(stream, m, k);
      SubspaceEmbedding emb(basis, e);
      PhiPsiReport r = check_phi_psi_contractive(
          emb, std::min(c.n_max, 3), 5, stream.seed(), 1e-6);
      CaseRecord record;
      record.id = case_id("phi-psi", p, static_cast<int>(m), t);
      record.input_hash = hash_matrix(basis, hash_values({p}));
      record.lhs = std::max(r.max_phi_ratio, r.max_psi_ratio);
      record.rhs = 1.0;
      record.margin = record.lhs - 1.0;
      record.violation = !r.ok();
      push_case(report, std::move(record),
                Json{{"p", p}, {"basis", matrix_to_json(basis)},
                     {"seed", stream.seed()}},
                stream.seed());
    }
  }
}

void run_extension_gap_suite(const Campaign& c, CampaignReport& report) {
  // canonical harness: diagonal matrices inside M_2, inclusion map
  std::vector<Matrix> basis;
  std::vector<Matrix> images;
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  Matrix e22 = Matrix::Zero(2, 2);
  e22(1, 1) = 1.0;
  basis = {e11, e22};
  images = basis;
  for (double p : c.p_list) {
    const Exponent e(p);
    const int level = std::max(1, std::min(c.n_max, 2));
    ExtensionGapResult r =
        extension_gap(basis, images, e, level, c.budgets, c.seed);
    CaseRecord record;
    record.id = case_id("extension-gap", p, level, 0);
    record.input_hash = hash_values({p, 1.0 * level, 1.0 * c.seed});
    record.lhs = r.best_extension_upper;
    record.rhs = r.origin_lower;
    record.margin = r.gap;
    record.finding = !r.inconclusive;
    push_case(report, std::move(record),
              Json{{"p", p}, {"level", level}, {"seed", c.seed}}, c.seed);
  }
}

}  // namespace

CampaignReport run_campaign(const Campaign& campaign) {
  const auto start = std::chrono::steady_clock::now();
  CampaignReport report;
  report.suite = to_string(campaign.suite);
  switch (campaign.suite) {
    case Suite::PComparison: run_p_comparison(campaign, report); break;
    case Suite::OpnormBounds: run_opnorm_bounds(campaign, report); break;
    case Suite::Norm1Axioms: run_norm1_axioms(campaign, report); break;
    case Suite::Norm1VsNorm2: run_norm1_vs_norm2(campaign, report); break;
    case Suite::Norm2TriangleSearch:
      run_norm2_triangle_search(campaign, report);
      break;
    case Suite::PolarRoundtrip: run_polar_roundtrip(campaign, report); break;
    case Suite::PhiPsi: run_phi_psi(campaign, report); break;
    case Suite::ExtensionGap: run_extension_gap_suite(campaign, report); break;
  }
  report.wall_clock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return report;
}

Json CampaignReport::to_json() const {
  Json cases_json = Json::array();
  for (const auto& c : cases) {
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(c.input_hash));
    cases_json.push_back(Json{{"id", c.id},
                              {"hash", hash_hex},
                              {"lhs", c.lhs},
                              {"rhs", c.rhs},
                              {"margin", c.margin},
                              {"violation", c.violation},
                              {"finding", c.finding}});
  }
  Json violations_json = Json::array();
  for (const auto& v : violations) {
    violations_json.push_back(
        Json{{"case", v.case_id}, {"seed", v.seed}, {"inputs", v.inputs}});
  }
  return Json{{"suite", suite},
              {"casesRun", cases_run},
              {"findings", findings},
              {"maxMargin", max_margin},
              {"cases", cases_json},
              {"violations", violations_json}};
}

std::string CampaignReport::to_csv() const {
  std::string out = "suite,case,lhs,rhs,margin,violation,finding\n";
  char line[512];
  for (const auto& c : cases) {
    std::snprintf(line, sizeof line, "%s,%s,%.17g,%.17g,%.17g,%d,%d\n",
                  suite.c_str(), c.id.c_str(), c.lhs, c.rhs, c.margin,
                  c.violation ? 1 : 0, c.finding ? 1 : 0);
    out += line;
  }
  return out;
}

namespace {

// apply a vectorized linear map blockwise to an (L k) x (L k) matrix
Matrix apply_blockwise(const Matrix& map, const Matrix& x, Index k) {
  const Index level = x.rows() / k;
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Index s = 0; s < level; ++s) {
    for (Index t = 0; t < level; ++t) {
      const Matrix block = x.block(s * k, t * k, k, k);
      const Vector image = map * block.reshaped();
      out.block(s * k, t * k, k, k) = image.reshaped(k, k);
    }
  }
  return out;
}

}  // namespace

ExtensionGapResult extension_gap(const std::vector<Matrix>& v_basis,
                                 const std::vector<Matrix>& images,
                                 const Exponent& e, int level,
                                 const Budgets& budgets, std::uint64_t seed) {
  if (v_basis.empty() || v_basis.size() != images.size()) {
    throw InputError("extension_gap: basis and images must match and be nonempty");
  }
  const Index k = v_basis.front().rows();
  for (const auto& b : v_basis) {
    if (b.rows() != k || b.cols() != k) {
      throw InputError("extension_gap: basis matrices must all be k x k");
    }
  }
  if (level < 1) throw InputError("extension_gap: level must be >= 1");
  const Index kk = k * k;
  const Index d = static_cast<Index>(v_basis.size());
  if (d > kk) throw InputError("extension_gap: more basis elements than dimensions");

  // vectorize the basis; orthonormalize (the images track the change)
  Matrix b_mat(kk, d);
  Matrix u_mat(kk, d);
  for (Index t = 0; t < d; ++t) {
    b_mat.col(t) = v_basis[static_cast<std::size_t>(t)].reshaped();
    u_mat.col(t) = images[static_cast<std::size_t>(t)].reshaped();
  }
  Eigen::HouseholderQR<Matrix> qr(b_mat);
  const Matrix q_full = qr.householderQ() * Matrix::Identity(kk, kk);
  const Matrix q = q_full.leftCols(d);
  const Matrix r_fac =
      Matrix(qr.matrixQR().topRows(d).triangularView<Eigen::Upper>());
  Eigen::JacobiSVD<Matrix> rank_check(r_fac);
  if (rank_check.singularValues()(d - 1) <
      1e-10 * rank_check.singularValues()(0)) {
    throw InputError("extension_gap: basis matrices are linearly dependent");
  }
  // images of the orthonormalized basis: U R^{-1}
  const Matrix rt = r_fac.transpose();
  const Matrix u_ortho =
      rt.triangularView<Eigen::Lower>().solve(u_mat.transpose()).transpose();
  const Matrix complement = q_full.rightCols(kk - d);
  const Matrix base_map = u_ortho * q.adjoint();  // u on V, zero on complement

  // one shared seeded sample generator for both sides: level-l samples for
  // every l <= level, zero-padded, plus single-slot structured candidates
  struct Sample {
    Matrix x;
    double upper;
  };
  auto make_samples = [&](const Matrix& span_cols, std::uint64_t stream_seed) {
    std::vector<Sample> samples;
    const Index dim = span_cols.cols();
    const Index lk = level * k;
    auto add = [&](Matrix x) {
      const double up = opnorm_upper(x, e);
      if (up > 0.0) samples.push_back({std::move(x), up});
    };
    // structured: one span element in one slot
    for (Index t = 0; t < dim; ++t) {
      Matrix x = Matrix::Zero(lk, lk);
      x.topLeftCorner(k, k) = span_cols.col(t).reshaped(k, k);
      add(std::move(x));
    }
    Rng rng = Rng(stream_seed).fork(0xe9);
    const int per_level = std::max(4, budgets.restarts * 2);
    for (int l = 1; l <= level; ++l) {
      for (int s = 0; s < per_level; ++s) {
        Rng stream = rng.fork(static_cast<std::uint64_t>(l) * 1000 +
                              static_cast<std::uint64_t>(s));
        Matrix x = Matrix::Zero(lk, lk);
        for (Index bs = 0; bs < l; ++bs) {
          for (Index bt = 0; bt < l; ++bt) {
            const Vector coeff = random_vector(stream, dim);
            x.block(bs * k, bt * k, k, k) =
                (span_cols * coeff).reshaped(k, k);
          }
        }
        add(std::move(x));
      }
    }
    return samples;
  };

  OpNormOptions opts;
  opts.restarts = budgets.restarts;
  opts.seed = Rng(seed).fork(0xea).seed();

  auto level_estimate = [&](const Matrix& map, const std::vector<Sample>& samples) {
    double best = 0.0;
    for (const auto& sample : samples) {
      const Matrix image = apply_blockwise(map, sample.x, k);
      const double lower = opnorm_lower(image, e, opts).lower;
      best = std::max(best, lower / sample.upper);
    }
    return best;
  };

  ExtensionGapResult result;
  result.level = level;
  const auto origin_samples = make_samples(q, seed);
  result.origin_lower = level_estimate(base_map, origin_samples);

  Matrix w_span(kk, kk);
  w_span.leftCols(d) = q;
  w_span.rightCols(kk - d) = complement;
  const auto w_samples = make_samples(w_span, seed);

  auto extension_map = [&](const Matrix& g) {
    return Matrix(base_map + g * complement.adjoint());
  };
  Matrix best_g = Matrix::Zero(kk, kk - d);
  double best_value = level_estimate(base_map, w_samples);
  if (kk > d) {
    Rng rng = Rng(seed).fork(0xeb);
    for (int restart = 0; restart < budgets.restarts; ++restart) {
      Rng stream = rng.fork(static_cast<std::uint64_t>(restart));
      Matrix g = restart == 0
                     ? Matrix(Matrix::Zero(kk, kk - d))
                     : Matrix(0.3 * random_matrix(stream, kk, kk - d));
      double cur = level_estimate(extension_map(g), w_samples);
      double step = 0.2;
      for (int it = 0; it < budgets.iterations; ++it) {
        const Matrix g_try = g + step * random_matrix(stream, kk, kk - d);
        const double val = level_estimate(extension_map(g_try), w_samples);
        if (val < cur) {
          cur = val;
          g = g_try;
          step = std::min(step * 1.5, 0.5);
        } else {
          step *= 0.7;
          if (step < 1e-5) break;
        }
      }
      if (cur < best_value) {
        best_value = cur;
        best_g = g;
      }
    }
  }
  result.best_extension_upper = best_value;
  result.gap = result.best_extension_upper - result.origin_lower;
  result.inconclusive =
      result.gap <= 1e-6 * std::max(1.0, result.origin_lower);
  return result;
}

}  // namespace popspace

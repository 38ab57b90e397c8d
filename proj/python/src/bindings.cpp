#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "popspace/colspace.hpp"
#include "popspace/factnorm.hpp"
#include "popspace/isometry.hpp"
#include "popspace/verify.hpp"

namespace py = pybind11;
using namespace popspace;

namespace {

py::dict estimate_dict(const NormEstimate& est) {
  py::dict d;
  d["lower"] = est.lower;
  d["upper"] = est.upper;
  d["witness"] = est.lower_witness;
  d["method"] = std::string(to_string(est.method));
  d["restarts"] = est.restarts;
  return d;
}

py::dict factorization_dict(const Factorization& f) {
  py::dict d;
  d["r"] = f.r;
  d["alpha"] = f.alpha;
  d["w"] = f.w;
  d["beta"] = f.beta;
  d["w_upper"] = f.w_upper;
  d["value"] = f.value;
  return d;
}

py::dict fact_result_dict(const FactNormResult& r) {
  py::dict d;
  d["lower"] = r.estimate.lower;
  d["upper"] = r.estimate.upper;
  d["best_r"] = r.best_r;
  if (r.factorization) d["factorization"] = factorization_dict(*r.factorization);
  if (r.witness) {
    py::dict w;
    w["f"] = r.witness->f;
    w["pairing"] = r.witness->pairing;
    w["f_op_upper"] = r.witness->f_op_upper;
    d["dual_witness"] = w;
  }
  return d;
}

FactNormOptions fact_options(Index r_max, int restarts, int iterations,
                             std::uint64_t seed) {
  FactNormOptions opts;
  opts.r_max = r_max;
  opts.restarts = restarts;
  opts.iterations = iterations;
  opts.seed = seed;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_popspace, m) {
  m.doc() = "matrix p->p norms, predual factorization norms, and l_p polar "
            "decomposition at finite matrix scale";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<Exponent>(m, "Exponent")
      .def(py::init<double>(), py::arg("p"))
      .def_property_readonly("p", &Exponent::p)
      .def_property_readonly("conjugate", &Exponent::conjugate)
      .def_property_readonly("delta", &Exponent::delta)
      .def("dual", &Exponent::dual)
      .def("__repr__", [](const Exponent& e) {
        return "Exponent(p=" + std::to_string(e.p()) + ")";
      });

  m.def(
      "vec_p_norm",
      [](const Vector& x, double p) { return vec_p_norm(x, p); },
      py::arg("x"), py::arg("p"),
      "(sum |x_i|^p)^{1/p}; p may be anything in [1, inf]");

  m.def(
      "entrywise_norm",
      [](const Matrix& a, double q) { return entrywise_norm(a, q); },
      py::arg("a"), py::arg("q"), "q-norm of the flattened entries");

  m.def(
      "opnorm",
      [](const Matrix& a, double p, int restarts, double tol,
         std::uint64_t seed) {
        OpNormOptions opts;
        opts.restarts = restarts;
        opts.tol = tol;
        opts.seed = seed;
        return estimate_dict(opnorm_estimate(a, Exponent(p), opts));
      },
      py::arg("a"), py::arg("p"), py::arg("restarts") = 8,
      py::arg("tol") = 1e-12, py::arg("seed") = 42,
      "certified two-sided estimate of the operator p->p norm");

  m.def(
      "opnorm_oracle_small",
      [](const Matrix& a, double p, int grid_density) {
        return opnorm_oracle_small(a, Exponent(p), grid_density);
      },
      py::arg("a"), py::arg("p"), py::arg("grid_density") = 16,
      "brute-force sphere-grid oracle for matrices with at most 3 columns");

  m.def(
      "support",
      [](const Vector& x, double tol) { return support(x, tol); },
      py::arg("x"), py::arg("tol") = 0.0);

  m.def(
      "is_lp_isometry",
      [](const Matrix& tau, double p, double tol) {
        IsometryCertificate cert = is_lp_isometry(tau, Exponent(p), tol);
        py::dict d;
        d["isometry"] = cert.isometry;
        d["column_supports"] = cert.column_supports;
        d["column_norms"] = cert.column_norms;
        d["gram_residual"] = cert.gram_residual;
        d["reason"] = cert.reason;
        return d;
      },
      py::arg("tau"), py::arg("p"), py::arg("tol") = 1e-9,
      "disjoint-support unit-column criterion (Gram identity at p = 2)");

  m.def(
      "group_rows",
      [](const Matrix& beta, double tol) {
        RowGrouping g = group_rows(beta, tol);
        py::dict d;
        d["pivots"] = g.pivots;
        d["class_of"] = g.class_of;
        d["scale_of"] = g.scale_of;
        d["zero_rows"] = g.zero_rows;
        return d;
      },
      py::arg("beta"), py::arg("tol") = 1e-9,
      "projective row classes by greedy scan");

  m.def(
      "is_polar_decomposable",
      [](const Matrix& beta, double p, double tol) {
        DecomposabilityReport r = is_polar_decomposable(beta, Exponent(p), tol);
        py::dict d;
        d["decomposable"] = r.decomposable;
        d["class_count"] = r.class_count;
        d["pivots"] = r.pivots;
        d["zero_rows"] = r.zero_rows;
        d["full_rank"] = r.full_rank;
        d["rank"] = r.rank;
        d["reason"] = r.reason;
        return d;
      },
      py::arg("beta"), py::arg("p"), py::arg("tol") = 1e-9);

  m.def(
      "polar_decompose",
      [](const Matrix& beta, double p, double tol) {
        PolarDecomposition pd = polar_decompose(beta, Exponent(p), tol);
        py::dict d;
        d["tau"] = pd.tau;
        d["beta0"] = pd.beta0;
        d["lambda"] = pd.lambda;
        d["pivots"] = pd.grouping.pivots;
        d["class_of"] = pd.grouping.class_of;
        d["scale_of"] = pd.grouping.scale_of;
        d["zero_rows"] = pd.grouping.zero_rows;
        return d;
      },
      py::arg("beta"), py::arg("p"), py::arg("tol") = 1e-9,
      "beta = tau * beta0 with tau an l_p isometry and beta0 square");

  m.def(
      "factnorm1",
      [](const Matrix& v, double p, Index r_max, int restarts, int iterations,
         std::uint64_t seed) {
        return fact_result_dict(factnorm1(
            v, Exponent(p), fact_options(r_max, restarts, iterations, seed)));
      },
      py::arg("v"), py::arg("p"), py::arg("r_max") = 0, py::arg("restarts") = 8,
      py::arg("iterations") = 120, py::arg("seed") = 42,
      "two-sided estimate of the predual factorization norm");

  m.def(
      "factnorm1_lower",
      [](const Matrix& v, double p, int restarts, std::uint64_t seed) {
        return fact_result_dict(factnorm1_lower(
            v, Exponent(p), fact_options(0, restarts, 120, seed)));
      },
      py::arg("v"), py::arg("p"), py::arg("restarts") = 8, py::arg("seed") = 42);

  m.def(
      "factnorm1_upper",
      [](const Matrix& v, double p, Index r_max, int restarts, int iterations,
         std::uint64_t seed) {
        return fact_result_dict(factnorm1_upper(
            v, Exponent(p), fact_options(r_max, restarts, iterations, seed)));
      },
      py::arg("v"), py::arg("p"), py::arg("r_max") = 0, py::arg("restarts") = 8,
      py::arg("iterations") = 120, py::arg("seed") = 42);

  m.def(
      "factnorm2_upper",
      [](const Matrix& v, double p, int restarts, int iterations,
         std::uint64_t seed) {
        return fact_result_dict(factnorm2_upper(
            v, Exponent(p), fact_options(0, restarts, iterations, seed)));
      },
      py::arg("v"), py::arg("p"), py::arg("restarts") = 8,
      py::arg("iterations") = 120, py::arg("seed") = 42,
      "upper bound with both factors restricted to polar-decomposable shape");

  m.def("nuclear_oracle_p2", &nuclear_oracle_p2, py::arg("v"),
        "sum of singular values (p = 2 oracle)");

  m.def(
      "col_matrix_norm",
      [](const Matrix& stacked, Index entry_dim, double p, int restarts,
         std::uint64_t seed) {
        ColumnMatrix x = ColumnMatrix::from_stacked(stacked, entry_dim);
        const Exponent e(p);
        NormEstimate est = col_matrix_norm(x, e, restarts, seed);
        est.upper = col_matrix_norm_upper(x, e);
        return estimate_dict(est);
      },
      py::arg("stacked"), py::arg("entry_dim"), py::arg("p"),
      py::arg("restarts") = 8, py::arg("seed") = 42,
      "column-space matrix norm from the stacked (n*m) x n representation");

  m.def(
      "projection_constant",
      [](const Matrix& basis, double p, int restarts, int iterations,
         std::uint64_t seed) {
        SubspaceEmbedding emb(basis, Exponent(p));
        ProjectionSearchResult r =
            projection_constant(emb, restarts, iterations, seed);
        py::dict d;
        d["best_upper"] = r.best_upper;
        d["projection"] = r.projection;
        return d;
      },
      py::arg("basis"), py::arg("p"), py::arg("restarts") = 32,
      py::arg("iterations") = 200, py::arg("seed") = 42,
      "smallest certified upper bound found for projections onto the span");

  m.def(
      "counterexample_report",
      [](const Matrix& basis, double p, int n_max, int trials, int restarts,
         int iterations, std::uint64_t seed) {
        SubspaceEmbedding emb(basis, Exponent(p));
        CounterexampleOptions opts;
        opts.n_max = n_max;
        opts.trials = trials;
        opts.restarts = restarts;
        opts.iterations = iterations;
        opts.seed = seed;
        CounterexampleReport r = counterexample_report(emb, opts);
        py::dict d;
        d["max_phi_ratio"] = r.phi_psi.max_phi_ratio;
        d["max_psi_ratio"] = r.phi_psi.max_psi_ratio;
        d["roundtrip_deviation"] = r.phi_psi.roundtrip_deviation;
        d["contraction_violations"] = r.phi_psi.violations.size();
        d["projection_best"] = r.projection.best_upper;
        d["one_complemented"] = r.one_complemented;
        d["margin"] = r.margin;
        d["flags"] = r.flags;
        return d;
      },
      py::arg("basis"), py::arg("p"), py::arg("n_max") = 3,
      py::arg("trials") = 25, py::arg("restarts") = 32,
      py::arg("iterations") = 200, py::arg("seed") = 42,
      "phi/psi contraction checks plus the projection-constant search");

  m.def(
      "run_campaign",
      [](const std::string& suite, const std::vector<double>& p_list, int n_max,
         long long trials, std::uint64_t seed, int restarts, int iterations) {
        Campaign c;
        c.suite = suite_from_string(suite);
        c.p_list = p_list;
        c.n_max = n_max;
        c.trials = trials;
        c.seed = seed;
        c.budgets.restarts = restarts;
        c.budgets.iterations = iterations;
        CampaignReport report = run_campaign(c);
        auto loads = py::module_::import("json").attr("loads");
        return loads(report.to_json().dump());
      },
      py::arg("suite"), py::arg("p_list"), py::arg("n_max") = 4,
      py::arg("trials") = 100, py::arg("seed") = 42, py::arg("restarts") = 4,
      py::arg("iterations") = 80,
      "seeded property-test campaign; returns the report as a dict");

  m.def(
      "extension_gap",
      [](const std::vector<Matrix>& basis, const std::vector<Matrix>& images,
         double p, int level, int restarts, int iterations,
         std::uint64_t seed) {
        Budgets budgets;
        budgets.restarts = restarts;
        budgets.iterations = iterations;
        ExtensionGapResult r =
            extension_gap(basis, images, Exponent(p), level, budgets, seed);
        py::dict d;
        d["origin_lower"] = r.origin_lower;
        d["best_extension_upper"] = r.best_extension_upper;
        d["gap"] = r.gap;
        d["inconclusive"] = r.inconclusive;
        d["level"] = r.level;
        return d;
      },
      py::arg("basis"), py::arg("images"), py::arg("p"), py::arg("level") = 2,
      py::arg("restarts") = 4, py::arg("iterations") = 80, py::arg("seed") = 42,
      "level-L norm gap between a map on a subspace of M_k and its "
      "extensions");
}

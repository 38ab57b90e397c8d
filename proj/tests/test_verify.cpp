#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "popspace/verify.hpp"

using namespace popspace;

namespace {

Campaign small_campaign(Suite suite) {
  Campaign c;
  c.suite = suite;
  c.p_list = {1.5, 3.0};
  c.n_max = 4;
  c.trials = 25;
  c.seed = 42;
  c.budgets.restarts = 2;
  c.budgets.iterations = 40;
  return c;
}

}  // namespace

TEST_CASE("suite names round-trip") {
  for (Suite s : {Suite::PComparison, Suite::OpnormBounds, Suite::Norm1Axioms,
                  Suite::Norm1VsNorm2, Suite::Norm2TriangleSearch,
                  Suite::PolarRoundtrip, Suite::PhiPsi, Suite::ExtensionGap}) {
    CHECK(suite_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(suite_from_string("bogus"), InputError);
}

TEST_CASE("proved-inequality suites run clean") {
  for (Suite s : {Suite::PComparison, Suite::OpnormBounds, Suite::Norm1Axioms,
                  Suite::Norm1VsNorm2, Suite::PolarRoundtrip, Suite::PhiPsi}) {
    Campaign c = small_campaign(s);
    if (s == Suite::PhiPsi) c.trials = 4;
    CampaignReport report = run_campaign(c);
    INFO("suite ", report.suite);
    CHECK(report.ok());
    CHECK(report.cases_run > 0);
  }
}

TEST_CASE("campaigns are deterministic") {
  Campaign c = small_campaign(Suite::OpnormBounds);
  CampaignReport a = run_campaign(c);
  CampaignReport b = run_campaign(c);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("exploratory suite emits findings without failing") {
  Campaign c = small_campaign(Suite::Norm2TriangleSearch);
  c.trials = 10;
  CampaignReport report = run_campaign(c);
  CHECK(report.ok());  // findings are not violations
  CHECK(report.cases_run == 2 * 10);
}

TEST_CASE("extension gap suite") {
  Campaign c = small_campaign(Suite::ExtensionGap);
  CampaignReport report = run_campaign(c);
  CHECK(report.ok());
  CHECK(report.cases_run == 2);
}

TEST_CASE("report serialization shape") {
  Campaign c = small_campaign(Suite::PComparison);
  c.trials = 50;
  CampaignReport report = run_campaign(c);
  const Json j = report.to_json();
  CHECK(j.contains("suite"));
  CHECK(j.contains("cases"));
  CHECK(j.contains("violations"));
  CHECK(j["violations"].empty());
  CHECK(j["cases"].size() == static_cast<std::size_t>(report.cases_run));
  const std::string csv = report.to_csv();
  CHECK(csv.find("suite,case,lhs,rhs,margin,violation,finding") == 0);
}

TEST_CASE("extension gap closes exactly when V = W") {
  // matrix-unit basis of M_2, arbitrary map images
  std::vector<Matrix> basis;
  std::vector<Matrix> images;
  Rng rng(7);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      Matrix b = Matrix::Zero(2, 2);
      b(i, j) = 1.0;
      basis.push_back(b);
      images.push_back(random_matrix(rng, 2, 2));
    }
  }
  Budgets budgets;
  budgets.restarts = 2;
  budgets.iterations = 20;
  ExtensionGapResult r = extension_gap(basis, images, Exponent(3.0), 2, budgets, 42);
  CHECK(r.gap == 0.0);
  CHECK(r.inconclusive);
}

TEST_CASE("identity map has level norm exactly one") {
  std::vector<Matrix> basis;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      Matrix b = Matrix::Zero(2, 2);
      b(i, j) = 1.0;
      basis.push_back(b);
    }
  }
  Budgets budgets;
  budgets.restarts = 2;
  budgets.iterations = 20;
  ExtensionGapResult r =
      extension_gap(basis, basis, Exponent(3.0), 2, budgets, 42);
  CHECK(r.origin_lower == doctest::Approx(1.0));
  CHECK(r.best_extension_upper == doctest::Approx(1.0));
  CHECK(r.gap == 0.0);
}

TEST_CASE("origin estimate is monotone in the level") {
  std::vector<Matrix> basis;
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  Matrix e22 = Matrix::Zero(2, 2);
  e22(1, 1) = 1.0;
  basis = {e11, e22};
  Budgets budgets;
  budgets.restarts = 2;
  budgets.iterations = 10;
  double previous = 0.0;
  for (int level = 1; level <= 3; ++level) {
    ExtensionGapResult r =
        extension_gap(basis, basis, Exponent(3.0), level, budgets, 42);
    CHECK(r.origin_lower >= previous * (1.0 - 1e-9));
    previous = r.origin_lower;
  }
}

TEST_CASE("extension gap on the diagonal subspace of M_2") {
  std::vector<Matrix> basis;
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  Matrix e22 = Matrix::Zero(2, 2);
  e22(1, 1) = 1.0;
  basis = {e11, e22};
  Budgets budgets;
  budgets.restarts = 3;
  budgets.iterations = 30;
  ExtensionGapResult r =
      extension_gap(basis, basis, Exponent(3.0), 2, budgets, 42);
  // the inclusion extends to the identity with no growth, so the search
  // should land at a small or zero gap
  CHECK(r.origin_lower >= 1.0 - 1e-9);
  CHECK(r.best_extension_upper >= r.origin_lower - 1e-9);
}

TEST_CASE("input validation") {
  std::vector<Matrix> basis = {Matrix::Identity(2, 2)};
  std::vector<Matrix> images;
  CHECK_THROWS_AS(extension_gap(basis, images, Exponent(3.0), 1, {}, 42),
                  InputError);
  images = {Matrix::Identity(3, 3)};
  std::vector<Matrix> bad = {Matrix::Identity(2, 3)};
  CHECK_THROWS_AS(extension_gap(bad, images, Exponent(3.0), 1, {}, 42),
                  InputError);
  std::vector<Matrix> dependent = {Matrix::Identity(2, 2),
                                   Matrix(2.0 * Matrix::Identity(2, 2))};
  std::vector<Matrix> dep_images = dependent;
  CHECK_THROWS_AS(
      extension_gap(dependent, dep_images, Exponent(3.0), 1, {}, 42),
      InputError);
}

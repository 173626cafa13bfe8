#include <catch2/catch_amalgamated.hpp>

#include "gdual/crossed_product.hpp"

using namespace gdual;

namespace {

std::shared_ptr<const GroupDual> dualOf(const std::string& name, uint64_t seed = 0) {
  return std::make_shared<const GroupDual>(makeDual(*builtinGroup(name), seed));
}

MatC coactLift(const CrossedProduct& cp, int p, const MatC& y) {
  const int dp = cp.D->d(p);
  MatC z = MatC::Zero(cp.ambient() * dp, cp.ambient() * dp);
  for (int i = 0; i < dp; ++i)
    for (int j = 0; j < dp; ++j)
      z += kron(cp.coact.apply(entryBlock(y, cp.N, dp, dp, i, j)), matrixUnit(dp, i, j));
  return z;
}

}  // namespace

TEST_CASE("generators have the advertised sizes and unitarity") {
  auto D = dualOf("Z3");
  CrossedProduct cp = buildCrossedProduct(trivialAction(D, 2));
  REQUIRE(cp.ambient() == 6);
  REQUIRE(cp.dim() == 12);
  for (int p = 0; p < D->k(); ++p) {
    MatC u = cp.lambdaRep(p);
    REQUIRE((u.adjoint() * u - eye(u.rows())).norm() < 1e-12);
  }
  REQUIRE((cp.lambda(0, 0, 0) - eye(6)).norm() < 1e-12);
}

TEST_CASE("the translations implement the action on the embedded factor") {
  for (const auto& name : {"Z4", "S3"}) {
    INFO(name);
    auto D = dualOf(name);
    DualAction act = productModelAction(D, 1);
    CrossedProduct cp = buildCrossedProduct(act);
    Rng rng(3);
    double worst = 0;
    for (int rep = 0; rep < 3; ++rep) {
      MatC x = rng.gaussian(cp.N, cp.N);
      MatC emb = cp.alpha(x);
      for (int p = 0; p < D->k(); ++p) {
        MatC u = cp.lambdaRep(p);
        MatC lhs = u * kron(emb, eye(D->d(p))) * u.adjoint();
        worst = std::max(worst, (lhs - coactLift(cp, p, act.apply(p, x))).norm());
      }
    }
    INFO(worst);
    REQUIRE(worst < 1e-9);
  }
}

TEST_CASE("the dual translations act by the right regular transformation law") {
  auto D = dualOf("S3");
  CrossedProduct cp = buildCrossedProduct(productModelAction(D, 1));
  const Group& G = D->G;
  Rng rng(5);
  MatC m = rng.gaussian(cp.N, cp.N);
  double worst = 0;
  for (int g = 0; g < G.n; ++g) {
    worst = std::max(worst, (applyDualHat(cp, g, cp.alpha(m)) - cp.alpha(m)).norm());
    for (int p = 0; p < D->k(); ++p) {
      const int dp = D->d(p);
      for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dp; ++j) {
          MatC want = MatC::Zero(cp.ambient(), cp.ambient());
          for (int k = 0; k < dp; ++k) want += D->irr[p].mats[g](k, j) * cp.lambda(p, i, k);
          worst = std::max(worst, (applyDualHat(cp, g, cp.lambda(p, i, j)) - want).norm());
        }
    }
  }
  REQUIRE(worst < 1e-12);
}

TEST_CASE("the expectation is a trace preserving conditional expectation") {
  auto D = dualOf("S3");
  CrossedProduct cp = buildCrossedProduct(productModelAction(D, 1));
  Rng rng(9);
  MatC m = rng.gaussian(cp.N, cp.N);
  for (int t = 0; t < cp.H.dim; ++t) {
    MatC got = conditionalExpectation(cp, cp.alpha(m) * cp.lam[t]);
    MatC want = t == 0 ? m : MatC(MatC::Zero(cp.N, cp.N));
    REQUIRE((got - want).norm() < 1e-9);
  }
  std::vector<MatC> coef;
  for (int t = 0; t < cp.H.dim; ++t) coef.push_back(rng.gaussian(cp.N, cp.N));
  MatC A = assembleElement(cp, coef);
  MatC m1 = rng.gaussian(cp.N, cp.N), m2 = rng.gaussian(cp.N, cp.N);
  MatC lhs = conditionalExpectation(cp, cp.alpha(m1) * A * cp.alpha(m2));
  REQUIRE((lhs - m1 * conditionalExpectation(cp, A) * m2).norm() < 1e-9);
  REQUIRE(std::abs(tau(cp.alpha(conditionalExpectation(cp, A))) - tau(A)) < 1e-10);
  Eigen::SelfAdjointEigenSolver<MatC> es(conditionalExpectation(cp, A.adjoint() * A));
  REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("expansion round trips and push down solves the corner equation") {
  auto D = dualOf("Z4");
  CrossedProduct cp = buildCrossedProduct(productModelAction(D, 1));
  Rng rng(17);
  MatC e = jonesProjection(cp);
  REQUIRE(normTau2(e * e - e) < 1e-12);
  REQUIRE(normTau2(e.adjoint() - e) < 1e-12);
  REQUIRE(normTau2(conditionalExpectation(cp, e) - eye(cp.N) / double(D->n())) < 1e-12);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<MatC> coef;
    for (int t = 0; t < cp.H.dim; ++t) coef.push_back(rng.gaussian(cp.N, cp.N));
    MatC A = assembleElement(cp, coef);
    Expansion ex = expandElement(cp, A);
    double res = 0;
    for (int t = 0; t < cp.H.dim; ++t) res = std::max(res, normTau2(ex.coef[t] - coef[t]));
    REQUIRE(res < 1e-10);
    MatC b = pushDown(cp, A);
    REQUIRE(normTau2(A * e - cp.alpha(b) * e) < 1e-10);
  }
}

TEST_CASE("the dual fixed points are exactly the embedded factor") {
  for (const auto& name : {"Z3", "S3"}) {
    INFO(name);
    auto D = dualOf(name);
    DualAction act = name[0] == 'Z' ? trivialAction(D, 2) : productModelAction(D, 1);
    CrossedProduct cp = buildCrossedProduct(act);
    auto fixed = hatFixedPoints(cp);
    REQUIRE(int(fixed.size()) == cp.N * cp.N);
    double worst = 0;
    for (const MatC& f : fixed)
      for (int g = 0; g < D->n(); ++g)
        worst = std::max(worst, (applyDualHat(cp, g, f) - f).norm());
    REQUIRE(worst < 1e-10);
    for (int a = 0; a < cp.N; ++a)
      for (int b = 0; b < cp.N; ++b)
        REQUIRE(spanResidual(fixed, cp.coact.img[size_t(a) * cp.N + b]) < 1e-9);
    for (const MatC& f : fixed) REQUIRE(spanResidual(cp.coact.img, f) < 1e-9);
  }
}

TEST_CASE("both relative commutant solvers see the same algebra") {
  auto D = dualOf("Z3");
  CrossedProduct triv = buildCrossedProduct(trivialAction(D, 2));
  RelativeCommutant rc = relativeCommutant(triv);
  REQUIRE(rc.dimDirect == D->n());
  REQUIRE(rc.dimDirect == rc.dimSplit);
  REQUIRE(rc.mapResidual < 1e-8);
  double worst = 0;
  for (const MatC& x : rc.basis)
    for (int a = 0; a < triv.N; ++a)
      for (int b = 0; b < triv.N; ++b) {
        const MatC& m = triv.coact.img[size_t(a) * triv.N + b];
        worst = std::max(worst, (m * x - x * m).norm());
      }
  REQUIRE(worst < 1e-8);

  auto DS = dualOf("S3");
  CrossedProduct model = buildCrossedProduct(productModelAction(DS, 1));
  RelativeCommutant rm = relativeCommutant(model);
  REQUIRE(rm.dimDirect == rm.dimSplit);
  REQUIRE(rm.dimDirect == DS->n());
  REQUIRE(rm.mapResidual < 1e-8);
}

TEST_CASE("broken inputs are rejected with the right errors") {
  auto D = dualOf("Z3");
  DualAction bad = trivialAction(D, 2);
  bad.img[1][1] *= 0.5;
  CHECK_THROWS_AS(buildCrossedProduct(bad), ActionInvalid);

  CrossedProduct cp = buildCrossedProduct(trivialAction(D, 2));
  CHECK_THROWS_AS(expandElement(cp, MatC(cp.hatU[1])), NotInAlgebra);
}

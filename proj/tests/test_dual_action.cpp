#include <catch2/catch_amalgamated.hpp>

#include "gdual/model_action.hpp"

using namespace gdual;

namespace {

std::shared_ptr<const GroupDual> dualOf(const std::string& name, uint64_t seed = 0) {
  return std::make_shared<const GroupDual>(makeDual(*builtinGroup(name), seed));
}

}  // namespace

TEST_CASE("the trivial action is a valid action with full fixed algebra") {
  for (const auto& name : {"S3", "Q8"}) {
    INFO(name);
    auto D = dualOf(name);
    DualAction act = trivialAction(D, 2);
    auto report = checkAction(act);
    INFO(report.summary());
    REQUIRE(report.pass());
    REQUIRE(fixedPointAlgebra(act).size() == 4);
  }
}

TEST_CASE("conjugating a representation gives a valid action") {
  auto D = dualOf("D4");
  DualRepresentation lam = modelRepresentation(D);
  DualAction act = adAction(lam);
  auto report = checkAction(act);
  INFO(report.summary());
  REQUIRE(report.pass());
  REQUIRE(coactionIdentityResidual(coactionFromRoberts(act)) < 1e-9);
}

TEST_CASE("the model action fixes a maximal abelian algebra of functions") {
  for (const auto& name : {"Z4", "S3"}) {
    INFO(name);
    auto D = dualOf(name);
    DualAction act = productModelAction(D, 1);
    auto fixed = fixedPointAlgebra(act);
    REQUIRE(int(fixed.size()) == D->n());
    REQUIRE(spanResidual(fixed, eye(D->n())) < 1e-9);
    double worst = 0;
    for (const MatC& x : fixed)
      for (const MatC& y : fixed) {
        worst = std::max(worst, (x * y - y * x).norm());
        worst = std::max(worst, spanResidual(fixed, x * y));
      }
    REQUIRE(worst < 1e-8);
  }
}

TEST_CASE("amplification keeps validity and scales the fixed algebra") {
  auto D = dualOf("Z3");
  DualAction act = amplify(productModelAction(D, 1), 2);
  auto report = checkAction(act);
  INFO(report.summary());
  REQUIRE(report.pass());
  REQUIRE(fixedPointAlgebra(act).size() == 12);
}

TEST_CASE("the freeness obstruction space always has the square dimension") {
  for (const auto& name : {"Z2", "Z3", "S3"}) {
    INFO(name);
    auto D = dualOf(name);
    DualAction triv = trivialAction(D, 2);
    DualAction model = productModelAction(D, 1);
    for (int p = 0; p < D->k(); ++p) {
      const int dp = D->d(p);
      REQUIRE(freenessObstruction(triv, p) == dp * dp);
      REQUIRE(freenessObstruction(model, p) == dp * dp);
    }
  }
}

TEST_CASE("the freeness probe refuses oversized systems") {
  auto D = dualOf("S3");
  DualAction act = trivialAction(D, 33);
  CHECK_THROWS_AS(freenessObstruction(act, 2), CapExceeded);
}

TEST_CASE("roberts and coaction forms convert back and forth") {
  auto D = dualOf("S3");
  DualAction act = productModelAction(D, 1);
  Coaction c = coactionFromRoberts(act);
  REQUIRE(coactionIdentityResidual(c) < 1e-9);
  DualAction back = robertsFromCoaction(c);
  double gap = 0;
  for (int p = 0; p < D->k(); ++p)
    for (size_t u = 0; u < act.img[p].size(); ++u)
      gap = std::max(gap, (act.img[p][u] - back.img[p][u]).norm());
  REQUIRE(gap < 1e-12);
}

TEST_CASE("dual matrix units multiply like matrix units and resolve the identity") {
  for (const auto& name : {"S3", "Q8"}) {
    INFO(name);
    auto D = dualOf(name);
    auto units = dualMatrixUnits(*D);
    const int n = D->n();
    MatC sum = MatC::Zero(n, n);
    double worst = 0;
    for (int p = 0; p < D->k(); ++p) {
      const int dp = D->d(p);
      for (int i = 0; i < dp; ++i) {
        sum += units[p][size_t(i) * dp + i];
        for (int j = 0; j < dp; ++j) {
          worst = std::max(worst, (units[p][size_t(i) * dp + j].adjoint() -
                                   units[p][size_t(j) * dp + i])
                                      .norm());
          for (int q = 0; q < D->k(); ++q) {
            const int dq = D->d(q);
            for (int k = 0; k < dq; ++k)
              for (int l = 0; l < dq; ++l) {
                MatC prod = units[p][size_t(i) * dp + j] * units[q][size_t(k) * dq + l];
                MatC want = (p == q && j == k) ? units[p][size_t(i) * dp + l]
                                               : MatC::Zero(n, n);
                worst = std::max(worst, (prod - want).norm());
              }
          }
        }
      }
    }
    REQUIRE(worst < 1e-9);
    REQUIRE((sum - eye(n)).norm() < 1e-9);
  }
}

TEST_CASE("unitary transport is detected as conjugacy") {
  auto D = dualOf("S3");
  DualAction a = productModelAction(D, 1);
  Rng rng(7);
  MatC u = rng.unitary(a.N);
  DualAction b = actionFromFunction(D, a.N, [&](int p, const MatC& x) -> MatC {
    const MatC lift = kron(u, eye(D->d(p)));
    return lift * a.apply(p, u.adjoint() * x * u) * lift.adjoint();
  });
  auto report = areConjugate(a, b, u);
  INFO(report.summary());
  REQUIRE(report.pass());
  auto bad = areConjugate(a, b, eye(a.N));
  REQUIRE_FALSE(bad.pass());
}

#include <catch2/catch_amalgamated.hpp>

#include "gdual/model_action.hpp"

using namespace gdual;

namespace {

std::shared_ptr<const GroupDual> dualOf(const std::string& name, uint64_t seed = 0) {
  return std::make_shared<const GroupDual>(makeDual(*builtinGroup(name), seed));
}

double unitGap(const MatrixUnitSystem& a, const MatrixUnitSystem& b) {
  double gap = 0;
  for (size_t i = 0; i < a.e.size(); ++i) gap = std::max(gap, (a.e[i] - b.e[i]).norm());
  return gap;
}

}  // namespace

TEST_CASE("the model family is a representation beyond the small groups") {
  for (const auto& name : {"Z4", "D4", "Q8"}) {
    INFO(name);
    auto D = dualOf(name);
    auto report = checkRepresentation(modelRepresentation(D));
    INFO(report.summary());
    REQUIRE(report.pass());
  }
}

TEST_CASE("the model family recovers the standard units from the corner") {
  for (const auto& name : {"Z4", "S3", "Q8"}) {
    INFO(name);
    auto D = dualOf(name);
    DualRepresentation lam = modelRepresentation(D);
    MatrixUnitSystem E = standardMatrixUnits(D);
    MatrixUnitSystem F = matrixUnitsFromLambda(lam, E.at(0, 0));
    REQUIRE_NOTHROW(validateMatrixUnits(F));
    REQUIRE(unitGap(E, F) < 1e-9);
  }
}

TEST_CASE("conjugated units transport the family and stay equivariant") {
  auto D = dualOf("S3");
  const int n = D->n();
  Rng rng(11);
  MatC v = rng.unitary(n);
  MatrixUnitSystem E = standardMatrixUnits(D);
  MatrixUnitSystem F = conjugateSystem(E, v);
  REQUIRE_NOTHROW(validateMatrixUnits(F));

  DualRepresentation lam = lambdaFromMatrixUnits(D, E);
  DualRepresentation mu = lambdaFromMatrixUnits(D, F);
  double gap = 0;
  for (int p = 0; p < D->k(); ++p) {
    MatC lift = kron(v, eye(D->d(p)));
    gap = std::max(gap, (mu.U[p] - lift * lam.U[p] * lift.adjoint()).norm());
  }
  REQUIRE(gap < 1e-9);

  MatrixUnitSystem back = matrixUnitsFromLambda(mu, F.at(0, 0));
  REQUIRE(unitGap(F, back) < 1e-9);

  DualAction base = productModelAction(D, 1);
  DualAction moved = actionFromFunction(D, n, [&](int p, const MatC& x) -> MatC {
    const MatC lift = kron(v, eye(D->d(p)));
    return lift * base.apply(p, v.adjoint() * x * v) * lift.adjoint();
  });
  auto report = checkEquivariant(F, moved);
  INFO(report.summary());
  REQUIRE(report.pass());
}

TEST_CASE("the standard units are equivariant for the level one action") {
  for (const auto& name : {"Z3", "S3"}) {
    INFO(name);
    auto D = dualOf(name);
    auto report = checkEquivariant(standardMatrixUnits(D), productModelAction(D, 1));
    INFO(report.summary());
    REQUIRE(report.pass());
  }
}

TEST_CASE("level two unitaries represent the dual on the doubled slot") {
  auto D = dualOf("Z2");
  DualRepresentation lam = productModelUnitaries(D, 2);
  REQUIRE(lam.N == 4);
  auto report = checkRepresentation(lam);
  INFO(report.summary());
  REQUIRE(report.pass());

  auto act = productModelAction(D, 2);
  auto areport = checkAction(act);
  INFO(areport.summary());
  REQUIRE(areport.pass());
}

TEST_CASE("levels that blow the ambient budget are refused") {
  CHECK_THROWS_AS(productModelUnitaries(dualOf("S4"), 2), CapExceeded);
  CHECK_THROWS_AS(productModelAction(dualOf("Z3"), 6), CapExceeded);
  CHECK_THROWS_AS(productModelUnitaries(dualOf("Z2"), 0), CapExceeded);
}

TEST_CASE("broken unit systems are rejected") {
  auto D = dualOf("Z3");
  MatrixUnitSystem E = standardMatrixUnits(D);
  MatrixUnitSystem bad = E;
  bad.at(0, 1) *= 2.0;
  CHECK_THROWS_AS(validateMatrixUnits(bad), InvalidMatrixUnits);
  MatrixUnitSystem shrunk = E;
  shrunk.e.pop_back();
  CHECK_THROWS_AS(validateMatrixUnits(shrunk), InvalidMatrixUnits);
  MatrixUnitSystem scaled = E;
  for (MatC& m : scaled.e) m *= 0.5;
  CHECK_THROWS_AS(validateMatrixUnits(scaled), InvalidMatrixUnits);
}

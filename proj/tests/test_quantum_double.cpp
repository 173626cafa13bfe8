#include <catch2/catch_amalgamated.hpp>

#include "gdual/cocycle.hpp"
#include "gdual/model_action.hpp"
#include "gdual/quantum_double.hpp"

using namespace gdual;

namespace {

DoubleDual doubleOf(const std::string& name) {
  auto G = builtinGroup(name);
  REQUIRE(G.has_value());
  return buildDoubleDual(*G);
}

QuantumDouble trivialFactorDouble(const DoubleDual& dd, int N) {
  DualAction a = trivialAction(dd.base, N);
  CrossedProduct cp = buildCrossedProduct(doubleAction(dd, a, a));
  DualRepresentation w = doubleUnitary(dd, cp);
  return buildQuantumDouble(dd, cp, w);
}

}  // namespace

TEST_CASE("the double dual squares the group data") {
  DoubleDual z2 = doubleOf("Z2");
  REQUIRE(z2.D2->k() == 4);
  for (int c = 0; c < 4; ++c) REQUIRE(z2.D2->d(c) == 1);

  DoubleDual s3 = doubleOf("S3");
  REQUIRE(s3.D2->k() == 9);
  REQUIRE(s3.D2->n() == 36);
  long sq = 0;
  for (int c = 0; c < s3.D2->k(); ++c) sq += long(s3.D2->d(c)) * s3.D2->d(c);
  REQUIRE(sq == 36);
  for (int p = 0; p < s3.base->k(); ++p)
    for (int q = 0; q < s3.base->k(); ++q)
      REQUIRE(s3.D2->d(s3.classOf(p, q)) == s3.base->d(p) * s3.base->d(q));

  auto s4 = builtinGroup("S4");
  REQUIRE(s4.has_value());
  REQUIRE_THROWS_AS(buildDoubleDual(*s4), CapExceeded);
}

TEST_CASE("the trivial group collapses to the factor") {
  DoubleDual dd = buildDoubleDual(cyclicGroup(1));
  QuantumDouble qd = trivialFactorDouble(dd, 3);
  REQUIRE(qd.ambient() == 3);
  REQUIRE(qd.dim() == 9);
  REQUIRE(resNorm(qd.w.U[0] - eye(3)) < 1e-12);
  CheckReport rep = checkQuantumDouble(qd);
  INFO(rep.summary());
  REQUIRE(rep.pass());
}

TEST_CASE("a trivial factor gives the group algebra of the double") {
  for (const std::string& name : {"Z2", "Z3"}) {
    INFO(name);
    DoubleDual dd = doubleOf(name);
    QuantumDouble qd = trivialFactorDouble(dd, 1);
    const int n = dd.base->n();
    REQUIRE(qd.ambient() == n * n);
    REQUIRE(qd.dim() == n);

    CheckReport rep = checkQuantumDouble(qd);
    INFO(rep.summary());
    REQUIRE(rep.pass());
    CheckReport fix = fixedPointCheck(qd);
    INFO(fix.summary());
    REQUIRE(fix.pass());
  }
}

TEST_CASE("the opposite action inverts itself and stays valid") {
  auto G = builtinGroup("S3");
  REQUIRE(G.has_value());
  auto D = std::make_shared<GroupDual>(makeDual(*G));
  DualAction a = productModelAction(D, 1);
  DualAction b = oppositeAction(a);

  CheckReport rep = checkAction(b);
  INFO(rep.summary());
  REQUIRE(rep.pass());

  DualAction c = oppositeAction(b);
  double back = 0;
  for (int p = 0; p < D->k(); ++p)
    for (size_t u = 0; u < a.img[p].size(); ++u)
      back = std::max(back, (c.img[p][u] - a.img[p][u]).norm());
  REQUIRE(back < 1e-12);

  // The model action is symmetric under the transpose; its transport by a
  // generic unitary is not.
  Rng rng(fnv1a("opposite witness"));
  const MatC u = rng.unitary(a.N);
  DualAction moved = actionFromFunction(D, a.N, [&](int p, const MatC& x) -> MatC {
    const MatC lift = kron(u, eye(D->d(p)));
    return lift * a.apply(p, u.adjoint() * x * u) * lift.adjoint();
  });
  DualAction opp = oppositeAction(moved);
  CheckReport prep = checkAction(opp);
  INFO(prep.summary());
  REQUIRE(prep.pass());
  double gap = 0;
  for (int p = 0; p < D->k(); ++p)
    for (size_t t = 0; t < moved.img[p].size(); ++t)
      gap = std::max(gap, (opp.img[p][t] - moved.img[p][t]).norm());
  REQUIRE(gap > 1e-3);
}

TEST_CASE("the model pair on M6 implements the double of S3") {
  DoubleDual dd = doubleOf("S3");
  DualAction a = productModelAction(dd.base, 1);
  DualAction act = doubleAction(dd, a, oppositeAction(a));
  CrossedProduct cp = buildCrossedProduct(act);
  REQUIRE(cp.ambient() == 6 * 36);

  DualRepresentation w = doubleUnitary(dd, cp);
  QuantumDouble qd = buildQuantumDouble(dd, cp, w);
  REQUIRE(qd.dim() == 216);

  CheckReport rep = checkQuantumDouble(qd, 1e-8);
  INFO(rep.summary());
  REQUIRE(rep.pass());

  CheckReport fix = fixedPointCheck(qd, 1e-8);
  INFO(fix.summary());
  REQUIRE(fix.pass());
}

TEST_CASE("mismatched inputs are rejected") {
  DoubleDual dd = doubleOf("Z3");

  DualAction plain = trivialAction(dd.base, 1);
  CrossedProduct baseCp = buildCrossedProduct(plain);
  REQUIRE_THROWS_AS(doubleUnitary(dd, baseCp), NotDoubleAction);

  DualAction a = trivialAction(dd.base, 1);
  CrossedProduct cp = buildCrossedProduct(doubleAction(dd, a, a));
  DualRepresentation w = doubleUnitary(dd, cp);

  DualRepresentation flat = w;
  flat.U[1] = eye(flat.U[1].rows());
  flat.U[2] = eye(flat.U[2].rows());
  REQUIRE_THROWS_AS(buildQuantumDouble(dd, cp, flat), NotDoubleAction);
}

TEST_CASE("expansion lives on the double and rejects outsiders") {
  DoubleDual dd = doubleOf("Z2");
  QuantumDouble qd = trivialFactorDouble(dd, 1);

  Rng rng(fnv1a("double outsiders"));
  std::vector<MatC> coef(size_t(qd.H.dim));
  for (auto& c : coef) c = rng.gaussian(1, 1);
  DoubleExpansion ex = expandDouble(qd, assembleDouble(qd, coef), 1e-9);
  for (int t = 0; t < qd.H.dim; ++t) REQUIRE((ex.coef[t] - coef[t]).norm() < 1e-10);

  // The one-sided leg lambda_{pi (x) 1} is in the ambient crossed product but
  // not in the double.
  const MatC v = qd.cp.lam[size_t(qd.cp.H.index(dd.classOf(1, 0), 0, 0))];
  REQUIRE_THROWS_AS(expandDouble(qd, v, 1e-9), NotInAlgebra);
}

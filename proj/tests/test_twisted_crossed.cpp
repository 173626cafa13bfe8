#include <catch2/catch_amalgamated.hpp>

#include "gdual/model_action.hpp"
#include "gdual/twisted_crossed.hpp"

using namespace gdual;

namespace {

std::shared_ptr<const GroupDual> dualOf(const std::string& name, uint64_t seed = 0) {
  return std::make_shared<GroupDual>(makeDual(*builtinGroup(name), seed));
}

std::vector<MatC> seededFamily(const GroupDual& D, int N, uint64_t seed) {
  Rng rng(seed);
  std::vector<MatC> w(D.k());
  w[0] = eye(N);
  for (int p = 1; p < D.k(); ++p) w[p] = rng.unitary(N * D.d(p));
  return w;
}

TwistedAction perturbedCocycle(std::shared_ptr<const GroupDual> D, int N, uint64_t seed) {
  DualAction act = trivialAction(D, N);
  return cocycleFromPerturbation(act, seededFamily(*D, N, seed));
}

}  // namespace

TEST_CASE("the trivial cocycle reproduces the crossed product") {
  for (const char* g : {"Z2", "Z3"}) {
    auto D = dualOf(g);
    DualAction act = productModelAction(D, 1);
    REQUIRE(checkUntwistedDegeneration(act) < 1e-8);
  }
}

TEST_CASE("perturbation cocycles build a valid twisted product") {
  auto D = dualOf("S3");
  TwistedAction ta = perturbedCocycle(D, 2, 7);
  TwistedCrossedProduct T = buildTwistedCrossedProduct(ta);
  REQUIRE(T.ambient() == 24);
  REQUIRE(T.dim() == 24);

  auto rep = checkTwistedCrossedProduct(T, 1e-8);
  INFO(rep.summary());
  REQUIRE(rep.pass());
}

TEST_CASE("the coefficient identity holds for perturbation cocycles") {
  for (const char* g : {"Z3", "S3"}) {
    auto D = dualOf(g);
    TwistedAction ta = perturbedCocycle(D, 2, 11);
    auto rep = lemmaUCheck(ta, 1e-9);
    INFO(rep.summary());
    REQUIRE(rep.pass());
  }
}

TEST_CASE("a corrupted cocycle breaks the coefficient identity") {
  auto D = dualOf("S3");
  TwistedAction ta = perturbedCocycle(D, 2, 11);
  Rng rng(23);
  int p = 1, q = D->barOf[1];
  ta.U[p][q] = kron(rng.unitary(2), eye(D->d(p) * D->d(q))) * ta.U[p][q];
  auto rep = lemmaUCheck(ta, 1e-9);
  auto item = rep.find("coefficient identity");
  REQUIRE(item != nullptr);
  REQUIRE(item->residual > 1e-4);
  REQUIRE_THROWS_AS(buildTwistedCrossedProduct(ta), TwistedActionInvalid);
}

TEST_CASE("quaternionic classes carry an antisymmetric pairing and the sign") {
  auto D = dualOf("Q8");
  auto pairing = conjugatePairings(*D);
  bool sawQuaternionic = false;
  for (int p = 0; p < D->k(); ++p) {
    if (D->barOf[p] != p || D->d(p) == 1) continue;
    sawQuaternionic = true;
    REQUIRE((pairing[p] + pairing[p].transpose()).norm() < 1e-9);
    MatC g = pairing[p] * pairing[p].conjugate();
    REQUIRE((g + eye(D->d(p))).norm() < 1e-9);
  }
  REQUIRE(sawQuaternionic);

  TwistedAction ta = perturbedCocycle(D, 2, 5);
  auto rep = lemmaUCheck(ta, 1e-9);
  INFO(rep.summary());
  REQUIRE(rep.pass());

  auto tcp = checkTwistedCrossedProduct(buildTwistedCrossedProduct(ta), 1e-8);
  INFO(tcp.summary());
  REQUIRE(tcp.pass());
}

TEST_CASE("expansion recovers coefficients and rejects outsiders") {
  auto D = dualOf("Z4");
  TwistedAction ta = perturbedCocycle(D, 2, 3);
  TwistedCrossedProduct T = buildTwistedCrossedProduct(ta);

  Rng rng(41);
  std::vector<MatC> coef(T.H.dim);
  for (int t = 0; t < T.H.dim; ++t) coef[t] = rng.gaussian(2, 2);
  MatC x = assembleTwisted(T, coef);
  auto E = twistedExpand(T, x, 1e-10);
  REQUIRE(E.residual < 1e-10);
  for (int t = 0; t < T.H.dim; ++t)
    REQUIRE((E.coef[t] - coef[t]).cwiseAbs().maxCoeff() < 1e-10);

  MatC m = rng.hermitian(2);
  REQUIRE((T.expect(T.alpha(m)) - m).norm() < 1e-12);
  for (int p = 1; p < D->k(); ++p) REQUIRE(T.expect(T.lambda(p, 0, 0)).norm() < 1e-12);

  MatC bad = x + 0.1 * rng.hermitian(int(T.ambient()));
  REQUIRE_THROWS_AS(twistedExpand(T, bad, 1e-6), NotInAlgebra);
}

TEST_CASE("the trivial group collapses to the factor") {
  auto D = std::make_shared<GroupDual>(makeDual(cyclicGroup(1)));
  TwistedCrossedProduct T = buildTwistedCrossedProduct(untwisted(trivialAction(D, 3)));
  REQUIRE(T.ambient() == 9);
  REQUIRE(T.dim() == 9);
  Rng rng(2);
  MatC m = rng.gaussian(3, 3);
  REQUIRE((T.expect(T.alpha(m)) - m).norm() < 1e-12);
  REQUIRE(std::abs(T.tau(T.alpha(m)) - m.trace() / 3.0) < 1e-12);
}

TEST_CASE("standardized duals give entrywise conjugate partners") {
  for (const char* g : {"Z4", "S3", "D4", "S4"}) {
    auto D = dualOf(g);
    for (int p = 0; p < D->k(); ++p) {
      int q = D->barOf[p];
      for (int h = 0; h < D->n(); ++h)
        REQUIRE((D->irr[p].mats[h].conjugate() - D->irr[q].mats[h]).cwiseAbs().maxCoeff() <
                1e-10);
    }
    auto pairing = conjugatePairings(*D);
    for (int p = 0; p < D->k(); ++p) REQUIRE((pairing[p] - eye(D->d(p))).norm() < 1e-10);
  }
}

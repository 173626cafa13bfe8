#include <catch2/catch_amalgamated.hpp>

#include "gdual/intertwiner.hpp"

using namespace gdual;

namespace {

const std::vector<std::string> kGroups = {"Z2", "Z3", "Z4", "S3", "D4", "Q8", "S4"};

GroupDual dualOf(const std::string& name, uint64_t seed = 0) {
  return makeDual(*builtinGroup(name), seed);
}

MatC tensorAt(const GroupDual& D, int p, int q, int g) {
  return kron(D.irr[p].mats[g], D.irr[q].mats[g]);
}

}  // namespace

TEST_CASE("intertwiner bases are equivariant orthonormal isometries") {
  for (const auto& name : kGroups) {
    for (uint64_t seed : {0, 1}) {
      INFO(name << " seed " << seed);
      GroupDual D = dualOf(name, seed);
      for (int p = 0; p < D.k(); ++p)
        for (int q = 0; q < D.k(); ++q) {
          const auto label = RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q));
          std::vector<const MatC*> all;
          for (int s = 0; s < D.k(); ++s) {
            const auto& onb = intertwinerONB(D, s, label);
            REQUIRE(int(onb.size()) == D.fus[p][q][s]);
            for (const MatC& T : onb) {
              REQUIRE((T.adjoint() * T - eye(D.d(s))).norm() < 1e-9);
              double eq = 0;
              for (int g = 0; g < D.n(); ++g)
                eq = std::max(eq, (tensorAt(D, p, q, g) * T - T * D.irr[s].mats[g]).norm());
              REQUIRE(eq < 1e-9);
              all.push_back(&T);
            }
          }
          // mutual orthogonality and completeness of the channel decomposition
          for (size_t a = 0; a < all.size(); ++a)
            for (size_t b = a + 1; b < all.size(); ++b)
              REQUIRE((all[a]->adjoint() * *all[b]).norm() < 1e-9);
          MatC sum = MatC::Zero(Eigen::Index(D.d(p)) * D.d(q), Eigen::Index(D.d(p)) * D.d(q));
          for (const MatC* T : all) sum += *T * T->adjoint();
          REQUIRE((sum - eye(sum.rows())).norm() < 1e-8);
        }
    }
  }
}

TEST_CASE("the trivial channel of pi x bar pi carries the canonical isometry") {
  for (const auto& name : kGroups) {
    INFO(name);
    GroupDual D = dualOf(name);
    for (int p = 0; p < D.k(); ++p) {
      const int dp = D.d(p);
      const auto& onb = intertwinerONB(
          D, 0, RepLabel::tensor(RepLabel::irr(p), RepLabel::bar(RepLabel::irr(p))));
      REQUIRE(onb.size() == 1);
      // sum_k T_{(k,k)} = sqrt(d) and every off-diagonal pair vanishes
      cxd diag = 0;
      for (int k = 0; k < dp; ++k) diag += onb[0](Eigen::Index(k) * dp + k, 0);
      REQUIRE(std::abs(diag - cxd(std::sqrt(double(dp)), 0)) < 1e-12);
      REQUIRE((onb[0] - canonicalDualIsometry(dp)).norm() < 1e-12);
    }
  }
}

TEST_CASE("nontrivial channels of pi x bar pi annihilate the diagonal sum") {
  for (const auto& name : {"S3", "D4", "Q8", "S4"}) {
    INFO(name);
    GroupDual D = dualOf(name);
    for (int p = 0; p < D.k(); ++p) {
      const int dp = D.d(p);
      const int pb = D.barOf[p];
      for (int s = 1; s < D.k(); ++s)
        for (const MatC& T : intertwinerONB(
                 D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(pb)))) {
          // pairing against the invariant vector: only exact when bar(pi) is
          // entrywise, which standardization provides away from quaternionic
          // classes; test through the honest invariant vector instead.
          MatC Q = MatC::Zero(Eigen::Index(dp) * D.d(pb), Eigen::Index(dp) * D.d(pb));
          for (int g = 0; g < D.n(); ++g) Q += tensorAt(D, p, pb, g);
          Q /= double(D.n());
          REQUIRE((Q * T).norm() < 1e-9);
        }
    }
  }
}

TEST_CASE("the frobenius basis lands in the partner space with the right entries") {
  for (const auto& name : {"Z4", "S3", "D4", "S4"}) {
    INFO(name);
    GroupDual D = dualOf(name);
    for (int p = 0; p < D.k(); ++p)
      for (int q = 0; q < D.k(); ++q)
        for (int s = 0; s < D.k(); ++s) {
          if (D.fus[p][q][s] == 0) continue;
          const auto& onb =
              intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)));
          auto flipped = frobeniusBasis(D, p, RepLabel::irr(q), RepLabel::irr(s), onb);
          REQUIRE(flipped.size() == onb.size());
          const int pb = D.barOf[p];
          for (const MatC& R : flipped) {
            REQUIRE((R.adjoint() * R - eye(D.d(q))).norm() < 1e-8);
            double eq = 0;
            for (int g = 0; g < D.n(); ++g)
              eq = std::max(eq, (kron(D.irr[pb].mats[g], D.irr[s].mats[g]) * R -
                                 R * D.irr[q].mats[g])
                                    .norm());
            REQUIRE(eq < 1e-8);
          }
        }
  }
}

TEST_CASE("recoupling matrices are unitary") {
  for (const auto& name : kGroups) {
    for (uint64_t seed : {0, 1}) {
      INFO(name << " seed " << seed);
      GroupDual D = dualOf(name, seed);
      for (int p = 0; p < D.k(); ++p)
        for (int q = 0; q < D.k(); ++q)
          for (int r = 0; r < D.k(); ++r)
            for (int xi = 0; xi < D.k(); ++xi) {
              MatC V = recouplingUnitary(D, p, q, r, xi);
              if (V.rows() == 0) continue;
              REQUIRE(V.rows() == V.cols());
              REQUIRE((V.adjoint() * V - eye(V.rows())).norm() < 1e-8);
            }
    }
  }
}

TEST_CASE("different seeds mix the basis but span the same space") {
  // same irreducibles, different mixing seed: multiplicity two and higher only
  // shows up in iterated products, so probe std (x) (std (x) std) of S3
  GroupDual a = dualOf("S3", 0);
  GroupDual b = makeDualFromIrreps(a.G, a.irr, 1);
  const int std3 = 2;
  const auto label = RepLabel::tensor(
      RepLabel::irr(std3), RepLabel::tensor(RepLabel::irr(std3), RepLabel::irr(std3)));
  bool mixed = false;
  for (int s = 0; s < a.k(); ++s) {
    const auto& ta = intertwinerONB(a, s, label);
    const auto& tb = intertwinerONB(b, s, label);
    REQUIRE(ta.size() == tb.size());
    if (ta.empty()) continue;
    MatC pa = MatC::Zero(ta[0].rows(), ta[0].rows());
    MatC pb = pa;
    for (const MatC& T : ta) pa += T * T.adjoint();
    for (const MatC& T : tb) pb += T * T.adjoint();
    REQUIRE((pa - pb).norm() < 1e-8);
    if (ta.size() > 1 && (ta[0] - tb[0]).norm() > 1e-6) mixed = true;
  }
  REQUIRE(mixed);

  // and the same seed reproduces the same basis matrices exactly
  GroupDual c = dualOf("S3", 0);
  for (int s = 0; s < a.k(); ++s) {
    const auto& ta = intertwinerONB(a, s, label);
    const auto& tc = intertwinerONB(c, s, label);
    for (size_t m = 0; m < ta.size(); ++m) REQUIRE((ta[m] - tc[m]).norm() == 0.0);
  }
}

TEST_CASE("extension to composite labels reproduces the tensor of families") {
  GroupDual D = dualOf("S3");
  // the family pi |-> pi(g) extends to any label as the label evaluated at g
  for (int g : {1, 3}) {
    std::vector<MatC> fam;
    for (int p = 0; p < D.k(); ++p) fam.push_back(D.irr[p].mats[g]);
    for (int p = 0; p < D.k(); ++p)
      for (int q = 0; q < D.k(); ++q) {
        const auto label = RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q));
        MatC ext = extendFamilyToRep(D, fam, 1, label);
        REQUIRE((ext - tensorAt(D, p, q, g)).norm() < 1e-8);
      }
  }
}

#pragma once

#include "model_action.hpp"

namespace gdual {

// Concrete crossed product of M_N by the dual action, realized inside
// M_N (x) B(l2 G).  Elements are ambient matrices of size N|G|; the copy of
// M sits inside as the coaction image and the lambda family acts by diagonal
// multiplication operators.
struct CrossedProduct {
  std::shared_ptr<const GroupDual> D;
  DualAction act;
  Coaction coact;
  DualHilbert H;  // labels (p,i,j) for expansion coefficients
  int N = 1;
  std::vector<MatC> lam;   // lam[H.index(p,i,j)] = 1 (x) diag(g -> pi(g)_ij)
  std::vector<MatC> hatU;  // hatU[g] = 1 (x) R_g, the dual action implementers

  Eigen::Index ambient() const { return Eigen::Index(N) * D->n(); }
  int dim() const { return N * N * D->n(); }
  const MatC& lambda(int p, int i, int j) const { return lam[H.index(p, i, j)]; }
  MatC alpha(const MatC& x) const { return coact.apply(x); }

  // lambda_pi as a unitary in ambient (x) B(H_pi).
  MatC lambdaRep(int p) const {
    const int dp = D->d(p);
    std::vector<MatC> blocks(size_t(dp) * dp);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) blocks[size_t(i) * dp + j] = lambda(p, i, j);
    return fromEntryBlocks(blocks, int(ambient()), dp);
  }

  // Basis element alpha(e_ab) lambda_{p_ij}, column index (a*N+b)*|labels| + label.
  MatC basisElement(int a, int b, int label) const {
    return coact.img[size_t(a) * N + b] * lam[label];
  }
};

inline CrossedProduct buildCrossedProduct(const DualAction& act, double tol = 1e-9) {
  CheckReport chk = checkAction(act, tol);
  if (!chk.pass())
    throw ActionInvalid("buildCrossedProduct: base action fails, max residual " +
                        std::to_string(chk.maxResidual()));
  CrossedProduct cp;
  cp.D = act.D;
  cp.act = act;
  cp.N = act.N;
  cp.coact = coactionFromRoberts(act);
  cp.H = dualHilbert(act.D);
  const GroupDual& D = *act.D;
  const int n = D.n();
  cp.lam.resize(cp.H.dim);
  for (int p = 0; p < D.k(); ++p)
    for (int i = 0; i < D.d(p); ++i)
      for (int j = 0; j < D.d(p); ++j) {
        MatC diag = MatC::Zero(n, n);
        for (int g = 0; g < n; ++g) diag(g, g) = D.irr[p].mats[g](i, j);
        cp.lam[cp.H.index(p, i, j)] = kron(eye(cp.N), diag);
      }
  auto R = rightTranslations(D.G);
  cp.hatU.resize(n);
  for (int g = 0; g < n; ++g) cp.hatU[g] = kron(eye(cp.N), R[g]);

  // Dimension invariant: the N^2 |G| spanning elements alpha(e_ab) lam_t are
  // independent.  Their Gram matrix factors through the coaction:
  //   <alpha(e_ab) lam_t, alpha(e_cd) lam_s> = delta_ac tr(alpha(e_bd) lam_s lam_t*),
  // so it is I_N (x) K with K of side N |G| and the factored form only needs the
  // diagonal profile q_bd(g) of each alpha(e_bd).
  double star = 0;
  for (int a = 0; a < cp.N; ++a)
    for (int b = 0; b < cp.N; ++b)
      star = std::max(star, resNorm(cp.coact.img[size_t(a) * cp.N + b].adjoint() -
                                    cp.coact.img[size_t(b) * cp.N + a]));
  if (star > std::max(tol, 1e-8))
    throw ActionInvalid("buildCrossedProduct: coaction is not adjoint compatible");
  MatC F(n, cp.H.dim);
  for (int t = 0; t < cp.H.dim; ++t)
    for (int g = 0; g < n; ++g) F(g, t) = cp.lam[t](g, g);
  MatC K = MatC::Zero(Eigen::Index(cp.N) * cp.H.dim, Eigen::Index(cp.N) * cp.H.dim);
  for (int b = 0; b < cp.N; ++b)
    for (int d = 0; d < cp.N; ++d) {
      const MatC& e = cp.coact.img[size_t(b) * cp.N + d];
      VecC q = VecC::Zero(n);
      for (int g = 0; g < n; ++g)
        for (int a = 0; a < cp.N; ++a) q(g) += e(Eigen::Index(a) * n + g, Eigen::Index(a) * n + g);
      for (int t = 0; t < cp.H.dim; ++t)
        for (int s = 0; s < cp.H.dim; ++s) {
          cxd acc = 0;
          for (int g = 0; g < n; ++g) acc += F(g, s) * std::conj(F(g, t)) * q(g);
          K(Eigen::Index(b) * cp.H.dim + t, Eigen::Index(d) * cp.H.dim + s) = acc;
        }
    }
  Eigen::SelfAdjointEigenSolver<MatC> es((K + K.adjoint()) / 2.0);
  const double maxEig = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < 1e-10 * std::max(1.0, maxEig))
    throw ActionInvalid("buildCrossedProduct: spanning family is rank deficient");
  return cp;
}

// Canonical conditional expectation onto M: average over the dual action,
// then collapse the group leg with the counit.
inline MatC conditionalExpectation(const CrossedProduct& cp, const MatC& A) {
  const int n = cp.D->n();
  MatC avg = MatC::Zero(A.rows(), A.cols());
  for (int g = 0; g < n; ++g) avg += cp.hatU[g] * A * cp.hatU[g].adjoint();
  avg /= double(n);
  MatC J = MatC::Ones(n, n);
  return partialTraceRight(avg * kron(eye(cp.N), J), cp.N, n) / double(n);
}

struct Expansion {
  std::vector<MatC> coef;  // coef[H.index(p,i,j)] in M_N
  double residual = 0;
};

inline MatC assembleElement(const CrossedProduct& cp, const std::vector<MatC>& coef) {
  MatC A = MatC::Zero(cp.ambient(), cp.ambient());
  for (int t = 0; t < cp.H.dim; ++t) A += cp.coact.apply(coef[t]) * cp.lam[t];
  return A;
}

inline Expansion expandElement(const CrossedProduct& cp, const MatC& A, double tol = 1e-9) {
  const GroupDual& D = *cp.D;
  Expansion ex;
  ex.coef.resize(cp.H.dim);
  for (int p = 0; p < D.k(); ++p)
    for (int i = 0; i < D.d(p); ++i)
      for (int j = 0; j < D.d(p); ++j)
        ex.coef[cp.H.index(p, i, j)] =
            double(D.d(p)) * conditionalExpectation(cp, A * cp.lambda(p, i, j).adjoint());
  ex.residual = normTau2(assembleElement(cp, ex.coef) - A);
  if (ex.residual > tol)
    throw NotInAlgebra("expandElement: projection residual " + std::to_string(ex.residual));
  return ex;
}

inline MatC jonesProjection(const CrossedProduct& cp) {
  const GroupDual& D = *cp.D;
  MatC e = MatC::Zero(cp.ambient(), cp.ambient());
  for (int p = 0; p < D.k(); ++p)
    for (int i = 0; i < D.d(p); ++i) e += double(D.d(p)) * cp.lambda(p, i, i);
  return e / double(D.n());
}

// b in M with a e = alpha(b) e, b = sum of the diagonal expansion coefficients.
inline MatC pushDown(const CrossedProduct& cp, const MatC& A, double tol = 1e-9) {
  Expansion ex = expandElement(cp, A, tol);
  MatC b = MatC::Zero(cp.N, cp.N);
  const GroupDual& D = *cp.D;
  for (int p = 0; p < D.k(); ++p)
    for (int k = 0; k < D.d(p); ++k) b += ex.coef[cp.H.index(p, k, k)];
  return b;
}

inline MatC applyDualHat(const CrossedProduct& cp, int g, const MatC& A) {
  return cp.hatU[g] * A * cp.hatU[g].adjoint();
}

// Basis of the fixed points of the dual action inside the crossed product,
// solved per class on expansion coefficients: the class-p coefficient block
// m must satisfy m pi(g)^t = m for all g.
inline std::vector<MatC> hatFixedPoints(const CrossedProduct& cp, double tol = 1e-9) {
  const GroupDual& D = *cp.D;
  std::vector<MatC> basis;
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    MatC sys(Eigen::Index(D.n()) * dp * dp, Eigen::Index(dp) * dp);
    for (int g = 0; g < D.n(); ++g)
      sys.block(Eigen::Index(g) * dp * dp, 0, Eigen::Index(dp) * dp, Eigen::Index(dp) * dp) =
          kron(D.irr[p].mats[g], eye(dp)) - eye(dp * dp);
    MatC ns = nullSpaceBasis(sys, tol);
    for (Eigen::Index c = 0; c < ns.cols(); ++c) {
      MatC m = unvec(ns.col(c), dp, dp);
      MatC lamComb = MatC::Zero(cp.ambient(), cp.ambient());
      for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dp; ++j) lamComb += m(i, j) * cp.lambda(p, i, j);
      for (int a = 0; a < cp.N; ++a)
        for (int b = 0; b < cp.N; ++b)
          basis.push_back(cp.coact.img[size_t(a) * cp.N + b] * lamComb);
    }
  }
  return basis;
}

struct RelativeCommutant {
  std::vector<MatC> basis;   // ambient matrices spanning M' in the crossed product
  int dimDirect = 0;         // null-space dimension of the commutation system
  int dimSplit = 0;          // sum over classes of intertwiner-equation dimensions
  double mapResidual = 0;    // the per-class equations evaluated on the basis
};

inline RelativeCommutant relativeCommutant(const CrossedProduct& cp, double tol = 1e-9) {
  const GroupDual& D = *cp.D;
  const int N = cp.N;
  MatC x1 = MatC::Zero(N, N), x2 = MatC::Zero(N, N);
  for (int a = 0; a < N; ++a) {
    x1(a, a) = double(a + 1);
    x2(a, (a + 1) % N) = 1;
  }
  std::vector<MatC> gens = {cp.alpha(x1), cp.alpha(x2)};

  const Eigen::Index nb = Eigen::Index(N) * N * cp.H.dim;
  const Eigen::Index m2 = cp.ambient() * cp.ambient();
  MatC sys(2 * m2, nb);
  Eigen::Index col = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int t = 0; t < cp.H.dim; ++t) {
        MatC B = cp.basisElement(a, b, t);
        sys.block(0, col, m2, 1) = vecOf(B * gens[0] - gens[0] * B);
        sys.block(m2, col, m2, 1) = vecOf(B * gens[1] - gens[1] * B);
        ++col;
      }
  MatC ns = nullSpaceBasis(sys, tol);

  RelativeCommutant rc;
  rc.dimDirect = int(ns.cols());
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    MatC A = MatC::Zero(cp.ambient(), cp.ambient());
    Eigen::Index t = 0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int l = 0; l < cp.H.dim; ++l) A += ns(t++, c) * cp.basisElement(a, b, l);
    rc.basis.push_back(A);
  }

  // Per-class split: a is in the commutant iff each coefficient block,
  // reassembled with transposed indices, intertwines x (x) 1 with alpha_p(x).
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    const Eigen::Index n = Eigen::Index(N) * dp;
    MatC s(2 * n * n, n * n);
    int row = 0;
    for (const MatC& x : {x1, x2}) {
      MatC P = kron(x, eye(dp));
      MatC Q = cp.act.apply(p, x);
      s.block(Eigen::Index(row) * n * n, 0, n * n, n * n) =
          kron(eye(n), P) - kron(Q.transpose(), eye(n));
      ++row;
    }
    rc.dimSplit += int(n * n - rankOf(s, tol));
  }

  for (const MatC& A : rc.basis) {
    Expansion ex = expandElement(cp, A, std::max(tol, 1e-7));
    for (int p = 0; p < D.k(); ++p) {
      const int dp = D.d(p);
      std::vector<MatC> blocks(size_t(dp) * dp);
      for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dp; ++j) blocks[size_t(i) * dp + j] = ex.coef[cp.H.index(p, j, i)];
      MatC ap = fromEntryBlocks(blocks, N, dp);
      for (const MatC& x : {x1, x2})
        rc.mapResidual =
            std::max(rc.mapResidual, normTau2(kron(x, eye(dp)) * ap - ap * cp.act.apply(p, x)));
    }
  }
  return rc;
}

}  // namespace gdual

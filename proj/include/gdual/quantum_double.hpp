#pragma once

#include "crossed_product.hpp"

namespace gdual {

// Dual of G x G whose class (p, q) carries pi_p (x) conj(pi_{qbar}).  The
// second factor is equivalent to pi_q, but spelling it as an entrywise
// conjugate makes the class (p, pbar) carry pi_p (x) bar(pi_p) literally, so
// the diagonal sums below need no intertwiner dressing on any class.
struct DoubleDual {
  std::shared_ptr<const GroupDual> base;
  std::shared_ptr<const GroupDual> D2;

  int classOf(int p, int q) const { return p * base->k() + q; }
  int barPair(int p) const { return classOf(p, base->barOf[p]); }
};

inline DoubleDual buildDoubleDual(const Group& G, uint64_t seed = 0, double tol = 1e-9,
                                  long cap = 256) {
  if (long(G.n) * G.n > cap)
    throw CapExceeded("buildDoubleDual: order " + std::to_string(long(G.n) * G.n) +
                      " of the square exceeds " + std::to_string(cap));
  DoubleDual dd;
  dd.base = std::make_shared<GroupDual>(makeDual(G, seed, tol));
  const GroupDual& B = *dd.base;
  Group G2 = productGroup(G, G);
  std::vector<Irrep> fam;
  fam.reserve(size_t(B.k()) * B.k());
  for (int p = 0; p < B.k(); ++p)
    for (int q = 0; q < B.k(); ++q) {
      const Irrep& a = B.irr[p];
      const Irrep& b = B.irr[B.barOf[q]];
      Irrep ir;
      ir.dim = a.dim * b.dim;
      ir.mats.resize(size_t(G2.n));
      ir.character = VecC::Zero(G2.n);
      for (int g = 0; g < G.n; ++g)
        for (int h = 0; h < G.n; ++h) {
          const int e = g * G.n + h;
          ir.mats[size_t(e)] = kron(a.mats[size_t(g)], b.mats[size_t(h)].conjugate());
          ir.character(e) = ir.mats[size_t(e)].trace();
        }
      fam.push_back(std::move(ir));
    }
  dd.D2 = std::make_shared<GroupDual>(makeDualFromIrreps(std::move(G2), std::move(fam), seed, tol));
  return dd;
}

// Action of the double dual built from two commuting actions on the same
// factor: alpha_{(p,q)} = (alpha1_p (x) id) o alpha2_q, output legs (M, p, q).
// Whether the pair really commutes (and matches the product family) is
// certified downstream by the checkAction gate in buildCrossedProduct.
inline DualAction doubleAction(const DoubleDual& dd, const DualAction& a1, const DualAction& a2) {
  if (a1.N != a2.N) throw NotDoubleAction("doubleAction: factor size mismatch");
  if (a1.D->n() != dd.base->n() || a1.D->k() != dd.base->k() || a2.D->n() != dd.base->n() ||
      a2.D->k() != dd.base->k())
    throw NotDoubleAction("doubleAction: actions are not over the base dual");
  DualAction a;
  a.D = dd.D2;
  a.N = a1.N;
  a.img.resize(size_t(dd.D2->k()));
  for (int p = 0; p < dd.base->k(); ++p)
    for (int q = 0; q < dd.base->k(); ++q) {
      const int dq = dd.base->d(q);
      auto& dst = a.img[size_t(dd.classOf(p, q))];
      dst.resize(size_t(a.N) * a.N);
      for (size_t u = 0; u < dst.size(); ++u) dst[u] = a1.applyRect(p, a2.img[size_t(q)][u], dq, dq);
    }
  return a;
}

// Opposite of an action through the transpose identification of the factor
// with its opposite: beta_p(x) = alpha_{pbar}(x^t)^t.  The transpose of the
// representation leg turns bar(p) back into p, so beta is again an action of
// the same dual.
inline DualAction oppositeAction(const DualAction& act) {
  const GroupDual& B = *act.D;
  DualAction b;
  b.D = act.D;
  b.N = act.N;
  b.img.resize(size_t(B.k()));
  for (int p = 0; p < B.k(); ++p) {
    b.img[size_t(p)].resize(size_t(act.N) * act.N);
    for (int u = 0; u < act.N; ++u)
      for (int v = 0; v < act.N; ++v)
        b.img[size_t(p)][size_t(u) * act.N + v] =
            act.img[size_t(B.barOf[p])][size_t(v) * act.N + u].transpose();
  }
  return b;
}

// Implementing unitaries w_{pi_ij} = sum_k lambda_{pi_ik (x) bar(pi)_jk}
// inside M x (G^ x G^), assembled as a representation of the base dual.
inline DualRepresentation doubleUnitary(const DoubleDual& dd, const CrossedProduct& cp) {
  if (cp.D.get() != dd.D2.get())
    throw NotDoubleAction("doubleUnitary: crossed product is not over the double dual");
  const GroupDual& B = *dd.base;
  DualRepresentation w;
  w.D = dd.base;
  w.N = int(cp.ambient());
  w.U.resize(size_t(B.k()));
  for (int p = 0; p < B.k(); ++p) {
    const int dp = B.d(p);
    const int c = dd.barPair(p);
    std::vector<MatC> blocks(size_t(dp) * dp);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) {
        MatC s = MatC::Zero(cp.ambient(), cp.ambient());
        for (int k = 0; k < dp; ++k) s += cp.lam[size_t(cp.H.index(c, i * dp + j, k * dp + k))];
        blocks[size_t(i) * dp + j] = std::move(s);
      }
    w.U[size_t(p)] = fromEntryBlocks(blocks, int(cp.ambient()), dp);
  }
  return w;
}

// N = M v {w_{pi_ij}} inside the crossed product by the double dual.  Its
// expansion theory mirrors the crossed product's: coefficients in M against
// the w family, recovered through the canonical expectation.
struct QuantumDouble {
  DoubleDual dd;
  CrossedProduct cp;
  DualRepresentation w;
  DualHilbert H;  // coefficient labels of the base dual

  Eigen::Index ambient() const { return cp.ambient(); }
  Eigen::Index dim() const { return Eigen::Index(cp.N) * cp.N * dd.base->n(); }
  MatC embed(const MatC& m) const { return cp.coact.apply(m); }
  MatC expect(const MatC& A) const { return conditionalExpectation(cp, A); }
  MatC unitary(int p, int i, int j) const { return w.entry(p, i, j); }
};

inline QuantumDouble buildQuantumDouble(const DoubleDual& dd, const CrossedProduct& cp,
                                        const DualRepresentation& w) {
  if (w.N != int(cp.ambient()) || w.D.get() != dd.base.get())
    throw NotDoubleAction("buildQuantumDouble: unitaries do not match the crossed product");
  QuantumDouble qd{dd, cp, w, dualHilbert(dd.base)};

  // Dimension invariant: the N^2 |G| elements alpha(e_ab) w_t are independent.
  // Same factored Gram as in buildCrossedProduct: I_N (x) K with
  // K((b,t),(d,s)) = tr(alpha(e_bd) w_s w_t*).
  const Eigen::Index hd = qd.H.dim;
  std::vector<MatC> wt;
  wt.resize(size_t(hd));
  for (int p = 0; p < dd.base->k(); ++p)
    for (int i = 0; i < dd.base->d(p); ++i)
      for (int j = 0; j < dd.base->d(p); ++j) wt[size_t(qd.H.index(p, i, j))] = w.entry(p, i, j);
  MatC K = MatC::Zero(Eigen::Index(cp.N) * hd, Eigen::Index(cp.N) * hd);
  for (int t = 0; t < hd; ++t)
    for (int s = 0; s < hd; ++s) {
      const MatC P = (wt[size_t(s)] * wt[size_t(t)].adjoint()).transpose();
      for (int b = 0; b < cp.N; ++b)
        for (int d = 0; d < cp.N; ++d)
          K(Eigen::Index(b) * hd + t, Eigen::Index(d) * hd + s) =
              cp.coact.img[size_t(b) * cp.N + d].cwiseProduct(P).sum();
    }
  Eigen::SelfAdjointEigenSolver<MatC> es((K + K.adjoint()) / 2.0);
  const double maxEig = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < 1e-10 * std::max(1.0, maxEig))
    throw NotDoubleAction("buildQuantumDouble: spanning family is rank deficient");
  return qd;
}

struct DoubleExpansion {
  std::vector<MatC> coef;  // coef[H.index(p,i,j)] in M_N
  double residual = 0;
};

inline MatC assembleDouble(const QuantumDouble& qd, const std::vector<MatC>& coef) {
  const GroupDual& B = *qd.dd.base;
  MatC A = MatC::Zero(qd.ambient(), qd.ambient());
  for (int p = 0; p < B.k(); ++p)
    for (int i = 0; i < B.d(p); ++i)
      for (int j = 0; j < B.d(p); ++j)
        A += qd.embed(coef[size_t(qd.H.index(p, i, j))]) * qd.unitary(p, i, j);
  return A;
}

inline DoubleExpansion expandDouble(const QuantumDouble& qd, const MatC& A, double tol = 1e-9) {
  const GroupDual& B = *qd.dd.base;
  DoubleExpansion ex;
  ex.coef.resize(size_t(qd.H.dim));
  for (int p = 0; p < B.k(); ++p)
    for (int i = 0; i < B.d(p); ++i)
      for (int j = 0; j < B.d(p); ++j)
        ex.coef[size_t(qd.H.index(p, i, j))] =
            double(B.d(p)) * qd.expect(A * qd.unitary(p, i, j).adjoint());
  ex.residual = normTau2(assembleDouble(qd, ex.coef) - A);
  if (ex.residual > tol)
    throw NotInAlgebra("expandDouble: projection residual " + std::to_string(ex.residual));
  return ex;
}

// Structure report for N: the implementing family is a representation of the
// base dual, invariant under the diagonal of the bidual action; it factors
// through the two legs v_{pi_ik} = lambda_{pi_ik (x) 1} and
// u-leg lambda_{1 (x) bar(pi)_jk}, and the expectation kills every
// nontrivial generator.
inline CheckReport checkQuantumDouble(const QuantumDouble& qd, double tol = 1e-9) {
  const GroupDual& B = *qd.dd.base;
  const CrossedProduct& cp = qd.cp;
  const int n = B.n();
  CheckReport rep;

  CheckReport wr = checkRepresentation(qd.w, tol);
  for (const auto& it : wr.items) rep.add("unitaries: " + it.name, it.residual, it.bound);

  double inv = 0;
  for (int g = 0; g < n; ++g)
    for (int p = 0; p < B.k(); ++p)
      for (int i = 0; i < B.d(p); ++i)
        for (int j = 0; j < B.d(p); ++j) {
          const MatC e = qd.unitary(p, i, j);
          inv = std::max(inv, resNorm(applyDualHat(cp, g * n + g, e) - e));
        }
  rep.add("diagonal invariance", inv, tol);

  double expc = 0;
  for (int p = 0; p < B.k(); ++p)
    for (int i = 0; i < B.d(p); ++i)
      for (int j = 0; j < B.d(p); ++j) {
        MatC e = qd.expect(qd.unitary(p, i, j));
        if (p == 0) e -= eye(cp.N);
        expc = std::max(expc, resNorm(e));
      }
  rep.add("expectation of the generators", expc, tol);

  double fac = 0;
  for (int p = 0; p < B.k(); ++p) {
    const int dp = B.d(p);
    const int cv = qd.dd.classOf(p, 0);
    const int cu = qd.dd.classOf(0, B.barOf[p]);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) {
        MatC s = MatC::Zero(cp.ambient(), cp.ambient());
        for (int k = 0; k < dp; ++k)
          s += cp.lam[size_t(cp.H.index(cv, i, k))] * cp.lam[size_t(cp.H.index(cu, j, k))];
        fac = std::max(fac, resNorm(s - qd.unitary(p, i, j)));
      }
  }
  rep.add("factorization through the legs", fac, tol);

  // Commutation of the two legs, sampled on the extreme entries per class pair.
  double com = 0;
  for (int p = 0; p < B.k(); ++p)
    for (int q = 0; q < B.k(); ++q) {
      const int dp = B.d(p), dq = B.d(q);
      for (int i : {0, dp - 1})
        for (int j : {0, dq - 1}) {
          const MatC& v = cp.lam[size_t(cp.H.index(qd.dd.classOf(p, 0), 0, i))];
          const MatC& u = cp.lam[size_t(cp.H.index(qd.dd.classOf(0, B.barOf[q]), j, 0))];
          com = std::max(com, resNorm(v * u - u * v));
        }
    }
  rep.add("commuting legs", com, tol);

  DualRepresentation ur;
  ur.D = qd.dd.base;
  ur.N = int(cp.ambient());
  ur.U.resize(size_t(B.k()));
  for (int p = 0; p < B.k(); ++p) {
    const int dp = B.d(p);
    const int cu = qd.dd.classOf(0, B.barOf[p]);
    std::vector<MatC> blocks(size_t(dp) * dp);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) blocks[size_t(i) * dp + j] = cp.lam[size_t(cp.H.index(cu, i, j))];
    ur.U[size_t(p)] = fromEntryBlocks(blocks, int(cp.ambient()), dp);
  }
  rep.add("conjugate leg representation", checkRepresentation(ur, tol).maxResidual(), tol);

  Rng rng(B.seed ^ fnv1a("double roundtrip"));
  std::vector<MatC> coef(size_t(qd.H.dim));
  for (auto& c : coef) c = rng.gaussian(cp.N, cp.N);
  DoubleExpansion ex = expandDouble(qd, assembleDouble(qd, coef),
                                    std::numeric_limits<double>::infinity());
  double rt = ex.residual;
  for (int t = 0; t < qd.H.dim; ++t)
    rt = std::max(rt, (ex.coef[size_t(t)] - coef[size_t(t)]).norm() / std::sqrt(double(cp.N)));
  rep.add("expansion round trip", rt, tol);

  return rep;
}

// Fixed points of the diagonal bidual action: both the factor and the
// implementing family are invariant, and the invariant dimension counted two
// ways (trivial multiplicities from characters; ranks of the averaged
// projections) agrees with dim N = N^2 |G|.
inline CheckReport fixedPointCheck(const QuantumDouble& qd, double tol = 1e-9) {
  const GroupDual& B = *qd.dd.base;
  const GroupDual& D2 = *qd.dd.D2;
  const CrossedProduct& cp = qd.cp;
  const int n = B.n();
  CheckReport rep;

  Rng rng(B.seed ^ fnv1a("fixed point witnesses"));
  std::vector<MatC> probes;
  if (cp.N <= 3) {
    for (int a = 0; a < cp.N; ++a)
      for (int b = 0; b < cp.N; ++b) probes.push_back(matrixUnit(cp.N, a, b));
  } else {
    for (int s = 0; s < 2 * cp.N; ++s) probes.push_back(rng.gaussian(cp.N, cp.N));
  }
  double fct = 0;
  for (int g = 0; g < n; ++g)
    for (const MatC& m : probes) {
      const MatC e = cp.coact.apply(m);
      fct = std::max(fct, resNorm(applyDualHat(cp, g * n + g, e) - e));
    }
  rep.add("factor invariance", fct, tol);

  double gen = 0;
  for (int g = 0; g < n; ++g)
    for (int p = 0; p < B.k(); ++p) {
      const MatC& u = qd.w.U[size_t(p)];
      const MatC lift = kron(cp.hatU[size_t(g * n + g)], eye(B.d(p)));
      gen = std::max(gen, resNorm(lift * u * lift.adjoint() - u));
    }
  rep.add("generator invariance", gen, tol);

  double mult = 0;
  long fixedDim = 0;
  for (int p = 0; p < B.k(); ++p)
    for (int q = 0; q < B.k(); ++q) {
      const int c = qd.dd.classOf(p, q);
      const int dc = D2.d(c);
      MatC Q = MatC::Zero(dc, dc);
      for (int g = 0; g < n; ++g) Q += D2.irr[size_t(c)].mats[size_t(g * n + g)];
      Q /= double(n);
      const cxd tr = Q.trace();
      const int want = q == B.barOf[p] ? 1 : 0;
      mult = std::max(mult, std::abs(tr - cxd(want, 0)));
      fixedDim += long(cp.N) * cp.N * dc * std::lround(tr.real());
    }
  rep.add("multiplicity solvers agree", mult, tol);
  rep.add("fixed point dimension", std::abs(double(fixedDim) - double(qd.dim())), 0.5);

  return rep;
}

}  // namespace gdual

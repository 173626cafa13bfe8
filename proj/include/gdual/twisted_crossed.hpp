#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cocycle.hpp"
#include "crossed_product.hpp"

namespace gdual {

// Unitaries c[p] with conj(pi_p(g)) = c[p] pi_{bar p}(g) c[p]^*.  Duals built
// by makeDual satisfy the entrywise convention conj(pi_p) = pi_{bar p}
// wherever the group admits it, and there c[p] is the identity; quaternionic
// self conjugate classes force a nontrivial antisymmetric pairing.  Distinct
// partners are paired compatibly, c[bar p] = c[p]^T.
inline std::vector<MatC> conjugatePairings(const GroupDual& D) {
  std::vector<MatC> c(size_t(D.k()));
  for (int p = 0; p < D.k(); ++p) {
    const int q = D.barOf[p];
    if (q < p) {
      c[size_t(p)] = c[size_t(q)].transpose();
      continue;
    }
    double mis = 0;
    for (int g = 0; g < D.n(); ++g)
      mis = std::max(
          mis, (D.irr[size_t(p)].mats[size_t(g)].conjugate() - D.irr[size_t(q)].mats[size_t(g)])
                   .cwiseAbs()
                   .maxCoeff());
    if (mis < 1e-10) {
      c[size_t(p)] = eye(D.d(p));
      continue;
    }
    std::vector<MatC> cf(size_t(D.n()));
    for (int g = 0; g < D.n(); ++g) cf[size_t(g)] = D.irr[size_t(p)].mats[size_t(g)].conjugate();
    c[size_t(p)] = detail::schurIntertwiner(cf, D.irr[size_t(q)].mats);
  }
  return c;
}

// Entrywise pairing of the two legs of U_{pi, bar pi} through the conjugation
// pairing; with the entrywise convention this is the plain diagonal sum
// sum_k U_{pi_ik, bar pi_jk}.  Returned as an N x N block matrix indexed by
// (row of pi, row of bar pi).
inline MatC uTilde(const TwistedAction& ta, const std::vector<MatC>& pairing, int p) {
  const GroupDual& D = *ta.act.D;
  const int N = ta.act.N, dp = D.d(p), q = D.barOf[p], dq = D.d(q);
  const MatC& U = ta.U[size_t(p)][size_t(q)];
  MatC out = MatC::Zero(Eigen::Index(N) * dp, Eigen::Index(N) * dq);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dq; ++j) {
          cxd acc = 0;
          for (int kk = 0; kk < dp; ++kk)
            for (int l = 0; l < dq; ++l)
              acc += std::conj(pairing[size_t(p)](kk, l)) *
                     U(Eigen::Index(a) * dp * dq + i * dq + j,
                       Eigen::Index(b) * dp * dq + kk * dq + l);
          out(Eigen::Index(a) * dp + i, Eigen::Index(b) * dq + j) = acc;
        }
  return out;
}

// Twisted crossed product realized on (+)_rho H (x) B(H_rho) with H = L^2(M_N):
// coordinates are the scaled vectorizations sqrt(d_rho / N) vec(v(rho)), so
// flat adjoints agree with algebra adjoints and the ambient dimension is
// N^2 |G|.  alpha embeds the factor block diagonally, lam holds the matrix
// coefficients of the implementing unitaries.
struct TwistedCrossedProduct {
  TwistedAction ta;
  std::shared_ptr<const GroupDual> D;
  DualHilbert H;
  int N = 0;
  std::vector<Eigen::Index> off;
  std::vector<MatC> lam;

  Eigen::Index ambient() const { return off.back(); }
  int dim() const { return N * N * D->G.n; }
  const MatC& lambda(int p, int i, int j) const { return lam[size_t(H.index(p, i, j))]; }

  MatC lambdaRep(int p) const {
    const int dp = D->d(p);
    std::vector<MatC> blocks(size_t(dp) * size_t(dp));
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) blocks[size_t(i) * size_t(dp) + size_t(j)] = lambda(p, i, j);
    return fromEntryBlocks(blocks, int(ambient()), dp);
  }

  MatC alpha(const MatC& a) const {
    MatC out = MatC::Zero(ambient(), ambient());
    for (int r = 0; r < D->k(); ++r) {
      const Eigen::Index w = Eigen::Index(N) * D->d(r);
      out.block(off[size_t(r)], off[size_t(r)], w * w, w * w) = kron(eye(w), ta.act.apply(r, a));
    }
    return out;
  }

  // Compression to the trivial block reads off an element of the factor.
  MatC expect(const MatC& x) const {
    MatC a = MatC::Zero(N, N);
    for (int kk = 0; kk < N; ++kk) a += x.block(kk * N, kk * N, N, N);
    return a / double(N);
  }

  cxd tau(const MatC& x) const { return expect(x).trace() / double(N); }

  // Image of the cyclic trace vector under x; its norm is the tau 2-norm for
  // elements of the algebra.
  VecC cyclicImage(const MatC& x) const {
    VecC omega = VecC::Zero(ambient());
    for (int i = 0; i < N; ++i) omega(Eigen::Index(i) * N + i) = 1.0 / std::sqrt(double(N));
    return x * omega;
  }
};

namespace detail {

// Assemble an element of M_amb (x) B(W_c -> W_r) from its amb x amb entry blocks,
// ambient leg slowest.
inline MatC assembleRect(const std::vector<MatC>& blocks, Eigen::Index amb, Eigen::Index wR,
                         Eigen::Index wC) {
  MatC out(amb * wR, amb * wC);
  for (Eigen::Index i = 0; i < wR; ++i)
    for (Eigen::Index j = 0; j < wC; ++j) {
      const MatC& blk = blocks[size_t(i * wC + j)];
      for (Eigen::Index a = 0; a < amb; ++a)
        for (Eigen::Index b = 0; b < amb; ++b) out(a * wR + i, b * wC + j) = blk(a, b);
    }
  return out;
}

// Lift x in M_N (x) B(W_c -> W_r) into the product entrywise through alpha.
inline MatC alphaLiftRect(const TwistedCrossedProduct& T, const MatC& x, Eigen::Index wR,
                          Eigen::Index wC) {
  std::vector<MatC> blocks;
  blocks.reserve(size_t(wR * wC));
  for (Eigen::Index i = 0; i < wR; ++i)
    for (Eigen::Index j = 0; j < wC; ++j)
      blocks.push_back(T.alpha(entryBlock(x, T.N, int(wR), int(wC), int(i), int(j))));
  return assembleRect(blocks, T.ambient(), wR, wC);
}

}  // namespace detail

inline TwistedCrossedProduct buildTwistedCrossedProduct(const TwistedAction& ta,
                                                        double tol = 1e-9) {
  CheckReport gate = checkTwistedAction(ta, tol);
  if (!gate.pass()) {
    for (const auto& it : gate.items)
      if (!it.pass)
        throw TwistedActionInvalid("buildTwistedCrossedProduct: " + it.name + " residual " +
                                   std::to_string(it.residual));
  }

  TwistedCrossedProduct T;
  T.ta = ta;
  T.D = ta.act.D;
  T.H = dualHilbert(T.D);
  T.N = ta.act.N;
  const GroupDual& D = *T.D;
  const int k = D.k(), N = T.N;

  T.off.assign(size_t(k) + 1, 0);
  for (int r = 0; r < k; ++r) {
    const Eigen::Index w = Eigen::Index(N) * D.d(r);
    T.off[size_t(r) + 1] = T.off[size_t(r)] + w * w;
  }
  const Eigen::Index amb = T.off[size_t(k)];

  T.lam.assign(size_t(T.H.dim), MatC::Zero(amb, amb));
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p);
    for (int r = 0; r < k; ++r) {
      const int dr = D.d(r);
      const Eigen::Index wR = Eigen::Index(N) * dr;
      for (int s = 0; s < k; ++s) {
        if (D.fus[r][p][s] == 0) continue;
        const int ds = D.d(s);
        const Eigen::Index wC = Eigen::Index(N) * ds;
        const double scale = std::sqrt(double(dr) / double(ds));
        for (const MatC& Tch :
             intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(r), RepLabel::irr(p)))) {
          const MatC Urect = ta.U[size_t(r)][size_t(p)] * kron(eye(N), Tch);
          for (int i = 0; i < dp; ++i) {
            MatC Ui(wR, wC);
            for (int a = 0; a < N; ++a)
              for (int rr = 0; rr < dr; ++rr)
                Ui.row(Eigen::Index(a) * dr + rr) =
                    Urect.row((Eigen::Index(a) * dr + rr) * dp + i);
            for (int j = 0; j < dp; ++j) {
              MatC Tj(dr, ds);
              for (int rr = 0; rr < dr; ++rr) Tj.row(rr) = Tch.row(Eigen::Index(rr) * dp + j);
              const MatC lift = kron(eye(N), Tj);
              T.lam[size_t(T.H.index(p, i, j))].block(T.off[size_t(r)], T.off[size_t(s)],
                                                      wR * wR, wC * wC) +=
                  scale * kron(lift.conjugate(), Ui);
            }
          }
        }
      }
    }
  }

  // The module basis alpha(e_ab) lam_t must span a space of dimension N^2 |G|.
  const int dim = T.dim();
  MatC bm(amb * amb, dim);
  int col = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const MatC ea = T.alpha(matrixUnit(N, a, b));
      for (int t = 0; t < T.H.dim; ++t) bm.col(col++) = vecOf(ea * T.lam[size_t(t)]);
    }
  MatC gram = bm.adjoint() * bm;
  Eigen::SelfAdjointEigenSolver<MatC> es(gram);
  if (es.eigenvalues()(0) < 1e-10 * std::max(1.0, es.eigenvalues()(dim - 1)))
    throw TwistedActionInvalid("buildTwistedCrossedProduct: generators are linearly dependent");
  return T;
}

struct TwistedExpansion {
  std::vector<MatC> coef;
  double residual = 0;
};

inline MatC assembleTwisted(const TwistedCrossedProduct& T, const std::vector<MatC>& coef) {
  MatC out = MatC::Zero(T.ambient(), T.ambient());
  for (int t = 0; t < T.H.dim; ++t) {
    const MatC& m = coef[size_t(t)];
    if (m.size() == 0) continue;
    out += T.alpha(m) * T.lam[size_t(t)];
  }
  return out;
}

// Coefficients a_{pi,ij} = d_pi E(x lambda_{pi_ij}^*); the residual is the
// tau 2-norm of the defect, measured on the cyclic vector.
inline TwistedExpansion twistedExpand(const TwistedCrossedProduct& T, const MatC& x,
                                      double tol = 1e-9) {
  TwistedExpansion E;
  E.coef.resize(size_t(T.H.dim));
  for (int p = 0; p < T.D->k(); ++p)
    for (int i = 0; i < T.D->d(p); ++i)
      for (int j = 0; j < T.D->d(p); ++j)
        E.coef[size_t(T.H.index(p, i, j))] =
            double(T.D->d(p)) * T.expect(x * T.lambda(p, i, j).adjoint());
  E.residual = T.cyclicImage(x - assembleTwisted(T, E.coef)).norm();
  if (E.residual > tol)
    throw NotInAlgebra("twistedExpand: residual " + std::to_string(E.residual));
  return E;
}

inline CheckReport checkTwistedCrossedProduct(const TwistedCrossedProduct& T, double tol = 1e-9) {
  CheckReport rep;
  const GroupDual& D = *T.D;
  const int k = D.k(), N = T.N;
  const Eigen::Index amb = T.ambient();
  Rng rng(D.seed ^ fnv1a("checkTwistedCrossedProduct"));

  double uni = 0;
  for (int p = 0; p < k; ++p) {
    const MatC L = T.lambdaRep(p);
    uni = std::max(uni, resNorm(MatC(L * L.adjoint() - eye(L.rows()))));
    uni = std::max(uni, resNorm(MatC(L.adjoint() * L - eye(L.rows()))));
  }
  rep.add("implementing unitaries", uni, tol);
  rep.add("unit at the trivial class", resNorm(MatC(T.lambda(0, 0, 0) - eye(amb))), tol);

  std::vector<MatC> samples;
  if (N <= 3)
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) samples.push_back(matrixUnit(N, a, b));
  else {
    samples.push_back(rng.hermitian(N));
    samples.push_back(rng.gaussian(N, N));
  }
  double act = 0;
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p);
    const MatC L = T.lambdaRep(p);
    for (const MatC& a : samples) {
      const MatC lhs = L * kron(T.alpha(a), eye(dp)) * L.adjoint();
      const MatC rhs = detail::alphaLiftRect(T, T.ta.act.apply(p, a), dp, dp);
      act = std::max(act, resNorm(MatC(lhs - rhs)));
    }
  }
  rep.add("implements the action", act, tol);

  double fus = 0;
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p);
    for (int q = 0; q < k; ++q) {
      const int dq = D.d(q);
      const MatC l12 = kron(T.lambdaRep(p), eye(dq));
      const MatC l13 =
          insertIdentityLeg(T.lambdaRep(q), {amb, Eigen::Index(dq)}, {amb, Eigen::Index(dq)}, 1,
                            dp);
      const MatC prod = l12 * l13;
      for (int s = 0; s < k; ++s) {
        if (D.fus[p][q][s] == 0) continue;
        for (const MatC& Tch :
             intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)))) {
          const MatC lhs = prod * kron(eye(amb), Tch);
          const MatC Usig = T.ta.U[size_t(p)][size_t(q)] * kron(eye(N), Tch);
          const MatC rhs =
              detail::alphaLiftRect(T, Usig, Eigen::Index(dp) * dq, D.d(s)) * T.lambdaRep(s);
          fus = std::max(fus, resNorm(MatC(lhs - rhs)));
        }
      }
    }
  }
  rep.add("fusion relation", fus, tol);

  const std::vector<MatC> pairing = conjugatePairings(D);
  double con = 0;
  for (int p = 0; p < k; ++p) {
    const int q = D.barOf[p], dp = D.d(p);
    const MatC Ut = uTilde(T.ta, pairing, p);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) {
        const MatC lhs = T.lambda(q, i, j).adjoint();
        MatC rhs = MatC::Zero(amb, amb);
        for (int kk = 0; kk < dp; ++kk) {
          const MatC Uki = entryBlock(Ut, N, dp, dp, kk, i).adjoint();
          for (int m = 0; m < dp; ++m) {
            const cxd cm = std::conj(pairing[size_t(p)](m, j));
            if (std::abs(cm) < 1e-15) continue;
            rhs += cm * (T.alpha(Uki) * T.lambda(p, kk, m));
          }
        }
        con = std::max(con, resNorm(MatC(lhs - rhs)));
      }
  }
  rep.add("conjugate relation", con, tol);

  double exv = 0;
  const MatC m0 = rng.gaussian(N, N);
  exv = std::max(exv, resNorm(MatC(T.expect(T.alpha(m0)) - m0)));
  for (int p = 1; p < k; ++p)
    for (int i = 0; i < D.d(p); ++i)
      for (int j = 0; j < D.d(p); ++j) exv = std::max(exv, resNorm(T.expect(T.lambda(p, i, j))));
  rep.add("expectation projects onto the factor", exv, tol);

  auto randomElement = [&](Rng& r) -> MatC {
    std::vector<MatC> coef(size_t(T.H.dim));
    for (int t = 0; t < T.H.dim; ++t) coef[size_t(t)] = r.gaussian(N, N) / double(T.H.dim);
    return assembleTwisted(T, coef);
  };
  double trc = std::abs(T.tau(eye(amb)) - cxd(1, 0));
  for (int it = 0; it < 3; ++it) {
    const MatC x = randomElement(rng), y = randomElement(rng);
    trc = std::max(trc, std::abs(T.tau(x * y) - T.tau(y * x)));
    trc = std::max(trc, std::max(0.0, -T.tau(MatC(x.adjoint() * x)).real()));
  }
  rep.add("trace property", trc, tol);

  double rt = 0;
  Rng rr(D.seed ^ fnv1a("tcp roundtrip"));
  std::vector<MatC> coef(size_t(T.H.dim));
  for (int t = 0; t < T.H.dim; ++t) coef[size_t(t)] = rr.gaussian(N, N);
  const MatC x = assembleTwisted(T, coef);
  const TwistedExpansion E = twistedExpand(T, x, std::numeric_limits<double>::infinity());
  for (int t = 0; t < T.H.dim; ++t)
    rt = std::max(rt, (E.coef[size_t(t)] - coef[size_t(t)]).cwiseAbs().maxCoeff());
  rt = std::max(rt, E.residual);
  rep.add("expansion round trip", rt, tol);
  return rep;
}

// Residual checks for the coefficient identity satisfied by any 2-cocycle:
// the pairing of U_{pi, bar pi} against U_{bar pi, pi} through the dual unit
// collapses to a sign, and entrywise
// sum_{k,l} Utilde^*_{pi_k, bar pi_l} alpha_pi(Utilde_{bar pi_l, pi_i})_{k,j}
// = gamma_pi delta_{ij}, with gamma_pi = -1 exactly on quaternionic classes.
inline CheckReport lemmaUCheck(const TwistedAction& ta, double tol = 1e-9) {
  CheckReport rep;
  const GroupDual& D = *ta.act.D;
  const int k = D.k(), N = ta.act.N;
  const std::vector<MatC> pairing = conjugatePairings(D);

  double sc = 0;
  std::vector<double> gamma(size_t(k), 1.0);
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p), q = D.barOf[p];
    const MatC g = pairing[size_t(p)] * pairing[size_t(q)].conjugate();
    const double gm = double(std::lround(g.trace().real() / double(dp)));
    gamma[size_t(p)] = gm;
    sc = std::max(sc, (g - gm * eye(dp)).cwiseAbs().maxCoeff());
    sc = std::max(sc, std::abs(std::abs(gm) - 1.0));
  }
  rep.add("conjugation pairing scalar", sc, tol);

  double zz = 0;
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p), q = D.barOf[p], dq = D.d(q);
    MatC t1pq(dp * dq, 1), t1qp(dq * dp, 1);
    for (int kk = 0; kk < dp; ++kk)
      for (int l = 0; l < dq; ++l) {
        t1pq(Eigen::Index(kk) * dq + l, 0) =
            std::conj(pairing[size_t(p)](kk, l)) / std::sqrt(double(dp));
        t1qp(Eigen::Index(l) * dp + kk, 0) =
            std::conj(pairing[size_t(q)](l, kk)) / std::sqrt(double(dq));
      }
    const MatC A = ta.U[size_t(p)][size_t(q)] * kron(eye(N), t1pq);
    const MatC B = ta.U[size_t(q)][size_t(p)] * kron(eye(N), t1qp);
    const MatC lhs = kron(A.adjoint(), eye(dp)) * ta.act.applyRect(p, B, dq * dp, 1);
    zz = std::max(zz, resNorm(MatC(lhs - (gamma[size_t(p)] / double(dp)) *
                                             eye(Eigen::Index(N) * dp))));
  }
  rep.add("cocycle specialization", zz, tol);

  double co = 0;
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p), q = D.barOf[p], dq = D.d(q);
    const MatC Ut = uTilde(ta, pairing, p);
    const MatC Utp = uTilde(ta, pairing, q);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) {
        MatC acc = MatC::Zero(N, N);
        for (int l = 0; l < dq; ++l) {
          const MatC ax = ta.act.apply(p, entryBlock(Utp, N, dq, dp, l, i));
          for (int kk = 0; kk < dp; ++kk)
            acc += entryBlock(Ut, N, dp, dq, kk, l).adjoint() * entryBlock(ax, N, dp, dp, kk, j);
        }
        const double expv = (i == j) ? gamma[size_t(p)] : 0.0;
        co = std::max(co, resNorm(MatC(acc - expv * eye(N))));
      }
  }
  rep.add("coefficient identity", co, tol);
  return rep;
}

// The trivial cocycle over a given action.
inline TwistedAction untwisted(const DualAction& act) {
  TwistedAction ta;
  ta.act = act;
  const GroupDual& D = *act.D;
  ta.U.assign(size_t(D.k()), std::vector<MatC>(size_t(D.k())));
  for (int p = 0; p < D.k(); ++p)
    for (int q = 0; q < D.k(); ++q)
      ta.U[size_t(p)][size_t(q)] = eye(Eigen::Index(act.N) * D.d(p) * D.d(q));
  return ta;
}

// With the trivial cocycle the twisted product must realize the same algebra
// as the plain crossed product: identify the module bases elementwise and
// compare all structure constants.  Returns the largest coefficient gap.
inline double checkUntwistedDegeneration(const DualAction& act, double tol = 1e-8) {
  const TwistedCrossedProduct T = buildTwistedCrossedProduct(untwisted(act), std::max(tol, 1e-9));
  const CrossedProduct C = buildCrossedProduct(act);
  const int N = act.N, hd = T.H.dim;
  const int dim = T.dim();

  std::vector<MatC> tb, cb;
  tb.reserve(size_t(dim));
  cb.reserve(size_t(dim));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const MatC ea = T.alpha(matrixUnit(N, a, b));
      for (int t = 0; t < hd; ++t) {
        tb.push_back(ea * T.lam[size_t(t)]);
        cb.push_back(C.basisElement(a, b, t));
      }
    }

  double worst = 0;
  for (int u = 0; u < dim; ++u)
    for (int v = 0; v < dim; ++v) {
      const TwistedExpansion et = twistedExpand(T, MatC(tb[size_t(u)] * tb[size_t(v)]), 1e-6);
      const Expansion ec = expandElement(C, MatC(cb[size_t(u)] * cb[size_t(v)]), 1e-6);
      for (int t = 0; t < hd; ++t)
        worst = std::max(
            worst, (et.coef[size_t(t)] - ec.coef[size_t(t)]).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::max(et.residual, ec.residual));
    }
  return worst;
}

}  // namespace gdual

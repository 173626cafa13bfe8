#pragma once

#include <functional>

#include "intertwiner.hpp"
#include "matrix_numerics.hpp"

namespace gdual {

// N x N matrix algebra with its normalized trace, the finite stand-in for the
// hyperfinite II_1 factor.
struct FDFactor {
  int N = 1;
};

inline MatC matrixUnit(int n, int a, int b) {
  MatC e = MatC::Zero(n, n);
  e(a, b) = 1;
  return e;
}

// Coefficient slice of x in M_N (x) B(H) with legs (M, H): the N x N matrix
// collecting the (i,j) entry of every M-block.
inline MatC entryBlock(const MatC& x, int N, int dR, int dC, int i, int j) {
  MatC m(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) m(a, b) = x(Eigen::Index(a) * dR + i, Eigen::Index(b) * dC + j);
  return m;
}

// Inverse of entryBlock for square H of dimension d: blocks[i*d+j] is the
// (i,j) coefficient in M_N.
inline MatC fromEntryBlocks(const std::vector<MatC>& blocks, int N, int d) {
  MatC x(Eigen::Index(N) * d, Eigen::Index(N) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          x(Eigen::Index(a) * d + i, Eigen::Index(b) * d + j) = blocks[size_t(i) * d + j](a, b);
  return x;
}

// (id (x) Tr) on M_N (x) B(C^n).
inline MatC partialTraceRight(const MatC& y, int N, int n) {
  MatC m(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      cxd s = 0;
      for (int g = 0; g < n; ++g) s += y(Eigen::Index(a) * n + g, Eigen::Index(b) * n + g);
      m(a, b) = s;
    }
  return m;
}

// Residual norm for rectangular comparisons, normalized like the trace 2-norm
// on the narrow side.
inline double resNorm(const MatC& x) {
  return x.norm() / std::sqrt(double(std::min(x.rows(), x.cols())));
}

// Action of the dual of G on M_N in the Roberts sense: unital *-homomorphisms
// alpha_p : M_N -> M_N (x) B(H_p), stored through the images of the matrix
// units of M_N.  All composites use the leg order (M, pi, rho, ...).
struct DualAction {
  std::shared_ptr<const GroupDual> D;
  int N = 1;
  std::vector<std::vector<MatC>> img;  // img[p][a*N+b] = alpha_p(e_ab)

  MatC apply(int p, const MatC& x) const {
    const int dp = D->d(p);
    MatC out = MatC::Zero(Eigen::Index(N) * dp, Eigen::Index(N) * dp);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        const cxd c = x(a, b);
        if (c != cxd(0, 0)) out += c * img[p][size_t(a) * N + b];
      }
    return out;
  }

  // (alpha_p (x) id_W)(y) for y in M_N (x) B(W), given the W block sizes.
  // Output legs are (M, pi, W).
  MatC applyRect(int p, const MatC& y, Eigen::Index wR, Eigen::Index wC) const {
    const int dp = D->d(p);
    MatC out = MatC::Zero(Eigen::Index(N) * dp * wR, Eigen::Index(N) * dp * wC);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        MatC blk = blockAt(y, N, wR, wC, a, b);
        if (blk.norm() == 0) continue;
        out += kron(img[p][size_t(a) * N + b], blk);
      }
    return out;
  }
};

inline DualAction actionFromFunction(std::shared_ptr<const GroupDual> D, int N,
                                     const std::function<MatC(int, const MatC&)>& f) {
  DualAction a;
  a.D = std::move(D);
  a.N = N;
  a.img.resize(a.D->k());
  for (int p = 0; p < a.D->k(); ++p) {
    a.img[p].resize(size_t(N) * N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) a.img[p][size_t(i) * N + j] = f(p, matrixUnit(N, i, j));
  }
  return a;
}

inline DualAction trivialAction(std::shared_ptr<const GroupDual> D, int N) {
  const GroupDual* raw = D.get();
  return actionFromFunction(std::move(D), N,
                            [raw](int p, const MatC& x) { return kron(x, eye(raw->d(p))); });
}

// Unitary representation of the dual: U[p] in M_N (x) B(H_p), U[0] = 1.
struct DualRepresentation {
  std::shared_ptr<const GroupDual> D;
  int N = 1;
  std::vector<MatC> U;

  MatC entry(int p, int i, int j) const { return entryBlock(U[p], N, D->d(p), D->d(p), i, j); }
};

inline DualRepresentation trivialRepresentation(std::shared_ptr<const GroupDual> D, int N) {
  DualRepresentation r;
  r.D = std::move(D);
  r.N = N;
  for (int p = 0; p < r.D->k(); ++p) r.U.push_back(eye(Eigen::Index(N) * r.D->d(p)));
  return r;
}

// Member of the family at an arbitrary label, transported along intertwiners.
inline MatC representationAt(const DualRepresentation& rep, const RepLabel& xi) {
  return extendFamilyToRep(*rep.D, rep.U, rep.N, xi);
}

inline CheckReport checkRepresentation(const DualRepresentation& rep, double tol = 1e-9) {
  const GroupDual& D = *rep.D;
  const int N = rep.N, k = D.k();
  if (int(rep.U.size()) != k) throw IncompatibleSystems("checkRepresentation: family size");
  for (int p = 0; p < k; ++p)
    if (rep.U[p].rows() != Eigen::Index(N) * D.d(p) || rep.U[p].cols() != rep.U[p].rows())
      throw IncompatibleSystems("checkRepresentation: block shape at class " + std::to_string(p));

  CheckReport rpt;
  rpt.add("unit at trivial", normTau2(rep.U[0] - eye(N)), tol);

  double ures = 0;
  for (int p = 0; p < k; ++p) {
    ures = std::max(ures, normTau2(rep.U[p].adjoint() * rep.U[p] - eye(rep.U[p].rows())));
    ures = std::max(ures, normTau2(rep.U[p] * rep.U[p].adjoint() - eye(rep.U[p].rows())));
  }
  rpt.add("unitarity", ures, tol);

  double fres = 0;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      const int dp = D.d(p), dq = D.d(q);
      MatC u13 = insertIdentityLeg(rep.U[q], {Eigen::Index(N), dq}, {Eigen::Index(N), dq}, 1, dp);
      MatC lhs = kron(rep.U[p], eye(dq)) * u13;
      for (int s = 0; s < k; ++s) {
        if (D.fus[p][q][s] == 0) continue;
        for (const MatC& T : intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)))) {
          MatC lift = kron(eye(N), T);
          fres = std::max(fres, resNorm(lhs * lift - lift * rep.U[s]));
        }
      }
    }
  rpt.add("representation identity", fres, tol);

  // Conjugate coefficients: the family member at the conjugate label has
  // entries (U_pi_ij)^* in M_N.
  std::vector<MatC> barU(k);
  double cres = 0;
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p);
    barU[p] = representationAt(rep, RepLabel::bar(RepLabel::irr(p)));
    std::vector<MatC> blocks(size_t(dp) * dp);
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) blocks[size_t(i) * dp + j] = rep.entry(p, i, j).adjoint();
    cres = std::max(cres, normTau2(barU[p] - fromEntryBlocks(blocks, N, dp)));
  }
  rpt.add("conjugate coefficients", cres, tol);

  double comm = 0;
  for (int p = 0; p < k; ++p)
    for (int q = p; q < k; ++q)
      for (int i = 0; i < D.d(p); ++i)
        for (int j = 0; j < D.d(p); ++j) {
          MatC A = rep.entry(p, i, j);
          for (int l = 0; l < D.d(q); ++l)
            for (int m = 0; m < D.d(q); ++m) {
              MatC B = rep.entry(q, l, m);
              comm = std::max(comm, normTau2(A * B - B * A));
            }
        }
  rpt.add("commuting coefficients", comm, tol);

  // Conjugate representation: V_pi := U_{bar pi}^* satisfies the identity
  // with entrywise conjugated intertwiners.
  std::vector<MatC> V(k);
  for (int p = 0; p < k; ++p) V[p] = barU[p].adjoint();
  double vres = 0;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      const int dp = D.d(p), dq = D.d(q);
      MatC v13 = insertIdentityLeg(V[q], {Eigen::Index(N), dq}, {Eigen::Index(N), dq}, 1, dp);
      MatC lhs = kron(V[p], eye(dq)) * v13;
      for (int s = 0; s < k; ++s) {
        if (D.fus[p][q][s] == 0) continue;
        for (const MatC& T : intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)))) {
          MatC lift = kron(eye(N), T.conjugate());
          vres = std::max(vres, resNorm(lhs * lift - lift * V[s]));
        }
      }
    }
  rpt.add("conjugate representation", vres, tol);

  return rpt;
}

inline CheckReport checkAction(const DualAction& act, double tol = 1e-9) {
  const GroupDual& D = *act.D;
  const int N = act.N, k = D.k();
  if (int(act.img.size()) != k) throw ActionInvalid("checkAction: family size");
  for (int p = 0; p < k; ++p) {
    if (int(act.img[p].size()) != N * N) throw ActionInvalid("checkAction: unit images at class " + std::to_string(p));
    for (const MatC& m : act.img[p])
      if (m.rows() != Eigen::Index(N) * D.d(p) || m.cols() != m.rows())
        throw ActionInvalid("checkAction: image shape at class " + std::to_string(p));
  }

  CheckReport rpt;
  double idres = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      idres = std::max(idres, normTau2(act.img[0][size_t(a) * N + b] - matrixUnit(N, a, b)));
  rpt.add("identity at trivial class", idres, tol);

  double ures = 0, sres = 0;
  for (int p = 0; p < k; ++p) {
    MatC one = MatC::Zero(act.img[p][0].rows(), act.img[p][0].cols());
    for (int a = 0; a < N; ++a) one += act.img[p][size_t(a) * N + a];
    ures = std::max(ures, normTau2(one - eye(one.rows())));
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        sres = std::max(sres, normTau2(act.img[p][size_t(a) * N + b].adjoint() - act.img[p][size_t(b) * N + a]));
  }
  rpt.add("unital", ures, tol);
  rpt.add("star preserving", sres, tol);

  Rng rng(D.seed ^ fnv1a("checkAction"));
  double mres = 0;
  if (N <= 8) {
    for (int p = 0; p < k; ++p)
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c)
            for (int e = 0; e < N; ++e) {
              MatC prod = act.img[p][size_t(a) * N + b] * act.img[p][size_t(c) * N + e];
              if (b == c) prod -= act.img[p][size_t(a) * N + e];
              mres = std::max(mres, normTau2(prod));
            }
  } else {
    for (int t = 0; t < 8; ++t) {
      MatC x = rng.gaussian(N, N), y = rng.gaussian(N, N);
      x /= frob(x);
      y /= frob(y);
      for (int p = 0; p < k; ++p)
        mres = std::max(mres, normTau2(act.apply(p, x) * act.apply(p, y) - act.apply(p, x * y)));
    }
  }
  rpt.add("multiplicative", mres, tol);

  std::vector<MatC> samples;
  if (N <= 3) {
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) samples.push_back(matrixUnit(N, a, b));
  } else {
    for (int t = 0; t < 6; ++t) {
      MatC x = rng.gaussian(N, N);
      samples.push_back(x / frob(x));
    }
  }

  double tres = 0;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      const int dq = D.d(q);
      for (const MatC& x : samples) {
        MatC lifted = act.applyRect(p, act.apply(q, x), dq, dq);
        for (int s = 0; s < k; ++s) {
          if (D.fus[p][q][s] == 0) continue;
          for (const MatC& T : intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)))) {
            MatC lift = kron(eye(N), T);
            tres = std::max(tres, resNorm(lifted * lift - lift * act.apply(s, x)));
          }
        }
      }
    }
  rpt.add("tensor compatibility", tres, tol);

  double ires = 0;
  for (int p = 0; p < k; ++p) {
    const int dp = D.d(p);
    MatC T1 = intertwinerONB(D, 0, RepLabel::tensor(RepLabel::irr(D.barOf[p]), RepLabel::irr(p)))[0];
    MatC lift = kron(eye(N), T1);
    for (size_t t = 0; t < samples.size() && t < 3; ++t) {
      MatC y = act.applyRect(D.barOf[p], act.apply(p, samples[t]), dp, dp);
      ires = std::max(ires, normTau2(lift.adjoint() * y * lift - samples[t]));
    }
  }
  rpt.add("injectivity", ires, tol);

  return rpt;
}

inline DualAction adAction(const DualRepresentation& rep, double tol = 1e-9) {
  CheckReport r = checkRepresentation(rep, tol);
  if (!r.pass())
    throw NotARepresentation("adAction: max residual " + std::to_string(r.maxResidual()));
  DualAction a;
  a.D = rep.D;
  a.N = rep.N;
  a.img.resize(rep.D->k());
  for (int p = 0; p < rep.D->k(); ++p) {
    const int dp = rep.D->d(p);
    a.img[p].resize(size_t(a.N) * a.N);
    for (int i = 0; i < a.N; ++i)
      for (int j = 0; j < a.N; ++j)
        a.img[p][size_t(i) * a.N + j] =
            rep.U[p] * kron(matrixUnit(a.N, i, j), eye(dp)) * rep.U[p].adjoint();
  }
  return a;
}

// Matrix units of the group algebra generated by the left translations:
// dpi/|G| sum_g conj(pi(g)_ij) L_g is a genuine matrix unit system in B(l2 G).
inline std::vector<std::vector<MatC>> dualMatrixUnits(const GroupDual& D) {
  auto L = leftTranslations(D.G);
  std::vector<std::vector<MatC>> units(D.k());
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    units[p].assign(size_t(dp) * dp, MatC::Zero(D.n(), D.n()));
    for (int i = 0; i < dp; ++i)
      for (int j = 0; j < dp; ++j) {
        MatC& u = units[p][size_t(i) * dp + j];
        for (int g = 0; g < D.n(); ++g) u += std::conj(D.irr[p].mats[g](i, j)) * L[g];
        u *= double(dp) / double(D.n());
      }
  }
  return units;
}

// The same action packaged as a single coaction M_N -> M_N (x) B(l2 G).
struct Coaction {
  std::shared_ptr<const GroupDual> D;
  int N = 1;
  std::vector<MatC> img;  // img[a*N+b] = alpha(e_ab)

  MatC apply(const MatC& x) const {
    MatC out = MatC::Zero(img[0].rows(), img[0].cols());
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        const cxd c = x(a, b);
        if (c != cxd(0, 0)) out += c * img[size_t(a) * N + b];
      }
    return out;
  }

  // Fourier coefficient of the image: alpha(x) = sum_h Phi_h(x) (x) L_h.
  MatC phi(int h, const MatC& x) const {
    auto L = leftTranslations(D->G);
    return partialTraceRight(apply(x) * kron(eye(N), L[h].adjoint()), N, D->n()) / double(D->n());
  }
};

inline Coaction coactionFromRoberts(const DualAction& act) {
  const GroupDual& D = *act.D;
  auto units = dualMatrixUnits(D);
  Coaction c;
  c.D = act.D;
  c.N = act.N;
  c.img.assign(size_t(act.N) * act.N, MatC::Zero(Eigen::Index(act.N) * D.n(), Eigen::Index(act.N) * D.n()));
  for (int a = 0; a < act.N; ++a)
    for (int b = 0; b < act.N; ++b) {
      MatC& m = c.img[size_t(a) * act.N + b];
      for (int p = 0; p < D.k(); ++p) {
        const int dp = D.d(p);
        const MatC& im = act.img[p][size_t(a) * act.N + b];
        for (int i = 0; i < dp; ++i)
          for (int j = 0; j < dp; ++j)
            m += kron(entryBlock(im, act.N, dp, dp, i, j), units[p][size_t(i) * dp + j]);
      }
    }
  return c;
}

inline DualAction robertsFromCoaction(const Coaction& c) {
  const GroupDual& D = *c.D;
  auto units = dualMatrixUnits(D);
  DualAction a;
  a.D = c.D;
  a.N = c.N;
  a.img.resize(D.k());
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    a.img[p].resize(size_t(c.N) * c.N);
    for (int x = 0; x < c.N; ++x)
      for (int y = 0; y < c.N; ++y) {
        std::vector<MatC> blocks(size_t(dp) * dp);
        for (int i = 0; i < dp; ++i)
          for (int j = 0; j < dp; ++j)
            blocks[size_t(i) * dp + j] =
                partialTraceRight(c.img[size_t(x) * c.N + y] * kron(eye(c.N), units[p][size_t(j) * dp + i]),
                                  c.N, D.n()) /
                double(dp);
        a.img[p][size_t(x) * c.N + y] = fromEntryBlocks(blocks, c.N, dp);
      }
  }
  return a;
}

// Residual of (alpha (x) id) o alpha = (id (x) Delta) o alpha, evaluated in
// Fourier coefficients: Phi_g o Phi_h = delta_{g,h} Phi_h.
inline double coactionIdentityResidual(const Coaction& c, int nSamples = 3) {
  const GroupDual& D = *c.D;
  Rng rng(D.seed ^ fnv1a("coactionIdentity"));
  double res = 0;
  for (int t = 0; t < nSamples; ++t) {
    MatC x = rng.gaussian(c.N, c.N);
    x /= frob(x);
    for (int h = 0; h < D.n(); ++h) {
      MatC ch = c.phi(h, x);
      for (int g = 0; g < D.n(); ++g) {
        MatC lhs = c.phi(g, ch);
        if (g == h) lhs -= ch;
        res = std::max(res, normTau2(lhs));
      }
    }
  }
  return res;
}

// Orthonormal basis (in the vec inner product) of {a : alpha_p(a) = a (x) 1 for all p}.
inline std::vector<MatC> fixedPointAlgebra(const DualAction& act, double tol = 1e-9) {
  const GroupDual& D = *act.D;
  const int N = act.N;
  Eigen::Index rows = 0;
  for (int p = 1; p < D.k(); ++p) rows += Eigen::Index(N) * D.d(p) * N * D.d(p);
  MatC F(std::max<Eigen::Index>(rows, 1), Eigen::Index(N) * N);
  F.setZero();
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      Eigen::Index off = 0;
      for (int p = 1; p < D.k(); ++p) {
        MatC diff = act.img[p][size_t(a) * N + b] - kron(matrixUnit(N, a, b), eye(D.d(p)));
        F.block(off, Eigen::Index(a) * N + b, diff.size(), 1) = vecOf(diff);
        off += diff.size();
      }
    }
  MatC ns = nullSpaceBasis(F, tol);
  std::vector<MatC> basis;
  for (Eigen::Index c = 0; c < ns.cols(); ++c) basis.push_back(unvec(ns.col(c), N, N));
  return basis;
}

// Distance in the vec norm from x to the span of the basis.
inline double spanResidual(const std::vector<MatC>& basis, const MatC& x) {
  if (basis.empty()) return frob(x);
  MatC B(x.size(), Eigen::Index(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i) B.col(i) = vecOf(basis[i]);
  VecC v = vecOf(x);
  VecC coef = (B.adjoint() * B).ldlt().solve(B.adjoint() * v);
  return (v - B * coef).norm();
}

// Dimension of {a in M_N (x) B(H_p) : alpha_p(x) a = a (x (x) 1) for all x}.
// Zero at every p != 1 means the action is free.
inline int freenessObstruction(const DualAction& act, int p, double tol = 1e-9) {
  const GroupDual& D = *act.D;
  const int N = act.N, dp = D.d(p);
  const Eigen::Index n = Eigen::Index(N) * dp;
  if (n > 64) throw CapExceeded("freenessObstruction: system dimension " + std::to_string(n));
  MatC x1 = MatC::Zero(N, N), x2 = MatC::Zero(N, N);
  for (int a = 0; a < N; ++a) {
    x1(a, a) = double(a + 1);
    x2(a, (a + 1) % N) = 1;
  }
  MatC sys(2 * n * n, n * n);
  const MatC id = eye(n);
  int row = 0;
  for (const MatC& x : {x1, x2}) {
    MatC P = act.apply(p, x);
    MatC Q = kron(x, eye(dp));
    sys.block(row * n * n, 0, n * n, n * n) = kron(id, P) - kron(Q.transpose(), id);
    ++row;
  }
  return int(n * n - rankOf(sys, tol));
}

inline CheckReport areConjugate(const DualAction& a, const DualAction& b, const MatC& u,
                                double tol = 1e-9) {
  if (a.N != b.N || a.D->k() != b.D->k())
    throw IncompatibleSystems("areConjugate: mismatched actions");
  const int N = a.N;
  CheckReport rpt;
  rpt.add("conjugator unitary", normTau2(u.adjoint() * u - eye(N)), tol);
  double res = 0;
  for (int p = 0; p < a.D->k(); ++p) {
    MatC lift = kron(u, eye(a.D->d(p)));
    for (int x = 0; x < N; ++x)
      for (int y = 0; y < N; ++y) {
        MatC e = matrixUnit(N, x, y);
        MatC lhs = lift * a.apply(p, u.adjoint() * e * u) * lift.adjoint();
        res = std::max(res, normTau2(lhs - b.apply(p, e)));
      }
  }
  rpt.add("conjugacy", res, tol);
  return rpt;
}

// alpha (x) id_K on M_N (x) M_K, indexed by (a*K+c, b*K+d).
inline DualAction amplify(const DualAction& act, int K) {
  const GroupDual& D = *act.D;
  const int N = act.N;
  DualAction out;
  out.D = act.D;
  out.N = N * K;
  out.img.resize(D.k());
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    out.img[p].resize(size_t(N) * K * N * K);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        MatC base = act.img[p][size_t(a) * N + b];
        for (int c = 0; c < K; ++c)
          for (int d = 0; d < K; ++d) {
            MatC big = kron(base, matrixUnit(K, c, d));  // legs (M, pi, K)
            out.img[p][size_t(a * K + c) * N * K + (b * K + d)] =
                permuteLegs(big, {Eigen::Index(N), dp, K}, {Eigen::Index(N), dp, K}, {0, 2, 1});
          }
      }
  }
  return out;
}

}  // namespace gdual

#pragma once

#include "dual_action.hpp"

namespace gdual {

// l2(G^) with orthonormal basis {dpi^{-1/2} e^pi_ij}, class-major then (i,j)
// row-major.  Its dimension is |G|.
struct DualHilbert {
  std::shared_ptr<const GroupDual> D;
  int dim = 0;
  std::vector<int> offset;

  int index(int p, int i, int j) const { return offset[p] + i * D->d(p) + j; }
};

inline DualHilbert dualHilbert(std::shared_ptr<const GroupDual> D) {
  DualHilbert H;
  H.D = std::move(D);
  H.offset.resize(H.D->k());
  int off = 0;
  for (int p = 0; p < H.D->k(); ++p) {
    H.offset[p] = off;
    off += H.D->d(p) * H.D->d(p);
  }
  H.dim = off;
  return H;
}

// System of matrix units indexed by pairs of l2(G^) basis labels, living in
// an ambient M_N.
struct MatrixUnitSystem {
  DualHilbert H;
  int N = 0;
  std::vector<MatC> e;  // e[x * H.dim + y]

  const MatC& at(int x, int y) const { return e[size_t(x) * H.dim + y]; }
  MatC& at(int x, int y) { return e[size_t(x) * H.dim + y]; }
};

inline MatrixUnitSystem standardMatrixUnits(std::shared_ptr<const GroupDual> D) {
  MatrixUnitSystem E;
  E.H = dualHilbert(std::move(D));
  E.N = E.H.dim;
  E.e.resize(size_t(E.N) * E.N);
  for (int x = 0; x < E.H.dim; ++x)
    for (int y = 0; y < E.H.dim; ++y) E.at(x, y) = matrixUnit(E.N, x, y);
  return E;
}

inline MatrixUnitSystem conjugateSystem(const MatrixUnitSystem& E, const MatC& v) {
  MatrixUnitSystem F = E;
  for (MatC& m : F.e) m = v * m * v.adjoint();
  return F;
}

inline void validateMatrixUnits(const MatrixUnitSystem& E, double tol = 1e-9) {
  const int d = E.H.dim;
  if (int(E.e.size()) != d * d) throw InvalidMatrixUnits("wrong number of units");
  for (const MatC& m : E.e)
    if (m.rows() != E.N || m.cols() != E.N) throw InvalidMatrixUnits("ambient shape mismatch");
  MatC sum = MatC::Zero(E.N, E.N);
  for (int x = 0; x < d; ++x) sum += E.at(x, x);
  if (normTau2(sum - eye(E.N)) > tol) throw InvalidMatrixUnits("units do not sum to 1");
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y) {
      if (normTau2(E.at(x, y).adjoint() - E.at(y, x)) > tol)
        throw InvalidMatrixUnits("adjoint rule fails");
      for (int z = 0; z < d; ++z)
        for (int w = 0; w < d; ++w) {
          MatC prod = E.at(x, y) * E.at(z, w);
          if (y == z) prod -= E.at(x, w);
          if (normTau2(prod) > tol) throw InvalidMatrixUnits("product rule fails");
        }
    }
}

// The left multiplication representation on l2(G^):
// (lambda_{pi_ij} v)(rho) = sum_{sigma,e} T^{bar sigma,e}_{bar rho,pi_i} v(sigma)
// T^{bar sigma,e*}_{bar rho,pi_j}, written in the orthonormal basis.
inline DualRepresentation modelRepresentation(std::shared_ptr<const GroupDual> Dp) {
  const GroupDual& D = *Dp;
  DualHilbert H = dualHilbert(Dp);
  const int n = H.dim;
  DualRepresentation rep;
  rep.D = Dp;
  rep.N = n;
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    std::vector<MatC> blocks(size_t(dp) * dp, MatC::Zero(n, n));
    for (int r = 0; r < D.k(); ++r) {
      const int dr = D.d(r);
      for (int s = 0; s < D.k(); ++s) {
        const int ds = D.d(s);
        if (D.fus[D.barOf[r]][p][D.barOf[s]] == 0) continue;
        const double scale = std::sqrt(double(dr) / double(ds));
        auto onb = intertwinerONB(
            D, RepLabel::bar(RepLabel::irr(s)),
            RepLabel::tensor(RepLabel::bar(RepLabel::irr(r)), RepLabel::irr(p)));
        for (const MatC& T : onb)
          for (int i = 0; i < dp; ++i)
            for (int j = 0; j < dp; ++j) {
              MatC& blk = blocks[size_t(i) * dp + j];
              for (int k = 0; k < dr; ++k)
                for (int l = 0; l < dr; ++l)
                  for (int m = 0; m < ds; ++m)
                    for (int nn = 0; nn < ds; ++nn)
                      blk(H.index(r, k, l), H.index(s, m, nn)) +=
                          scale * T(Eigen::Index(k) * dp + i, m) *
                          std::conj(T(Eigen::Index(l) * dp + j, nn));
            }
      }
    }
    rep.U.push_back(fromEntryBlocks(blocks, n, dp));
  }
  return rep;
}

// The same family written against an arbitrary matrix unit system E:
// lambda^E_{pi_ij} = sum sqrt(drho/dsigma) T^{sigma_m,e}_{pi_i,rho_k}
// conj(T^{sigma_n,e}_{pi_j,rho_l}) e_{sigma_mn,rho_kl}.
inline DualRepresentation lambdaFromMatrixUnits(std::shared_ptr<const GroupDual> Dp,
                                                const MatrixUnitSystem& E, double tol = 1e-9) {
  const GroupDual& D = *Dp;
  validateMatrixUnits(E, tol);
  DualRepresentation rep;
  rep.D = Dp;
  rep.N = E.N;
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    std::vector<MatC> blocks(size_t(dp) * dp, MatC::Zero(E.N, E.N));
    for (int r = 0; r < D.k(); ++r) {
      const int dr = D.d(r);
      for (int s = 0; s < D.k(); ++s) {
        const int ds = D.d(s);
        if (D.fus[p][r][s] == 0) continue;
        const double scale = std::sqrt(double(dr) / double(ds));
        auto onb = intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(r)));
        for (const MatC& T : onb)
          for (int i = 0; i < dp; ++i)
            for (int j = 0; j < dp; ++j) {
              MatC& blk = blocks[size_t(i) * dp + j];
              for (int k = 0; k < dr; ++k)
                for (int l = 0; l < dr; ++l)
                  for (int m = 0; m < ds; ++m)
                    for (int nn = 0; nn < ds; ++nn)
                      blk += scale * T(Eigen::Index(i) * dr + k, m) *
                             std::conj(T(Eigen::Index(j) * dr + l, nn)) *
                             E.at(E.H.index(s, m, nn), E.H.index(r, k, l));
            }
      }
    }
    rep.U.push_back(fromEntryBlocks(blocks, E.N, dp));
  }
  return rep;
}

// Inverse direction: e_{pi_ij,rho_kl} = sqrt(dpi drho) lambda_{pi_ij} e_{1,1}
// lambda_{rho_kl}^*.
inline MatrixUnitSystem matrixUnitsFromLambda(const DualRepresentation& rep, const MatC& e11) {
  const GroupDual& D = *rep.D;
  MatrixUnitSystem E;
  E.H = dualHilbert(rep.D);
  E.N = rep.N;
  E.e.resize(size_t(E.H.dim) * E.H.dim);
  for (int p = 0; p < D.k(); ++p)
    for (int i = 0; i < D.d(p); ++i)
      for (int j = 0; j < D.d(p); ++j) {
        MatC left = rep.entry(p, i, j) * e11;
        for (int r = 0; r < D.k(); ++r)
          for (int k = 0; k < D.d(r); ++k)
            for (int l = 0; l < D.d(r); ++l)
              E.at(E.H.index(p, i, j), E.H.index(r, k, l)) =
                  std::sqrt(double(D.d(p)) * D.d(r)) * left * rep.entry(r, k, l).adjoint();
      }
  return E;
}

// Level-n model unitaries: lambda~^n = (lambda~^{n-1} with a fresh tensor slot)
// times a fresh copy of lambda on that slot.
inline DualRepresentation productModelUnitaries(std::shared_ptr<const GroupDual> Dp, int n,
                                                long cap = 256) {
  const GroupDual& D = *Dp;
  long dim = 1;
  for (int t = 0; t < n; ++t) {
    dim *= D.n();
    if (dim > cap) throw CapExceeded("productModelUnitaries: |G|^n exceeds cap");
  }
  if (n < 1) throw CapExceeded("productModelUnitaries: level must be >= 1");
  DualRepresentation lvl = modelRepresentation(Dp);
  DualRepresentation cur = lvl;
  for (int t = 2; t <= n; ++t) {
    DualRepresentation next;
    next.D = Dp;
    next.N = cur.N * D.n();
    for (int p = 0; p < D.k(); ++p) {
      const int dp = D.d(p);
      MatC lifted = insertIdentityLeg(cur.U[p], {Eigen::Index(cur.N), dp},
                                      {Eigen::Index(cur.N), dp}, 1, D.n());
      next.U.push_back(lifted * kron(eye(cur.N), lvl.U[p]));
    }
    cur = std::move(next);
  }
  return cur;
}

// m^n := Ad lambda~^n (x (x) 1) on M_{|G|^n}.
inline DualAction productModelAction(std::shared_ptr<const GroupDual> Dp, int n, long cap = 256) {
  DualRepresentation lam = productModelUnitaries(Dp, n, cap);
  const GroupDual& D = *Dp;
  int dmax = 1;
  for (int p = 0; p < D.k(); ++p) dmax = std::max(dmax, D.d(p));
  if (16.0 * dmax * dmax * std::pow(double(lam.N), 4.0) > 2e9)
    throw CapExceeded("productModelAction: materialized unit images exceed memory budget");
  DualAction a;
  a.D = Dp;
  a.N = lam.N;
  a.img.resize(D.k());
  for (int p = 0; p < D.k(); ++p) {
    a.img[p].resize(size_t(a.N) * a.N);
    for (int i = 0; i < a.N; ++i)
      for (int j = 0; j < a.N; ++j)
        a.img[p][size_t(i) * a.N + j] =
            lam.U[p] * kron(matrixUnit(a.N, i, j), eye(D.d(p))) * lam.U[p].adjoint();
  }
  return a;
}

// Equivariance of a matrix unit system: alpha_pi = Ad lambda^E_pi(. (x) 1) on
// the units, plus the two consequences: lambda^{E*} is a 1-cocycle for alpha
// and Ad lambda^{E*} alpha fixes the units.
inline CheckReport checkEquivariant(const MatrixUnitSystem& E, const DualAction& act,
                                    double tol = 1e-9) {
  const GroupDual& D = *act.D;
  if (E.N != act.N) throw IncompatibleSystems("checkEquivariant: ambient mismatch");
  DualRepresentation lam = lambdaFromMatrixUnits(act.D, E, tol);
  CheckReport rpt;
  double eres = 0;
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    for (int x = 0; x < E.H.dim; ++x)
      for (int y = 0; y < E.H.dim; ++y) {
        MatC rhs = lam.U[p] * kron(E.at(x, y), eye(dp)) * lam.U[p].adjoint();
        eres = std::max(eres, normTau2(act.apply(p, E.at(x, y)) - rhs));
      }
  }
  rpt.add("equivariance", eres, tol);

  double cres = 0;
  for (int p = 0; p < D.k(); ++p)
    for (int q = 0; q < D.k(); ++q) {
      const int dq = D.d(q);
      MatC wp = lam.U[p].adjoint();
      MatC lhs = kron(wp, eye(dq)) * act.applyRect(p, lam.U[q].adjoint(), dq, dq);
      for (int s = 0; s < D.k(); ++s) {
        if (D.fus[p][q][s] == 0) continue;
        for (const MatC& T :
             intertwinerONB(D, s, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)))) {
          MatC lift = kron(eye(act.N), T);
          cres = std::max(cres, resNorm(lhs * lift - lift * lam.U[s].adjoint()));
        }
      }
    }
  rpt.add("adjoint family is a cocycle", cres, tol);

  double fres = 0;
  for (int p = 0; p < D.k(); ++p) {
    const int dp = D.d(p);
    MatC wp = lam.U[p].adjoint();
    for (int x = 0; x < E.H.dim; ++x)
      for (int y = 0; y < E.H.dim; ++y)
        fres = std::max(
            fres, normTau2(wp * act.apply(p, E.at(x, y)) * wp.adjoint() - kron(E.at(x, y), eye(dp))));
  }
  rpt.add("perturbed action fixes units", fres, tol);

  return rpt;
}

}  // namespace gdual

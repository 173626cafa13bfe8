#pragma once

#include "core.hpp"
#include "report.hpp"

namespace gdual {

// ||x||_2 with respect to the normalized trace.
inline double traceTwoNorm(const MatC& x) { return frob(x) / std::sqrt(double(x.rows())); }

struct ProjectionResult {
  MatC p;
  double distance = 0;  // ||p - f||_2, normalized trace
};

// Nearest projection to an almost-projection f with ||f^2-f||_2 <= delta and
// ||f*-f||_2 <= delta: spectral cut of the self-adjoint part at 1/2, with the
// rank chosen to match the (integral) trace of f.  Guarantee: ||p-f||_2 <= 6 delta^{1/4}.
inline ProjectionResult nearestProjection(const MatC& f, double delta) {
  const Eigen::Index N = f.rows();
  MatC h = 0.5 * (f + f.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> es(h);
  double tr = std::real(f.trace());
  long rank = std::lround(tr);
  if (std::abs(tr - double(rank)) > std::max(1e-6, delta * std::sqrt(double(N))))
    throw TraceNotQuantized("nearestProjection: trace of f is not near an integer");
  rank = std::max<long>(0, std::min<long>(rank, N));
  // eigenvalues ascending: keep the `rank` largest
  MatC p = MatC::Zero(N, N);
  for (Eigen::Index i = N - rank; i < N; ++i)
    p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  ProjectionResult r;
  r.p = std::move(p);
  r.distance = traceTwoNorm(r.p - f);
  return r;
}

struct UnitaryResult {
  MatC u;
  double distance = 0;  // ||u - a||_2, normalized trace
};

// Nearest unitary (polar part) to a with ||a*a-1||_2 <= delta, ||a|| <= c.
// Guarantee: ||u-a||_2 <= delta (spectral estimate |s-1| <= |s^2-1|).
inline UnitaryResult nearestUnitary(const MatC& a) {
  UnitaryResult r;
  r.u = polarUnitary(a);
  r.distance = traceTwoNorm(r.u - a);
  return r;
}

// Given two families of matrix units {e_ij}, {f_ij} of the same shape inside
// M_N, return a unitary u with u e_ij u* = f_ij.  Construction: any unitary
// w0 : e_11 H -> f_11 H gives u = sum_i f_i1 w0 e_1i.  We take w0 from the
// isometries onto the corner ranges.
inline MatC matrixUnitConjugator(const std::vector<std::vector<MatC>>& e,
                                 const std::vector<std::vector<MatC>>& f) {
  const size_t n = e.size();
  if (n == 0 || f.size() != n) throw IncompatibleSystems("matrixUnitConjugator: shape mismatch");
  const Eigen::Index N = e[0][0].rows();

  auto cornerIsometry = [N](const MatC& p) {
    Eigen::SelfAdjointEigenSolver<MatC> es(p);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < N; ++i)
      if (es.eigenvalues()(i) > 0.5) idx.push_back(i);
    MatC v(N, Eigen::Index(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) v.col(Eigen::Index(j)) = es.eigenvectors().col(idx[j]);
    return v;
  };

  MatC ve = cornerIsometry(e[0][0]);
  MatC vf = cornerIsometry(f[0][0]);
  if (ve.cols() != vf.cols()) throw IncompatibleSystems("matrixUnitConjugator: corner rank mismatch");
  MatC w0 = vf * ve.adjoint();

  MatC u = MatC::Zero(N, N);
  for (size_t i = 0; i < n; ++i) u += f[i][0] * w0 * e[0][i];
  return u;
}

// Conditional expectation onto the relative commutant of a matrix unit family
// {e_ij} spanning a unital copy of M_n: E(x) = (1/n) sum_{ij} e_ij x e_ji.
inline MatC relativeCommutantExpectation(const std::vector<std::vector<MatC>>& e, const MatC& x) {
  const size_t n = e.size();
  MatC out = MatC::Zero(x.rows(), x.cols());
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out += e[i][j] * x * e[j][i];
  return out / double(n);
}

}  // namespace gdual

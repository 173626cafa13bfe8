#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdual {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;

inline MatC eye(Eigen::Index n) { return MatC::Identity(n, n); }

inline MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline MatC kron(const MatC& a, const MatC& b, const MatC& c) { return kron(kron(a, b), c); }

inline double frob(const MatC& a) { return a.norm(); }

// Relative Frobenius residual of A against reference B.
inline double relResidual(const MatC& a, const MatC& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// Normalized trace tr(x)/n.
inline cxd tau(const MatC& x) { return x.trace() / cxd(double(x.rows()), 0.0); }

// Trace 2-norm sqrt(tau(x* x)) = frob / sqrt(n).
inline double normTau2(const MatC& x) { return x.norm() / std::sqrt(double(x.rows())); }

inline double opNorm(const MatC& x) {
  Eigen::JacobiSVD<MatC> svd(x);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

// Deterministic RNG.  Gaussian is hand-rolled Box-Muller so that streams do not
// depend on the standard library's distribution implementation.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}

  double uniform() {  // in [0,1)
    return (gen() >> 11) * (1.0 / 9007199254740992.0);
  }
  double gauss() {
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 1e-300);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }
  cxd cgauss() { return cxd(gauss(), gauss()) / std::sqrt(2.0); }

  MatC gaussian(Eigen::Index r, Eigen::Index c) {
    MatC m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cgauss();
    return m;
  }
  MatC hermitian(Eigen::Index n) {
    MatC a = gaussian(n, n);
    return (a + a.adjoint()) / 2.0;
  }
  MatC unitary(Eigen::Index n) {
    Eigen::HouseholderQR<MatC> qr(gaussian(n, n));
    MatC q = qr.householderQ() * MatC::Identity(n, n);
    MatC r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
      cxd d = r(j, j);
      q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cxd(1, 0));
    }
    return q;
  }
};

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---- leg bookkeeping -------------------------------------------------------
//
// A matrix with row index split into legs of dimensions rdims (row-major
// mixed radix, leftmost leg slowest) and likewise cdims for columns.

inline std::vector<Eigen::Index> legStrides(const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::Index> s(dims.size(), 1);
  for (int i = int(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}

// Permute legs of both row and column indices by `perm`: new leg k is old leg perm[k].
inline MatC permuteLegs(const MatC& x, const std::vector<Eigen::Index>& rdims,
                        const std::vector<Eigen::Index>& cdims, const std::vector<int>& perm) {
  const size_t L = perm.size();
  std::vector<Eigen::Index> nrd(L), ncd(L);
  for (size_t k = 0; k < L; ++k) {
    nrd[k] = rdims[perm[k]];
    ncd[k] = cdims[perm[k]];
  }
  auto rs = legStrides(rdims), cs = legStrides(cdims);
  auto nrs = legStrides(nrd), ncs = legStrides(ncd);
  MatC out(x.rows(), x.cols());
  std::vector<Eigen::Index> ri(L), ci(L);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Eigen::Index t = r;
    for (size_t k = 0; k < L; ++k) {
      ri[k] = t / rs[k];
      t %= rs[k];
    }
    Eigen::Index nr = 0;
    for (size_t k = 0; k < L; ++k) nr += ri[perm[k]] * nrs[k];
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      Eigen::Index u = c;
      for (size_t k = 0; k < L; ++k) {
        ci[k] = u / cs[k];
        u %= cs[k];
      }
      Eigen::Index nc = 0;
      for (size_t k = 0; k < L; ++k) nc += ci[perm[k]] * ncs[k];
      out(nr, nc) = x(r, c);
    }
  }
  return out;
}

// View x as element of M_N (x) B(W_c -> W_r) and extract the (a,b) block in B(W_c->W_r).
inline MatC blockAt(const MatC& x, Eigen::Index N, Eigen::Index wR, Eigen::Index wC,
                    Eigen::Index a, Eigen::Index b) {
  (void)N;
  return x.block(a * wR, b * wC, wR, wC);
}

// Insert an identity leg of dimension d at position pos (0-based) of a square-legged matrix.
inline MatC insertIdentityLeg(const MatC& x, const std::vector<Eigen::Index>& rdims,
                              const std::vector<Eigen::Index>& cdims, size_t pos, Eigen::Index d) {
  MatC big = kron(x, eye(d));  // legs (..., d)
  std::vector<Eigen::Index> rd = rdims, cd = cdims;
  rd.push_back(d);
  cd.push_back(d);
  std::vector<int> perm;
  for (size_t k = 0; k < rd.size(); ++k) perm.push_back(int(k));
  // move last leg to position pos
  int moving = int(rd.size()) - 1;
  perm.erase(perm.begin() + moving);
  perm.insert(perm.begin() + int(pos), moving);
  return permuteLegs(big, rd, cd, perm);
}

// Hermitian square root and inverse square root of a positive matrix.
inline MatC psdPower(const MatC& s, double p) {
  Eigen::SelfAdjointEigenSolver<MatC> es(s);
  VecD ev = es.eigenvalues();
  MatC d = MatC::Zero(ev.size(), ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = std::max(ev(i), 0.0);
    d(i, i) = std::pow(v, p);
  }
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

// Polar part of an (invertible or not) matrix: the unitary from the SVD.
inline MatC polarUnitary(const MatC& a) {
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double smallestSingularValue(const MatC& a) {
  Eigen::JacobiSVD<MatC> svd(a);
  const auto& sv = svd.singularValues();
  return sv.size() ? sv(sv.size() - 1) : 0.0;
}

// Orthonormal basis of the null space of a (columns), via SVD with threshold.
inline MatC nullSpaceBasis(const MatC& a, double tol) {
  Eigen::JacobiSVD<MatC> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double scale = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, scale)) ++rank;
  return svd.matrixV().rightCols(svd.matrixV().cols() - rank);
}

inline Eigen::Index rankOf(const MatC& a, double tol) {
  Eigen::JacobiSVD<MatC> svd(a);
  const auto& sv = svd.singularValues();
  double scale = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, scale)) ++rank;
  return rank;
}

inline MatC vecOf(const MatC& x) {
  MatC v(x.rows() * x.cols(), 1);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) v(k++, 0) = x(i, j);
  return v;
}

inline MatC unvec(const MatC& v, Eigen::Index rows, Eigen::Index cols) {
  MatC x(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = v(k++, 0);
  return x;
}

struct GdualError : std::runtime_error {
  explicit GdualError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gdual

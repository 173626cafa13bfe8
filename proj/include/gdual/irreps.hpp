#pragma once

#include "group.hpp"

namespace gdual {

struct Irrep {
  int dim = 0;
  std::vector<MatC> mats;  // one unitary per group element
  VecC character;          // evaluated on every group element
};

struct DecompositionFailed : GdualError {
  explicit DecompositionFailed(const std::string& w) : GdualError(w) {}
};

namespace detail {

inline VecC characterOf(const std::vector<MatC>& mats) {
  VecC chi(Eigen::Index(mats.size()));
  for (size_t g = 0; g < mats.size(); ++g) chi(Eigen::Index(g)) = mats[g].trace();
  return chi;
}

inline bool sameCharacter(const VecC& a, const VecC& b, double tol = 1e-6) {
  return (a - b).cwiseAbs().maxCoeff() < tol;
}

}  // namespace detail

// Decompose the right regular representation: eigenspaces of a random
// self-adjoint element of its commutant (built from left translations) are
// invariant; generically each carries one irreducible.  Blocks are unitarized
// by averaging the inner product over the group, deduplicated by character,
// and sorted (trivial first, then dimension, then character lexicographically).
inline std::vector<Irrep> computeIrreps(const Group& G, double tol = 1e-9, uint64_t seed = 0) {
  const int n = G.n;
  auto u = regularRepresentation(G);
  auto L = leftTranslations(G);
  auto classes = conjugacyClasses(G);
  std::string lastError = "no attempt";

  for (int attempt = 0; attempt < 5; ++attempt) {
    Rng rng(seed ^ fnv1a("irreps:" + std::to_string(attempt)));
    MatC a = MatC::Zero(n, n);
    for (int g = 0; g < n; ++g) a += rng.cgauss() * L[g];
    MatC x = a + a.adjoint();

    Eigen::SelfAdjointEigenSolver<MatC> es(x);
    const VecD ev = es.eigenvalues();
    const MatC evec = es.eigenvectors();

    // cluster eigenvalues by gaps
    std::vector<std::pair<int, int>> clusters;  // [start, len)
    int start = 0;
    for (int i = 1; i <= n; ++i) {
      if (i == n || ev(i) - ev(i - 1) > 1e-6 * std::max(1.0, std::abs(ev(n - 1)))) {
        clusters.push_back({start, i - start});
        start = i;
      }
    }

    std::vector<Irrep> out;
    bool ok = true;
    for (auto [s, len] : clusters) {
      MatC V = evec.middleCols(s, len);
      std::vector<MatC> mats(n);
      for (int g = 0; g < n; ++g) mats[g] = V.adjoint() * u[g] * V;
      // unitarize: average the induced inner product and conjugate by its root
      MatC S = MatC::Zero(len, len);
      for (int g = 0; g < n; ++g) S += mats[g].adjoint() * mats[g];
      S /= double(n);
      MatC w = psdPower(S, 0.5), wi = psdPower(S, -0.5);
      for (int g = 0; g < n; ++g) mats[g] = w * mats[g] * wi;

      VecC chi = detail::characterOf(mats);
      double norm2 = 0;
      for (int g = 0; g < n; ++g) norm2 += std::norm(chi(g));
      norm2 /= double(n);
      if (std::abs(norm2 - 1.0) > 1e-6) {
        lastError = "eigenvalue cluster carries a reducible block";
        ok = false;
        break;
      }
      bool dup = false;
      for (const auto& r : out)
        if (r.dim == len && detail::sameCharacter(r.character, chi)) { dup = true; break; }
      if (!dup) out.push_back(Irrep{len, std::move(mats), chi});
    }
    if (!ok) continue;

    // sort: trivial first, then dim, then character values on ordered classes
    auto charKey = [&](const Irrep& r) {
      std::vector<double> key;
      key.push_back(double(r.dim));
      for (const auto& c : classes) {
        cxd v = r.character(c[0]);
        key.push_back(std::round(v.real() * 1e8) / 1e8);
        key.push_back(std::round(v.imag() * 1e8) / 1e8);
      }
      return key;
    };
    std::sort(out.begin(), out.end(),
              [&](const Irrep& a2, const Irrep& b2) { return charKey(a2) < charKey(b2); });
    // trivial representation must exist and sorts first among dim-1 blocks
    for (size_t i = 0; i < out.size(); ++i) {
      bool triv = out[i].dim == 1;
      if (triv)
        for (int g = 0; g < n; ++g) triv = triv && std::abs(out[i].character(g) - 1.0) < 1e-8;
      if (triv) {
        std::rotate(out.begin(), out.begin() + i, out.begin() + i + 1);
        break;
      }
    }

    // validate
    int sumSq = 0;
    for (const auto& r : out) sumSq += r.dim * r.dim;
    if (sumSq != n || out.size() != classes.size()) {
      lastError = "irreducible decomposition incomplete (sum of squares " + std::to_string(sumSq) +
                  ", classes " + std::to_string(out.size()) + "/" + std::to_string(classes.size()) + ")";
      continue;
    }
    double res = 0;
    for (const auto& r : out) {
      for (int g = 0; g < n; ++g) {
        res = std::max(res, (r.mats[g].adjoint() * r.mats[g] - eye(r.dim)).norm());
        for (int h = 0; h < n; ++h)
          res = std::max(res, (r.mats[g] * r.mats[h] - r.mats[G.mul(g, h)]).norm());
      }
    }
    if (res > std::max(tol, 1e-10) * 100) {
      lastError = "homomorphism/unitarity residual too large";
      continue;
    }
    if (!out.empty() && out[0].dim == 1) return out;
    lastError = "trivial representation not found";
  }
  throw DecompositionFailed("computeIrreps failed after retries: " + lastError);
}

}  // namespace gdual

#pragma once

#include <memory>

#include "irreps.hpp"
#include "report.hpp"

namespace gdual {

// The dual of a finite group: the group together with a complete family of
// unitary irreducibles, fusion data and cached intertwiner bases.  All random
// choices downstream are keyed off `seed`, so a context is reproducible.
struct GroupDual {
  Group G;
  std::vector<Irrep> irr;
  uint64_t seed = 0;
  double tol = 1e-9;
  std::vector<std::vector<int>> classes;
  std::vector<int> barOf;                          // class of the conjugate irrep
  std::vector<std::vector<std::vector<int>>> fus;  // fus[p][q][s] = N_{pq}^s

  mutable std::map<std::string, std::vector<MatC>> onbCache;
  mutable std::map<std::string, std::vector<MatC>> famCache;

  int k() const { return int(irr.size()); }
  int d(int p) const { return irr[p].dim; }
  int n() const { return G.n; }
};

namespace detail {

inline void completeDual(GroupDual& D) {
  D.classes = conjugacyClasses(D.G);
  const int k = D.k(), n = D.G.n;
  D.barOf.assign(k, -1);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q)
      if (detail::sameCharacter(D.irr[p].character.conjugate(), D.irr[q].character)) {
        D.barOf[p] = q;
        break;
      }
    if (D.barOf[p] < 0) throw GdualError("conjugate irreducible missing");
  }
  D.fus.assign(k, std::vector<std::vector<int>>(k, std::vector<int>(k, 0)));
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      for (int s = 0; s < k; ++s) {
        cxd acc = 0;
        for (int g = 0; g < n; ++g)
          acc += std::conj(D.irr[s].character(g)) * D.irr[p].character(g) * D.irr[q].character(g);
        acc /= double(n);
        int m = int(std::lround(acc.real()));
        if (std::abs(acc - cxd(m, 0)) > 1e-6)
          throw GdualError("fusion coefficient is not integral");
        D.fus[p][q][s] = m;
      }
}

// Unitary u with a_g u = u b_g for unitarily equivalent irreducible unitary
// families, found by averaging matrix units through the pair of actions.
inline MatC schurIntertwiner(const std::vector<MatC>& a, const std::vector<MatC>& b) {
  const Eigen::Index d = a[0].rows();
  const double n = double(a.size());
  MatC s = MatC::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      MatC K = MatC::Zero(d, d);
      K(i, j) = 1;
      s.setZero();
      for (size_t g = 0; g < a.size(); ++g) s += a[g] * K * b[g].adjoint();
      s /= n;
      if (s.norm() > 0.1 / double(d)) return polarUnitary(s);
    }
  throw GdualError("schurIntertwiner: averaging degenerate");
}

// Takagi factor v with s = v v^T for a symmetric unitary s, via a joint real
// orthogonal eigenbasis of the commuting symmetric parts Re(s), Im(s).
inline MatC takagiFactor(const MatC& s) {
  using MatD = Eigen::MatrixXd;
  const Eigen::Index d = s.rows();
  MatD A = s.real(), B = s.imag();
  Eigen::SelfAdjointEigenSolver<MatD> ea(A);
  MatD O(d, d);
  VecC joint(d);
  Eigen::Index col = 0, i = 0;
  while (i < d) {
    Eigen::Index j = i;
    while (j < d && ea.eigenvalues()(j) - ea.eigenvalues()(i) < 1e-8) ++j;
    MatD Q = ea.eigenvectors().middleCols(i, j - i);
    Eigen::SelfAdjointEigenSolver<MatD> eb(MatD(Q.transpose() * B * Q));
    for (Eigen::Index t = 0; t < j - i; ++t, ++col) {
      O.col(col) = Q * eb.eigenvectors().col(t);
      joint(col) = cxd(O.col(col).dot(A * O.col(col)), eb.eigenvalues()(t));
    }
    i = j;
  }
  MatC v(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    v.col(c) = O.col(c).cast<cxd>() * std::exp(cxd(0, std::arg(joint(c)) / 2));
  if ((v * v.transpose() - s).norm() > 1e-8 * double(d))
    throw GdualError("takagiFactor: symmetric factorization failed");
  return v;
}

// Real-type self-conjugate class: rebase to a real form.  With s the
// symmetric unitary intertwining the conjugate family into the original and
// s = v v^T, the family v^T pi(g) conj(v) has real entries.
inline void realifyIrrep(Irrep& r) {
  std::vector<MatC> cf(r.mats.size());
  for (size_t g = 0; g < r.mats.size(); ++g) cf[g] = r.mats[g].conjugate();
  MatC s = schurIntertwiner(cf, r.mats);
  s = polarUnitary(MatC((s + s.transpose()) / 2.0));
  MatC v = takagiFactor(s);
  double imag = 0;
  for (auto& m : r.mats) {
    m = MatC(v.transpose() * m * v.conjugate());
    imag = std::max(imag, m.imag().cwiseAbs().maxCoeff());
    m = m.real().cast<cxd>();
  }
  if (imag > 1e-8) throw GdualError("realifyIrrep: residual imaginary part");
}

// Rebase the family so conjugate classes are entrywise conjugates wherever
// possible: a distinct partner gets the conjugated matrices outright, a
// self paired real-type class gets a real form.  Quaternionic classes admit
// no such basis and are left untouched.
inline void standardizeConjugates(std::vector<Irrep>& irr, const Group& G) {
  const int k = int(irr.size());
  for (int p = 0; p < k; ++p) {
    int q = -1;
    for (int t = 0; t < k; ++t)
      if (sameCharacter(irr[p].character.conjugate(), irr[t].character)) {
        q = t;
        break;
      }
    if (q < 0) throw GdualError("conjugate irreducible missing");
    if (q > p) {
      for (size_t g = 0; g < irr[p].mats.size(); ++g) irr[q].mats[g] = irr[p].mats[g].conjugate();
      irr[q].character = irr[p].character.conjugate();
    } else if (q == p) {
      double mis = 0;
      for (const auto& m : irr[p].mats) mis = std::max(mis, m.imag().cwiseAbs().maxCoeff());
      if (mis < 1e-12) continue;
      cxd fs = 0;
      for (int g = 0; g < G.n; ++g) fs += irr[p].character(G.mul(g, g));
      if (std::lround(fs.real() / double(G.n)) == 1) realifyIrrep(irr[p]);
    }
  }
}

}  // namespace detail

inline GroupDual makeDual(Group G, uint64_t seed = 0, double tol = 1e-9) {
  GroupDual D;
  D.G = std::move(G);
  D.seed = seed;
  D.tol = tol;
  D.irr = computeIrreps(D.G, tol, seed);
  detail::standardizeConjugates(D.irr, D.G);
  detail::completeDual(D);
  return D;
}

// Build a dual context from an explicitly supplied complete family of
// irreducibles (kept in the given order; irreps[0] must be trivial).
inline GroupDual makeDualFromIrreps(Group G, std::vector<Irrep> irreps, uint64_t seed = 0,
                                    double tol = 1e-9) {
  GroupDual D;
  D.G = std::move(G);
  D.seed = seed;
  D.tol = tol;
  D.irr = std::move(irreps);
  const int n = D.G.n;
  long dimSum = 0;
  for (const auto& ir : D.irr) dimSum += long(ir.dim) * ir.dim;
  if (dimSum != n) throw GdualError("irrep family is not complete");
  for (size_t p = 0; p < D.irr.size(); ++p) {
    const auto& ir = D.irr[p];
    if (int(ir.mats.size()) != n) throw GdualError("irrep family size mismatch");
    double worst = 0;
    for (int g = 0; g < n; ++g) {
      worst = std::max(worst, (ir.mats[g].adjoint() * ir.mats[g] - eye(ir.dim)).norm());
      for (int h = 0; h < n; ++h)
        worst = std::max(worst, (ir.mats[g] * ir.mats[h] - ir.mats[D.G.mul(g, h)]).norm());
    }
    cxd nrm = 0;
    for (int g = 0; g < n; ++g) nrm += std::norm(ir.character(g));
    if (worst > 1e-7 || std::abs(nrm / double(n) - cxd(1, 0)) > 1e-7)
      throw NotARepresentation("supplied family member " + std::to_string(p) +
                               " is not a unitary irreducible");
  }
  for (int g = 0; g < n; ++g)
    if (std::abs(D.irr[0].character(g) - cxd(1, 0)) > 1e-7)
      throw GdualError("first supplied irrep is not trivial");
  for (size_t p = 0; p < D.irr.size(); ++p)
    for (size_t q = p + 1; q < D.irr.size(); ++q)
      if (detail::sameCharacter(D.irr[p].character, D.irr[q].character))
        throw GdualError("supplied irreps repeat a character");
  detail::completeDual(D);
  return D;
}

// Frobenius-Schur indicator of a class: +1 real, 0 complex, -1 quaternionic.
inline int frobeniusSchurIndicator(const GroupDual& D, int p) {
  cxd s = 0;
  for (int g = 0; g < D.n(); ++g) s += D.irr[p].character(D.G.mul(g, g));
  return int(std::lround(std::real(s) / double(D.n())));
}

// Formal labels for representations built from the chosen irreducibles:
// an irreducible class, an entrywise conjugate, or a tensor product.
// Normal form: bar is applied to irreducible atoms only.
struct RepLabel {
  enum Kind { Atom, Tensor };
  Kind kind = Atom;
  int k = 0;           // class index (Atom)
  bool conj = false;   // entrywise conjugate (Atom)
  std::shared_ptr<const RepLabel> a, b;

  static RepLabel irr(int cls) {
    RepLabel l;
    l.kind = Atom;
    l.k = cls;
    return l;
  }
  static RepLabel bar(const RepLabel& x) {
    if (x.kind == Atom) {
      RepLabel l = x;
      l.conj = !l.conj;
      return l;
    }
    return tensor(bar(*x.a), bar(*x.b));
  }
  static RepLabel tensor(const RepLabel& x, const RepLabel& y) {
    RepLabel l;
    l.kind = Tensor;
    l.a = std::make_shared<RepLabel>(x);
    l.b = std::make_shared<RepLabel>(y);
    return l;
  }

  bool isTrivial() const { return kind == Atom && k == 0; }

  std::string key() const {
    if (kind == Atom) return (conj ? "~" : "") + std::to_string(k);
    return "(" + a->key() + "*" + b->key() + ")";
  }
  int dim(const GroupDual& D) const {
    if (kind == Atom) return D.d(k);
    return a->dim(D) * b->dim(D);
  }
  MatC at(const GroupDual& D, int g) const {
    if (kind == Atom) {
      const MatC& m = D.irr[k].mats[g];
      return conj ? m.conjugate() : m;
    }
    return kron(a->at(D, g), b->at(D, g));
  }
};

inline const std::vector<MatC>& resolveFamily(const GroupDual& D, const RepLabel& l) {
  auto it = D.famCache.find(l.key());
  if (it != D.famCache.end()) return it->second;
  std::vector<MatC> fam(D.n());
  for (int g = 0; g < D.n(); ++g) fam[g] = l.at(D, g);
  return D.famCache.emplace(l.key(), std::move(fam)).first->second;
}

// The canonical isometry (1, pi (x) conj(pi)) with entries delta_{ij}/sqrt(d).
inline MatC canonicalDualIsometry(int d) {
  MatC t = MatC::Zero(d * d, 1);
  for (int i = 0; i < d; ++i) t(i * d + i, 0) = 1.0 / std::sqrt(double(d));
  return t;
}

namespace detail {
// (1, A (x) bar A) or (1, bar A (x) A) with A an irreducible atom carries the
// canonical isometry; pin it there so the sqrt(d)-summation identities hold
// exactly rather than up to a phase.
inline bool canonicalPattern(const RepLabel& src, const RepLabel& tgt, int& d, const GroupDual& D) {
  if (!src.isTrivial() || src.conj || tgt.kind != RepLabel::Tensor) return false;
  const RepLabel& x = *tgt.a;
  const RepLabel& y = *tgt.b;
  if (x.kind != RepLabel::Atom || y.kind != RepLabel::Atom) return false;
  if (x.k != y.k || x.conj == y.conj) return false;
  d = D.d(x.k);
  return true;
}
}  // namespace detail

// Orthonormal basis of the intertwiner space (src, tgt) = {T : T src(g) = tgt(g) T},
// normalized so that S* T = <T,S> 1_src (columns of each T are isometric up to
// the Hilbert normalization).  Deterministic given the context seed; bases of
// multiplicity >= 1 are mixed by a seeded unitary keyed on the labels, so
// different seeds exercise basis independence.
inline const std::vector<MatC>& intertwinerONB(const GroupDual& D, const RepLabel& src,
                                               const RepLabel& tgt) {
  std::string cacheKey = src.key() + "|" + tgt.key();
  auto it = D.onbCache.find(cacheKey);
  if (it != D.onbCache.end()) return it->second;

  int dcan = 0;
  if (detail::canonicalPattern(src, tgt, dcan, D)) {
    std::vector<MatC> onb{canonicalDualIsometry(dcan)};
    return D.onbCache.emplace(cacheKey, std::move(onb)).first->second;
  }

  const int ds = src.dim(D), dt = tgt.dim(D), n = D.n();
  const auto& fs = resolveFamily(D, src);
  const auto& ft = resolveFamily(D, tgt);
  MatC P = MatC::Zero(ds * dt, ds * dt);
  for (int g = 0; g < n; ++g) P += kron(fs[g].conjugate(), ft[g]);
  P /= double(n);

  Eigen::SelfAdjointEigenSolver<MatC> es(P);
  std::vector<MatC> onb;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5)
      onb.push_back(std::sqrt(double(ds)) * unvec(es.eigenvectors().col(i), dt, ds));

  if (!onb.empty()) {
    Rng rng(D.seed ^ fnv1a("onb:" + cacheKey));
    MatC mix = rng.unitary(Eigen::Index(onb.size()));
    std::vector<MatC> mixed(onb.size(), MatC::Zero(dt, ds));
    for (size_t j = 0; j < onb.size(); ++j)
      for (size_t i = 0; i < onb.size(); ++i) mixed[j] += mix(Eigen::Index(i), Eigen::Index(j)) * onb[i];
    onb = std::move(mixed);
  }
  return D.onbCache.emplace(cacheKey, std::move(onb)).first->second;
}

inline const std::vector<MatC>& intertwinerONB(const GroupDual& D, int srcClass, const RepLabel& tgt) {
  return intertwinerONB(D, RepLabel::irr(srcClass), tgt);
}

inline int fusionCoefficient(const GroupDual& D, int p, int q, int s) { return D.fus[p][q][s]; }

// Frobenius-type basis: from an ONB of (sigma, pi (x) rho) produce the ONB of
// (rho, bar(pi) (x) sigma) with entries sqrt(d_rho/d_sigma) * conj(T)
// re-indexed, matching the composition with the canonical dual isometry.
inline std::vector<MatC> frobeniusBasis(const GroupDual& D, int piClass, const RepLabel& rho,
                                        const RepLabel& sigma, const std::vector<MatC>& basis) {
  const int dp = D.d(piClass), dr = rho.dim(D), dsg = sigma.dim(D);
  std::vector<MatC> out;
  out.reserve(basis.size());
  for (const MatC& T : basis) {
    MatC R = MatC::Zero(dp * dsg, dr);
    for (int i = 0; i < dp; ++i)
      for (int m = 0; m < dsg; ++m)
        for (int kk = 0; kk < dr; ++kk)
          R(i * dsg + m, kk) = std::sqrt(double(dr) / double(dsg)) * std::conj(T(i * dr + kk, m));
    out.push_back(std::move(R));
  }
  return out;
}

// Extend a family defined on the irreducible classes to an arbitrary label:
// v(xi) = sum_i (1 (x) t_i) v(sigma_i) (1 (x) t_i*) over ONBs t_i in (sigma_i, xi).
// Family entries live in M_A (x) B(H_sigma); A = ambient dimension.
inline MatC extendFamilyToRep(const GroupDual& D, const std::vector<MatC>& family, int ambient,
                              const RepLabel& xi) {
  if (xi.kind == RepLabel::Atom && !xi.conj) return family[xi.k];
  const int dx = xi.dim(D);
  MatC out = MatC::Zero(ambient * dx, ambient * dx);
  for (int s = 0; s < D.k(); ++s) {
    for (const MatC& t : intertwinerONB(D, s, xi)) {
      MatC lift = kron(eye(ambient), t);
      out += lift * family[s] * lift.adjoint();
    }
  }
  return out;
}

// Recoupling matrix between the two parenthesizations of (xi, pi (x) rho (x) sigma).
// Rows are labeled (zeta, c, d), columns (eta, a, b); unitarity is the invariant.
inline MatC recouplingUnitary(const GroupDual& D, int p, int q, int r, int xi) {
  const int dp = D.d(p), dq = D.d(q), dr = D.d(r), dx = D.d(xi);
  struct Row { int zeta, c, dd; };
  struct Col { int eta, a, b; };
  std::vector<std::pair<MatC, Row>> rows;  // (T^{zeta,c}_{p,q} (x) 1_r) T^{xi,d}_{zeta,r}
  std::vector<std::pair<MatC, Col>> cols;  // (1_p (x) T^{eta,a}_{q,r}) T^{xi,b}_{p,eta}
  for (int z = 0; z < D.k(); ++z) {
    const auto& Tzc = intertwinerONB(D, z, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(q)));
    const auto& Txd = intertwinerONB(D, xi, RepLabel::tensor(RepLabel::irr(z), RepLabel::irr(r)));
    for (size_t c = 0; c < Tzc.size(); ++c)
      for (size_t dd = 0; dd < Txd.size(); ++dd)
        rows.push_back({kron(Tzc[c], eye(dr)) * Txd[dd], Row{z, int(c), int(dd)}});
  }
  for (int e = 0; e < D.k(); ++e) {
    const auto& Tea = intertwinerONB(D, e, RepLabel::tensor(RepLabel::irr(q), RepLabel::irr(r)));
    const auto& Txb = intertwinerONB(D, xi, RepLabel::tensor(RepLabel::irr(p), RepLabel::irr(e)));
    for (size_t a = 0; a < Tea.size(); ++a)
      for (size_t b = 0; b < Txb.size(); ++b)
        cols.push_back({kron(eye(dp), Tea[a]) * Txb[b], Col{e, int(a), int(b)}});
  }
  (void)dp; (void)dq;
  MatC V(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      V(Eigen::Index(i), Eigen::Index(j)) = (rows[i].first.adjoint() * cols[j].first).trace() / double(dx);
  return V;
}

}  // namespace gdual

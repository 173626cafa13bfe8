#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "core.hpp"

namespace gdual {

constexpr int kOrderCap = 64;

struct GroupError : GdualError {
  enum Code { NotClosed, NonAssociative, NoIdentity, NoInverse, OrderCapExceeded, BadInput };
  Code code;
  GroupError(Code c, const std::string& what) : GdualError(what), code(c) {}
};

// Finite group given by its multiplication table.  Element 0 is the identity
// whenever the group is produced by a builtin constructor; for user tables the
// identity is located by validation.
struct Group {
  int n = 0;
  std::vector<int> table;  // table[g*n + h] = g*h
  int id = 0;
  std::vector<int> inv;
  std::string name;

  int mul(int g, int h) const { return table[g * n + h]; }
};

inline void validateGroup(Group& G) {
  const int n = G.n;
  if (n <= 0 || int(G.table.size()) != n * n)
    throw GroupError(GroupError::BadInput, "multiplication table has wrong size");
  if (n > kOrderCap)
    throw GroupError(GroupError::OrderCapExceeded,
                     "group order " + std::to_string(n) + " exceeds cap " + std::to_string(kOrderCap));
  for (int v : G.table)
    if (v < 0 || v >= n) throw GroupError(GroupError::NotClosed, "table entry out of range");
  // rows and columns must be permutations
  for (int g = 0; g < n; ++g) {
    std::vector<char> seenR(n, 0), seenC(n, 0);
    for (int h = 0; h < n; ++h) {
      if (seenR[G.mul(g, h)]++) throw GroupError(GroupError::NotClosed, "row is not a permutation");
      if (seenC[G.mul(h, g)]++) throw GroupError(GroupError::NotClosed, "column is not a permutation");
    }
  }
  // identity
  int id = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int g = 0; g < n && ok; ++g) ok = G.mul(e, g) == g && G.mul(g, e) == g;
    if (ok) { id = e; break; }
  }
  if (id < 0) throw GroupError(GroupError::NoIdentity, "no identity element");
  G.id = id;
  // associativity, exhaustive (order is capped at 64)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)))
          throw GroupError(GroupError::NonAssociative, "table is not associative");
  // inverses
  G.inv.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h)
      if (G.mul(g, h) == id && G.mul(h, g) == id) { G.inv[g] = h; break; }
    if (G.inv[g] < 0) throw GroupError(GroupError::NoInverse, "element without inverse");
  }
}

inline Group groupFromTable(std::vector<int> table, std::string name = "") {
  Group G;
  G.n = int(std::lround(std::sqrt(double(table.size()))));
  G.table = std::move(table);
  G.name = std::move(name);
  validateGroup(G);
  return G;
}

inline Group cyclicGroup(int n) {
  if (n < 1) throw GroupError(GroupError::BadInput, "cyclic group needs n >= 1");
  std::vector<int> t(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a * n + b] = (a + b) % n;
  return groupFromTable(std::move(t), "Z" + std::to_string(n));
}

// Dihedral group of the regular n-gon, order 2n; element a + n*s is r^a s^s.
inline Group dihedralGroup(int n) {
  if (n < 1) throw GroupError(GroupError::BadInput, "dihedral group needs n >= 1");
  int m = 2 * n;
  auto idx = [n](int a, int s) { return ((a % n + n) % n) + n * s; };
  std::vector<int> t(m * m);
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < 2; ++s)
      for (int b = 0; b < n; ++b)
        for (int u = 0; u < 2; ++u) {
          // (r^a s^s)(r^b s^u) = r^(a + b*(-1)^s) s^(s+u)
          int e = idx(a + (s ? -b : b), (s + u) % 2);
          t[idx(a, s) * m + idx(b, u)] = e;
        }
  return groupFromTable(std::move(t), "D" + std::to_string(n));
}

// Permutations of {0..k-1} in lexicographic order; index = rank.
inline std::vector<std::vector<int>> allPermutations(int k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do { out.push_back(p); } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Group symmetricGroup(int k) {
  if (k < 1 || k > 4)
    throw GroupError(GroupError::BadInput, "symmetric group supported for 1 <= n <= 4");
  auto perms = allPermutations(k);
  std::map<std::vector<int>, int> rank;
  for (size_t i = 0; i < perms.size(); ++i) rank[perms[i]] = int(i);
  int m = int(perms.size());
  std::vector<int> t(m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<int> c(k);
      for (int i = 0; i < k; ++i) c[i] = perms[a][perms[b][i]];  // (ab)(i) = a(b(i))
      t[a * m + b] = rank[c];
    }
  return groupFromTable(std::move(t), "S" + std::to_string(k));
}

// Quaternion group {±1, ±i, ±j, ±k}: element u + 4*s means (-1)^s * unit u,
// units ordered 1,i,j,k.
inline Group quaternionGroup() {
  // unit products: i*i=j*j=k*k=-1, i*j=k, j*k=i, k*i=j (and anticommutators)
  static const int W[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int S[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<int> t(64);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      int u = a % 4, su = a / 4, v = b % 4, sv = b / 4;
      int sw = (su + sv + S[u][v]) % 2;
      t[a * 8 + b] = W[u][v] + 4 * sw;
    }
  return groupFromTable(std::move(t), "Q8");
}

// Group generated by permutations of a finite set, capped at kOrderCap elements.
inline Group groupFromPermutations(int degree, const std::vector<std::vector<int>>& gens) {
  for (const auto& g : gens) {
    if (int(g.size()) != degree)
      throw GroupError(GroupError::BadInput, "generator has wrong degree");
    std::vector<char> seen(degree, 0);
    for (int v : g) {
      if (v < 0 || v >= degree || seen[v]++)
        throw GroupError(GroupError::BadInput, "generator is not a permutation");
    }
  }
  std::vector<int> idp(degree);
  std::iota(idp.begin(), idp.end(), 0);
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> elems;
  elems.push_back(idp);
  index[idp] = 0;
  for (size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : gens) {
      std::vector<int> c(degree);
      for (int i = 0; i < degree; ++i) c[i] = g[elems[head][i]];
      if (!index.count(c)) {
        if (int(elems.size()) >= kOrderCap)
          throw GroupError(GroupError::OrderCapExceeded, "generated group exceeds order cap");
        index[c] = int(elems.size());
        elems.push_back(c);
      }
    }
  }
  int m = int(elems.size());
  std::vector<int> t(m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<int> c(degree);
      for (int i = 0; i < degree; ++i) c[i] = elems[a][elems[b][i]];
      t[a * m + b] = index[c];
    }
  return groupFromTable(std::move(t), "perm" + std::to_string(degree));
}

// Builtin names: cyclic(n)/Zn, symmetric(n)/Sn, dihedral(n)/Dn, quaternion8/Q8.
inline std::optional<Group> builtinGroup(const std::string& name) {
  auto parseArg = [](const std::string& s, const std::string& fn) -> std::optional<int> {
    if (s.rfind(fn + "(", 0) == 0 && s.back() == ')') {
      try {
        return std::stoi(s.substr(fn.size() + 1, s.size() - fn.size() - 2));
      } catch (...) { return std::nullopt; }
    }
    return std::nullopt;
  };
  auto parsePrefix = [](const std::string& s, char c) -> std::optional<int> {
    if (s.size() >= 2 && s[0] == c) {
      try {
        return std::stoi(s.substr(1));
      } catch (...) { return std::nullopt; }
    }
    return std::nullopt;
  };
  if (name == "quaternion8" || name == "Q8") return quaternionGroup();
  if (auto a = parseArg(name, "cyclic")) return cyclicGroup(*a);
  if (auto a = parseArg(name, "symmetric")) return symmetricGroup(*a);
  if (auto a = parseArg(name, "dihedral")) return dihedralGroup(*a);
  if (auto a = parsePrefix(name, 'Z')) return cyclicGroup(*a);
  if (auto a = parsePrefix(name, 'S')) return symmetricGroup(*a);
  if (auto a = parsePrefix(name, 'D')) return dihedralGroup(*a);
  return std::nullopt;
}

inline std::vector<std::vector<int>> conjugacyClasses(const Group& G) {
  std::vector<int> cls(G.n, -1);
  std::vector<std::vector<int>> classes;
  for (int g = 0; g < G.n; ++g) {
    if (cls[g] >= 0) continue;
    std::set<int> orbit;
    for (int h = 0; h < G.n; ++h) orbit.insert(G.mul(G.mul(h, g), G.inv[h]));
    std::vector<int> c(orbit.begin(), orbit.end());
    for (int x : c) cls[x] = int(classes.size());
    classes.push_back(c);
  }
  std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a[0] < b[0];
  });
  return classes;
}

// Right regular representation: (u_g xi)(h) = xi(h g); u_g delta_x = delta_{x g^-1}.
inline std::vector<MatC> regularRepresentation(const Group& G) {
  std::vector<MatC> u(G.n, MatC::Zero(G.n, G.n));
  for (int g = 0; g < G.n; ++g)
    for (int x = 0; x < G.n; ++x) u[g](G.mul(x, G.inv[g]), x) = 1.0;
  return u;
}

// Left translation operators: L_g delta_x = delta_{g x}.  These generate the
// commutant of the right translations and realize the group algebra inside
// the crossed-product ambients.
inline std::vector<MatC> leftTranslations(const Group& G) {
  std::vector<MatC> u(G.n, MatC::Zero(G.n, G.n));
  for (int g = 0; g < G.n; ++g)
    for (int x = 0; x < G.n; ++x) u[g](G.mul(g, x), x) = 1.0;
  return u;
}

// Right translation operators: R_g delta_x = delta_{x g^-1}; same matrices as
// the right regular representation, named separately where they act as the
// dual-action implementers.
inline std::vector<MatC> rightTranslations(const Group& G) { return regularRepresentation(G); }

// Direct product G x H with index g*|H| + h.
inline Group productGroup(const Group& A, const Group& B) {
  int n = A.n * B.n;
  if (n > kOrderCap)
    throw GroupError(GroupError::OrderCapExceeded, "product group exceeds order cap");
  std::vector<int> t(n * n);
  auto idx = [&](int a, int b) { return a * B.n + b; };
  for (int a1 = 0; a1 < A.n; ++a1)
    for (int b1 = 0; b1 < B.n; ++b1)
      for (int a2 = 0; a2 < A.n; ++a2)
        for (int b2 = 0; b2 < B.n; ++b2)
          t[idx(a1, b1) * n + idx(a2, b2)] = idx(A.mul(a1, a2), B.mul(b1, b2));
  Group G = groupFromTable(std::move(t), A.name + "x" + B.name);
  return G;
}

}  // namespace gdual

#include <catch2/catch_amalgamated.hpp>

#include "gdual/group.hpp"

using namespace gdual;

namespace {

int orderOf(const Group& G, int g) {
  int x = g, ord = 1;
  while (x != 0) {
    x = G.mul(x, g);
    ++ord;
  }
  return ord;
}

}  // namespace

TEST_CASE("builtin groups have the expected orders and class counts") {
  const std::vector<std::pair<std::string, std::pair<int, int>>> want = {
      {"Z2", {2, 2}}, {"Z3", {3, 3}}, {"Z4", {4, 4}}, {"S3", {6, 3}},
      {"D4", {8, 5}}, {"Q8", {8, 5}}, {"S4", {24, 5}},
  };
  for (const auto& [name, shape] : want) {
    INFO(name);
    auto G = builtinGroup(name);
    REQUIRE(G.has_value());
    REQUIRE(G->n == shape.first);
    REQUIRE(int(conjugacyClasses(*G).size()) == shape.second);
  }
  REQUIRE(!builtinGroup("E8").has_value());
}

TEST_CASE("the quaternion group has a unique involution") {
  Group G = quaternionGroup();
  int involutions = 0;
  for (int g = 1; g < G.n; ++g)
    if (G.mul(g, g) == 0) ++involutions;
  REQUIRE(involutions == 1);
  for (int g = 1; g < G.n; ++g) REQUIRE((orderOf(G, g) == 2 || orderOf(G, g) == 4));
}

TEST_CASE("dihedral and symmetric groups multiply as expected") {
  Group D4 = dihedralGroup(4);
  bool abelian = true;
  for (int g = 0; g < D4.n && abelian; ++g)
    for (int h = 0; h < D4.n; ++h)
      if (D4.mul(g, h) != D4.mul(h, g)) {
        abelian = false;
        break;
      }
  REQUIRE(!abelian);

  Group S4 = symmetricGroup(4);
  REQUIRE(S4.n == 24);
  std::vector<int> orders(25, 0);
  for (int g = 0; g < S4.n; ++g) ++orders[orderOf(S4, g)];
  // 1 identity, 9 of order two, 8 three-cycles, 6 four-cycles
  REQUIRE(orders[1] == 1);
  REQUIRE(orders[2] == 9);
  REQUIRE(orders[3] == 8);
  REQUIRE(orders[4] == 6);
}

TEST_CASE("permutation generators reproduce S3") {
  Group G = groupFromPermutations(3, {{1, 0, 2}, {0, 2, 1}});
  REQUIRE(G.n == 6);
  Group S3 = symmetricGroup(3);
  auto cls = conjugacyClasses(G);
  auto ref = conjugacyClasses(S3);
  REQUIRE(cls.size() == ref.size());
  std::vector<size_t> sizes, refSizes;
  for (const auto& c : cls) sizes.push_back(c.size());
  for (const auto& c : ref) refSizes.push_back(c.size());
  std::sort(sizes.begin(), sizes.end());
  std::sort(refSizes.begin(), refSizes.end());
  REQUIRE(sizes == refSizes);
}

TEST_CASE("bad multiplication tables are rejected") {
  // Left translation by 1 is not a bijection.
  REQUIRE_THROWS_AS(groupFromTable({0, 1, 1, 1}), GroupError);
  // Closed and unital but not associative: a Latin square that is no group.
  REQUIRE_THROWS_AS(groupFromTable({0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3,
                                    3, 2, 4, 0, 1, 4, 3, 1, 2, 0}),
                    GroupError);
}

TEST_CASE("translations are commuting homomorphisms") {
  Group G = symmetricGroup(3);
  auto L = leftTranslations(G);
  auto R = rightTranslations(G);
  for (int g = 0; g < G.n; ++g)
    for (int h = 0; h < G.n; ++h) {
      REQUIRE((L[g] * L[h] - L[G.mul(g, h)]).norm() < 1e-14);
      REQUIRE((R[g] * R[h] - R[G.mul(g, h)]).norm() < 1e-14);
      REQUIRE((L[g] * R[h] - R[h] * L[g]).norm() < 1e-14);
    }
}

TEST_CASE("the product group multiplies componentwise") {
  Group A = cyclicGroup(2), B = symmetricGroup(3);
  Group P = productGroup(A, B);
  REQUIRE(P.n == 12);
  for (int a1 = 0; a1 < A.n; ++a1)
    for (int b1 = 0; b1 < B.n; ++b1)
      for (int a2 = 0; a2 < A.n; ++a2)
        for (int b2 = 0; b2 < B.n; ++b2) {
          const int x = a1 * B.n + b1, y = a2 * B.n + b2;
          REQUIRE(P.mul(x, y) == A.mul(a1, a2) * B.n + B.mul(b1, b2));
        }
  REQUIRE(int(conjugacyClasses(P).size()) == 2 * 3);
}

#include "hyperq/catalog.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace hyperq {

Signature group_signature() { return Signature({{"plus", 2}, {"neg", 1}, {"zero", 0}}); }
Signature lattice_signature() { return Signature({{"meet", 2}, {"join", 2}}); }
Signature band_signature() { return Signature({{"dot", 2}}); }

FiniteAlgebra make_zn(std::size_t n) {
  if (n == 0) throw Error("Z_n needs n >= 1");
  FiniteAlgebra a{"z" + std::to_string(n), group_signature(), n, {}};
  Table plus(n * n), neg(n);
  for (std::size_t x = 0; x < n; ++x) {
    neg[x] = static_cast<Element>((n - x) % n);
    for (std::size_t y = 0; y < n; ++y) plus[x * n + y] = static_cast<Element>((x + y) % n);
  }
  a.tables = {std::move(plus), std::move(neg), Table{0}};
  return a;
}

namespace {

// Meet and join tables read off an order relation.
FiniteAlgebra lattice_from_order(std::string name, const std::vector<std::vector<bool>>& leq) {
  const std::size_t n = leq.size();
  auto bound = [&](std::size_t x, std::size_t y, bool lower) {
    std::vector<std::size_t> cands;
    for (std::size_t z = 0; z < n; ++z) {
      if (lower ? (leq[z][x] && leq[z][y]) : (leq[x][z] && leq[y][z])) cands.push_back(z);
    }
    for (std::size_t c : cands) {
      bool extreme = std::all_of(cands.begin(), cands.end(), [&](std::size_t d) {
        return lower ? leq[d][c] : leq[c][d];
      });
      if (extreme) return static_cast<Element>(c);
    }
    throw Error("order is not a lattice");
  };
  FiniteAlgebra a{std::move(name), lattice_signature(), n, {}};
  Table meet(n * n), join(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      meet[x * n + y] = bound(x, y, true);
      join[x * n + y] = bound(x, y, false);
    }
  }
  a.tables = {std::move(meet), std::move(join)};
  return a;
}

std::vector<std::vector<bool>> order_from_covers(std::size_t n,
                                                 std::vector<std::pair<std::size_t, std::size_t>> covers) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
  for (auto [lo, hi] : covers) leq[lo][hi] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (leq[i][k] && leq[k][j]) leq[i][j] = true;
      }
    }
  }
  return leq;
}

std::optional<std::size_t> parse_size(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

FiniteAlgebra make_lattice(std::string_view name) {
  if (name == "chain2" || name == "l2") {
    return lattice_from_order("chain2", order_from_covers(2, {{0, 1}}));
  }
  if (name == "n5") {
    // 0 < a < b < 1, 0 < c < 1
    return lattice_from_order("n5", order_from_covers(5, {{0, 1}, {1, 2}, {2, 4}, {0, 3}, {3, 4}}));
  }
  if (name == "m3") {
    return lattice_from_order("m3",
                              order_from_covers(5, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}}));
  }
  throw Error("unknown lattice '" + std::string(name) + "'");
}

FiniteAlgebra make_rect_band(std::size_t m, std::size_t k) {
  if (m == 0 || k == 0) throw Error("rectangular band needs m, k >= 1");
  const std::size_t n = m * k;
  FiniteAlgebra a{"rb" + std::to_string(m) + "x" + std::to_string(k), band_signature(), n, {}};
  Table dot(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      dot[x * n + y] = static_cast<Element>((x / k) * k + (y % k));  // (i,j)(p,q) = (i,q)
    }
  }
  a.tables = {std::move(dot)};
  return a;
}

FiniteAlgebra make_s3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  auto index_of = [&](const std::array<int, 3>& q) {
    return static_cast<Element>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  const std::size_t n = perms.size();
  Table plus(n * n), neg(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::array<int, 3> inv{};
    for (int i = 0; i < 3; ++i) inv[perms[x][i]] = i;
    neg[x] = index_of(inv);
    for (std::size_t y = 0; y < n; ++y) {
      std::array<int, 3> comp{};
      for (int i = 0; i < 3; ++i) comp[i] = perms[x][perms[y][i]];  // x after y
      plus[x * n + y] = index_of(comp);
    }
  }
  FiniteAlgebra a{"s3", group_signature(), n, {}};
  a.tables = {std::move(plus), std::move(neg), Table{index_of({0, 1, 2})}};
  return a;
}

std::vector<std::string> catalog_names() {
  return {"z1", "z2", "z3", "z4", "z5", "z6", "chain2", "n5", "m3",
          "rb1x1", "rb1x2", "rb2x1", "rb1x3", "rb3x1", "rb2x2", "rb2x3", "s3"};
}

FiniteAlgebra make_catalog_algebra(std::string_view name) {
  if (name == "s3") return make_s3();
  if (name == "chain2" || name == "l2" || name == "n5" || name == "m3") return make_lattice(name);
  if (name.size() > 1 && name[0] == 'z') {
    if (auto n = parse_size(name.substr(1)); n && *n >= 1) return make_zn(*n);
  }
  if (name.size() > 2 && name.substr(0, 2) == "rb") {
    auto rest = name.substr(2);
    auto x = rest.find('x');
    if (x != std::string_view::npos) {
      auto m = parse_size(rest.substr(0, x));
      auto k = parse_size(rest.substr(x + 1));
      if (m && k && *m >= 1 && *k >= 1) return make_rect_band(*m, *k);
    }
  }
  throw Error("unknown catalog algebra '" + std::string(name) + "'");
}

}  // namespace hyperq

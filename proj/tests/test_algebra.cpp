#include <doctest.h>

#include <random>

#include "hyperq/algebra.hpp"
#include "hyperq/catalog.hpp"
#include "support.hpp"

using namespace hyperq;

namespace {

Element ap(const FiniteAlgebra& a, std::string_view s, std::initializer_list<Element> args) {
  return op_apply(a, s, std::vector<Element>(args));
}

ElementMap identity_map(std::size_t n) {
  ElementMap m(n);
  for (Element i = 0; i < n; ++i) m[i] = i;
  return m;
}

bool has_error(const FiniteAlgebra& a, const std::string& needle) {
  for (const auto& e : validation_errors(a)) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validation") {
  FiniteAlgebra z2{"z2", group_signature(), 2, {{0, 1, 1, 0}, {0, 1}, {0}}};
  CHECK(validation_errors(z2).empty());

  auto bad = z2;
  bad.tables[0][1] = 2;
  CHECK(has_error(bad, "out of range"));
  CHECK_THROWS_AS(validate_algebra(bad), ValidationError);

  bad = z2;
  bad.tables[0] = {0, 1, 1};
  CHECK(has_error(bad, "length mismatch"));

  FiniteAlgebra empty{"e", band_signature(), 0, {{}}};
  CHECK_FALSE(validation_errors(empty).empty());

  FiniteAlgebra dup{"d", Signature({{"f", 1}, {"f", 1}}), 1, {{0}, {0}}};
  CHECK_FALSE(validation_errors(dup).empty());

  FiniteAlgebra upper{"u", Signature({{"F", 1}}), 1, {{0}}};
  CHECK_FALSE(validation_errors(upper).empty());
}

TEST_CASE("op_apply") {
  CHECK(ap(make_zn(2), "plus", {1, 1}) == 0);
  CHECK(ap(make_lattice("chain2"), "meet", {0, 1}) == 0);
  const auto n5 = make_lattice("n5");
  CHECK(ap(n5, "join", {1, 3}) == 4);
  CHECK(ap(n5, "meet", {1, 3}) == 0);
  const auto m3 = make_lattice("m3");
  CHECK(ap(m3, "join", {1, 2}) == 4);
  CHECK_THROWS(ap(make_zn(2), "plus", {1}));
  CHECK_THROWS(ap(make_zn(2), "plus", {1, 2}));
  CHECK_THROWS(ap(make_zn(2), "times", {1, 1}));
}

TEST_CASE("direct products") {
  const FiniteAlgebra z2 = make_zn(2), z3 = make_zn(3);
  const std::vector<FiniteAlgebra> pair{z2, z2};
  const auto p = direct_product(pair);
  CHECK(p.size == 4);
  const std::size_t sizes[] = {2, 2};
  const Element e10 = product_element(std::vector<Element>{1, 0}, sizes);
  const Element e01 = product_element(std::vector<Element>{0, 1}, sizes);
  const Element e11 = product_element(std::vector<Element>{1, 1}, sizes);
  CHECK(ap(p, "plus", {e10, e01}) == e11);
  CHECK(e10 == 2);  // first factor most significant

  CHECK(direct_product(std::vector<FiniteAlgebra>{z2, z3}).size == 6);

  const auto t = direct_product(std::span<const FiniteAlgebra>{}, group_signature());
  CHECK(t.size == 1);
  for (const auto& table : t.tables) CHECK(table == Table{0});
  CHECK_THROWS(direct_product(std::span<const FiniteAlgebra>{}));

  CHECK_THROWS(direct_product(std::vector<FiniteAlgebra>{z2, make_lattice("chain2")}));
}

TEST_CASE("product projections are homomorphisms") {
  std::mt19937 rng(7);
  for (const auto& sig_members : {std::vector<std::string>{"z1", "z2", "z3", "z4", "s3"},
                                  std::vector<std::string>{"chain2", "n5", "m3"},
                                  std::vector<std::string>{"rb1x2", "rb2x1", "rb2x2", "rb1x3"}}) {
    for (int round = 0; round < 6; ++round) {
      std::uniform_int_distribution<std::size_t> len(1, 3), pick(0, sig_members.size() - 1);
      std::vector<FiniteAlgebra> fam;
      std::vector<std::size_t> sizes;
      std::size_t total = 1;
      for (std::size_t i = len(rng); i > 0; --i) {
        fam.push_back(make_catalog_algebra(sig_members[pick(rng)]));
        sizes.push_back(fam.back().size);
        total *= fam.back().size;
      }
      if (total > 150) continue;
      const auto p = direct_product(fam);
      CHECK(validation_errors(p).empty());
      for (std::size_t i = 0; i < fam.size(); ++i) {
        ElementMap proj(p.size);
        for (Element e = 0; e < p.size; ++e) proj[e] = product_coordinates(e, sizes)[i];
        CHECK(is_homomorphism(p, fam[i], proj).ok);
      }
    }
  }
}

TEST_CASE("subuniverses") {
  const auto z4 = make_zn(4);
  CHECK(subuniverse_generated(z4, std::vector<Element>{2}) == Subuniverse{0, 2});
  CHECK(subuniverse_generated(z4, std::vector<Element>{0, 1, 2, 3}) == Subuniverse{0, 1, 2, 3});
  CHECK(subuniverse_generated(make_lattice("chain2"), std::vector<Element>{0}) == Subuniverse{0});
  // The constant is always generated.
  CHECK(subuniverse_generated(z4, std::vector<Element>{}) == Subuniverse{0});

  auto subs_of = [](const FiniteAlgebra& a) {
    std::vector<Subuniverse> out;
    for (const auto& s : all_subalgebras(a)) out.push_back(s.elements);
    return out;
  };
  CHECK(subs_of(make_zn(2)) == std::vector<Subuniverse>{{0}, {0, 1}});
  CHECK(subs_of(make_lattice("chain2")) == std::vector<Subuniverse>{{0}, {1}, {0, 1}});
  CHECK(subs_of(make_zn(1)).size() == 1);

  const auto subs = all_subalgebras(make_lattice("n5"));
  for (const auto& s : subs) {
    CHECK(is_closed(make_lattice("n5"), s.elements));
    CHECK(validation_errors(s.algebra).empty());
  }

  FiniteAlgebra big = make_zn(13);
  CHECK_THROWS(all_subalgebras(big));
}

TEST_CASE("homomorphisms and isomorphisms") {
  const auto z2 = make_zn(2), z4 = make_zn(4);
  CHECK(is_homomorphism(z4, z4, identity_map(4)).ok);
  CHECK(is_homomorphism(z4, z2, ElementMap{0, 1, 0, 1}).ok);

  const auto bad = is_homomorphism(z2, z2, ElementMap{1, 1});
  CHECK_FALSE(bad.ok);
  CHECK(bad.symbol == "zero");
  CHECK(bad.args.empty());

  CHECK(iso_search(z4, z4) == identity_map(4));

  const auto l2 = make_lattice("chain2");
  FiniteAlgebra dual = l2;
  std::swap(dual.tables[0], dual.tables[1]);
  CHECK(iso_search(l2, dual) == ElementMap{1, 0});

  const auto z2z2 = direct_product(std::vector<FiniteAlgebra>{z2, z2});
  CHECK_FALSE(iso_search(z2z2, z4).has_value());
  CHECK_FALSE(iso_search(make_lattice("n5"), make_lattice("m3")).has_value());

  // Lexicographically least: the Z3 automorphism group has two elements.
  CHECK(iso_search(make_zn(3), make_zn(3)) == identity_map(3));
}

TEST_CASE("quotients") {
  const auto z4 = make_zn(4);
  const auto same = quotient(z4, Equivalence::identity(4));
  CHECK(iso_search(same, z4).has_value());
  CHECK(quotient(z4, Equivalence::total(4)).size == 1);

  const std::size_t labels[] = {0, 1, 0, 1};
  const auto q = quotient(z4, Equivalence::from_labels(labels));
  CHECK(q.size == 2);
  CHECK(q.tables[0] == make_zn(2).tables[0]);
  CHECK(iso_search(q, make_zn(2)).has_value());

  const std::size_t not_cong[] = {0, 0, 1, 1};
  CHECK(congruence_violation(z4, Equivalence::from_labels(not_cong)).has_value());
  CHECK_THROWS(quotient(z4, Equivalence::from_labels(not_cong)));
}

// Every partition of a small carrier: the congruence test agrees with
// checking well-definedness over all pairs of related argument tuples.
TEST_CASE("congruence test agrees with brute force") {
  auto brute = [](const FiniteAlgebra& a, const Equivalence& e) {
    for (std::size_t s = 0; s < a.sig.size(); ++s) {
      const std::size_t k = a.sig[s].arity;
      const std::size_t rows = checked_power(a.size, k);
      std::vector<Element> x(k), y(k);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < rows; ++j) {
          unflatten(i, a.size, x);
          unflatten(j, a.size, y);
          bool related = true;
          for (std::size_t t = 0; t < k; ++t) related = related && e.related(x[t], y[t]);
          if (related && !e.related(a.tables[s][i], a.tables[s][j])) return false;
        }
      }
    }
    return true;
  };
  std::size_t partitions = 0, congruences = 0;
  for (const auto& a : testing::catalog_up_to(5)) {
    // Restricted growth strings enumerate each partition once.
    std::vector<std::size_t> labels(a.size, 0);
    while (true) {
      ++partitions;
      const auto e = Equivalence::from_labels(labels);
      const bool expected = brute(a, e);
      CHECK(!congruence_violation(a, e).has_value() == expected);
      if (expected) {
        ++congruences;
        CHECK(validation_errors(quotient(a, e)).empty());
      } else {
        CHECK_THROWS(quotient(a, e));
      }
      std::size_t i = a.size;
      bool advanced = false;
      while (i-- > 1) {
        std::size_t mx = 0;
        for (std::size_t j = 0; j < i; ++j) mx = std::max(mx, labels[j]);
        if (labels[i] <= mx) {
          ++labels[i];
          for (std::size_t j = i + 1; j < a.size; ++j) labels[j] = 0;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  CHECK(partitions > 100);
  CHECK(congruences > 20);
}

TEST_CASE("filters") {
  CHECK(all_filters(1).size() == 1);
  CHECK(all_filters(2).size() == 3);
  CHECK(all_filters(3).size() == 7);
  for (const auto& f : all_filters(3)) CHECK(filter_errors(f).empty());

  FilterFamily not_proper{2, {0, 1, 2, 3}};
  CHECK_FALSE(filter_errors(not_proper).empty());
  FilterFamily not_upward{2, {1}};
  CHECK_FALSE(filter_errors(not_upward).empty());
  FilterFamily no_meet{2, {1, 2, 3}};
  CHECK_FALSE(filter_errors(no_meet).empty());

  CHECK(ultrafilter_gap(FilterFamily{2, {3}}).has_value());
  CHECK_FALSE(ultrafilter_gap(FilterFamily::principal(2, 1)).has_value());
}

TEST_CASE("reduced products and ultraproducts") {
  const auto z2 = make_zn(2), z4 = make_zn(4);
  const std::vector<FiniteAlgebra> fam{z2, z4};

  const auto full = reduced_product(fam, FilterFamily{2, {3}});
  CHECK(iso_search(full, direct_product(fam)).has_value());

  const auto first = reduced_product(fam, FilterFamily::principal(2, 1));
  CHECK(iso_search(first, z2).has_value());

  const auto u = ultraproduct(fam, FilterFamily::principal(2, 2));
  CHECK(iso_search(u, z4).has_value());
  CHECK_THROWS(ultraproduct(fam, FilterFamily{2, {3}}));

  const std::vector<FiniteAlgebra> one{z4};
  CHECK(iso_search(ultraproduct(one, FilterFamily{1, {1}}), z4).has_value());

  const std::vector<FiniteAlgebra> mixed{z2, make_lattice("chain2"), z2};
  CHECK_THROWS(reduced_product(mixed, FilterFamily::principal(3, 2)));
}

namespace {

DirectSpectrum chain(const FiniteAlgebra& a, const FiniteAlgebra& b, ElementMap g) {
  DirectSpectrum s;
  s.leq = {{true, true}, {false, true}};
  s.algebras = {a, b};
  s.maps = {{identity_map(a.size), std::move(g)}, {{}, identity_map(b.size)}};
  return s;
}

std::size_t pick_last(std::span<const std::size_t> c) { return c.back(); }
std::size_t pick_middle(std::span<const std::size_t> c) { return c[c.size() / 2]; }

}  // namespace

TEST_CASE("direct limits") {
  const auto z2 = make_zn(2), z4 = make_zn(4);

  DirectSpectrum single;
  single.leq = {{true}};
  single.algebras = {z4};
  single.maps = {{identity_map(4)}};
  CHECK(spectrum_errors(single).empty());
  CHECK(iso_search(direct_limit(single), z4).has_value());
  CHECK(is_superdirect(single));

  const auto mod2 = chain(z4, z2, {0, 1, 0, 1});
  CHECK(spectrum_errors(mod2).empty());
  CHECK(is_superdirect(mod2));
  CHECK(iso_search(direct_limit(mod2), z2).has_value());

  const auto doubling = chain(z2, z4, {0, 2});
  CHECK(spectrum_errors(doubling).empty());
  CHECK_FALSE(is_superdirect(doubling));
  CHECK(iso_search(direct_limit(doubling), z4).has_value());

  auto broken = chain(z2, z4, {0, 1});
  CHECK_FALSE(spectrum_errors(broken).empty());

  // V shape without a top: 0 <= 2, 1 <= 2 is fine, but 0, 1 alone is not directed.
  DirectSpectrum antichain;
  antichain.leq = {{true, false}, {false, true}};
  antichain.algebras = {z2, z2};
  antichain.maps = {{identity_map(2), {}}, {{}, identity_map(2)}};
  CHECK_FALSE(spectrum_errors(antichain).empty());
}

TEST_CASE("direct limit does not depend on the upper bound choice") {
  // A diamond 0 <= 1, 0 <= 2, 1 <= 3, 2 <= 3 has several upper bounds for (0, 0).
  const auto z4 = make_zn(4), z2 = make_zn(2);
  DirectSpectrum s;
  s.leq = {{true, true, true, true}, {false, true, false, true}, {false, false, true, true},
           {false, false, false, true}};
  s.algebras = {z4, z4, z4, z2};
  const ElementMap id = identity_map(4), mod2{0, 1, 0, 1};
  s.maps.assign(4, std::vector<ElementMap>(4));
  s.maps[0][0] = s.maps[1][1] = s.maps[2][2] = s.maps[0][1] = s.maps[0][2] = id;
  s.maps[3][3] = identity_map(2);
  s.maps[1][3] = s.maps[2][3] = s.maps[0][3] = mod2;
  REQUIRE(spectrum_errors(s).empty());
  const auto base = direct_limit(s);
  CHECK(iso_search(base, z2).has_value());
  CHECK(direct_limit(s, pick_last).tables == base.tables);
  CHECK(direct_limit(s, pick_middle).tables == base.tables);
}

TEST_CASE("subdirect products") {
  const auto z2 = make_zn(2);
  const std::vector<FiniteAlgebra> fam{z2, z2};
  const auto diag = restrict_to(direct_product(fam), std::vector<Element>{0, 3});
  CHECK(is_subdirect(diag, std::vector<Element>{0, 3}, fam));
  const auto zero = restrict_to(direct_product(fam), std::vector<Element>{0});
  CHECK_FALSE(is_subdirect(zero, std::vector<Element>{0}, fam));
  const auto p = direct_product(fam);
  CHECK(is_subdirect(p, identity_map(4), fam));
}

#include "hyperq/algebra.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace hyperq {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string tuple_string(std::span<const Element> args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(args[i]);
  }
  return out + ")";
}

void require_same_signature(std::span<const FiniteAlgebra> family, const Signature& sig) {
  for (const auto& a : family) {
    if (!(a.sig == sig)) {
      throw Error("signature mismatch: '" + a.name + "' has signature " + a.sig.to_string() +
                  ", expected " + sig.to_string());
    }
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

std::optional<std::size_t> Signature::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].name == name) return i;
  }
  return std::nullopt;
}

std::string Signature::to_string() const {
  std::string out;
  for (const auto& s : symbols_) {
    if (!out.empty()) out += ' ';
    out += s.name + ':' + std::to_string(s.arity);
  }
  return out;
}

static bool is_ident_tail(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_symbol_name(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin(), s.end(), is_ident_tail);
}

bool is_hypervariable_name(std::string_view s) {
  if (s.empty() || s[0] < 'A' || s[0] > 'Z') return false;
  return std::all_of(s.begin(), s.end(), is_ident_tail);
}

std::size_t checked_power(std::size_t base, std::size_t exponent) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) {
      throw Error("size overflow computing " + std::to_string(base) + "^" +
                  std::to_string(exponent));
    }
    r *= base;
  }
  return r;
}

std::size_t flat_index(std::span<const Element> args, std::size_t size) {
  std::size_t idx = 0;
  for (Element a : args) idx = idx * size + a;
  return idx;
}

void unflatten(std::size_t index, std::size_t size, std::span<Element> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Element>(index % size);
    index /= size;
  }
}

Element FiniteAlgebra::apply(std::string_view symbol, std::span<const Element> args) const {
  return op_apply(*this, symbol, args);
}

std::vector<std::string> validation_errors(const FiniteAlgebra& a) {
  std::vector<std::string> errs;
  if (a.size == 0) errs.push_back("empty carrier: size must be at least 1");
  const auto& syms = a.sig.symbols();
  for (std::size_t i = 0; i < syms.size(); ++i) {
    if (!is_symbol_name(syms[i].name)) {
      errs.push_back("invalid symbol name '" + syms[i].name + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (syms[j].name == syms[i].name) errs.push_back("duplicate symbol '" + syms[i].name + "'");
    }
  }
  if (a.tables.size() != syms.size()) {
    errs.push_back("table count " + std::to_string(a.tables.size()) + " does not match " +
                   std::to_string(syms.size()) + " symbols");
    return errs;
  }
  for (std::size_t i = 0; i < syms.size(); ++i) {
    std::size_t expected = 0;
    try {
      expected = checked_power(a.size, syms[i].arity);
    } catch (const Error& e) {
      errs.push_back("symbol '" + syms[i].name + "': " + e.what());
      continue;
    }
    const auto& t = a.tables[i];
    if (t.size() != expected) {
      errs.push_back("symbol '" + syms[i].name + "': table length mismatch (got " +
                     std::to_string(t.size()) + ", expected " + std::to_string(expected) + ")");
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] >= a.size) {
        errs.push_back("symbol '" + syms[i].name + "': entry out of range at index " +
                       std::to_string(k) + " (value " + std::to_string(t[k]) + ")");
      }
    }
  }
  return errs;
}

void validate_algebra(const FiniteAlgebra& a) {
  auto errs = validation_errors(a);
  if (!errs.empty()) throw ValidationError(std::move(errs));
}

Element op_apply(const FiniteAlgebra& a, std::string_view symbol, std::span<const Element> args) {
  auto idx = a.sig.index_of(symbol);
  if (!idx) throw Error("unknown symbol '" + std::string(symbol) + "'");
  if (a.sig[*idx].arity != args.size()) {
    throw Error("arity mismatch for '" + std::string(symbol) + "': expected " +
                std::to_string(a.sig[*idx].arity) + " arguments, got " +
                std::to_string(args.size()));
  }
  for (Element e : args) {
    if (e >= a.size) throw Error("element out of range: " + std::to_string(e));
  }
  return a.apply(*idx, args);
}

// -- Products ----------------------------------------------------------------

std::vector<Element> product_coordinates(Element e, std::span<const std::size_t> sizes) {
  std::vector<Element> coords(sizes.size());
  std::size_t rest = e;
  for (std::size_t i = sizes.size(); i-- > 0;) {
    coords[i] = static_cast<Element>(rest % sizes[i]);
    rest /= sizes[i];
  }
  return coords;
}

Element product_element(std::span<const Element> coords, std::span<const std::size_t> sizes) {
  std::size_t e = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) e = e * sizes[i] + coords[i];
  return static_cast<Element>(e);
}

FiniteAlgebra trivial_algebra(const Signature& sig, std::string name) {
  FiniteAlgebra t{std::move(name), sig, 1, {}};
  for (std::size_t i = 0; i < sig.size(); ++i) t.tables.emplace_back(1, 0);
  return t;
}

FiniteAlgebra direct_product(std::span<const FiniteAlgebra> family, const Signature& sig) {
  require_same_signature(family, sig);
  if (family.empty()) return trivial_algebra(sig);

  std::vector<std::size_t> sizes;
  std::string name;
  std::size_t total = 1;
  for (const auto& a : family) {
    sizes.push_back(a.size);
    total = total * a.size;
    if (total > std::numeric_limits<Element>::max()) throw Error("product too large");
    if (!name.empty()) name += '*';
    name += a.name;
  }

  FiniteAlgebra p{name, sig, total, {}};
  const std::size_t m = family.size();
  std::vector<Element> all_coords(total * m);  // coordinates of element e at e*m
  for (std::size_t e = 0; e < total; ++e) {
    const auto c = product_coordinates(static_cast<Element>(e), sizes);
    std::copy(c.begin(), c.end(), all_coords.begin() + e * m);
  }
  for (std::size_t s = 0; s < sig.size(); ++s) {
    const std::size_t arity = sig[s].arity;
    const std::size_t len = checked_power(total, arity);
    Table t(len);
    std::vector<Element> args(arity), factor_args(arity), coords(m);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, total, args);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < arity; ++k) factor_args[k] = all_coords[args[k] * m + i];
        coords[i] = family[i].apply(s, factor_args);
      }
      t[idx] = product_element(coords, sizes);
    }
    p.tables.push_back(std::move(t));
  }
  return p;
}

FiniteAlgebra direct_product(std::span<const FiniteAlgebra> family) {
  if (family.empty()) {
    throw Error("empty family: signature unknown, use the overload taking a signature");
  }
  return direct_product(family, family.front().sig);
}

// -- Subalgebras -------------------------------------------------------------

Subuniverse subuniverse_generated(const FiniteAlgebra& a, std::span<const Element> seed) {
  std::vector<bool> in(a.size, false);
  for (Element e : seed) {
    if (e >= a.size) throw Error("seed element out of range: " + std::to_string(e));
    in[e] = true;
  }
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    if (a.sig[s].arity == 0) in[a.tables[s][0]] = true;
  }
  bool changed = true;
  std::vector<Element> members;
  while (changed) {
    changed = false;
    members.clear();
    for (Element e = 0; e < a.size; ++e) {
      if (in[e]) members.push_back(e);
    }
    for (std::size_t s = 0; s < a.sig.size(); ++s) {
      const std::size_t arity = a.sig[s].arity;
      if (arity == 0 || members.empty()) continue;
      std::vector<std::size_t> pos(arity, 0);
      std::vector<Element> args(arity);
      while (true) {
        for (std::size_t k = 0; k < arity; ++k) args[k] = members[pos[k]];
        Element r = a.apply(s, args);
        if (!in[r]) {
          in[r] = true;
          changed = true;
        }
        std::size_t k = arity;
        while (k > 0 && ++pos[k - 1] == members.size()) pos[--k] = 0;
        if (k == 0) break;
      }
    }
  }
  Subuniverse out;
  for (Element e = 0; e < a.size; ++e) {
    if (in[e]) out.push_back(e);
  }
  if (out.empty()) throw Error("empty subuniverse");
  return out;
}

bool is_closed(const FiniteAlgebra& a, std::span<const Element> subset) {
  std::vector<bool> in(a.size, false);
  for (Element e : subset) in[e] = true;
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    const std::size_t arity = a.sig[s].arity;
    if (arity == 0) {
      if (!in[a.tables[s][0]]) return false;
      continue;
    }
    if (subset.empty()) continue;
    std::vector<std::size_t> pos(arity, 0);
    std::vector<Element> args(arity);
    while (true) {
      for (std::size_t k = 0; k < arity; ++k) args[k] = subset[pos[k]];
      if (!in[a.apply(s, args)]) return false;
      std::size_t k = arity;
      while (k > 0 && ++pos[k - 1] == subset.size()) pos[--k] = 0;
      if (k == 0) break;
    }
  }
  return true;
}

FiniteAlgebra restrict_to(const FiniteAlgebra& a, std::span<const Element> subset) {
  if (subset.empty()) throw Error("empty subuniverse");
  if (!std::is_sorted(subset.begin(), subset.end()) ||
      std::adjacent_find(subset.begin(), subset.end()) != subset.end()) {
    throw Error("subset must be sorted and duplicate-free");
  }
  if (!is_closed(a, subset)) throw Error("subset is not closed under the operations");
  std::vector<Element> renumber(a.size, 0);
  for (std::size_t i = 0; i < subset.size(); ++i) renumber[subset[i]] = static_cast<Element>(i);

  const std::size_t n = subset.size();
  FiniteAlgebra r{a.name + "|sub", a.sig, n, {}};
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    const std::size_t arity = a.sig[s].arity;
    const std::size_t len = checked_power(n, arity);
    Table t(len);
    std::vector<Element> local(arity), global(arity);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, n, local);
      for (std::size_t k = 0; k < arity; ++k) global[k] = subset[local[k]];
      t[idx] = renumber[a.apply(s, global)];
    }
    r.tables.push_back(std::move(t));
  }
  return r;
}

std::vector<Subalgebra> all_subalgebras(const FiniteAlgebra& a, std::size_t cap) {
  if (a.size > cap) {
    throw Error("subalgebra enumeration cap exceeded: size " + std::to_string(a.size) +
                " > " + std::to_string(cap));
  }
  std::vector<Subalgebra> out;
  const std::uint64_t limit = std::uint64_t{1} << a.size;
  std::vector<Element> subset;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    subset.clear();
    for (Element e = 0; e < a.size; ++e) {
      if (mask >> e & 1) subset.push_back(e);
    }
    if (is_closed(a, subset)) out.push_back({subset, restrict_to(a, subset)});
  }
  return out;
}

// -- Homomorphisms -----------------------------------------------------------

HomCheck is_homomorphism(const FiniteAlgebra& source, const FiniteAlgebra& target,
                         std::span<const Element> map) {
  if (!(source.sig == target.sig)) throw Error("signature mismatch");
  if (map.size() != source.size) {
    throw Error("map length " + std::to_string(map.size()) + " does not match source size " +
                std::to_string(source.size));
  }
  for (Element e : map) {
    if (e >= target.size) throw Error("map value out of range: " + std::to_string(e));
  }
  // Lower arities first, so constants are reported before the operations that use them.
  std::vector<std::size_t> order(source.sig.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return source.sig[x].arity < source.sig[y].arity;
  });
  for (std::size_t s : order) {
    const std::size_t arity = source.sig[s].arity;
    const std::size_t len = source.tables[s].size();
    std::vector<Element> args(arity), mapped(arity);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, source.size, args);
      for (std::size_t k = 0; k < arity; ++k) mapped[k] = map[args[k]];
      if (map[source.tables[s][idx]] != target.apply(s, mapped)) {
        return {false, source.sig[s].name, args};
      }
    }
  }
  return {};
}

bool is_surjective(std::span<const Element> map, std::size_t target_size) {
  std::vector<bool> hit(target_size, false);
  for (Element e : map) {
    if (e < target_size) hit[e] = true;
  }
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

bool is_injective(std::span<const Element> map) {
  std::vector<Element> sorted(map.begin(), map.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

namespace {

// Per-element isomorphism invariants: occurrence counts in each table and
// diagonal fixed-point flags.
std::vector<std::vector<std::size_t>> element_invariants(const FiniteAlgebra& a) {
  std::vector<std::vector<std::size_t>> inv(a.size);
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    std::vector<std::size_t> counts(a.size, 0);
    for (Element v : a.tables[s]) ++counts[v];
    const std::size_t arity = a.sig[s].arity;
    for (Element x = 0; x < a.size; ++x) {
      inv[x].push_back(counts[x]);
      if (arity > 0) {
        std::vector<Element> diag(arity, x);
        inv[x].push_back(a.apply(s, diag) == x ? 1 : 0);
      }
    }
  }
  return inv;
}

class IsoSearch {
 public:
  IsoSearch(const FiniteAlgebra& a, const FiniteAlgebra& b)
      : a_(a), b_(b), phi_(a.size, kUnset), used_(b.size, false),
        inv_a_(element_invariants(a)), inv_b_(element_invariants(b)) {}

  std::optional<ElementMap> run() {
    if (search(0)) return ElementMap(phi_.begin(), phi_.end());
    return std::nullopt;
  }

 private:
  static constexpr Element kUnset = std::numeric_limits<Element>::max();

  bool search(Element x) {
    if (x == a_.size) return true;
    for (Element y = 0; y < b_.size; ++y) {
      if (used_[y] || inv_a_[x] != inv_b_[y]) continue;
      phi_[x] = y;
      used_[y] = true;
      if (consistent(x) && search(x + 1)) return true;
      used_[y] = false;
      phi_[x] = kUnset;
    }
    return false;
  }

  // Checks every tuple over {0..x} that mentions x.
  bool consistent(Element x) {
    for (std::size_t s = 0; s < a_.sig.size(); ++s) {
      const std::size_t arity = a_.sig[s].arity;
      if (arity == 0) {
        if (a_.tables[s][0] == x && b_.tables[s][0] != phi_[x]) return false;
        continue;
      }
      const std::size_t span = x + 1;
      std::vector<Element> args(arity, 0), mapped(arity);
      const std::size_t count = checked_power(span, arity);
      for (std::size_t idx = 0; idx < count; ++idx) {
        unflatten(idx, span, args);
        if (std::find(args.begin(), args.end(), x) == args.end()) continue;
        for (std::size_t k = 0; k < arity; ++k) mapped[k] = phi_[args[k]];
        const Element r = a_.apply(s, args);
        const Element image = b_.apply(s, mapped);
        if (phi_[r] != kUnset) {
          if (phi_[r] != image) return false;
        } else if (used_[image]) {
          return false;
        }
      }
    }
    return true;
  }

  const FiniteAlgebra& a_;
  const FiniteAlgebra& b_;
  std::vector<Element> phi_;
  std::vector<bool> used_;
  std::vector<std::vector<std::size_t>> inv_a_, inv_b_;
};

}  // namespace

std::optional<ElementMap> iso_search(const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (!(a.sig == b.sig)) throw Error("signature mismatch");
  if (a.size != b.size) return std::nullopt;
  return IsoSearch(a, b).run();
}

// -- Quotients ---------------------------------------------------------------

Equivalence Equivalence::identity(std::size_t n) {
  Equivalence e{n, std::vector<Element>(n)};
  std::iota(e.rep.begin(), e.rep.end(), Element{0});
  return e;
}

Equivalence Equivalence::total(std::size_t n) {
  return {n, std::vector<Element>(n, 0)};
}

Equivalence Equivalence::from_labels(std::span<const std::size_t> labels) {
  Equivalence e{labels.size(), std::vector<Element>(labels.size())};
  for (std::size_t x = 0; x < labels.size(); ++x) {
    std::size_t first = x;
    for (std::size_t y = 0; y < x; ++y) {
      if (labels[y] == labels[x]) {
        first = y;
        break;
      }
    }
    e.rep[x] = static_cast<Element>(first);
  }
  return e;
}

std::vector<Element> Equivalence::representatives() const {
  std::vector<Element> reps;
  for (Element x = 0; x < size; ++x) {
    if (rep[x] == x) reps.push_back(x);
  }
  return reps;
}

static void check_equivalence(const FiniteAlgebra& a, const Equivalence& e) {
  if (e.size != a.size || e.rep.size() != a.size) {
    throw Error("equivalence size does not match algebra size");
  }
  for (Element x = 0; x < e.size; ++x) {
    if (e.rep[x] >= e.size || e.rep[e.rep[x]] != e.rep[x]) {
      throw Error("representative map is not idempotent at " + std::to_string(x));
    }
  }
}

std::optional<CongruenceViolation> congruence_violation(const FiniteAlgebra& a,
                                                        const Equivalence& e) {
  check_equivalence(a, e);
  // Changing one coordinate at a time suffices by transitivity.
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    const std::size_t arity = a.sig[s].arity;
    const std::size_t len = a.tables[s].size();
    std::vector<Element> args(arity), other(arity);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, a.size, args);
      const Element r = a.tables[s][idx];
      for (std::size_t p = 0; p < arity; ++p) {
        other = args;
        for (Element y = 0; y < a.size; ++y) {
          if (y == args[p] || !e.related(y, args[p])) continue;
          other[p] = y;
          if (!e.related(r, a.apply(s, other))) {
            return CongruenceViolation{a.sig[s].name, args, other};
          }
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

// Caller guarantees that `e` is a congruence.
FiniteAlgebra induced_quotient(const FiniteAlgebra& a, const Equivalence& e) {
  const auto reps = e.representatives();
  std::vector<Element> class_of(a.size);
  for (Element x = 0; x < a.size; ++x) {
    class_of[x] = static_cast<Element>(
        std::lower_bound(reps.begin(), reps.end(), e.rep[x]) - reps.begin());
  }
  const std::size_t n = reps.size();
  FiniteAlgebra q{a.name + "/~", a.sig, n, {}};
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    const std::size_t arity = a.sig[s].arity;
    const std::size_t len = checked_power(n, arity);
    Table t(len);
    std::vector<Element> cls(arity), args(arity);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, n, cls);
      for (std::size_t k = 0; k < arity; ++k) args[k] = reps[cls[k]];
      t[idx] = class_of[a.apply(s, args)];
    }
    q.tables.push_back(std::move(t));
  }
  return q;
}

}  // namespace

FiniteAlgebra quotient(const FiniteAlgebra& a, const Equivalence& e) {
  if (auto v = congruence_violation(a, e)) {
    throw Error("not a congruence: symbol '" + v->symbol + "' maps related tuples " +
                tuple_string(v->lhs_args) + " and " + tuple_string(v->rhs_args) +
                " to unrelated elements");
  }
  return induced_quotient(a, e);
}

// -- Filters -----------------------------------------------------------------

FilterFamily FilterFamily::principal(std::size_t m, IndexSet generator) {
  FilterFamily f{m, {}};
  const IndexSet full = f.full();
  for (IndexSet s = 0;; ++s) {
    if ((s & generator) == generator) f.members.push_back(s);
    if (s == full) break;
  }
  return f;
}

bool FilterFamily::contains(IndexSet s) const {
  return std::binary_search(members.begin(), members.end(), s);
}

std::vector<std::string> filter_errors(const FilterFamily& f) {
  std::vector<std::string> errs;
  if (f.index_size == 0 || f.index_size > 16) {
    errs.push_back("index set size must be between 1 and 16");
    return errs;
  }
  if (!std::is_sorted(f.members.begin(), f.members.end()) ||
      std::adjacent_find(f.members.begin(), f.members.end()) != f.members.end()) {
    errs.push_back("member sets must be sorted and unique");
    return errs;
  }
  const IndexSet full = f.full();
  for (IndexSet s : f.members) {
    if ((s & ~full) != 0) errs.push_back("member set " + std::to_string(s) + " outside index set");
  }
  if (!errs.empty()) return errs;
  if (!f.contains(full)) errs.push_back("filter does not contain the full index set");
  if (f.contains(0)) errs.push_back("filter contains the empty set (not proper)");
  for (IndexSet s : f.members) {
    for (IndexSet t : f.members) {
      if (!f.contains(s & t)) {
        errs.push_back("not closed under intersection: " + std::to_string(s) + " & " +
                       std::to_string(t));
        return errs;
      }
    }
    // Upward closure: every superset of s, enumerated over the free bits.
    const IndexSet free = full & ~s;
    for (IndexSet sub = free;; sub = (sub - 1) & free) {
      if (!f.contains(s | sub)) {
        errs.push_back("not upward closed: superset " + std::to_string(s | sub) + " of " +
                       std::to_string(s) + " missing");
        return errs;
      }
      if (sub == 0) break;
    }
  }
  return errs;
}

std::optional<IndexSet> ultrafilter_gap(const FilterFamily& f) {
  const IndexSet full = f.full();
  for (IndexSet s = 0;; ++s) {
    if (!f.contains(s) && !f.contains(full ^ s)) return s;
    if (s == full) break;
  }
  return std::nullopt;
}

std::vector<FilterFamily> all_filters(std::size_t m) {
  if (m == 0 || m > 4) throw Error("all_filters supports index sets of size 1 to 4");
  const std::size_t subsets = std::size_t{1} << m;
  std::vector<FilterFamily> out;
  for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << subsets); ++fam) {
    FilterFamily f{m, {}};
    for (std::size_t s = 0; s < subsets; ++s) {
      if (fam >> s & 1) f.members.push_back(static_cast<IndexSet>(s));
    }
    if (filter_errors(f).empty()) out.push_back(std::move(f));
  }
  return out;
}

Equivalence filter_equivalence(std::span<const FiniteAlgebra> family, const FilterFamily& f) {
  std::vector<std::size_t> sizes;
  std::size_t total = 1;
  for (const auto& a : family) {
    sizes.push_back(a.size);
    total *= a.size;
  }
  std::vector<std::vector<Element>> coords(total);
  for (std::size_t e = 0; e < total; ++e) coords[e] = product_coordinates(static_cast<Element>(e), sizes);

  std::vector<Element> reps;
  Equivalence eq{total, std::vector<Element>(total)};
  for (std::size_t e = 0; e < total; ++e) {
    Element rep = static_cast<Element>(e);
    for (Element r : reps) {
      IndexSet agree = 0;
      for (std::size_t i = 0; i < family.size(); ++i) {
        if (coords[e][i] == coords[r][i]) agree |= IndexSet{1} << i;
      }
      if (f.contains(agree)) {
        rep = r;
        break;
      }
    }
    if (rep == e) reps.push_back(rep);
    eq.rep[e] = rep;
  }
  return eq;
}

static FiniteAlgebra filtered_product(std::span<const FiniteAlgebra> family,
                                      const FilterFamily& f, const std::string& label) {
  if (family.size() != f.index_size) {
    throw Error("family size " + std::to_string(family.size()) + " does not match index set size " +
                std::to_string(f.index_size));
  }
  auto product = direct_product(family);
  // Agreement on a filter member is preserved coordinatewise, so the filter
  // equivalence is always a congruence and the quadratic check is skipped.
  auto r = induced_quotient(product, filter_equivalence(family, f));
  r.name = label + "(" + product.name + ")";
  return r;
}

FiniteAlgebra reduced_product(std::span<const FiniteAlgebra> family, const FilterFamily& f) {
  if (auto errs = filter_errors(f); !errs.empty()) throw ValidationError(std::move(errs));
  return filtered_product(family, f, "reduced");
}

FiniteAlgebra ultraproduct(std::span<const FiniteAlgebra> family, const FilterFamily& f) {
  if (auto errs = filter_errors(f); !errs.empty()) throw ValidationError(std::move(errs));
  if (auto gap = ultrafilter_gap(f)) {
    throw Error("not an ultrafilter: neither " + std::to_string(*gap) +
                " nor its complement is a member");
  }
  return filtered_product(family, f, "ultra");
}

// -- Direct limits -----------------------------------------------------------

std::vector<std::string> spectrum_errors(const DirectSpectrum& s) {
  std::vector<std::string> errs;
  const std::size_t m = s.index_size();
  if (m == 0) return {"spectrum has an empty index set"};
  if (s.leq.size() != m || s.maps.size() != m) return {"relation/map matrix size mismatch"};
  for (std::size_t i = 0; i < m; ++i) {
    if (s.leq[i].size() != m || s.maps[i].size() != m) return {"relation/map matrix size mismatch"};
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(s.algebras[i].sig == s.algebras[0].sig)) {
      errs.push_back("algebra " + std::to_string(i) + " has a different signature");
    }
    for (auto& v : validation_errors(s.algebras[i])) {
      errs.push_back("algebra " + std::to_string(i) + ": " + v);
    }
  }
  if (!errs.empty()) return errs;

  for (std::size_t i = 0; i < m; ++i) {
    if (!s.leq[i][i]) errs.push_back("order not reflexive at " + std::to_string(i));
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && s.leq[i][j] && s.leq[j][i]) {
        errs.push_back("order not antisymmetric at " + std::to_string(i) + "," + std::to_string(j));
      }
      for (std::size_t k = 0; k < m; ++k) {
        if (s.leq[i][j] && s.leq[j][k] && !s.leq[i][k]) {
          errs.push_back("order not transitive at " + std::to_string(i) + "," +
                         std::to_string(j) + "," + std::to_string(k));
        }
      }
      bool bounded = false;
      for (std::size_t k = 0; k < m; ++k) bounded = bounded || (s.leq[i][k] && s.leq[j][k]);
      if (!bounded) {
        errs.push_back("not up-directed: " + std::to_string(i) + " and " + std::to_string(j) +
                       " have no upper bound");
      }
    }
  }
  if (!errs.empty()) return errs;

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!s.leq[i][j]) continue;
      const auto& g = s.maps[i][j];
      const std::string tag = "g_" + std::to_string(i) + std::to_string(j);
      if (g.size() != s.algebras[i].size) {
        errs.push_back(tag + " has wrong length");
        continue;
      }
      if (std::any_of(g.begin(), g.end(), [&](Element e) { return e >= s.algebras[j].size; })) {
        errs.push_back(tag + " has values out of range");
        continue;
      }
      if (auto h = is_homomorphism(s.algebras[i], s.algebras[j], g); !h) {
        errs.push_back(tag + " is not a homomorphism at symbol '" + h.symbol + "' " +
                       tuple_string(h.args));
      }
      if (i == j) {
        for (Element x = 0; x < g.size(); ++x) {
          if (g[x] != x) {
            errs.push_back(tag + " is not the identity");
            break;
          }
        }
      }
    }
  }
  if (!errs.empty()) return errs;

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        if (!(s.leq[i][j] && s.leq[j][k])) continue;
        for (Element x = 0; x < s.algebras[i].size; ++x) {
          if (s.maps[j][k][s.maps[i][j][x]] != s.maps[i][k][x]) {
            errs.push_back("maps do not compose: g_" + std::to_string(j) + std::to_string(k) +
                           " o g_" + std::to_string(i) + std::to_string(j) + " != g_" +
                           std::to_string(i) + std::to_string(k));
            break;
          }
        }
      }
    }
  }
  return errs;
}

std::vector<std::size_t> topological_order(const DirectSpectrum& s) {
  const std::size_t m = s.index_size();
  std::vector<std::size_t> order;
  std::vector<bool> placed(m, false);
  while (order.size() < m) {
    for (std::size_t i = 0; i < m; ++i) {
      if (placed[i]) continue;
      bool minimal = true;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i && !placed[j] && s.leq[j][i]) minimal = false;
      }
      if (minimal) {
        order.push_back(i);
        placed[i] = true;
        break;
      }
    }
  }
  return order;
}

FiniteAlgebra direct_limit(const DirectSpectrum& s, UpperBoundChooser upper_bound) {
  if (auto errs = spectrum_errors(s); !errs.empty()) throw ValidationError(std::move(errs));
  const std::size_t m = s.index_size();
  const auto topo = topological_order(s);
  std::vector<std::size_t> topo_pos(m);
  for (std::size_t p = 0; p < m; ++p) topo_pos[topo[p]] = p;

  // Flatten the disjoint union: offset[i] + a stands for (a, i).
  std::vector<std::size_t> offset(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) offset[i + 1] = offset[i] + s.algebras[i].size;
  const std::size_t total = offset[m];

  auto equivalent = [&](std::size_t i, Element a, std::size_t j, Element b) {
    for (std::size_t k = 0; k < m; ++k) {
      if (s.leq[i][k] && s.leq[j][k] && s.maps[i][k][a] == s.maps[j][k][b]) return true;
    }
    return false;
  };

  // Classes numbered by first occurrence in (index, element) order.
  std::vector<std::size_t> class_of(total, SIZE_MAX);
  std::vector<std::pair<std::size_t, Element>> first_member;
  for (std::size_t i = 0; i < m; ++i) {
    for (Element a = 0; a < s.algebras[i].size; ++a) {
      std::size_t cls = SIZE_MAX;
      for (std::size_t c = 0; c < first_member.size(); ++c) {
        if (equivalent(first_member[c].first, first_member[c].second, i, a)) {
          cls = c;
          break;
        }
      }
      if (cls == SIZE_MAX) {
        cls = first_member.size();
        first_member.emplace_back(i, a);
      }
      class_of[offset[i] + a] = cls;
    }
  }

  auto pick = [&](const std::vector<std::size_t>& indices) {
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < m; ++k) {
      bool ok = std::all_of(indices.begin(), indices.end(),
                            [&](std::size_t i) { return s.leq[i][k]; });
      if (ok) candidates.push_back(k);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t x, std::size_t y) { return topo_pos[x] < topo_pos[y]; });
    return upper_bound ? upper_bound(candidates) : candidates.front();
  };

  const std::size_t n = first_member.size();
  const auto& sig = s.algebras[0].sig;
  FiniteAlgebra lim{"limit", sig, n, {}};
  for (std::size_t sym = 0; sym < sig.size(); ++sym) {
    const std::size_t arity = sig[sym].arity;
    const std::size_t len = checked_power(n, arity);
    Table t(len);
    std::vector<Element> cls(arity), args(arity);
    std::vector<std::size_t> indices(arity);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, n, cls);
      for (std::size_t k = 0; k < arity; ++k) indices[k] = first_member[cls[k]].first;
      const std::size_t j = pick(indices);
      for (std::size_t k = 0; k < arity; ++k) {
        const auto [i, a] = first_member[cls[k]];
        args[k] = s.maps[i][j][a];
      }
      const Element value = s.algebras[j].apply(sym, args);
      t[idx] = static_cast<Element>(class_of[offset[j] + value]);
    }
    lim.tables.push_back(std::move(t));
  }
  return lim;
}

bool is_superdirect(const DirectSpectrum& s) {
  if (auto errs = spectrum_errors(s); !errs.empty()) throw ValidationError(std::move(errs));
  for (std::size_t i = 0; i < s.index_size(); ++i) {
    for (std::size_t j = 0; j < s.index_size(); ++j) {
      if (s.leq[i][j] && !is_surjective(s.maps[i][j], s.algebras[j].size)) return false;
    }
  }
  return true;
}

bool is_subdirect(const FiniteAlgebra& b, std::span<const Element> embedding,
                  std::span<const FiniteAlgebra> family) {
  auto product = direct_product(family, b.sig);
  if (!is_injective(embedding)) throw Error("embedding is not injective");
  if (auto h = is_homomorphism(b, product, embedding); !h) {
    throw Error("embedding is not a homomorphism at symbol '" + h.symbol + "'");
  }
  std::vector<std::size_t> sizes;
  for (const auto& a : family) sizes.push_back(a.size);
  for (std::size_t i = 0; i < family.size(); ++i) {
    std::vector<bool> hit(family[i].size, false);
    for (Element e : embedding) hit[product_coordinates(e, sizes)[i]] = true;
    if (!std::all_of(hit.begin(), hit.end(), [](bool v) { return v; })) return false;
  }
  return true;
}

}  // namespace hyperq

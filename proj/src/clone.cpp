#include "hyperq/clone.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace hyperq {

namespace {

struct TableHash {
  std::size_t operator()(const Table& t) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Element e : t) h = (h ^ e) * 1099511628211ull;
    return h;
  }
};

}  // namespace

std::size_t CloneSlice::find(const Table& table) const {
  auto it = std::lower_bound(ops.begin(), ops.end(), table,
                             [](const TermOperation& op, const Table& t) { return op.table < t; });
  return it != ops.end() && it->table == table ? static_cast<std::size_t>(it - ops.begin())
                                               : ops.size();
}

CloneSlice clone_slice(const FiniteAlgebra& a, std::size_t arity, std::size_t limit) {
  if (limit < arity) throw Error("clone limit must be at least the arity");
  const std::size_t n = a.size;
  const std::size_t len = checked_power(n, arity);

  std::vector<TermOperation> known;
  std::unordered_map<Table, std::size_t, TableHash> seen;

  std::vector<Element> point(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    Table t(len);
    for (std::size_t idx = 0; idx < len; ++idx) {
      unflatten(idx, n, point);
      t[idx] = point[i];
    }
    if (seen.emplace(t, known.size()).second) {
      known.push_back({arity, std::move(t), Term::var(formal_variable(i))});
    }
  }

  std::size_t frontier = 0;
  bool first_round = true;
  while (true) {
    const std::size_t current = known.size();
    std::map<Table, Term> found;  // ordered by table, first witness kept

    for (std::size_t s = 0; s < a.sig.size(); ++s) {
      const std::size_t r = a.sig[s].arity;
      if (r == 0) {
        if (first_round) {
          Table t(len, a.tables[s][0]);
          if (!seen.contains(t)) found.emplace(std::move(t), Term::apply(a.sig[s].name, {}));
        }
        continue;
      }
      if (current == 0) continue;
      std::vector<std::size_t> tuple(r, 0);
      std::vector<Element> args(r);
      while (true) {
        // Only tuples touching last round's additions can produce something new.
        if (*std::max_element(tuple.begin(), tuple.end()) >= frontier) {
          Table t(len);
          for (std::size_t idx = 0; idx < len; ++idx) {
            for (std::size_t k = 0; k < r; ++k) args[k] = known[tuple[k]].table[idx];
            t[idx] = a.apply(s, args);
          }
          if (!seen.contains(t) && !found.contains(t)) {
            std::vector<Term> sub;
            for (std::size_t k = 0; k < r; ++k) sub.push_back(known[tuple[k]].witness);
            found.emplace(std::move(t), Term::apply(a.sig[s].name, std::move(sub)));
            if (current + found.size() > limit) {
              throw CloneLimitExceeded(arity, current + found.size());
            }
          }
        }
        std::size_t k = r;
        while (k > 0 && ++tuple[k - 1] == current) tuple[--k] = 0;
        if (k == 0) break;
      }
    }
    first_round = false;
    if (found.empty()) break;
    if (current + found.size() > limit) throw CloneLimitExceeded(arity, current + found.size());
    frontier = current;
    for (auto& [t, w] : found) {
      seen.emplace(t, known.size());
      known.push_back({arity, t, std::move(w)});
    }
  }

  std::sort(known.begin(), known.end(),
            [](const TermOperation& x, const TermOperation& y) { return x.table < y.table; });
  return CloneSlice{n, arity, std::move(known)};
}

const CloneSlice& SliceCache::get(std::size_t arity) {
  auto& slot = slices_[arity];
  if (!slot) slot = std::make_unique<CloneSlice>(clone_slice(algebra_, arity, limit_));
  return *slot;
}

const TermOperation* Hypersubstitution::find(std::string_view name) const {
  for (const auto& [n, op] : entries) {
    if (n == name) return &op;
  }
  return nullptr;
}

HypersubstitutionEnumerator::HypersubstitutionEnumerator(HypervariableList hypervars,
                                                         std::vector<const CloneSlice*> slices)
    : hypervars_(std::move(hypervars)), slices_(std::move(slices)),
      indices_(hypervars_.size(), 0) {
  if (slices_.size() != hypervars_.size()) throw Error("one slice per hypervariable required");
  for (std::size_t i = 0; i < slices_.size(); ++i) {
    if (slices_[i] == nullptr || slices_[i]->arity != hypervars_[i].second) {
      throw Error("missing slice for hypervariable '" + hypervars_[i].first + "' of arity " +
                  std::to_string(hypervars_[i].second));
    }
  }
}

std::size_t HypersubstitutionEnumerator::count() const {
  std::size_t c = 1;
  for (const auto* s : slices_) c *= s->size();
  return c;
}

bool HypersubstitutionEnumerator::next(Hypersubstitution& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    if (count() == 0) {
      done_ = true;
      return false;
    }
  } else {
    std::size_t k = 0;
    while (k < indices_.size() && ++indices_[k] == slices_[k]->size()) indices_[k++] = 0;
    if (k == indices_.size()) {
      done_ = true;
      return false;
    }
  }
  out.entries.clear();
  for (std::size_t i = 0; i < hypervars_.size(); ++i) {
    out.entries.emplace_back(hypervars_[i].first, slices_[i]->ops[indices_[i]]);
  }
  return true;
}

HypersubstitutionEnumerator enumerate_hypersubstitutions(
    const HypervariableList& hypervars, const std::map<std::size_t, CloneSlice>& slices) {
  std::vector<const CloneSlice*> ptrs;
  for (const auto& [name, arity] : hypervars) {
    auto it = slices.find(arity);
    if (it == slices.end()) {
      throw Error("missing slice of arity " + std::to_string(arity) + " for '" + name + "'");
    }
    ptrs.push_back(&it->second);
  }
  return HypersubstitutionEnumerator(hypervars, std::move(ptrs));
}

namespace {

Term substitute_formals(const Term& witness, const std::vector<Term>& actuals) {
  if (witness.is_variable()) {
    for (std::size_t i = 0; i < actuals.size(); ++i) {
      if (witness.name == formal_variable(i)) return actuals[i];
    }
    throw Error("witness term uses variable '" + witness.name + "' outside its arity");
  }
  Term out{witness.kind, witness.name, {}};
  for (const auto& a : witness.args) out.args.push_back(substitute_formals(a, actuals));
  return out;
}

}  // namespace

Term apply_hypersubstitution(const Hypersubstitution& h, const Term& t) {
  std::vector<Term> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(apply_hypersubstitution(h, a));
  if (t.kind != Term::Kind::HyperApply) return Term{t.kind, t.name, std::move(args)};

  const TermOperation* op = h.find(t.name);
  if (!op) throw Error("unbound hypervariable '" + t.name + "'");
  if (op->arity != args.size()) {
    throw Error("arity mismatch for hypervariable '" + t.name + "'");
  }
  return substitute_formals(op->witness, args);
}

HornFormula apply_hypersubstitution(const Hypersubstitution& h, const HornFormula& f) {
  HornFormula out;
  for (const auto& e : f.premises) {
    out.premises.push_back({apply_hypersubstitution(h, e.lhs), apply_hypersubstitution(h, e.rhs)});
  }
  out.conclusion = {apply_hypersubstitution(h, f.conclusion.lhs),
                    apply_hypersubstitution(h, f.conclusion.rhs)};
  return out;
}

FiniteAlgebra derived_algebra(const FiniteAlgebra& a, const Hypersubstitution& sigma) {
  FiniteAlgebra d{a.name + "^sigma", a.sig, a.size, {}};
  for (const auto& sym : a.sig.symbols()) {
    const TermOperation* op = sigma.find(sym.name);
    if (!op) throw Error("hypersubstitution has no entry for symbol '" + sym.name + "'");
    if (op->arity != sym.arity || op->table.size() != checked_power(a.size, sym.arity)) {
      throw Error("arity mismatch for symbol '" + sym.name + "'");
    }
    d.tables.push_back(op->table);
  }
  return d;
}

Hypersubstitution identity_hypersubstitution(const FiniteAlgebra& a) {
  Hypersubstitution h;
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    const auto& sym = a.sig[s];
    std::vector<Term> formals;
    for (const auto& v : formal_variables(sym.arity)) formals.push_back(Term::var(v));
    h.entries.emplace_back(sym.name, TermOperation{sym.arity, a.tables[s], Term::apply(sym.name, formals)});
  }
  return h;
}

void for_each_derived_algebra(const FiniteAlgebra& a, const Limits& limits,
                              const std::function<bool(const DerivedAlgebra&)>& visit,
                              bool dedup) {
  SliceCache cache(a, limits.max_clone_ops);
  HypervariableList symbols;
  std::vector<const CloneSlice*> slices;
  for (const auto& sym : a.sig.symbols()) {
    symbols.emplace_back(sym.name, sym.arity);
    slices.push_back(&cache.get(sym.arity));
  }
  HypersubstitutionEnumerator it(symbols, slices);
  std::set<std::vector<Table>> seen;
  Hypersubstitution sigma;
  while (it.next(sigma)) {
    DerivedAlgebra d{sigma, derived_algebra(a, sigma)};
    if (dedup && !seen.insert(d.algebra.tables).second) continue;
    if (!visit(d)) return;
  }
}

std::vector<DerivedAlgebra> enumerate_derived_algebras(const FiniteAlgebra& a,
                                                       const Limits& limits, bool dedup) {
  std::vector<DerivedAlgebra> out;
  for_each_derived_algebra(a, limits, [&](const DerivedAlgebra& d) {
    out.push_back(d);
    return true;
  }, dedup);
  return out;
}

}  // namespace hyperq

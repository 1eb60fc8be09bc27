#include "hyperq/satisfaction.hpp"

#include <algorithm>
#include <numeric>

namespace hyperq {

namespace {

// Post-order program for one side of an equation.
struct Instr {
  enum class Op { Var, Basic, Hyper } op;
  std::size_t index;  // variable slot, symbol index or hypervariable slot
  std::size_t nargs;
};
using Program = std::vector<Instr>;

class CompiledFormula {
 public:
  CompiledFormula(const FiniteAlgebra& a, const HornFormula& f)
      : algebra_(a), vars_(f.variables()), hypervars_(f.hypervariables()) {
    for (const auto& e : f.premises) premises_.push_back({compile(e.lhs), compile(e.rhs)});
    conclusion_ = {compile(f.conclusion.lhs), compile(f.conclusion.rhs)};
  }

  const std::vector<std::string>& variables() const { return vars_; }
  const HypervariableList& hypervariables() const { return hypervars_; }

  // sigma[i] is the table of hypervariable i.
  bool premises_hold(std::span<const Element> asg, std::span<const Table* const> sigma) {
    for (const auto& [l, r] : premises_) {
      if (eval(l, asg, sigma) != eval(r, asg, sigma)) return false;
    }
    return true;
  }
  bool conclusion_holds(std::span<const Element> asg, std::span<const Table* const> sigma) {
    return eval(conclusion_.first, asg, sigma) == eval(conclusion_.second, asg, sigma);
  }

 private:
  Program compile(const Term& t) {
    Program p;
    emit(t, p);
    return p;
  }

  void emit(const Term& t, Program& p) {
    for (const auto& arg : t.args) emit(arg, p);
    switch (t.kind) {
      case Term::Kind::Variable: {
        auto it = std::find(vars_.begin(), vars_.end(), t.name);
        p.push_back({Instr::Op::Var, static_cast<std::size_t>(it - vars_.begin()), 0});
        break;
      }
      case Term::Kind::Apply: {
        auto idx = algebra_.sig.index_of(t.name);
        if (!idx) throw Error("unknown symbol '" + t.name + "'");
        if (algebra_.sig[*idx].arity != t.args.size()) {
          throw Error("arity mismatch for '" + t.name + "'");
        }
        p.push_back({Instr::Op::Basic, *idx, t.args.size()});
        break;
      }
      case Term::Kind::HyperApply: {
        auto it = std::find_if(hypervars_.begin(), hypervars_.end(),
                               [&](const auto& hv) { return hv.first == t.name; });
        p.push_back({Instr::Op::Hyper, static_cast<std::size_t>(it - hypervars_.begin()),
                     t.args.size()});
        break;
      }
    }
  }

  Element eval(const Program& p, std::span<const Element> asg, std::span<const Table* const> sigma) {
    stack_.clear();
    const std::size_t n = algebra_.size;
    for (const auto& ins : p) {
      if (ins.op == Instr::Op::Var) {
        stack_.push_back(asg[ins.index]);
        continue;
      }
      const std::size_t base = stack_.size() - ins.nargs;
      std::span<const Element> args(stack_.data() + base, ins.nargs);
      const Element r = ins.op == Instr::Op::Basic ? algebra_.apply(ins.index, args)
                                                   : (*sigma[ins.index])[flat_index(args, n)];
      stack_.resize(base);
      stack_.push_back(r);
    }
    return stack_.back();
  }

  const FiniteAlgebra& algebra_;
  std::vector<std::string> vars_;
  HypervariableList hypervars_;
  std::vector<std::pair<Program, Program>> premises_;
  std::pair<Program, Program> conclusion_;
  std::vector<Element> stack_;
};

std::vector<Witness> search(const FiniteAlgebra& a, const HornFormula& f, const Limits& limits,
                            std::size_t cap, bool hyper) {
  CompiledFormula cf(a, f);
  const auto& hv = cf.hypervariables();
  SliceCache cache(a, limits.max_clone_ops);
  std::vector<const CloneSlice*> slices;
  for (const auto& [name, arity] : hv) slices.push_back(&cache.get(arity));
  HypersubstitutionEnumerator sigmas(hv, slices);

  const auto& vars = cf.variables();
  const std::size_t k = vars.size();
  std::vector<Witness> out;
  std::vector<const Table*> tables(hv.size());
  std::vector<Element> asg(k);
  Hypersubstitution sigma;
  while (sigmas.next(sigma)) {
    for (std::size_t i = 0; i < hv.size(); ++i) tables[i] = &sigma.entries[i].second.table;
    std::fill(asg.begin(), asg.end(), 0);
    while (true) {
      if (cf.premises_hold(asg, tables) && !cf.conclusion_holds(asg, tables)) {
        Witness w;
        w.hyper = hyper;
        w.sigma = sigma;
        for (std::size_t i = 0; i < k; ++i) w.assignment.emplace_back(vars[i], asg[i]);
        out.push_back(std::move(w));
        if (out.size() >= cap) return out;
      }
      std::size_t i = k;
      while (i > 0 && ++asg[i - 1] == a.size) asg[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

Verdict first_failure(const FiniteAlgebra& a, const HornFormula& f, const Limits& limits, bool hyper) {
  auto ws = search(a, f, limits, 1, hyper);
  if (ws.empty()) return {};
  return {false, std::move(ws.front())};
}

}  // namespace

Verdict holds_identity(const FiniteAlgebra& a, const HornFormula& f) {
  if (!f.premises.empty()) throw Error("identity check expects a formula without premises");
  if (f.is_hyper()) throw Error("identity check expects a formula without hypervariables");
  return first_failure(a, f, {}, false);
}

Verdict holds_quasi(const FiniteAlgebra& a, const HornFormula& f) {
  if (f.is_hyper()) throw Error("quasi-identity check expects a formula without hypervariables");
  return first_failure(a, f, {}, false);
}

Verdict holds_hyperidentity(const FiniteAlgebra& a, const HornFormula& f, const Limits& limits) {
  if (!f.premises.empty()) throw Error("hyperidentity check expects a formula without premises");
  return first_failure(a, f, limits, true);
}

Verdict holds_hyperquasi(const FiniteAlgebra& a, const HornFormula& f, const Limits& limits) {
  return first_failure(a, f, limits, true);
}

std::vector<Witness> find_all_failures(const FiniteAlgebra& a, const HornFormula& f,
                                       const Limits& limits, std::size_t cap) {
  if (cap == 0) throw Error("witness cap must be at least 1");
  return search(a, f, limits, cap, f.is_hyper());
}

// -- Term condition ----------------------------------------------------------

AbelianVerdict is_abelian(const FiniteAlgebra& a, std::size_t max_arity, const Limits& limits) {
  if (max_arity < 2) throw Error("term condition needs max arity of at least 2");
  const std::size_t n = a.size;
  for (std::size_t m = 2; m <= max_arity; ++m) {
    const CloneSlice slice = clone_slice(a, m, limits.max_clone_ops);
    const std::size_t row = checked_power(n, m - 1);
    // Shallow witness terms first, so reported failures stay readable.
    std::vector<std::size_t> order(slice.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return slice.ops[i].witness.depth() < slice.ops[j].witness.depth();
    });
    for (std::size_t idx : order) {
      const TermOperation& op = slice.ops[idx];
      const Table& t = op.table;
      for (Element u = 0; u < n; ++u) {
        for (Element v = 0; v < n; ++v) {
          if (u == v) continue;
          const Element* fu = t.data() + u * row;
          const Element* fv = t.data() + v * row;
          for (std::size_t xi = 0; xi < row; ++xi) {
            for (std::size_t yi = 0; yi < row; ++yi) {
              const bool eq_u = fu[xi] == fu[yi];
              const bool eq_v = fv[xi] == fv[yi];
              if (eq_u == eq_v) continue;
              TermConditionFailure w{op, u, v, std::vector<Element>(m - 1),
                                     std::vector<Element>(m - 1), eq_u};
              unflatten(xi, n, w.x);
              unflatten(yi, n, w.y);
              return {false, std::move(w)};
            }
          }
        }
      }
    }
  }
  return {};
}

bool confirms_term_condition_failure(const FiniteAlgebra& a, const TermConditionFailure& w) {
  const std::size_t m = w.op.arity;
  if (m < 2 || w.x.size() != m - 1 || w.y.size() != m - 1) return false;
  const auto vars = formal_variables(m);
  auto eval_at = [&](Element first, const std::vector<Element>& rest) {
    Assignment asg{{vars[0], first}};
    for (std::size_t i = 0; i + 1 < m; ++i) asg[vars[i + 1]] = rest[i];
    return eval_term(a, w.op.witness, asg);
  };
  const bool eq_u = eval_at(w.u, w.x) == eval_at(w.u, w.y);
  const bool eq_v = eval_at(w.v, w.x) == eval_at(w.v, w.y);
  return w.forward ? (eq_u && !eq_v) : (eq_v && !eq_u);
}

HornFormula term_condition_formula(std::size_t arity, bool reverse, const Signature& sig) {
  if (arity < 2) throw Error("term condition needs arity at least 2");
  std::string xs, ys;
  for (std::size_t i = 1; i < arity; ++i) {
    xs += ",x" + std::to_string(i);
    ys += ",y" + std::to_string(i);
  }
  const std::string p = reverse ? "v" : "u";
  const std::string q = reverse ? "u" : "v";
  return parse_formula("F(" + p + xs + ") = F(" + p + ys + ") -> F(" + q + xs + ") = F(" + q +
                           ys + ")",
                       sig);
}

// -- Witness lines -----------------------------------------------------------

std::string emit_witness(const Witness& w) {
  std::string out = "WITNESS ";
  if (w.hyper) {
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [name, op] : w.sigma.entries) entries.emplace_back(name, to_string(op.witness));
    std::sort(entries.begin(), entries.end());
    out += "sigma{";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) out += ',';
      out += entries[i].first + ":=" + entries[i].second;
    }
    out += "} ";
  }
  auto asg = w.assignment;
  std::sort(asg.begin(), asg.end());
  out += "asg{";
  for (std::size_t i = 0; i < asg.size(); ++i) {
    if (i) out += ',';
    out += asg[i].first + ":=" + std::to_string(asg[i].second);
  }
  return out + "} eq=" + std::to_string(w.formula_index);
}

std::string emit_witness(const Verdict& v) {
  if (v.holds || !v.witness) throw Error("emit_witness called on a holding verdict");
  return emit_witness(*v.witness);
}

namespace {

// Splits "a:=t1,b:=t2" at depth-0 commas.
std::vector<std::pair<std::string, std::string>> split_entries(std::string_view body) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t depth = 0, start = 0;
  auto flush = [&](std::size_t end) {
    std::string_view entry = body.substr(start, end - start);
    if (entry.empty()) return;
    auto sep = entry.find(":=");
    if (sep == std::string_view::npos) throw Error("malformed witness entry '" + std::string(entry) + "'");
    out.emplace_back(std::string(entry.substr(0, sep)), std::string(entry.substr(sep + 2)));
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '(') ++depth;
    if (body[i] == ')') --depth;
    if (body[i] == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(body.size());
  return out;
}

std::string_view braced(std::string_view line, std::string_view tag, bool required) {
  auto pos = line.find(std::string(tag) + "{");
  if (pos == std::string_view::npos) {
    if (required) throw Error("witness line lacks " + std::string(tag) + "{...}");
    return {};
  }
  const std::size_t open = pos + tag.size() + 1;
  auto close = line.find('}', open);
  if (close == std::string_view::npos) throw Error("unterminated " + std::string(tag) + " block");
  return line.substr(open, close - open);
}

}  // namespace

WitnessRecord parse_witness_line(std::string_view line, const Signature& sig) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) {
    line.remove_suffix(1);
  }
  if (line.substr(0, 8) != "WITNESS ") throw Error("witness line must start with 'WITNESS '");
  WitnessRecord r;
  if (line.find("sigma{") != std::string_view::npos) {
    r.sigma.emplace();
    for (auto& [name, term] : split_entries(braced(line, "sigma", true))) {
      (*r.sigma)[name] = parse_term(term, sig);
    }
  }
  for (auto& [name, value] : split_entries(braced(line, "asg", true))) {
    r.assignment[name] = static_cast<Element>(std::stoul(value));
  }
  auto eq = line.rfind(" eq=");
  if (eq == std::string_view::npos) throw Error("witness line lacks eq=<index>");
  r.formula_index = std::stoul(std::string(line.substr(eq + 4)));
  return r;
}

bool replay_witness(const FiniteAlgebra& a, const HornFormula& f, const WitnessRecord& w) {
  Hypersubstitution sigma;
  for (const auto& [name, arity] : f.hypervariables()) {
    if (!w.sigma) return false;
    auto it = w.sigma->find(name);
    if (it == w.sigma->end()) return false;
    sigma.entries.emplace_back(name, term_to_table(a, it->second, formal_variables(arity)));
  }
  for (const auto& v : f.variables()) {
    auto it = w.assignment.find(v);
    if (it == w.assignment.end() || it->second >= a.size) return false;
  }
  const HornFormula plain = apply_hypersubstitution(sigma, f);
  const Assignment asg(w.assignment.begin(), w.assignment.end());
  for (const auto& e : plain.premises) {
    if (eval_term(a, e.lhs, asg) != eval_term(a, e.rhs, asg)) return false;
  }
  return eval_term(a, plain.conclusion.lhs, asg) != eval_term(a, plain.conclusion.rhs, asg);
}

bool replay_witness(const FiniteAlgebra& a, const HornFormula& f, const Witness& w) {
  return replay_witness(a, f, parse_witness_line(emit_witness(w), a.sig));
}

}  // namespace hyperq

#include "hyperq/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace hyperq {

bool Term::contains_hypervariable() const {
  if (kind == Kind::HyperApply) return true;
  return std::any_of(args.begin(), args.end(),
                     [](const Term& t) { return t.contains_hypervariable(); });
}

std::size_t Term::depth() const {
  std::size_t d = 0;
  for (const auto& a : args) d = std::max(d, a.depth());
  return kind == Kind::Variable ? 0 : d + 1;
}

namespace {

template <typename Fn>
void visit_preorder(const Term& t, Fn&& fn) {
  fn(t);
  for (const auto& a : t.args) visit_preorder(a, fn);
}

template <typename Fn>
void visit_formula(const HornFormula& f, Fn&& fn) {
  for (const auto& e : f.premises) {
    visit_preorder(e.lhs, fn);
    visit_preorder(e.rhs, fn);
  }
  visit_preorder(f.conclusion.lhs, fn);
  visit_preorder(f.conclusion.rhs, fn);
}

}  // namespace

bool HornFormula::is_hyper() const {
  bool hyper = false;
  visit_formula(*this, [&](const Term& t) { hyper = hyper || t.kind == Term::Kind::HyperApply; });
  return hyper;
}

std::vector<std::string> HornFormula::variables() const {
  std::vector<std::string> vars;
  visit_formula(*this, [&](const Term& t) {
    if (t.is_variable() && std::find(vars.begin(), vars.end(), t.name) == vars.end()) {
      vars.push_back(t.name);
    }
  });
  return vars;
}

std::vector<std::pair<std::string, std::size_t>> HornFormula::hypervariables() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  visit_formula(*this, [&](const Term& t) {
    if (t.kind != Term::Kind::HyperApply) return;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == t.name; });
    if (it == out.end()) {
      out.emplace_back(t.name, t.args.size());
    } else if (it->second != t.args.size()) {
      throw Error("hypervariable '" + t.name + "' used with arities " +
                  std::to_string(it->second) + " and " + std::to_string(t.args.size()));
    }
  });
  return out;
}

// -- Parser ------------------------------------------------------------------

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Equals, Amp, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      toks.push_back({Tok::Ident, std::string(src.substr(i, j - i)), i});
      i = j;
    } else if (c == '(') {
      toks.push_back({Tok::LParen, "(", i++});
    } else if (c == ')') {
      toks.push_back({Tok::RParen, ")", i++});
    } else if (c == ',') {
      toks.push_back({Tok::Comma, ",", i++});
    } else if (c == '=') {
      toks.push_back({Tok::Equals, "=", i++});
    } else if (c == '&') {
      toks.push_back({Tok::Amp, "&", i++});
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      toks.push_back({Tok::Arrow, "->", i});
      i += 2;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  toks.push_back({Tok::End, "", src.size()});
  return toks;
}

class Parser {
 public:
  Parser(std::string_view src, const Signature& sig) : toks_(tokenize(src)), sig_(sig) {}

  HornFormula formula() {
    std::vector<Equation> eqs{equation()};
    while (peek().kind == Tok::Amp) {
      ++pos_;
      eqs.push_back(equation());
    }
    HornFormula f;
    if (peek().kind == Tok::Arrow) {
      ++pos_;
      f.premises = std::move(eqs);
      f.conclusion = equation();
    } else if (eqs.size() > 1) {
      throw ParseError("expected '->' after premises", peek().pos);
    } else {
      f.conclusion = std::move(eqs.front());
    }
    expect_end();
    return f;
  }

  Term single_term() {
    Term t = term();
    expect_end();
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what + ", found '" + peek().text + "'",
                       peek().pos);
    }
    ++pos_;
  }

  void expect_end() {
    if (peek().kind != Tok::End) {
      throw ParseError("unexpected '" + peek().text + "'", peek().pos);
    }
  }

  Equation equation() {
    Term lhs = term();
    expect(Tok::Equals, "'='");
    Term rhs = term();
    return {std::move(lhs), std::move(rhs)};
  }

  Term term() {
    const Token tok = peek();
    if (tok.kind != Tok::Ident) {
      throw ParseError(tok.kind == Tok::End ? "unexpected end of input, expected a term"
                                            : "expected a term, found '" + tok.text + "'",
                       tok.pos);
    }
    ++pos_;
    const bool upper = std::isupper(static_cast<unsigned char>(tok.text[0]));
    if (peek().kind != Tok::LParen) {
      if (upper) throw ParseError("hypervariable '" + tok.text + "' needs an argument list", tok.pos);
      return Term::var(tok.text);
    }
    ++pos_;
    std::vector<Term> args;
    if (peek().kind != Tok::RParen) {
      args.push_back(term());
      while (peek().kind == Tok::Comma) {
        ++pos_;
        args.push_back(term());
      }
    }
    expect(Tok::RParen, "')'");

    if (upper) {
      auto [it, inserted] = hyper_arity_.emplace(tok.text, args.size());
      if (!inserted && it->second != args.size()) {
        throw ParseError("hypervariable '" + tok.text + "' first used with arity " +
                             std::to_string(it->second) + ", here with arity " +
                             std::to_string(args.size()),
                         tok.pos);
      }
      return Term::hyper(tok.text, std::move(args));
    }
    auto idx = sig_.index_of(tok.text);
    if (!idx) throw ParseError("unknown symbol '" + tok.text + "'", tok.pos);
    if (sig_[*idx].arity != args.size()) {
      throw ParseError("arity clash for '" + tok.text + "': expects " +
                           std::to_string(sig_[*idx].arity) + " arguments, got " +
                           std::to_string(args.size()),
                       tok.pos);
    }
    return Term::apply(tok.text, std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
  std::map<std::string, std::size_t> hyper_arity_;
};

}  // namespace

HornFormula parse_formula(std::string_view src, const Signature& sig) {
  return Parser(src, sig).formula();
}

Term parse_term(std::string_view src, const Signature& sig) {
  return Parser(src, sig).single_term();
}

std::vector<HornFormula> parse_horn_file(std::string_view text, const Signature& sig) {
  std::vector<HornFormula> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse_formula(line, sig));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), e.position());
      }
    }
    start = end + 1;
  }
  return out;
}

// -- Printing ----------------------------------------------------------------

std::string to_string(const Term& t) {
  if (t.is_variable()) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    out += to_string(t.args[i]);
  }
  return out + ")";
}

std::string to_string(const Equation& e) { return to_string(e.lhs) + " = " + to_string(e.rhs); }

std::string to_string(const HornFormula& f) {
  std::string out;
  for (std::size_t i = 0; i < f.premises.size(); ++i) {
    if (i) out += " & ";
    out += to_string(f.premises[i]);
  }
  if (!f.premises.empty()) out += " -> ";
  return out + to_string(f.conclusion);
}

// -- Evaluation --------------------------------------------------------------

void check_well_formed(const Term& t, const Signature& sig) {
  if (t.kind == Term::Kind::Apply) {
    auto idx = sig.index_of(t.name);
    if (!idx) throw Error("unknown symbol '" + t.name + "'");
    if (sig[*idx].arity != t.args.size()) throw Error("arity mismatch for '" + t.name + "'");
  }
  for (const auto& a : t.args) check_well_formed(a, sig);
}

Element eval_term(const FiniteAlgebra& a, const Term& t, const Assignment& asg) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      auto it = asg.find(t.name);
      if (it == asg.end()) throw Error("unbound variable '" + t.name + "'");
      if (it->second >= a.size) throw Error("assignment value out of range for '" + t.name + "'");
      return it->second;
    }
    case Term::Kind::Apply: {
      std::vector<Element> vals;
      vals.reserve(t.args.size());
      for (const auto& arg : t.args) vals.push_back(eval_term(a, arg, asg));
      return op_apply(a, t.name, vals);
    }
    case Term::Kind::HyperApply:
      break;
  }
  throw Error("cannot evaluate hypervariable '" + t.name + "' without a hypersubstitution");
}

std::string formal_variable(std::size_t i) { return "x" + std::to_string(i + 1); }

std::vector<std::string> formal_variables(std::size_t arity) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arity; ++i) out.push_back(formal_variable(i));
  return out;
}

TermOperation term_to_table(const FiniteAlgebra& a, const Term& t,
                            const std::vector<std::string>& var_order) {
  visit_preorder(t, [&](const Term& node) {
    if (node.is_variable() &&
        std::find(var_order.begin(), var_order.end(), node.name) == var_order.end()) {
      throw Error("variable '" + node.name + "' missing from variable order");
    }
  });
  const std::size_t k = var_order.size();
  const std::size_t len = checked_power(a.size, k);
  std::map<std::string, std::string> formal;
  for (std::size_t i = 0; i < k; ++i) formal.emplace(var_order[i], formal_variable(i));
  std::function<Term(const Term&)> rename = [&](const Term& node) {
    if (node.is_variable()) return Term::var(formal.at(node.name));
    Term out{node.kind, node.name, {}};
    for (const auto& c : node.args) out.args.push_back(rename(c));
    return out;
  };
  TermOperation op{k, Table(len), rename(t)};
  std::vector<Element> args(k);
  Assignment asg;
  for (std::size_t idx = 0; idx < len; ++idx) {
    unflatten(idx, a.size, args);
    for (std::size_t i = 0; i < k; ++i) asg[var_order[i]] = args[i];
    op.table[idx] = eval_term(a, t, asg);
  }
  return op;
}

// -- T and its inverse -------------------------------------------------------

namespace {

std::vector<std::string> symbols_by_first_occurrence(const HornFormula& q) {
  std::vector<std::string> syms;
  visit_formula(q, [&](const Term& t) {
    if (t.kind == Term::Kind::HyperApply) {
      throw Error("transform_T expects a formula without hypervariables");
    }
    if (t.kind == Term::Kind::Apply && std::find(syms.begin(), syms.end(), t.name) == syms.end()) {
      syms.push_back(t.name);
    }
  });
  return syms;
}

Term rename(const Term& t, const std::map<std::string, std::string>& to_hyper) {
  Term out = t;
  if (t.kind == Term::Kind::Apply) {
    out.kind = Term::Kind::HyperApply;
    out.name = to_hyper.at(t.name);
  }
  for (auto& a : out.args) a = rename(a, to_hyper);
  return out;
}

Term unbind(const Term& t, const Binding& binding, const Signature& sig) {
  Term out = t;
  if (t.kind == Term::Kind::HyperApply) {
    auto it = binding.find(t.name);
    if (it == binding.end()) throw Error("unbound hypervariable '" + t.name + "'");
    auto idx = sig.index_of(it->second);
    if (!idx) throw Error("hypervariable '" + t.name + "' bound to unknown symbol '" + it->second + "'");
    if (sig[*idx].arity != t.args.size()) {
      throw Error("arity mismatch: hypervariable '" + t.name + "' has arity " +
                  std::to_string(t.args.size()) + " but '" + it->second + "' has arity " +
                  std::to_string(sig[*idx].arity));
    }
    out.kind = Term::Kind::Apply;
    out.name = it->second;
  }
  for (auto& a : out.args) a = unbind(a, binding, sig);
  return out;
}

}  // namespace

Binding canonical_binding(const HornFormula& q) {
  Binding b;
  const auto syms = symbols_by_first_occurrence(q);
  for (std::size_t i = 0; i < syms.size(); ++i) b["F" + std::to_string(i + 1)] = syms[i];
  return b;
}

HornFormula transform_T(const HornFormula& q) {
  std::map<std::string, std::string> to_hyper;
  for (const auto& [hv, sym] : canonical_binding(q)) to_hyper[sym] = hv;
  HornFormula h;
  for (const auto& e : q.premises) h.premises.push_back({rename(e.lhs, to_hyper), rename(e.rhs, to_hyper)});
  h.conclusion = {rename(q.conclusion.lhs, to_hyper), rename(q.conclusion.rhs, to_hyper)};
  return h;
}

HornFormula transform_Tinv(const HornFormula& h, const Binding& binding, const Signature& sig) {
  h.hypervariables();  // arity consistency
  HornFormula q;
  for (const auto& e : h.premises) {
    q.premises.push_back({unbind(e.lhs, binding, sig), unbind(e.rhs, binding, sig)});
  }
  q.conclusion = {unbind(h.conclusion.lhs, binding, sig), unbind(h.conclusion.rhs, binding, sig)};
  return q;
}

}  // namespace hyperq

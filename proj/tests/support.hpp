#pragma once

#include <random>
#include <string>
#include <vector>

#include "hyperq/catalog.hpp"
#include "hyperq/io.hpp"
#include "hyperq/term.hpp"

namespace testing {

struct CorpusSection {
  hyperq::Signature sig;
  std::vector<std::string> lines;
  std::vector<hyperq::HornFormula> formulas;
};

inline std::string data_path(const std::string& name) { return std::string(HYPERQ_TEST_DATA_DIR) + "/" + name; }

inline std::vector<CorpusSection> load_corpus() {
  std::vector<CorpusSection> out;
  const std::string text = hyperq::read_text_file(data_path("corpus.horn"));
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("signature ", 0) == 0) {
      std::vector<hyperq::Symbol> syms;
      std::size_t pos = 10;
      while (pos < line.size()) {
        std::size_t sp = line.find(' ', pos);
        if (sp == std::string::npos) sp = line.size();
        std::string tok = line.substr(pos, sp - pos);
        auto colon = tok.find(':');
        syms.push_back({tok.substr(0, colon), std::stoul(tok.substr(colon + 1))});
        pos = sp + 1;
      }
      out.push_back({hyperq::Signature(std::move(syms)), {}, {}});
      continue;
    }
    out.back().lines.push_back(line);
    out.back().formulas.push_back(hyperq::parse_formula(line, out.back().sig));
  }
  return out;
}

inline std::vector<hyperq::FiniteAlgebra> catalog_up_to(std::size_t max_size) {
  std::vector<hyperq::FiniteAlgebra> out;
  for (const auto& name : hyperq::catalog_names()) {
    auto a = hyperq::make_catalog_algebra(name);
    if (a.size <= max_size) out.push_back(std::move(a));
  }
  return out;
}

inline hyperq::Term random_term(std::mt19937& rng, const hyperq::Signature& sig,
                                const std::vector<std::string>& vars, std::size_t depth) {
  std::uniform_int_distribution<std::size_t> coin(0, 2);
  if (depth == 0 || coin(rng) == 0) {
    std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
    return hyperq::Term::var(vars[pick(rng)]);
  }
  std::uniform_int_distribution<std::size_t> pick(0, sig.size() - 1);
  const auto& s = sig[pick(rng)];
  std::vector<hyperq::Term> args;
  for (std::size_t i = 0; i < s.arity; ++i) args.push_back(random_term(rng, sig, vars, depth - 1));
  return hyperq::Term::apply(s.name, std::move(args));
}

}  // namespace testing

#include "hyperq/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hyperq {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t parse_number(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error("line " + std::to_string(line_no) + ": expected a number, found '" +
                std::string(s) + "'");
  }
  return v;
}

}  // namespace

FiniteAlgebra parse_algebra(std::string_view text) {
  FiniteAlgebra a;
  std::vector<Symbol> symbols;
  bool have_name = false, have_size = false, pending_op = false;
  std::size_t line_no = 0, start = 0;

  auto fail = [&](const std::string& msg) -> void {
    throw Error("line " + std::to_string(line_no) + ": " + msg);
  };

  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "algebra") {
      if (have_name) fail("duplicate 'algebra' line");
      if (tok.size() != 2) fail("expected 'algebra <name>'");
      a.name = std::string(tok[1]);
      have_name = true;
    } else if (tok[0] == "size") {
      if (!have_name) fail("'size' before 'algebra'");
      if (have_size) fail("duplicate 'size' line");
      if (tok.size() != 2) fail("expected 'size <n>'");
      a.size = parse_number(tok[1], line_no);
      have_size = true;
    } else if (tok[0] == "op") {
      if (!have_size) fail("'op' before 'size'");
      if (pending_op) fail("'op' without a preceding 'table' for '" + symbols.back().name + "'");
      if (tok.size() != 3) fail("expected 'op <symbol> <arity>'");
      symbols.push_back({std::string(tok[1]), parse_number(tok[2], line_no)});
      pending_op = true;
    } else if (tok[0] == "table") {
      if (!pending_op) fail("'table' without a preceding 'op'");
      Table t;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        t.push_back(static_cast<Element>(parse_number(tok[i], line_no)));
      }
      a.tables.push_back(std::move(t));
      pending_op = false;
    } else {
      fail("unknown directive '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_name || !have_size) throw Error("missing 'algebra' or 'size' line");
  if (pending_op) throw Error("missing 'table' for '" + symbols.back().name + "'");
  a.sig = Signature(std::move(symbols));
  validate_algebra(a);
  return a;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FiniteAlgebra read_algebra_file(const std::string& path) {
  return parse_algebra(read_text_file(path));
}

std::string format_algebra(const FiniteAlgebra& a) {
  std::string out = "algebra " + a.name + "\nsize " + std::to_string(a.size) + "\n";
  for (std::size_t s = 0; s < a.sig.size(); ++s) {
    out += "op " + a.sig[s].name + " " + std::to_string(a.sig[s].arity) + "\ntable";
    for (Element e : a.tables[s]) out += " " + std::to_string(e);
    out += "\n";
  }
  return out;
}

}  // namespace hyperq

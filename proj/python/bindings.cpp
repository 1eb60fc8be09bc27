#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperq/catalog.hpp"
#include "hyperq/io.hpp"
#include "hyperq/satisfaction.hpp"
#include "hyperq/verify.hpp"

namespace py = pybind11;
using namespace hyperq;

namespace {

Limits make_limits(std::size_t max_clone_ops, std::size_t max_arity) {
  Limits l;
  l.max_clone_ops = max_clone_ops;
  l.max_arity = max_arity;
  return l;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["holds"] = v.holds;
  d["witness"] = v.holds ? py::object(py::none()) : py::object(py::str(emit_witness(v)));
  return d;
}

}  // namespace

PYBIND11_MODULE(_hyperq, m) {
  m.doc() = "Finite algebras, term operations and hyper-satisfaction checks";

  py::register_exception<Error>(m, "HyperqError", PyExc_ValueError);

  py::class_<FiniteAlgebra>(m, "Algebra")
      .def_readonly("name", &FiniteAlgebra::name)
      .def_readonly("size", &FiniteAlgebra::size)
      .def_readonly("tables", &FiniteAlgebra::tables)
      .def_property_readonly("signature",
                             [](const FiniteAlgebra& a) {
                               std::vector<std::pair<std::string, std::size_t>> out;
                               for (const auto& s : a.sig.symbols()) out.emplace_back(s.name, s.arity);
                               return out;
                             })
      .def("apply",
           [](const FiniteAlgebra& a, const std::string& symbol, const std::vector<Element>& args) {
             return op_apply(a, symbol, args);
           })
      .def("__str__", &format_algebra)
      .def("__repr__", [](const FiniteAlgebra& a) {
        return "<Algebra " + a.name + " size=" + std::to_string(a.size) + ">";
      });

  m.def("catalog", &make_catalog_algebra, py::arg("name"));
  m.def("catalog_names", &catalog_names);
  m.def("parse_algebra", [](const std::string& text) { return parse_algebra(text); }, py::arg("text"));

  m.def(
      "check",
      [](const FiniteAlgebra& a, const std::string& formula, std::size_t max_clone_ops, std::size_t max_arity) {
        const HornFormula f = parse_formula(formula, a.sig);
        const Limits limits = make_limits(max_clone_ops, max_arity);
        return verdict_dict(f.is_hyper() ? holds_hyperquasi(a, f, limits) : holds_quasi(a, f));
      },
      py::arg("algebra"), py::arg("formula"), py::arg("max_clone_ops") = kDefaultCloneLimit,
      py::arg("max_arity") = 3,
      "Decides a formula; hypervariables make it a hyper-satisfaction check.");

  m.def(
      "replay",
      [](const FiniteAlgebra& a, const std::string& formula, const std::string& line) {
        return replay_witness(a, parse_formula(formula, a.sig), parse_witness_line(line, a.sig));
      },
      py::arg("algebra"), py::arg("formula"), py::arg("witness"));

  m.def(
      "clone_slice",
      [](const FiniteAlgebra& a, std::size_t arity, std::size_t max_clone_ops) {
        std::vector<std::pair<Table, std::string>> out;
        for (const auto& op : clone_slice(a, arity, max_clone_ops).ops) {
          out.emplace_back(op.table, to_string(op.witness));
        }
        return out;
      },
      py::arg("algebra"), py::arg("arity"), py::arg("max_clone_ops") = kDefaultCloneLimit);

  m.def(
      "derived_algebras",
      [](const FiniteAlgebra& a, bool dedup) {
        std::vector<FiniteAlgebra> out;
        for (auto& d : enumerate_derived_algebras(a, Limits{}, dedup)) out.push_back(std::move(d.algebra));
        return out;
      },
      py::arg("algebra"), py::arg("dedup") = false);

  m.def(
      "direct_product",
      [](const std::vector<FiniteAlgebra>& family) { return direct_product(family); }, py::arg("family"));

  m.def(
      "reduced_product",
      [](const std::vector<FiniteAlgebra>& family, std::vector<std::vector<std::size_t>> members, bool ultra) {
        FilterFamily f{family.size(), {}};
        for (const auto& member : members) {
          IndexSet s = 0;
          for (std::size_t i : member) {
            if (i >= family.size()) throw Error("filter index out of range");
            s |= IndexSet{1} << i;
          }
          f.members.push_back(s);
        }
        std::sort(f.members.begin(), f.members.end());
        f.members.erase(std::unique(f.members.begin(), f.members.end()), f.members.end());
        return ultra ? ultraproduct(family, f) : reduced_product(family, f);
      },
      py::arg("family"), py::arg("filter"), py::arg("ultra") = false);

  m.def(
      "is_isomorphic",
      [](const FiniteAlgebra& a, const FiniteAlgebra& b) { return iso_search(a, b).has_value(); });

  m.def(
      "is_abelian",
      [](const FiniteAlgebra& a, std::size_t max_arity) { return is_abelian(a, max_arity).abelian; },
      py::arg("algebra"), py::arg("max_arity") = 3);

  m.def(
      "verify",
      [](const std::string& which) {
        Report r;
        if (which == "all") {
          r = verify_all();
        } else if (which == "sec3") {
          r = verify_section3();
        } else if (which == "sec1") {
          for (std::size_t n = 2; n <= 6; ++n) {
            auto part = verify_section1(n);
            r.insert(r.end(), part.begin(), part.end());
          }
        } else {
          throw Error("unknown check group '" + which + "'");
        }
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& c : r) out.emplace_back(c.name, c.pass, c.detail);
        return out;
      },
      py::arg("which") = "all");
}

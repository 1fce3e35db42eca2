#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpw/cli.hpp"
#include "fpw/congruence.hpp"
#include "fpw/error.hpp"
#include "fpw/filterpair.hpp"
#include "fpw/hierarchy.hpp"
#include "fpw/interp.hpp"
#include "fpw/io.hpp"
#include "fpw/leibniz.hpp"
#include "fpw/quasivariety.hpp"

namespace py = pybind11;
using namespace fpw;

namespace {
  py::object to_python(json const& j) {
    return py::module_::import("json").attr("loads")(j.dump());
  }

  ElemSet subset_of(FiniteAlgebra const& a, std::vector<std::string> const& names) {
    ElemSet s(a.size());
    for (auto const& n : names) {
      auto e = a.find_element(n);
      if (!e) {
        throw InvariantError("unknown element '" + n + "' of " + a.name());
      }
      s.insert(*e);
    }
    return s;
  }

  std::vector<Term> terms(FilterPairInstance const& fp, std::vector<std::string> const& texts) {
    std::vector<Term> out;
    for (auto const& t : texts) {
      out.push_back(parse_term(t, fp.k.signature));
    }
    return out;
  }

  void check_signature(FiniteAlgebra const& a, FilterPairInstance const& fp) {
    if (a.signature() != fp.k.signature) {
      throw MismatchError(a.name() + " does not have the signature of " + fp.name);
    }
  }
}  // namespace

PYBIND11_MODULE(_fpw, m) {
  m.doc() = "Filter pairs over finite algebras";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<MismatchError>(m, "MismatchError", base.ptr());
  py::register_exception<BoundExceeded>(m, "BoundExceeded", base.ptr());
  py::register_exception<InternalError>(m, "InternalError", base.ptr());

  py::class_<FiniteAlgebra>(m, "Algebra")
      .def_static("parse", &parse_algebra, py::arg("text"))
      .def_static("load", [](std::string const& path) { return load_algebra(path); }, py::arg("path"))
      .def_property_readonly("name", &FiniteAlgebra::name)
      .def_property_readonly("elements", &FiniteAlgebra::element_names)
      .def("__len__", &FiniteAlgebra::size)
      .def("to_text", &write_algebra)
      .def("to_json", [](FiniteAlgebra const& a) { return to_python(to_json(a)); })
      .def("__repr__", [](FiniteAlgebra const& a) {
        return "<Algebra " + a.name() + " with " + std::to_string(a.size()) + " elements>";
      });

  py::class_<FilterPairInstance>(m, "FilterPair")
      .def_static("load", [](std::string const& path) { return load_filterpair(path); }, py::arg("path"))
      .def_static(
          "parse",
          [](std::string const& text, std::string const& base_dir, std::string const& name) {
            return parse_filterpair(text, base_dir, name);
          },
          py::arg("text"), py::arg("base_dir") = ".", py::arg("name") = "filterpair")
      .def_property_readonly("name", [](FilterPairInstance const& fp) { return fp.name; })
      .def_property_readonly("signature", [](FilterPairInstance const& fp) { return fp.k.signature.to_string(); })
      .def("__repr__", [](FilterPairInstance const& fp) { return "<FilterPair " + fp.name + ">"; });

  m.def(
      "congruences",
      [](FiniteAlgebra const& a, FilterPairInstance const* fp) {
        auto       cs   = fp ? relative_congruences(a, fp->k) : all_congruences(a);
        py::list   out;
        for (auto const& c : cs) {
          out.append(to_python(to_json(a, c)));
        }
        return out;
      },
      py::arg("algebra"), py::arg("filterpair") = nullptr,
      "Congruences of the algebra, or its K-congruences for the filter pair's class.");

  m.def(
      "leibniz_omega",
      [](FiniteAlgebra const& a, std::vector<std::string> const& filter) {
        return to_python(to_json(a, leibniz_omega(a, subset_of(a, filter))));
      },
      py::arg("algebra"), py::arg("filter"));

  m.def(
      "i_tau",
      [](FiniteAlgebra const& a, FilterPairInstance const& fp, std::string const& theta) {
        check_signature(a, fp);
        return to_python(to_json(a, i_tau(a, Congruence::parse(a, theta), fp)));
      },
      py::arg("algebra"), py::arg("filterpair"), py::arg("theta"));

  m.def(
      "xi",
      [](FiniteAlgebra const& a, FilterPairInstance const& fp, std::vector<std::string> const& s) {
        check_signature(a, fp);
        return to_python(to_json(a, xi(a, subset_of(a, s), fp)));
      },
      py::arg("algebra"), py::arg("filterpair"), py::arg("subset"));

  m.def(
      "i_filters",
      [](FiniteAlgebra const& a, FilterPairInstance const& fp) {
        check_signature(a, fp);
        py::list out;
        for (auto const& f : i_filters(a, fp).filters) {
          out.append(to_python(to_json(a, f)));
        }
        return out;
      },
      py::arg("algebra"), py::arg("filterpair"));

  m.def(
      "hierarchy",
      [](FilterPairInstance const& fp, std::vector<FiniteAlgebra> const& corpus) {
        for (auto const& a : corpus) {
          check_signature(a, fp);
        }
        auto rep = hierarchy_report(fp, corpus);
        return py::make_tuple(rep.exit_code(), to_python(rep.to_json(corpus)));
      },
      py::arg("filterpair"), py::arg("corpus"), "Returns (exit_code, report).");

  m.def(
      "entails",
      [](FilterPairInstance const& fp, std::vector<std::string> const& gamma, std::string const& phi) {
        auto r = entails(fp, terms(fp, gamma), parse_term(phi, fp.k.signature));
        return to_python(r.certificate.to_json());
      },
      py::arg("filterpair"), py::arg("gamma"), py::arg("phi"), "Certificate for gamma |- phi.");

  m.def(
      "interpolate",
      [](FilterPairInstance const& fp, std::vector<std::string> const& gamma, std::string const& phi,
         std::size_t window_depth, bool minimize) {
        CraigConfig cfg;
        cfg.window_depth = window_depth;
        cfg.minimize     = minimize;
        return to_python(craig_interpolate(fp, terms(fp, gamma), parse_term(phi, fp.k.signature), cfg).to_json());
      },
      py::arg("filterpair"), py::arg("gamma"), py::arg("phi"), py::arg("window_depth") = 6,
      py::arg("minimize") = false);

  m.def(
      "run",
      [](std::string const& subcommand, std::vector<std::string> const& args) {
        auto r = run(subcommand, args);
        return py::make_tuple(r.exit_code, to_python(r.report));
      },
      py::arg("subcommand"), py::arg("args"), "Runs a CLI subcommand; returns (exit_code, report).");

  m.attr("subcommands") = subcommands();
}

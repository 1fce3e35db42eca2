#include "fpw/io.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "fpw/compiled_term.hpp"
#include "fpw/error.hpp"

namespace fpw {

  namespace {
    struct Line {
      std::size_t number;
      std::string text;
    };

    std::string_view trim(std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
      }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
      }
      return s;
    }

    std::vector<Line> lines_of(std::string_view text) {
      std::vector<Line> out;
      std::size_t       n = 0;
      while (!text.empty()) {
        ++n;
        auto             nl  = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
          raw = raw.substr(0, hash);
        }
        raw = trim(raw);
        if (!raw.empty()) {
          out.push_back({n, std::string(raw)});
        }
      }
      return out;
    }

    std::vector<std::string> words(std::string_view s) {
      std::vector<std::string> out;
      std::istringstream       in{std::string(s)};
      std::string              w;
      while (in >> w) {
        out.push_back(w);
      }
      return out;
    }

    // "key: rest" -> rest, if the line starts with the key.
    std::optional<std::string_view> field(Line const& l, std::string_view key) {
      std::string_view t = l.text;
      if (t.substr(0, key.size()) != key) {
        return std::nullopt;
      }
      t.remove_prefix(key.size());
      t = trim(t);
      if (t.empty() || t.front() != ':') {
        return std::nullopt;
      }
      return trim(t.substr(1));
    }

    // "keyword name"
    std::optional<std::string> header(Line const& l, std::string_view keyword) {
      auto w = words(l.text);
      if (w.size() == 2 && w[0] == keyword) {
        return w[1];
      }
      return std::nullopt;
    }

    Signature parse_signature(Line const& l, std::string_view rest) {
      std::vector<Symbol> syms;
      for (auto const& w : words(rest)) {
        auto slash = w.find('/');
        if (slash == std::string::npos) {
          throw ParseError("expected <symbol>/<arity>, got '" + w + "'", 0, l.number);
        }
        std::string name = w.substr(0, slash);
        if (!is_identifier(name)) {
          throw ParseError("bad symbol name '" + name + "'", 0, l.number);
        }
        std::size_t arity = 0;
        try {
          std::size_t used = 0;
          arity            = std::stoul(w.substr(slash + 1), &used);
          if (used != w.size() - slash - 1) {
            throw std::invalid_argument("trailing");
          }
        } catch (std::exception const&) {
          throw ParseError("bad arity in '" + w + "'", 0, l.number);
        }
        syms.push_back({name, arity});
      }
      try {
        return Signature(std::move(syms));
      } catch (Error const& e) {
        throw ParseError(e.what(), 0, l.number);
      }
    }

    template <class F>
    auto at_line(std::size_t line, F&& f) -> decltype(f()) {
      try {
        return f();
      } catch (ParseError const& e) {
        if (e.line() != 0) {
          throw;
        }
        throw ParseError(e.message() + " (at position " + std::to_string(e.position()) + ")", e.position(), line);
      }
    }

    std::string read_file(std::filesystem::path const& path) {
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        throw ParseError::in_file(path.filename().string(), ParseError("cannot open " + path.string(), 0, 0));
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }

    template <class F>
    auto in_file(std::filesystem::path const& path, F&& f) -> decltype(f()) {
      try {
        return f();
      } catch (ParseError const& e) {
        if (!e.file().empty()) {
          throw;
        }
        throw ParseError::in_file(path.filename().string(), e);
      }
    }

    struct AlgebraParts {
      FiniteAlgebra       algebra;
      std::optional<Line> designated;
    };

    AlgebraParts parse_algebra_lines(std::vector<Line> const& ls, bool allow_designated) {
      if (ls.empty()) {
        throw ParseError("empty algebra file", 0, 1);
      }
      auto name = header(ls[0], "algebra");
      if (!name) {
        throw ParseError("expected 'algebra <name>'", 0, ls[0].number);
      }
      if (ls.size() < 3) {
        throw ParseError("expected signature and carrier lines", 0, ls.back().number);
      }
      auto sig_text = field(ls[1], "signature");
      if (!sig_text) {
        throw ParseError("expected 'signature: ...'", 0, ls[1].number);
      }
      Signature sig          = parse_signature(ls[1], *sig_text);
      auto      carrier_text = field(ls[2], "carrier");
      if (!carrier_text) {
        throw ParseError("expected 'carrier: ...'", 0, ls[2].number);
      }
      auto names = words(*carrier_text);
      if (names.empty()) {
        throw ParseError("empty carrier", 0, ls[2].number);
      }
      std::map<std::string, Elem> index;
      for (Elem i = 0; i < names.size(); ++i) {
        if (!index.emplace(names[i], i).second) {
          throw ParseError("duplicate element '" + names[i] + "'", 0, ls[2].number);
        }
      }
      std::size_t const n = names.size();
      auto              elem_of = [&](std::string const& s, std::size_t line) {
        auto it = index.find(s);
        if (it == index.end()) {
          throw ParseError("unknown element '" + s + "'", 0, line);
        }
        return it->second;
      };

      std::vector<std::vector<Elem>> tables(sig.size());
      std::vector<std::size_t>       table_size(sig.size());
      for (std::size_t f = 0; f < sig.size(); ++f) {
        std::size_t cells = 1;
        for (std::size_t i = 0; i < sig[f].arity; ++i) {
          cells *= n;
          if (cells > 50'000'000) {
            throw BoundExceeded("table of " + sig[f].name + " is too large");
          }
        }
        tables[f].assign(cells, undefined_elem);
      }
      std::optional<Line> designated;
      for (std::size_t li = 3; li < ls.size(); ++li) {
        auto const& l = ls[li];
        if (allow_designated) {
          if (auto d = field(l, "designated")) {
            if (designated) {
              throw ParseError("duplicate designated line", 0, l.number);
            }
            designated = l;
            continue;
          }
        }
        auto w = words(l.text);
        if (w.size() < 2 || w[0] != "op" || w[1].back() != ':') {
          throw ParseError("expected 'op <symbol>: <tuple>-><value> ...'", 0, l.number);
        }
        std::string sym = w[1].substr(0, w[1].size() - 1);
        auto        f   = sig.find(sym);
        if (!f) {
          throw ParseError("unknown symbol '" + sym + "'", 0, l.number);
        }
        std::size_t const arity = sig[*f].arity;
        for (std::size_t k = 2; k < w.size(); ++k) {
          auto arrow = w[k].find("->");
          if (arrow == std::string::npos) {
            throw ParseError("expected '->' in '" + w[k] + "'", 0, l.number);
          }
          std::string       lhs = w[k].substr(0, arrow);
          std::vector<Elem> args;
          if (!lhs.empty()) {
            std::size_t start = 0;
            while (true) {
              auto comma = lhs.find(',', start);
              args.push_back(elem_of(lhs.substr(start, comma - start), l.number));
              if (comma == std::string::npos) {
                break;
              }
              start = comma + 1;
            }
          }
          if (args.size() != arity) {
            throw ParseError("'" + w[k] + "' has " + std::to_string(args.size()) + " argument(s); " + sym
                                 + " has arity " + std::to_string(arity),
                             0, l.number);
          }
          Elem        value = elem_of(w[k].substr(arrow + 2), l.number);
          std::size_t idx   = tuple_index(n, args);
          if (tables[*f][idx] != undefined_elem && tables[*f][idx] != value) {
            throw ParseError("conflicting entries for " + sym + " at '" + lhs + "'", 0, l.number);
          }
          tables[*f][idx] = value;
        }
      }
      for (std::size_t f = 0; f < sig.size(); ++f) {
        for (std::size_t idx = 0; idx < tables[f].size(); ++idx) {
          if (tables[f][idx] != undefined_elem) {
            continue;
          }
          std::string tuple;
          std::size_t rest = idx;
          std::vector<std::string> parts(sig[f].arity);
          for (std::size_t i = sig[f].arity; i > 0; --i) {
            parts[i - 1] = names[rest % n];
            rest /= n;
          }
          for (std::size_t i = 0; i < parts.size(); ++i) {
            tuple += (i ? "," : "") + parts[i];
          }
          throw ParseError("missing entry for " + sig[f].name + "(" + tuple + ")", 0, ls.back().number);
        }
      }
      return {FiniteAlgebra(*name, sig, names, std::move(tables)), designated};
    }

    struct QuasiParse {
      QuasivarietySpec spec;
      std::size_t      consumed;  // lines used
    };

    // Reads a quasivariety block from the start of `ls`, stopping at the
    // first line that is not part of the block.
    QuasiParse parse_quasivariety_lines(std::vector<Line> const&    ls,
                                        std::size_t                 start,
                                        std::filesystem::path const& base_dir) {
      if (start >= ls.size()) {
        throw ParseError("expected 'quasivariety <name>'", 0, ls.empty() ? 1 : ls.back().number);
      }
      auto name = header(ls[start], "quasivariety");
      if (!name) {
        throw ParseError("expected 'quasivariety <name>'", 0, ls[start].number);
      }
      if (start + 1 >= ls.size()) {
        throw ParseError("expected 'signature: ...'", 0, ls[start].number);
      }
      auto sig_text = field(ls[start + 1], "signature");
      if (!sig_text) {
        throw ParseError("expected 'signature: ...'", 0, ls[start + 1].number);
      }
      QuasivarietySpec k;
      k.name      = *name;
      k.signature = parse_signature(ls[start + 1], *sig_text);
      std::size_t i = start + 2;
      for (; i < ls.size(); ++i) {
        auto const& l = ls[i];
        if (auto a = field(l, "axiom")) {
          k.identities.push_back(at_line(l.number, [&] { return parse_equation(*a, k.signature); }));
        } else if (auto q = field(l, "quasi")) {
          k.quasi_identities.push_back(at_line(l.number, [&] { return parse_quasi_identity(*q, k.signature); }));
        } else if (auto p = field(l, "point")) {
          if (k.point) {
            throw ParseError("duplicate point line", 0, l.number);
          }
          k.point = std::string(*p);
        } else if (auto g = field(l, "generator")) {
          auto alg = load_algebra(base_dir / std::string(*g));
          if (alg.signature() != k.signature) {
            throw ParseError("generator " + std::string(*g) + " has signature " + alg.signature().to_string(), 0,
                             l.number);
          }
          k.generators.push_back(std::move(alg));
        } else {
          break;
        }
      }
      try {
        k.validate();
      } catch (InvariantError const& e) {
        throw InvariantError("quasivariety " + k.name + ": " + e.what());
      }
      return {std::move(k), i - start};
    }
  }  // namespace

  FiniteAlgebra parse_algebra(std::string_view text) {
    return parse_algebra_lines(lines_of(text), false).algebra;
  }

  FiniteAlgebra load_algebra(std::filesystem::path const& path) {
    return in_file(path, [&] { return parse_algebra(read_file(path)); });
  }

  Matrix parse_matrix(std::string_view text) {
    auto ls    = lines_of(text);
    auto parts = parse_algebra_lines(ls, true);
    if (!parts.designated) {
      throw ParseError("expected 'designated: ...'", 0, ls.empty() ? 1 : ls.back().number);
    }
    ElemSet d(parts.algebra.size());
    for (auto const& w : words(*field(*parts.designated, "designated"))) {
      auto e = parts.algebra.find_element(w);
      if (!e) {
        throw ParseError("unknown element '" + w + "'", 0, parts.designated->number);
      }
      d.insert(*e);
    }
    return {std::move(parts.algebra), d};
  }

  QuasivarietySpec parse_quasivariety(std::string_view text, std::filesystem::path const& base_dir) {
    auto ls = lines_of(text);
    auto r  = parse_quasivariety_lines(ls, 0, base_dir);
    if (r.consumed != ls.size()) {
      throw ParseError("unexpected line '" + ls[r.consumed].text + "'", 0, ls[r.consumed].number);
    }
    return std::move(r.spec);
  }

  QuasivarietySpec load_quasivariety(std::filesystem::path const& path) {
    return in_file(path, [&] { return parse_quasivariety(read_file(path), path.parent_path()); });
  }

  FilterPairInstance parse_filterpair(std::string_view             text,
                                      std::filesystem::path const& base_dir,
                                      std::string                  default_name) {
    auto               ls = lines_of(text);
    FilterPairInstance fp;
    fp.name       = std::move(default_name);
    std::size_t i = 0;
    if (!ls.empty()) {
      if (auto n = header(ls[0], "filterpair")) {
        fp.name = *n;
        i       = 1;
      }
    }
    if (i >= ls.size()) {
      throw ParseError("expected 'include <file>' or a quasivariety block", 0, ls.empty() ? 1 : ls.back().number);
    }
    auto w = words(ls[i].text);
    if (w.size() == 2 && w[0] == "include") {
      fp.k = load_quasivariety(base_dir / w[1]);
      ++i;
    } else {
      auto r = parse_quasivariety_lines(ls, i, base_dir);
      fp.k   = std::move(r.spec);
      i += r.consumed;
    }
    std::optional<std::string> oracle;
    for (; i < ls.size(); ++i) {
      auto const& l = ls[i];
      if (auto t = field(l, "tau")) {
        auto e = at_line(l.number, [&] { return parse_equation(*t, fp.k.signature); });
        for (auto const& v : e.variables()) {
          if (v != tau_variable) {
            throw ParseError("tau may only use the variable x, found '" + v + "'", 0, l.number);
          }
        }
        fp.tau.equations.push_back(std::move(e));
      } else if (auto o = field(l, "oracle")) {
        oracle = std::string(*o);
      } else {
        throw ParseError("unexpected line '" + l.text + "'", 0, l.number);
      }
    }
    if (fp.tau.equations.empty()) {
      throw ParseError("a filter pair needs at least one 'tau:' line", 0, ls.back().number);
    }
    fp.validate();
    if (oracle) {
      fp = register_exact_oracle(std::move(fp), *oracle);
    }
    return fp;
  }

  FilterPairInstance load_filterpair(std::filesystem::path const& path) {
    return in_file(path, [&] { return parse_filterpair(read_file(path), path.parent_path(), path.stem().string()); });
  }

  std::string write_algebra(FiniteAlgebra const& a) {
    std::ostringstream out;
    auto const&        sig = a.signature();
    out << "algebra " << a.name() << "\n";
    out << "signature: " << sig.to_string() << "\n";
    out << "carrier:";
    for (auto const& n : a.element_names()) {
      out << " " << n;
    }
    out << "\n";
    for (std::size_t f = 0; f < sig.size(); ++f) {
      out << "op " << sig[f].name << ":";
      for_each_tuple(a.size(), sig[f].arity, [&](std::span<Elem const> args, std::size_t idx) {
        out << " ";
        for (std::size_t i = 0; i < args.size(); ++i) {
          out << (i ? "," : "") << a.element_name(args[i]);
        }
        out << "->" << a.element_name(a.table(f)[idx]);
      });
      out << "\n";
    }
    return out.str();
  }

}  // namespace fpw

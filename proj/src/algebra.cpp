#include "fpw/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fpw/error.hpp"

namespace fpw {

  ////////////////////////////////////////////////////////////////////////
  // Signature
  ////////////////////////////////////////////////////////////////////////

  bool is_identifier(std::string_view s) noexcept {
    if (s.empty()) {
      return false;
    }
    auto alpha = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) {
      return false;
    }
    return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
  }

  Signature::Signature(std::vector<Symbol> symbols) : _symbols(std::move(symbols)) {
    for (auto const& s : _symbols) {
      if (!is_identifier(s.name)) {
        throw InvariantError("invalid symbol name \"" + s.name + "\"");
      }
    }
    std::sort(_symbols.begin(), _symbols.end());
    for (std::size_t i = 1; i < _symbols.size(); ++i) {
      if (_symbols[i].name == _symbols[i - 1].name) {
        throw InvariantError("duplicate symbol \"" + _symbols[i].name + "\"");
      }
    }
  }

  std::optional<std::size_t> Signature::find(std::string_view name) const {
    auto it = std::lower_bound(_symbols.begin(),
                               _symbols.end(),
                               name,
                               [](Symbol const& s, std::string_view n) { return s.name < n; });
    if (it == _symbols.end() || it->name != name) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - _symbols.begin());
  }

  std::size_t Signature::index(std::string_view name) const {
    auto i = find(name);
    if (!i) {
      throw InvariantError("unknown symbol \"" + std::string(name) + "\"");
    }
    return *i;
  }

  std::size_t Signature::max_arity() const noexcept {
    std::size_t m = 0;
    for (auto const& s : _symbols) {
      m = std::max(m, s.arity);
    }
    return m;
  }

  bool Signature::has_constants() const noexcept {
    return std::any_of(
        _symbols.begin(), _symbols.end(), [](Symbol const& s) { return s.arity == 0; });
  }

  bool Signature::is_unary() const noexcept {
    return max_arity() <= 1;
  }

  std::string Signature::to_string() const {
    std::string out;
    for (auto const& s : _symbols) {
      if (!out.empty()) {
        out += ' ';
      }
      out += s.name + "/" + std::to_string(s.arity);
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Term
  ////////////////////////////////////////////////////////////////////////

  struct Term::Node {
    std::string       name;
    bool              is_var;
    std::vector<Term> args;
    std::size_t       depth;
    std::size_t       size;
    std::size_t       hash;
  };

  namespace {
    std::size_t mix(std::size_t h, std::size_t v) {
      return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
  }  // namespace

  Term Term::variable(std::string name) {
    std::size_t h = mix(std::hash<std::string>{}(name), 0x51);
    return Term(std::make_shared<Node const>(Node{std::move(name), true, {}, 0, 1, h}));
  }

  Term Term::apply(std::string symbol, std::vector<Term> args) {
    std::size_t depth = 0;
    std::size_t size  = 1;
    std::size_t h     = mix(std::hash<std::string>{}(symbol), args.size());
    for (auto const& a : args) {
      depth = std::max(depth, a.depth() + 1);
      size += a.size();
      h = mix(h, a.hash());
    }
    return Term(std::make_shared<Node const>(
        Node{std::move(symbol), false, std::move(args), depth, size, h}));
  }

  bool Term::is_variable() const noexcept {
    return _node->is_var;
  }
  std::string const& Term::name() const noexcept {
    return _node->name;
  }
  std::span<Term const> Term::args() const noexcept {
    return _node->args;
  }
  std::size_t Term::depth() const noexcept {
    return _node->depth;
  }
  std::size_t Term::size() const noexcept {
    return _node->size;
  }
  std::size_t Term::hash() const noexcept {
    return _node->hash;
  }

  void Term::collect_variables(std::set<std::string>& out) const {
    if (is_variable()) {
      out.insert(name());
      return;
    }
    for (auto const& a : args()) {
      a.collect_variables(out);
    }
  }

  std::set<std::string> Term::variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
  }

  std::string Term::to_string() const {
    if (is_variable() || args().empty()) {
      return name();
    }
    std::string out = name() + "(";
    bool        first = true;
    for (auto const& a : args()) {
      if (!first) {
        out += ',';
      }
      first = false;
      out += a.to_string();
    }
    return out + ")";
  }

  bool operator==(Term const& a, Term const& b) noexcept {
    if (a._node == b._node) {
      return true;
    }
    if (a.hash() != b.hash() || a.size() != b.size()) {
      return false;
    }
    return (a <=> b) == std::strong_ordering::equal;
  }

  std::strong_ordering operator<=>(Term const& a, Term const& b) noexcept {
    if (a._node == b._node) {
      return std::strong_ordering::equal;
    }
    if (auto c = a.depth() <=> b.depth(); c != 0) {
      return c;
    }
    if (auto c = a.name() <=> b.name(); c != 0) {
      return c;
    }
    // Variables before constants of the same name (names are disjoint in
    // practice).
    if (a.is_variable() != b.is_variable()) {
      return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    auto aa = a.args();
    auto bb = b.args();
    if (auto c = aa.size() <=> bb.size(); c != 0) {
      return c;
    }
    for (std::size_t i = 0; i < aa.size(); ++i) {
      if (auto c = aa[i] <=> bb[i]; c != 0) {
        return c;
      }
    }
    return std::strong_ordering::equal;
  }

  Term substitute(Term const& t, Substitution const& sigma) {
    if (t.is_variable()) {
      auto it = sigma.find(t.name());
      return it == sigma.end() ? t : it->second;
    }
    if (t.args().empty()) {
      return t;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (auto const& a : t.args()) {
      args.push_back(substitute(a, sigma));
    }
    return Term::apply(t.name(), std::move(args));
  }

  void check_term(Term const& t, Signature const& sig) {
    if (t.is_variable()) {
      return;
    }
    auto i = sig.find(t.name());
    if (!i) {
      throw InvariantError("unknown symbol \"" + t.name() + "\"");
    }
    if (sig[*i].arity != t.args().size()) {
      throw InvariantError("arity mismatch for \"" + t.name() + "\": expected "
                           + std::to_string(sig[*i].arity) + ", got "
                           + std::to_string(t.args().size()));
    }
    for (auto const& a : t.args()) {
      check_term(a, sig);
    }
  }

  namespace {
    class TermParser {
     public:
      TermParser(std::string_view                text,
                 Signature const&                sig,
                 std::set<std::string> const*    vars)
          : _text(text), _sig(sig), _vars(vars) {}

      Term parse() {
        skip_ws();
        Term t = term();
        skip_ws();
        if (_pos != _text.size()) {
          throw ParseError("unexpected trailing input", _pos);
        }
        return t;
      }

     private:
      void skip_ws() {
        while (_pos < _text.size() && (_text[_pos] == ' ' || _text[_pos] == '\t')) {
          ++_pos;
        }
      }

      std::string name() {
        std::size_t start = _pos;
        auto        ok    = [&](char c, bool first) {
          bool alpha = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
          return alpha || (!first && c >= '0' && c <= '9');
        };
        if (_pos >= _text.size() || !ok(_text[_pos], true)) {
          throw ParseError("expected a name", _pos);
        }
        while (_pos < _text.size() && ok(_text[_pos], _pos == start)) {
          ++_pos;
        }
        return std::string(_text.substr(start, _pos - start));
      }

      Term term() {
        std::size_t start = _pos;
        std::string n     = name();
        skip_ws();
        auto sym = _sig.find(n);
        if (_pos < _text.size() && _text[_pos] == '(') {
          ++_pos;
          std::vector<Term> args;
          skip_ws();
          args.push_back(term());
          skip_ws();
          while (_pos < _text.size() && _text[_pos] == ',') {
            ++_pos;
            skip_ws();
            args.push_back(term());
            skip_ws();
          }
          if (_pos >= _text.size() || _text[_pos] != ')') {
            throw ParseError("expected ',' or ')'", _pos);
          }
          ++_pos;
          if (!sym) {
            throw ParseError("unknown symbol \"" + n + "\"", start);
          }
          if (_sig[*sym].arity != args.size()) {
            throw ParseError("arity mismatch for \"" + n + "\": expected "
                                 + std::to_string(_sig[*sym].arity) + ", got "
                                 + std::to_string(args.size()),
                             start);
          }
          return Term::apply(std::move(n), std::move(args));
        }
        if (sym) {
          if (_sig[*sym].arity != 0) {
            throw ParseError("arity mismatch for \"" + n + "\": expected "
                                 + std::to_string(_sig[*sym].arity) + ", got 0",
                             start);
          }
          return Term::apply(std::move(n), {});
        }
        if (_vars != nullptr && _vars->count(n) == 0) {
          throw ParseError("unknown symbol \"" + n + "\"", start);
        }
        return Term::variable(std::move(n));
      }

      std::string_view             _text;
      Signature const&             _sig;
      std::set<std::string> const* _vars;
      std::size_t                  _pos = 0;
    };
  }  // namespace

  Term parse_term(std::string_view text, Signature const& sig) {
    return TermParser(text, sig, nullptr).parse();
  }

  Term parse_term(std::string_view text, Signature const& sig, std::set<std::string> const& vars) {
    return TermParser(text, sig, &vars).parse();
  }

  ////////////////////////////////////////////////////////////////////////
  // ElemSet
  ////////////////////////////////////////////////////////////////////////

  ElemSet::ElemSet(std::size_t universe, std::initializer_list<Elem> elems)
      : _bits(universe, false) {
    for (Elem a : elems) {
      insert(a);
    }
  }

  ElemSet::ElemSet(std::size_t universe, std::span<Elem const> elems) : _bits(universe, false) {
    for (Elem a : elems) {
      insert(a);
    }
  }

  std::size_t ElemSet::count() const noexcept {
    return static_cast<std::size_t>(std::count(_bits.begin(), _bits.end(), true));
  }

  std::vector<Elem> ElemSet::elements() const {
    std::vector<Elem> out;
    for (std::size_t i = 0; i < _bits.size(); ++i) {
      if (_bits[i]) {
        out.push_back(static_cast<Elem>(i));
      }
    }
    return out;
  }

  bool ElemSet::is_subset_of(ElemSet const& other) const {
    for (std::size_t i = 0; i < _bits.size(); ++i) {
      if (_bits[i] && !other.contains(static_cast<Elem>(i))) {
        return false;
      }
    }
    return true;
  }

  ElemSet ElemSet::intersect(ElemSet const& other) const {
    ElemSet out(universe());
    for (std::size_t i = 0; i < _bits.size(); ++i) {
      out._bits[i] = _bits[i] && other.contains(static_cast<Elem>(i));
    }
    return out;
  }

  ElemSet ElemSet::unite(ElemSet const& other) const {
    ElemSet out(std::max(universe(), other.universe()));
    for (std::size_t i = 0; i < out._bits.size(); ++i) {
      out._bits[i] = contains(static_cast<Elem>(i)) || other.contains(static_cast<Elem>(i));
    }
    return out;
  }

  std::string ElemSet::to_string() const {
    std::string out = "{";
    bool        first = true;
    for (Elem a : elements()) {
      if (!first) {
        out += ',';
      }
      first = false;
      out += std::to_string(a);
    }
    return out + "}";
  }

  std::strong_ordering operator<=>(ElemSet const& a, ElemSet const& b) {
    if (auto c = a.count() <=> b.count(); c != 0) {
      return c;
    }
    auto ea = a.elements();
    auto eb = b.elements();
    if (auto c = ea <=> eb; c != 0) {
      return c;
    }
    return a.universe() <=> b.universe();
  }

  ////////////////////////////////////////////////////////////////////////
  // FiniteAlgebra
  ////////////////////////////////////////////////////////////////////////

  std::size_t tuple_index(std::size_t n, std::span<Elem const> args) noexcept {
    std::size_t idx = 0;
    for (Elem a : args) {
      idx = idx * n + a;
    }
    return idx;
  }

  void for_each_tuple(std::size_t                                                   n,
                      std::size_t                                                   arity,
                      std::function<void(std::span<Elem const>, std::size_t)> const& fn) {
    std::vector<Elem> t(arity, 0);
    std::size_t       idx = 0;
    if (n == 0 && arity > 0) {
      return;
    }
    while (true) {
      fn(t, idx++);
      std::size_t k = arity;
      while (k > 0) {
        --k;
        if (++t[k] < n) {
          break;
        }
        t[k] = 0;
        if (k == 0) {
          return;
        }
      }
      if (arity == 0) {
        return;
      }
    }
  }

  namespace {
    std::size_t checked_pow(std::size_t n, std::size_t k) {
      std::size_t r = 1;
      for (std::size_t i = 0; i < k; ++i) {
        if (n != 0 && r > (std::size_t{1} << 26) / n) {
          throw BoundExceeded("operation table of size " + std::to_string(n) + "^"
                              + std::to_string(k) + " is too large");
        }
        r *= n;
      }
      return r;
    }
  }  // namespace

  FiniteAlgebra::FiniteAlgebra(std::string                    name,
                               Signature                      sig,
                               std::vector<std::string>       element_names,
                               std::vector<std::vector<Elem>> tables)
      : _name(std::move(name)),
        _sig(std::move(sig)),
        _names(std::move(element_names)),
        _tables(std::move(tables)) {
    std::size_t n = _names.size();
    if (n == 0) {
      throw InvariantError("algebra \"" + _name + "\" has an empty carrier");
    }
    {
      std::set<std::string> seen;
      for (auto const& nm : _names) {
        if (!seen.insert(nm).second) {
          throw InvariantError("algebra \"" + _name + "\": duplicate element name \"" + nm
                               + "\"");
        }
      }
    }
    if (_tables.size() != _sig.size()) {
      throw InvariantError("algebra \"" + _name + "\": expected "
                           + std::to_string(_sig.size()) + " tables, got "
                           + std::to_string(_tables.size()));
    }
    std::uint64_t h = 1469598103934665603ULL;
    auto          feed = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    feed(n);
    for (std::size_t i = 0; i < _sig.size(); ++i) {
      std::size_t expected = checked_pow(n, _sig[i].arity);
      if (_tables[i].size() != expected) {
        throw InvariantError("algebra \"" + _name + "\": table of \"" + _sig[i].name
                             + "\" has " + std::to_string(_tables[i].size())
                             + " entries, expected " + std::to_string(expected));
      }
      for (Elem v : _tables[i]) {
        if (v >= n) {
          throw InvariantError("algebra \"" + _name + "\": table of \"" + _sig[i].name
                               + "\" has out-of-range value " + std::to_string(v));
        }
      }
      feed(std::hash<std::string>{}(_sig[i].name));
      feed(_sig[i].arity);
      for (Elem v : _tables[i]) {
        feed(v);
      }
    }
    _fingerprint = h;
  }

  std::optional<Elem> FiniteAlgebra::find_element(std::string_view name) const {
    for (std::size_t i = 0; i < _names.size(); ++i) {
      if (_names[i] == name) {
        return static_cast<Elem>(i);
      }
    }
    return std::nullopt;
  }

  Elem FiniteAlgebra::apply(std::size_t symbol, std::span<Elem const> args) const {
    return _tables[symbol][tuple_index(size(), args)];
  }

  FiniteAlgebra FiniteAlgebra::renamed(std::string name) const {
    FiniteAlgebra copy = *this;
    copy._name         = std::move(name);
    return copy;
  }

  ////////////////////////////////////////////////////////////////////////
  // Homomorphism
  ////////////////////////////////////////////////////////////////////////

  std::optional<std::string> Homomorphism::check(FiniteAlgebra const&  source,
                                                 FiniteAlgebra const&  target,
                                                 std::span<Elem const> map) {
    if (!(source.signature() == target.signature())) {
      return "signature mismatch";
    }
    if (map.size() != source.size()) {
      return "map has " + std::to_string(map.size()) + " entries, expected "
             + std::to_string(source.size());
    }
    for (Elem v : map) {
      if (v >= target.size()) {
        return "map value " + std::to_string(v) + " out of range";
      }
    }
    auto const&                sig = source.signature();
    std::optional<std::string> failure;
    std::vector<Elem>          image;
    for (std::size_t f = 0; f < sig.size() && !failure; ++f) {
      auto const& tab = source.table(f);
      for_each_tuple(source.size(), sig[f].arity, [&](std::span<Elem const> t, std::size_t idx) {
        if (failure) {
          return;
        }
        image.assign(t.size(), 0);
        for (std::size_t k = 0; k < t.size(); ++k) {
          image[k] = map[t[k]];
        }
        if (map[tab[idx]] != target.apply(f, image)) {
          std::string tuple;
          for (std::size_t k = 0; k < t.size(); ++k) {
            tuple += (k ? "," : "") + source.element_name(t[k]);
          }
          failure = "operation " + sig[f].name + " not preserved at (" + tuple + ")";
        }
      });
    }
    return failure;
  }

  Homomorphism::Homomorphism(FiniteAlgebra source, FiniteAlgebra target, std::vector<Elem> map)
      : _source(std::make_shared<FiniteAlgebra const>(std::move(source))),
        _target(std::make_shared<FiniteAlgebra const>(std::move(target))),
        _map(std::move(map)) {
    if (auto failure = check(*_source, *_target, _map)) {
      throw InvariantError("not a homomorphism " + _source->name() + " -> " + _target->name()
                           + ": " + *failure);
    }
  }

  bool Homomorphism::is_injective() const {
    std::vector<bool> hit(target().size(), false);
    for (Elem v : _map) {
      if (hit[v]) {
        return false;
      }
      hit[v] = true;
    }
    return true;
  }

  bool Homomorphism::is_surjective() const {
    std::vector<bool> hit(target().size(), false);
    for (Elem v : _map) {
      hit[v] = true;
    }
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  }

  ElemSet Homomorphism::image(ElemSet const& s) const {
    ElemSet out(target().size());
    for (Elem a : s.elements()) {
      out.insert(_map[a]);
    }
    return out;
  }

  ElemSet Homomorphism::preimage(ElemSet const& s) const {
    ElemSet out(source().size());
    for (std::size_t a = 0; a < _map.size(); ++a) {
      if (s.contains(_map[a])) {
        out.insert(static_cast<Elem>(a));
      }
    }
    return out;
  }

  Homomorphism compose(Homomorphism const& g, Homomorphism const& f) {
    if (f.target().fingerprint() != g.source().fingerprint()
        || f.target().size() != g.source().size()) {
      throw MismatchError("cannot compose: target of " + f.source().name() + " -> "
                          + f.target().name() + " is not the source of "
                          + g.source().name() + " -> " + g.target().name());
    }
    std::vector<Elem> m(f.map().size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = g(f(static_cast<Elem>(i)));
    }
    return Homomorphism(f.source(), g.target(), std::move(m));
  }

  Homomorphism identity_homomorphism(FiniteAlgebra const& a) {
    std::vector<Elem> m(a.size());
    std::iota(m.begin(), m.end(), Elem{0});
    return Homomorphism(a, a, std::move(m));
  }

  ////////////////////////////////////////////////////////////////////////
  // Evaluation and constructions
  ////////////////////////////////////////////////////////////////////////

  Elem evaluate(Term const& t, FiniteAlgebra const& a, Assignment const& assignment) {
    if (t.is_variable()) {
      auto it = assignment.find(t.name());
      if (it == assignment.end()) {
        throw InvariantError("unassigned variable \"" + t.name() + "\"");
      }
      if (it->second >= a.size()) {
        throw InvariantError("variable \"" + t.name() + "\" assigned out-of-range value");
      }
      return it->second;
    }
    auto sym = a.signature().find(t.name());
    if (!sym || a.signature()[*sym].arity != t.args().size()) {
      throw InvariantError("term " + t.to_string() + " does not fit the signature of "
                           + a.name());
    }
    std::vector<Elem> args;
    args.reserve(t.args().size());
    for (auto const& c : t.args()) {
      args.push_back(evaluate(c, a, assignment));
    }
    return a.apply(*sym, args);
  }

  FiniteAlgebra product(FiniteAlgebra const& a, FiniteAlgebra const& b) {
    if (!(a.signature() == b.signature())) {
      throw MismatchError("product: signatures of " + a.name() + " and " + b.name()
                          + " differ");
    }
    std::size_t const        na = a.size(), nb = b.size(), n = na * nb;
    auto const&              sig = a.signature();
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        names.push_back(a.element_name(static_cast<Elem>(i)) + "."
                        + b.element_name(static_cast<Elem>(j)));
      }
    }
    std::vector<std::vector<Elem>> tables(sig.size());
    std::vector<Elem>              ta, tb;
    for (std::size_t f = 0; f < sig.size(); ++f) {
      std::size_t arity = sig[f].arity;
      tables[f].resize(checked_pow(n, arity));
      for_each_tuple(n, arity, [&](std::span<Elem const> t, std::size_t idx) {
        ta.resize(arity);
        tb.resize(arity);
        for (std::size_t k = 0; k < arity; ++k) {
          ta[k] = static_cast<Elem>(t[k] / nb);
          tb[k] = static_cast<Elem>(t[k] % nb);
        }
        tables[f][idx] = static_cast<Elem>(a.apply(f, ta) * nb + b.apply(f, tb));
      });
    }
    return FiniteAlgebra(a.name() + "x" + b.name(), sig, std::move(names), std::move(tables));
  }

  ElemSet subuniverse_generated(FiniteAlgebra const& a, ElemSet const& s) {
    std::size_t const n   = a.size();
    auto const&       sig = a.signature();
    ElemSet           cur(n);
    for (Elem e : s.elements()) {
      if (e >= n) {
        throw InvariantError("element " + std::to_string(e) + " out of range");
      }
      cur.insert(e);
    }
    bool changed = true;
    while (changed) {
      changed          = false;
      auto const elems = cur.elements();
      for (std::size_t f = 0; f < sig.size(); ++f) {
        std::size_t       arity = sig[f].arity;
        std::vector<Elem> t(arity, 0);
        std::vector<std::size_t> pos(arity, 0);
        if (arity > 0 && elems.empty()) {
          continue;
        }
        while (true) {
          for (std::size_t k = 0; k < arity; ++k) {
            t[k] = elems[pos[k]];
          }
          Elem v = a.apply(f, t);
          if (!cur.contains(v)) {
            cur.insert(v);
            changed = true;
          }
          std::size_t k = arity;
          bool        done = true;
          while (k > 0) {
            --k;
            if (++pos[k] < elems.size()) {
              done = false;
              break;
            }
            pos[k] = 0;
          }
          if (done) {
            break;
          }
        }
      }
    }
    return cur;
  }

  std::pair<FiniteAlgebra, Homomorphism> subalgebra(FiniteAlgebra const& a,
                                                    ElemSet const&       universe) {
    if (universe.empty()) {
      throw InvariantError("subalgebra: empty universe");
    }
    if (!(subuniverse_generated(a, universe) == universe)) {
      throw InvariantError("subalgebra: " + universe.to_string() + " is not closed in "
                           + a.name());
    }
    auto const        elems = universe.elements();
    std::vector<Elem> local(a.size(), 0);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      local[elems[i]] = static_cast<Elem>(i);
    }
    std::vector<std::string> names;
    for (Elem e : elems) {
      names.push_back(a.element_name(e));
    }
    auto const&                    sig = a.signature();
    std::vector<std::vector<Elem>> tables(sig.size());
    std::vector<Elem>              global;
    for (std::size_t f = 0; f < sig.size(); ++f) {
      std::size_t arity = sig[f].arity;
      tables[f].resize(checked_pow(elems.size(), arity));
      for_each_tuple(elems.size(), arity, [&](std::span<Elem const> t, std::size_t idx) {
        global.resize(arity);
        for (std::size_t k = 0; k < arity; ++k) {
          global[k] = elems[t[k]];
        }
        tables[f][idx] = local[a.apply(f, global)];
      });
    }
    FiniteAlgebra sub(a.name() + universe.to_string(), sig, std::move(names), std::move(tables));
    std::vector<Elem> incl(elems.begin(), elems.end());
    Homomorphism      h(sub, a, std::move(incl));
    return {std::move(sub), std::move(h)};
  }

  std::vector<ElemSet> all_subuniverses(FiniteAlgebra const& a, std::size_t max_size) {
    std::size_t const n = a.size();
    if (n > max_size) {
      throw BoundExceeded("subuniverse enumeration: |" + a.name() + "| = " + std::to_string(n)
                          + " exceeds " + std::to_string(max_size));
    }
    std::set<ElemSet> found;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      ElemSet s(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) {
          s.insert(static_cast<Elem>(i));
        }
      }
      found.insert(subuniverse_generated(a, s));
    }
    ElemSet constants_only = subuniverse_generated(a, ElemSet(n));
    if (!constants_only.empty()) {
      found.insert(constants_only);
    }
    return {found.begin(), found.end()};
  }

  namespace {
    // Lexicographically least relabeled table encoding, found by a
    // backtracking search over permutations that abandons a branch as soon
    // as its encoding prefix exceeds the best one found so far.
    class CanonicalCoder {
     public:
      CanonicalCoder(FiniteAlgebra const& a, ElemSet const* designated)
          : _a(a), _designated(designated), _n(a.size()) {}

      std::vector<Elem> run() {
        _perm.assign(_n, 0);  // new label -> old element
        _used.assign(_n, false);
        _best.clear();
        search(0);
        return _best;
      }

     private:
      // Encoding of the relabeled algebra given a full permutation.
      std::vector<Elem> encode() const {
        std::vector<Elem> inv(_n);
        for (std::size_t i = 0; i < _n; ++i) {
          inv[_perm[i]] = static_cast<Elem>(i);
        }
        std::vector<Elem> code;
        if (_designated != nullptr) {
          for (std::size_t i = 0; i < _n; ++i) {
            code.push_back(_designated->contains(_perm[i]) ? 1 : 0);
          }
        }
        auto const&       sig = _a.signature();
        std::vector<Elem> old;
        for (std::size_t f = 0; f < sig.size(); ++f) {
          for_each_tuple(_n, sig[f].arity, [&](std::span<Elem const> t, std::size_t) {
            old.resize(t.size());
            for (std::size_t k = 0; k < t.size(); ++k) {
              old[k] = _perm[t[k]];
            }
            code.push_back(inv[_a.apply(f, old)]);
          });
        }
        return code;
      }

      void search(std::size_t depth) {
        if (depth == _n) {
          auto code = encode();
          if (_best.empty() || code < _best) {
            _best = std::move(code);
          }
          return;
        }
        for (std::size_t e = 0; e < _n; ++e) {
          if (_used[e]) {
            continue;
          }
          if (_designated != nullptr && !_best.empty()) {
            // The first n code entries are the designated mask; keep the
            // search consistent with the best prefix.
            Elem bit = _designated->contains(static_cast<Elem>(e)) ? 1 : 0;
            if (bit > _best[depth]) {
              continue;
            }
          }
          _used[e]      = true;
          _perm[depth]  = static_cast<Elem>(e);
          search(depth + 1);
          _used[e] = false;
        }
      }

      FiniteAlgebra const& _a;
      ElemSet const*       _designated;
      std::size_t          _n;
      std::vector<Elem>    _perm;
      std::vector<bool>    _used;
      std::vector<Elem>    _best;
    };
  }  // namespace

  std::vector<Elem> canonical_code(FiniteAlgebra const& a,
                                   ElemSet const*       designated,
                                   std::size_t          max_size) {
    if (a.size() > max_size) {
      throw BoundExceeded("canonical form: |" + a.name() + "| = " + std::to_string(a.size())
                          + " exceeds " + std::to_string(max_size));
    }
    return CanonicalCoder(a, designated).run();
  }

  bool isomorphic(FiniteAlgebra const& a, FiniteAlgebra const& b) {
    if (!(a.signature() == b.signature()) || a.size() != b.size()) {
      return false;
    }
    return canonical_code(a) == canonical_code(b);
  }

}  // namespace fpw

#include "fpw/quasivariety.hpp"

#include <algorithm>
#include <map>

#include "fpw/compiled_term.hpp"
#include "fpw/error.hpp"

namespace fpw {

  std::set<std::string> Equation::variables() const {
    auto v = lhs.variables();
    rhs.collect_variables(v);
    return v;
  }

  std::string Equation::to_string() const {
    return lhs.to_string() + " = " + rhs.to_string();
  }

  std::set<std::string> QuasiIdentity::variables() const {
    auto v = conclusion.variables();
    for (auto const& p : premises) {
      p.lhs.collect_variables(v);
      p.rhs.collect_variables(v);
    }
    return v;
  }

  std::string QuasiIdentity::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < premises.size(); ++i) {
      out += (i ? " & " : "") + premises[i].to_string();
    }
    return out + (premises.empty() ? "-> " : " -> ") + conclusion.to_string();
  }

  namespace {
    Term parse_side(std::string_view text, std::size_t offset, Signature const& sig) {
      try {
        return parse_term(text, sig);
      } catch (ParseError const& e) {
        throw ParseError(e.what(), offset + e.position());
      }
    }
  }  // namespace

  Equation parse_equation(std::string_view text, Signature const& sig) {
    auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected '=' in equation", text.size());
    }
    if (text.find('=', eq + 1) != std::string_view::npos) {
      throw ParseError("more than one '=' in equation", text.find('=', eq + 1));
    }
    return {parse_side(text.substr(0, eq), 0, sig), parse_side(text.substr(eq + 1), eq + 1, sig)};
  }

  QuasiIdentity parse_quasi_identity(std::string_view text, Signature const& sig) {
    auto arrow = text.find("->");
    if (arrow == std::string_view::npos) {
      throw ParseError("expected '->' in quasi-identity", text.size());
    }
    std::vector<Equation> premises;
    std::string_view lhs   = text.substr(0, arrow);
    std::size_t      start = 0;
    bool             blank = lhs.find_first_not_of(" \t") == std::string_view::npos;
    while (!blank) {
      auto amp  = lhs.find('&', start);
      auto part = lhs.substr(start, amp == std::string_view::npos ? lhs.size() - start : amp - start);
      try {
        premises.push_back(parse_equation(part, sig));
      } catch (ParseError const& e) {
        throw ParseError(e.what(), start + e.position());
      }
      if (amp == std::string_view::npos) {
        break;
      }
      start = amp + 1;
    }
    try {
      return {std::move(premises), parse_equation(text.substr(arrow + 2), sig)};
    } catch (ParseError const& e) {
      throw ParseError(e.what(), arrow + 2 + e.position());
    }
  }

  std::string QuasivarietySpec::axiom_to_string(std::size_t i) const {
    if (i < identities.size()) {
      return identities[i].to_string();
    }
    return quasi_identities.at(i - identities.size()).to_string();
  }

  void QuasivarietySpec::validate() const {
    for (auto const& e : identities) {
      check_term(e.lhs, signature);
      check_term(e.rhs, signature);
    }
    for (auto const& q : quasi_identities) {
      for (auto const& p : q.premises) {
        check_term(p.lhs, signature);
        check_term(p.rhs, signature);
      }
      check_term(q.conclusion.lhs, signature);
      check_term(q.conclusion.rhs, signature);
    }
    if (point) {
      auto f = signature.find(*point);
      if (!f || signature[*f].arity != 0) {
        throw InvariantError("point \"" + *point + "\" is not a constant of the signature");
      }
    }
    for (auto const& g : generators) {
      if (g.signature() != signature) {
        throw MismatchError("generator " + g.name() + " has signature " + g.signature().to_string()
                            + ", expected " + signature.to_string());
      }
      if (auto v = find_violation(g, *this)) {
        throw InvariantError("generator " + g.name() + " is not in " + name + ": "
                             + v->describe(*this, g));
      }
    }
  }

  QuasivarietySpec all_algebras(Signature sig, std::string name) {
    QuasivarietySpec k;
    k.name      = std::move(name);
    k.signature = std::move(sig);
    return k;
  }

  std::string Violation::describe(QuasivarietySpec const& k, FiniteAlgebra const& a) const {
    std::string out = "axiom " + std::to_string(axiom + 1) + " (" + k.axiom_to_string(axiom)
                      + ") fails at ";
    bool first = true;
    for (auto const& [v, e] : assignment) {
      out += (first ? "" : ", ") + v + "=" + a.element_name(e);
      first = false;
    }
    if (assignment.empty()) {
      out += "the empty assignment";
    }
    return out + ": " + a.element_name(lhs_value) + " != " + a.element_name(rhs_value);
  }

  namespace {
    // An axiom compiled against sorted variable slots.
    struct CompiledAxiom {
      std::vector<std::string>                         vars;
      std::vector<std::pair<CompiledTerm, CompiledTerm>> premises;
      CompiledTerm                                     lhs;
      CompiledTerm                                     rhs;
    };

    CompiledAxiom compile(std::vector<Equation> const& premises,
                          Equation const&              conclusion,
                          Signature const&             sig,
                          std::size_t                  cap) {
      std::set<std::string> vs = conclusion.variables();
      for (auto const& p : premises) {
        p.lhs.collect_variables(vs);
        p.rhs.collect_variables(vs);
      }
      if (vs.size() > cap) {
        throw BoundExceeded("axiom with " + std::to_string(vs.size())
                            + " variables exceeds the variable cap " + std::to_string(cap));
      }
      CompiledAxiom c;
      c.vars.assign(vs.begin(), vs.end());
      for (auto const& p : premises) {
        c.premises.emplace_back(CompiledTerm(p.lhs, sig, c.vars), CompiledTerm(p.rhs, sig, c.vars));
      }
      c.lhs = CompiledTerm(conclusion.lhs, sig, c.vars);
      c.rhs = CompiledTerm(conclusion.rhs, sig, c.vars);
      return c;
    }

    // First failing assignment, lexicographic with the first variable most
    // significant.
    std::optional<Violation> first_failure(FiniteAlgebra const& a, CompiledAxiom const& c) {
      std::size_t const n = a.size();
      std::size_t const k = c.vars.size();
      std::vector<Elem> vals(k, 0);
      while (true) {
        bool premises_hold = true;
        for (auto const& [l, r] : c.premises) {
          if (l.eval(a, vals) != r.eval(a, vals)) {
            premises_hold = false;
            break;
          }
        }
        if (premises_hold) {
          Elem l = c.lhs.eval(a, vals);
          Elem r = c.rhs.eval(a, vals);
          if (l != r) {
            Violation v{0, {}, l, r};
            for (std::size_t i = 0; i < k; ++i) {
              v.assignment[c.vars[i]] = vals[i];
            }
            return v;
          }
        }
        std::size_t i = k;
        while (i > 0) {
          --i;
          if (++vals[i] < n) {
            break;
          }
          vals[i] = 0;
          if (i == 0) {
            return std::nullopt;
          }
        }
        if (k == 0) {
          return std::nullopt;
        }
      }
    }

    void check_signature(FiniteAlgebra const& a, Signature const& sig) {
      if (a.signature() != sig) {
        throw MismatchError("algebra " + a.name() + " has signature " + a.signature().to_string()
                            + ", expected " + sig.to_string());
      }
    }
  }  // namespace

  bool satisfies(FiniteAlgebra const& a, Equation const& e, std::size_t variable_cap) {
    check_term(e.lhs, a.signature());
    check_term(e.rhs, a.signature());
    return !first_failure(a, compile({}, e, a.signature(), variable_cap));
  }

  bool satisfies(FiniteAlgebra const& a, QuasiIdentity const& q, std::size_t variable_cap) {
    for (auto const& p : q.premises) {
      check_term(p.lhs, a.signature());
      check_term(p.rhs, a.signature());
    }
    check_term(q.conclusion.lhs, a.signature());
    check_term(q.conclusion.rhs, a.signature());
    return !first_failure(a, compile(q.premises, q.conclusion, a.signature(), variable_cap));
  }

  std::optional<Violation> find_violation(FiniteAlgebra const&    a,
                                          QuasivarietySpec const& k,
                                          std::size_t             variable_cap) {
    check_signature(a, k.signature);
    std::size_t idx = 0;
    for (auto const& e : k.identities) {
      if (auto v = first_failure(a, compile({}, e, k.signature, variable_cap))) {
        v->axiom = idx;
        return v;
      }
      ++idx;
    }
    for (auto const& q : k.quasi_identities) {
      if (auto v = first_failure(a, compile(q.premises, q.conclusion, k.signature, variable_cap))) {
        v->axiom = idx;
        return v;
      }
      ++idx;
    }
    return std::nullopt;
  }

  bool member_of_K(FiniteAlgebra const& a, QuasivarietySpec const& k, std::size_t variable_cap) {
    return !find_violation(a, k, variable_cap);
  }

  bool is_relative_congruence(FiniteAlgebra const& a, Congruence const& theta, QuasivarietySpec const& k) {
    if (!theta.certified() || theta.algebra_fingerprint() != a.fingerprint()
        || theta.universe() != a.size()) {
      return false;
    }
    if (k.axiom_count() == 0 || theta.is_full()) {
      return true;
    }
    return member_of_K(quotient(a, theta).first, k);
  }

  std::vector<Congruence> relative_congruences(FiniteAlgebra const&    a,
                                               QuasivarietySpec const& k,
                                               std::size_t             max_size) {
    check_signature(a, k.signature);
    auto                    all = all_congruences(a, max_size);
    std::vector<Congruence> out;
    for (auto& theta : all) {
      if (is_relative_congruence(a, theta, k)) {
        out.push_back(std::move(theta));
      }
    }
    return out;
  }

  Congruence k_congruence_generated(FiniteAlgebra const&      a,
                                    std::span<ElemPair const> pairs,
                                    QuasivarietySpec const&   k) {
    check_signature(a, k.signature);
    std::vector<ElemPair> gens(pairs.begin(), pairs.end());
    Congruence            theta = congruence_generated(a, gens);
    if (k.axiom_count() == 0) {
      return theta;
    }
    while (!theta.is_full()) {
      auto [q, proj] = quotient(a, theta);
      auto v         = find_violation(q, k);
      if (!v) {
        break;
      }
      auto blocks = theta.blocks();
      gens.emplace_back(blocks[v->lhs_value].front(), blocks[v->rhs_value].front());
      theta = congruence_generated(a, gens);
    }
    return theta;
  }

  Congruence min_k_congruence(FiniteAlgebra const& a, QuasivarietySpec const& k) {
    return k_congruence_generated(a, {}, k);
  }

  ClosureReport closure_diagnostics(std::span<FiniteAlgebra const> algebras,
                                    MembershipOracle const&        in_class,
                                    std::size_t                    size_bound) {
    ClosureReport            report;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < algebras.size(); ++i) {
      if (in_class(algebras[i])) {
        members.push_back(i);
      }
    }
    for (std::size_t i : members) {
      auto const& a = algebras[i];
      ++report.algebras_checked;
      std::set<std::vector<Elem>> seen;
      for (auto const& u : all_subuniverses(a)) {
        if (u.count() > size_bound) {
          continue;
        }
        auto sub  = subalgebra(a, u).first;
        auto code = canonical_code(sub);
        if (!seen.insert(code).second) {
          continue;
        }
        ++report.subalgebras_checked;
        if (!in_class(sub)) {
          report.violations.push_back({ClosureViolation::Kind::Subalgebra,
                                       a.name() + "|" + u.to_string(),
                                       "subalgebra on " + u.to_string() + " of " + a.name()
                                           + " is outside the class"});
        }
      }
    }
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x; y < members.size(); ++y) {
        auto const& a = algebras[members[x]];
        auto const& b = algebras[members[y]];
        if (a.size() * b.size() > size_bound) {
          ++report.products_skipped;
          continue;
        }
        ++report.products_checked;
        auto p = product(a, b);
        if (!in_class(p)) {
          report.violations.push_back({ClosureViolation::Kind::Product,
                                       a.name() + "x" + b.name(),
                                       "product " + a.name() + " x " + b.name()
                                           + " is outside the class"});
        }
      }
    }
    return report;
  }

  ClosureReport closure_diagnostics(std::span<FiniteAlgebra const> algebras,
                                    QuasivarietySpec const&        k,
                                    std::size_t                    size_bound) {
    return closure_diagnostics(
        algebras,
        [&](FiniteAlgebra const& a) { return a.signature() == k.signature && member_of_K(a, k); },
        size_bound);
  }

}  // namespace fpw

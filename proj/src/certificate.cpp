#include "fpw/certificate.hpp"

namespace fpw {

  std::string_view to_string(Verdict v) noexcept {
    switch (v) {
      case Verdict::Holds:
        return "Holds";
      case Verdict::RefutedBy:
        return "RefutedBy";
      case Verdict::ConsistentUpTo:
        return "ConsistentUpTo";
      case Verdict::UndeterminedUpTo:
        return "UndeterminedUpTo";
    }
    return "UndeterminedUpTo";
  }

  Certificate Certificate::holds(std::string check, std::string bounds) {
    return {std::move(check), Verdict::Holds, nullptr, std::move(bounds), {}};
  }

  Certificate Certificate::refuted(std::string check, json witness, std::string bounds) {
    return {std::move(check), Verdict::RefutedBy, std::move(witness), std::move(bounds), {}};
  }

  Certificate Certificate::consistent(std::string check, std::string bounds) {
    return {std::move(check), Verdict::ConsistentUpTo, nullptr, std::move(bounds), {}};
  }

  Certificate Certificate::undetermined(std::string check, std::string bounds) {
    return {std::move(check), Verdict::UndeterminedUpTo, nullptr, std::move(bounds), {}};
  }

  int Certificate::exit_code() const noexcept {
    switch (verdict) {
      case Verdict::Holds:
      case Verdict::ConsistentUpTo:
        return 0;
      case Verdict::RefutedBy:
        return 1;
      case Verdict::UndeterminedUpTo:
        return 2;
    }
    return 2;
  }

  json Certificate::to_json() const {
    json j;
    j["check"]   = check;
    j["verdict"] = std::string(to_string(verdict));
    if (!witness.is_null()) {
      j["witness"] = witness;
    }
    j["bounds"] = bounds;
    if (!notes.empty()) {
      j["notes"] = notes;
    }
    return j;
  }

  Verdict combine(std::vector<Certificate> const& parts) noexcept {
    bool undetermined = false, consistent = false;
    for (auto const& c : parts) {
      switch (c.verdict) {
        case Verdict::RefutedBy:
          return Verdict::RefutedBy;
        case Verdict::UndeterminedUpTo:
          undetermined = true;
          break;
        case Verdict::ConsistentUpTo:
          consistent = true;
          break;
        case Verdict::Holds:
          break;
      }
    }
    if (undetermined) {
      return Verdict::UndeterminedUpTo;
    }
    return consistent ? Verdict::ConsistentUpTo : Verdict::Holds;
  }

  json to_json(FiniteAlgebra const& a) {
    json j;
    j["name"]      = a.name();
    j["signature"] = a.signature().to_string();
    j["carrier"]   = a.element_names();
    json ops       = json::object();
    auto const& sig = a.signature();
    for (std::size_t f = 0; f < sig.size(); ++f) {
      json cells = json::array();
      for (Elem v : a.table(f)) {
        cells.push_back(a.element_name(v));
      }
      ops[sig[f].name] = cells;
    }
    j["tables"] = ops;
    return j;
  }

  json to_json(FiniteAlgebra const& a, ElemSet const& s) {
    json j = json::array();
    for (Elem e : s.elements()) {
      j.push_back(a.element_name(e));
    }
    return j;
  }

  json to_json(FiniteAlgebra const& a, Congruence const& theta) {
    json j = json::array();
    for (auto const& b : theta.blocks()) {
      json block = json::array();
      for (Elem e : b) {
        block.push_back(a.element_name(e));
      }
      j.push_back(block);
    }
    return j;
  }

  json to_json(FiniteAlgebra const& a, Assignment const& v) {
    json j = json::object();
    for (auto const& [name, e] : v) {
      j[name] = a.element_name(e);
    }
    return j;
  }

}  // namespace fpw

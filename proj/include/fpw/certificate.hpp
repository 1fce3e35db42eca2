#pragma once

// Verdicts for claims that can be refuted by a finite witness but only
// bounded-checked otherwise, plus JSON renderings of the core objects.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpw/algebra.hpp"
#include "fpw/congruence.hpp"

namespace fpw {

  using json = nlohmann::ordered_json;

  enum class Verdict { Holds, RefutedBy, ConsistentUpTo, UndeterminedUpTo };

  std::string_view to_string(Verdict v) noexcept;

  struct Certificate {
    std::string              check;
    Verdict                  verdict = Verdict::UndeterminedUpTo;
    json                     witness;  // null unless RefutedBy (or a Holds proof)
    std::string              bounds;
    std::vector<std::string> notes;

    static Certificate holds(std::string check, std::string bounds = {});
    static Certificate refuted(std::string check, json witness, std::string bounds = {});
    static Certificate consistent(std::string check, std::string bounds);
    static Certificate undetermined(std::string check, std::string bounds);

    bool is_refuted() const noexcept {
      return verdict == Verdict::RefutedBy;
    }
    // 0 for Holds / ConsistentUpTo, 1 for RefutedBy, 2 for UndeterminedUpTo.
    int  exit_code() const noexcept;
    json to_json() const;
  };

  // Combines certificates of sub-checks: refuted if any is, else
  // undetermined if any is, else consistent if any is, else holds.
  Verdict combine(std::vector<Certificate> const& parts) noexcept;

  json to_json(FiniteAlgebra const& a);
  // Element names of the members, in carrier order.
  json to_json(FiniteAlgebra const& a, ElemSet const& s);
  // Blocks as element-name lists.
  json to_json(FiniteAlgebra const& a, Congruence const& theta);
  json to_json(FiniteAlgebra const& a, Assignment const& v);

}  // namespace fpw

#pragma once

// Command-line front end: subcommands over the file formats in io.hpp,
// each producing one JSON report (schema 1) and a one-line summary.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fpw/certificate.hpp"

namespace fpw {

  struct WorkbenchConfig {
    std::size_t   max_algebra_size  = 8;
    std::size_t   countermodel_size = 4;
    std::size_t   window_depth      = 6;
    std::size_t   derivation_budget = 10000;  // derivation steps
    std::uint64_t seed              = 1;
    bool          timing            = false;  // adds wall-clock fields
    bool          emit_proof        = false;  // adds numbered proof text

    // Throws InvariantError unless every bound is positive.
    void validate() const;
    json to_json() const;
  };

  inline constexpr int exit_input_error    = 3;
  inline constexpr int exit_internal_error = 4;

  struct RunResult {
    int         exit_code = 0;
    json        report;
    std::string summary;
  };

  std::vector<std::string> const& subcommands();

  // Runs one subcommand. `args` are the subcommand's own arguments; config
  // options given there override `config`. Input problems (unknown
  // subcommand, bad option, parse or invariant errors) give exit code 3 with
  // an "error" report; an internal consistency failure gives 4.
  RunResult run(std::string_view subcommand, std::vector<std::string> const& args, WorkbenchConfig config = {});

  // argv without the program name. Writes the JSON report to `out` and the
  // summary or help text to `err`.
  int cli_main(std::vector<std::string> const& argv, std::ostream& out, std::ostream& err);

}  // namespace fpw

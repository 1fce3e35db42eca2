#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpw {

  // Base for every error raised by the workbench.
  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  // Malformed input text. `position` is a 0-based column for term text and a
  // 1-based line number for files (see `line()`).
  class ParseError : public Error {
   public:
    ParseError(std::string const& msg, std::size_t position, std::size_t line = 0)
        : Error(format(msg, position, line)), _message(msg), _position(position), _line(line) {}

    // The same error attributed to a file: "file:line: message", or
    // "file: message" when there is no line.
    static ParseError in_file(std::string file, ParseError const& inner) {
      ParseError e(inner);
      e._file = std::move(file);
      auto where = e._line != 0 ? e._file + ":" + std::to_string(e._line) : e._file;
      static_cast<Error&>(e) = Error(where + ": " + e._message);
      return e;
    }

    // Empty unless attributed with in_file.
    std::string const& file() const noexcept {
      return _file;
    }

    // The message without the location prefix.
    std::string const& message() const noexcept {
      return _message;
    }

    std::size_t position() const noexcept {
      return _position;
    }
    std::size_t line() const noexcept {
      return _line;
    }

   private:
    static std::string format(std::string const& msg, std::size_t pos, std::size_t line) {
      if (line != 0) {
        return "line " + std::to_string(line) + ": " + msg;
      }
      return msg + " (at position " + std::to_string(pos) + ")";
    }
    std::string _message;
    std::string _file;
    std::size_t _position;
    std::size_t _line;
  };

  // A value was constructed that violates a documented invariant.
  class InvariantError : public Error {
   public:
    using Error::Error;
  };

  // Two objects that must share a signature (or an algebra) do not.
  class MismatchError : public Error {
   public:
    using Error::Error;
  };

  // A configured resource cap (carrier size, window size, variable count, ...)
  // would be exceeded.
  class BoundExceeded : public Error {
   public:
    using Error::Error;
  };

  // Internal consistency failure: a theorem-level invariant did not hold, or
  // a proof and a countermodel were found for the same claim.
  class InternalError : public Error {
   public:
    using Error::Error;
  };

}  // namespace fpw

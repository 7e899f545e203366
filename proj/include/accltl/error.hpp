#pragma once

#include <stdexcept>
#include <string>

namespace accltl {

// Error taxonomy used across the library. Parse errors carry a location,
// everything else just a message.
enum class ErrorKind {
    Parse,        // malformed input text
    Schema,       // unknown relation/method, arity mismatch
    Type,         // literal does not fit a position's domain
    Validation,   // ill-formed path/instance/automaton
    Fragment,     // formula outside the fragment an engine requires
    Precondition, // operation called on unsuitable input
    Domain,       // argument outside the operation's domain (e.g. empty path)
    Resource,     // enumeration cap exceeded
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    static Error parse(const std::string& where, const std::string& what) {
        return Error(ErrorKind::Parse, where + ": " + what);
    }

  private:
    ErrorKind kind_;
};

} // namespace accltl

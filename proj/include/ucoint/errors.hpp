#pragma once

#include <stdexcept>
#include <string>

namespace ucoint {

// Base for every error raised by the library; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class LengthError : public Error { using Error::Error; };
class AlignmentError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class SingularityError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class GapError : public Error { using Error::Error; };
class TransportError : public Error { using Error::Error; };
class AuthError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

// Pipeline failure; what() is "<stage>: <cause>".
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& cause) : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

}  // namespace ucoint

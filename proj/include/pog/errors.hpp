#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pog {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Network / endpoint failures (SPARQL endpoint, remote LLM, remote embedder).
class TransportError : public Error {
public:
    using Error::Error;
};

// A reply or input file could not be parsed; carries the raw text that failed.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string raw)
        : Error(message), raw_(std::move(raw)) {}
    const std::string& raw_output() const { return raw_; }

private:
    std::string raw_;
};

// Invalid configuration, including mock-script exhaustion.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Caller violated an operation precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace pog

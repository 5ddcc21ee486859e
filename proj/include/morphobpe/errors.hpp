#pragma once

#include <stdexcept>
#include <string>

namespace morphobpe {

// Error taxonomy shared by the library and the CLI.
// CLI exit codes: InputError -> 1, ConfigError -> 2, anything else -> 3.

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid UTF-8 in input text.
class DecodingError : public InputError {
public:
    explicit DecodingError(const std::string& msg) : InputError(msg) {}
};

// Malformed data file (vocab, model, corpus line).
class ParseError : public InputError {
public:
    explicit ParseError(const std::string& msg) : InputError(msg) {}
};

class TrainingError : public InputError {
public:
    explicit TrainingError(const std::string& msg) : InputError(msg) {}
};

}  // namespace morphobpe

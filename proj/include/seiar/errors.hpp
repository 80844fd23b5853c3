#pragma once

#include <stdexcept>
#include <string>

namespace seiar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric failures. The CLI maps these to exit code 2.
class NumericError : public Error {
public:
    using Error::Error;
};

class NonFinite : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularR : public NumericError {
public:
    using NumericError::NumericError;
};

class IllConditioned : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateDirection : public NumericError {
public:
    using NumericError::NumericError;
};

class EmptyWindow : public NumericError {
public:
    using NumericError::NumericError;
};

/// Input failures. The CLI maps these to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

class BadCovariance : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, int line, std::string key)
        : InputError(format(what, line, key)), line_(line), key_(std::move(key))
    {
    }

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& what, int line, const std::string& key)
    {
        std::string msg = "line " + std::to_string(line);
        if (!key.empty())
            msg += " (" + key + ")";
        return msg + ": " + what;
    }

    int line_;
    std::string key_;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

} // namespace seiar

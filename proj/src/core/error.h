#pragma once

#include <stdexcept>
#include <string>

namespace dualray {

// Error taxonomy mirrors the process exit codes: config 2, data 3, numeric 4.
class Error : public std::runtime_error {
public:
    Error(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(2, msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(3, msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(4, msg) {}
};

}  // namespace dualray

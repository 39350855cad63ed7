#pragma once

#include <stdexcept>
#include <string>

namespace fpcf {

// Dataset / configuration problems the caller can fix (CLI exit code 1).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite or otherwise unusable numeric input.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level failures (CLI exit code 2).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file content (bad PGM header, bad token, truncated data).
class parse_error : public io_error {
public:
    explicit parse_error(const std::string& msg) : io_error(msg) {}
};

// Model file problems: wrong magic, version mismatch, checksum, truncation.
class format_error : public io_error {
public:
    explicit format_error(const std::string& msg) : io_error(msg) {}
};

} // namespace fpcf

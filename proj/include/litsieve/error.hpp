#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace litsieve {

enum class ErrorCode {
    validation,
    not_found,
    transport,
    contract,
    coverage,
    precondition,
    ingestion,
    conflict,
    io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure surfaced by the library. The code is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error(ErrorCode::validation, message) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message) : Error(ErrorCode::not_found, message) {}
};

/// Retryable network failure (timeout, refused connection, ...).
class TransportError : public Error {
public:
    explicit TransportError(const std::string& message) : Error(ErrorCode::transport, message) {}
};

class ContractError : public Error {
public:
    explicit ContractError(const std::string& message) : Error(ErrorCode::contract, message) {}
};

class CoverageError : public Error {
public:
    explicit CoverageError(const std::string& message) : Error(ErrorCode::coverage, message) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& message) : Error(ErrorCode::precondition, message) {}
};

class IngestionError : public Error {
public:
    IngestionError(const std::string& message, std::size_t byte_offset)
        : Error(ErrorCode::ingestion, message + " (at byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

class ConflictError : public Error {
public:
    explicit ConflictError(const std::string& message) : Error(ErrorCode::conflict, message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorCode::io, message) {}
};

}  // namespace litsieve

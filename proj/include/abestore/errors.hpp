#pragma once

#include <stdexcept>
#include <string>

namespace abestore {

// Error classes surfaced across module boundaries.  Codes are stable: the
// wire protocol and the CLI exit-code mapping both key off them.
enum class ErrorCode : uint8_t {
    None = 0,
    Malformed = 1,
    AuthFailed = 2,        // authorization request rejected (empty A', V too small, bad TTL)
    UnknownIssuer = 3,     // MST check 1
    BadSignature = 4,      // MST check 2
    SealedMismatch = 5,    // MST checks 3-4
    Expired = 6,           // MST check 5
    PolicyUnsatisfied = 7,
    BadOwnerSignature = 8,
    NoSuchResource = 9,
    DuplicateResource = 10,
    RangeOutOfBounds = 11,
    ChannelAbort = 12,     // MAC failure / replay / truncation
    SuiteMismatch = 13,
    DecryptFailed = 14,    // ABE decryption failure
    Internal = 15,
};

const char* error_code_name(ErrorCode c);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// ABE decryption failure (non-satisfying key, stale epoch, tampered body).
class AbeDecryptError : public ProtocolError {
public:
    explicit AbeDecryptError(const std::string& what)
        : ProtocolError(ErrorCode::DecryptFailed, what) {}
};

}  // namespace abestore

#include "abestore/errors.hpp"

namespace abestore {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::None: return "None";
        case ErrorCode::Malformed: return "Malformed";
        case ErrorCode::AuthFailed: return "AuthFailed";
        case ErrorCode::UnknownIssuer: return "UnknownIssuer";
        case ErrorCode::BadSignature: return "BadSignature";
        case ErrorCode::SealedMismatch: return "SealedMismatch";
        case ErrorCode::Expired: return "Expired";
        case ErrorCode::PolicyUnsatisfied: return "PolicyUnsatisfied";
        case ErrorCode::BadOwnerSignature: return "BadOwnerSignature";
        case ErrorCode::NoSuchResource: return "NoSuchResource";
        case ErrorCode::DuplicateResource: return "DuplicateResource";
        case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
        case ErrorCode::ChannelAbort: return "ChannelAbort";
        case ErrorCode::SuiteMismatch: return "SuiteMismatch";
        case ErrorCode::DecryptFailed: return "DecryptFailed";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace abestore

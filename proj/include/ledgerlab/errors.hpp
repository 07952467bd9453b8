#pragma once

#include <stdexcept>
#include <string>

namespace ledgerlab {

// Closed set of failure reasons. Business-rule checks (transaction
// validation) report these as values; contract violations of the API
// itself surface as LabError exceptions carrying one of them.
enum class ErrorCode {
    MalformedInput,
    DecryptionFailure,
    DuplicateName,
    DuplicateActor,
    LinkRejected,
    CannotProve,
    KeyCollision,
    EmptyLeaves,
    IndexOutOfRange,
    MalformedView,
    EmptyParticipants,
    UnauthorizedSigner,
    UnknownMember,
    UnknownGroup,
    UnknownContract,
    UnknownTree,
    NeedsAnswer,
    UnknownAsset,
    BadScenario,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::DecryptionFailure: return "DecryptionFailure";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::DuplicateActor: return "DuplicateActor";
        case ErrorCode::LinkRejected: return "LinkRejected";
        case ErrorCode::CannotProve: return "CannotProve";
        case ErrorCode::KeyCollision: return "KeyCollision";
        case ErrorCode::EmptyLeaves: return "EmptyLeaves";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::MalformedView: return "MalformedView";
        case ErrorCode::EmptyParticipants: return "EmptyParticipants";
        case ErrorCode::UnauthorizedSigner: return "UnauthorizedSigner";
        case ErrorCode::UnknownMember: return "UnknownMember";
        case ErrorCode::UnknownGroup: return "UnknownGroup";
        case ErrorCode::UnknownContract: return "UnknownContract";
        case ErrorCode::UnknownTree: return "UnknownTree";
        case ErrorCode::NeedsAnswer: return "NeedsAnswer";
        case ErrorCode::UnknownAsset: return "UnknownAsset";
        case ErrorCode::BadScenario: return "BadScenario";
    }
    return "Unknown";
}

class LabError : public std::runtime_error {
public:
    LabError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ledgerlab

#ifndef CAUSALMED_ERROR_HPP
#define CAUSALMED_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalmed {

// Every failure mode the library reports. The code travels with the
// exception so callers (CLI, bindings, tests) can branch without
// parsing messages.
enum class ErrorCode {
    // graph construction / classification
    CycleDetected,
    ForbiddenEdge,
    MultipleOutcomes,
    MissingOutcome,
    DanglingEdge,
    DuplicateNode,
    UnclassifiableEdge,
    InvalidCount,
    TooLarge,
    UnknownNode,
    InvalidRole,
    // structural model
    InvalidModel,
    MissingTreatmentValue,
    DomainError,
    MissingObservation,
    // mediation
    NotLinear,
    MultiTreatmentNdeUnsupported,
    // fitting
    EmptyTable,
    HeaderMismatch,
    RankDeficient,
    InsufficientRows,
    UnknownColumn,
    EmptyColumn,
    // discrete oracle
    SupportTooLarge,
    // file handling
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }
    std::string_view code_name() const { return to_string(code_); }

  private:
    ErrorCode code_;
};

}  // namespace causalmed

#endif  // CAUSALMED_ERROR_HPP

#include "causalmed/error.hpp"

namespace causalmed {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::ForbiddenEdge: return "ForbiddenEdge";
        case ErrorCode::MultipleOutcomes: return "MultipleOutcomes";
        case ErrorCode::MissingOutcome: return "MissingOutcome";
        case ErrorCode::DanglingEdge: return "DanglingEdge";
        case ErrorCode::DuplicateNode: return "DuplicateNode";
        case ErrorCode::UnclassifiableEdge: return "UnclassifiableEdge";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::InvalidRole: return "InvalidRole";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::MissingTreatmentValue: return "MissingTreatmentValue";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::MissingObservation: return "MissingObservation";
        case ErrorCode::NotLinear: return "NotLinear";
        case ErrorCode::MultiTreatmentNdeUnsupported: return "MultiTreatmentNdeUnsupported";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::HeaderMismatch: return "HeaderMismatch";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::InsufficientRows: return "InsufficientRows";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::EmptyColumn: return "EmptyColumn";
        case ErrorCode::SupportTooLarge: return "SupportTooLarge";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace causalmed

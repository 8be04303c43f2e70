#include "litsieve/error.hpp"

namespace litsieve {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return "validation";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::transport: return "transport";
        case ErrorCode::contract: return "contract";
        case ErrorCode::coverage: return "coverage";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::ingestion: return "ingestion";
        case ErrorCode::conflict: return "conflict";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

}  // namespace litsieve

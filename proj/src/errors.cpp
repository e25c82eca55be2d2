#include "fedsched/errors.hpp"

namespace fedsched {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::bad_input: return "bad_input";
        case ErrorCode::io: return "io";
        case ErrorCode::no_route: return "no_route";
        case ErrorCode::out_of_horizon: return "out_of_horizon";
        case ErrorCode::guard: return "guard";
    }
    return "unknown";
}

} // namespace fedsched

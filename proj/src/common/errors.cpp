#include "dirt/common/errors.hpp"

namespace dirt {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return 3;
        case ErrorKind::budget:
        case ErrorKind::resource: return 4;
        default: return 2;
    }
}

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::bounds: return "bounds error";
        case ErrorKind::domain: return "domain error";
        case ErrorKind::numerical: return "numerical error";
        case ErrorKind::evaluation: return "evaluation error";
        case ErrorKind::degenerate: return "degenerate estimate";
        case ErrorKind::resource: return "resource error";
        case ErrorKind::budget: return "budget exceeded";
        case ErrorKind::config: return "config error";
    }
    return "error";
}

}  // namespace dirt

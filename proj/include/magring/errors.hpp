#pragma once

#include <stdexcept>
#include <string>

namespace magring {

// Base for everything thrown by the library. `kind()` is stable text used
// by the CLI to name the failing module class on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MAGRING_DEFINE_ERROR(NAME)                                    \
    class NAME : public Error {                                       \
    public:                                                           \
        explicit NAME(const std::string& what) : Error(#NAME, what) {} \
    }

MAGRING_DEFINE_ERROR(DomainError);       // argument outside mathematical domain
MAGRING_DEFINE_ERROR(PoleError);         // evaluation at a pole of xi / Gamma
MAGRING_DEFINE_ERROR(CoincidenceError);  // coincident source/evaluation points
MAGRING_DEFINE_ERROR(ConvergenceError);  // quadrature/series failed to converge
MAGRING_DEFINE_ERROR(WindowError);       // root window straddles a Landau level
MAGRING_DEFINE_ERROR(ScanResolutionError); // branch matching ambiguous at finest scan
MAGRING_DEFINE_ERROR(ContinuationError); // sweep branch matching ambiguous
MAGRING_DEFINE_ERROR(NotARootError);     // null_vector called off a root
MAGRING_DEFINE_ERROR(FitError);          // boundary-value log fit residual too large
MAGRING_DEFINE_ERROR(GridError);         // grid/mask/loop geometry violated
MAGRING_DEFINE_ERROR(ParseError);        // config text malformed / unknown key
MAGRING_DEFINE_ERROR(ValidationError);   // config value violates a precondition
MAGRING_DEFINE_ERROR(IoError);           // file output failure

#undef MAGRING_DEFINE_ERROR

// Exit-code policy: config problems are 2, numerical/runtime problems are 3.
inline int exit_code_for(const Error& e) {
    return (e.kind() == "ParseError" || e.kind() == "ValidationError") ? 2 : 3;
}

} // namespace magring

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpnsound {

// Root of every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DPNSOUND_ERROR(Name)                                                                                           \
    class Name : public Error {                                                                                        \
    public:                                                                                                            \
        using Error::Error;                                                                                            \
    }

// constraint-core
DPNSOUND_ERROR(UnboundVariable);
DPNSOUND_ERROR(SortMismatch);
DPNSOUND_ERROR(CaptureError);

// smt-gateway
DPNSOUND_ERROR(SolverUnavailable);
DPNSOUND_ERROR(SolverFailure);
DPNSOUND_ERROR(QENotSupported);
DPNSOUND_ERROR(Inconclusive);

// io-formats
DPNSOUND_ERROR(XmlError);
DPNSOUND_ERROR(UnknownReference);
DPNSOUND_ERROR(UndeclaredVariable);
DPNSOUND_ERROR(MissingFinalMarking);
DPNSOUND_ERROR(InvalidModel);

// semantics and exploration
DPNSOUND_ERROR(NotEnabled);
DPNSOUND_ERROR(BoundExceeded);
DPNSOUND_ERROR(BudgetExceeded);
DPNSOUND_ERROR(ExplosionGuard);
DPNSOUND_ERROR(WitnessReplayFailed);

#undef DPNSOUND_ERROR

class GuardParseError : public Error {
public:
    GuardParseError(std::size_t position, const std::string& message)
        : Error("guard parse error at offset " + std::to_string(position) + ": " + message), position_(position)
    {
    }

    [[nodiscard]] std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

} // namespace dpnsound

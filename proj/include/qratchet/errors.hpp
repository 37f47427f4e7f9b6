// errors.hpp: exception types shared by all qratchet modules

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qratchet {

// Base for every library error; lets callers catch "anything from us" in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad dimension, out-of-range index, invalid parameter.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Operands live on different factors (A, B, AB) or have incompatible sizes.
class SpaceMismatch : public Error {
public:
    using Error::Error;
};

// A density matrix failed Hermiticity, trace or positivity validation.
class InvalidState : public Error {
public:
    using Error::Error;
};

// Too much population sits at the Fock cutoff for results to be trusted.
class TruncationOverflow : public Error {
public:
    TruncationOverflow(const std::string& what, double tail_mass, std::size_t encounter = 0)
        : Error(what), tail_mass_(tail_mass), encounter_(encounter) {}

    double tail_mass() const noexcept { return tail_mass_; }
    // 1-based encounter index, 0 when raised outside a protocol run.
    std::size_t encounter() const noexcept { return encounter_; }

private:
    double tail_mass_;
    std::size_t encounter_;
};

// Coupling strong enough that a normal mode has non-positive squared frequency.
class UnstableCoupling : public Error {
public:
    using Error::Error;
};

// Log-linear fit asked to take the log of a zero or negative probability.
class NonPositiveProbability : public Error {
public:
    using Error::Error;
};

// An analytic identity the code relies on did not hold numerically.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace qratchet

#pragma once

#include <stdexcept>
#include <string>

namespace qnd {

// Base for every error the library raises. Callers that only care about
// "something went wrong in qnd" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter is outside its documented domain (eta outside (0, 1],
// Q_load > Q_intr, negative amplitude, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Gamma_X == 0: the probe carries no information about the signal.
class NoCouplingError : public Error {
public:
    using Error::Error;
};

// sin(phi) is within 1e-12 of zero: the transfer function vanishes and the
// number imprecision (or the position-space kernel) diverges.
class SingularAngleError : public Error {
public:
    using Error::Error;
};

// eta == 1 or Gamma_S == 0: the error decreases monotonically in n_p, so
// there is no finite optimal probe power.
class UnboundedOptimumError : public Error {
public:
    using Error::Error;
};

// Fock truncation below the coherent-state rule.
class TruncationError : public Error {
public:
    using Error::Error;
};

// Marginal probability of a homodyne outcome underflowed.
class ZeroProbabilityError : public Error {
public:
    using Error::Error;
};

}  // namespace qnd

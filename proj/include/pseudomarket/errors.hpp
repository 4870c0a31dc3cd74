#pragma once

#include <stdexcept>
#include <string>

namespace pseudomarket {

// Base classes mirror the CLI exit-code groups: config 2, solver 3, io 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// config / input domain
struct FairShareSumError : ConfigError {
    using ConfigError::ConfigError;
};

struct ProbabilityMassError : ConfigError {
    using ConfigError::ConfigError;
};

struct NonPositiveHorizon : ConfigError {
    using ConfigError::ConfigError;
};

struct CapOutOfRange : ConfigError {
    using ConfigError::ConfigError;
};

struct TooManyTypes : ConfigError {
    using ConfigError::ConfigError;
};

struct KmaxTooSmall : ConfigError {
    using ConfigError::ConfigError;
};

struct ReserveBelowOne : ConfigError {
    using ConfigError::ConfigError;
};

struct UnknownPreset : ConfigError {
    using ConfigError::ConfigError;
};

struct SchemaError : ConfigError {
    using ConfigError::ConfigError;
};

struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};

// numerics
struct NumericalFailure : SolverError {
    using SolverError::SolverError;
};

struct DegenerateDenominator : SolverError {
    using SolverError::SolverError;
};

// engine contract violations (API misuse, not user input)
struct DuplicateBid : Error {
    using Error::Error;
};

struct BidFromHolder : Error {
    using Error::Error;
};

// statistics
struct ZeroPaymentAggregate : Error {
    using Error::Error;
};

}  // namespace pseudomarket

#ifndef RUIN_ERRORS_HPP
#define RUIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ruin {

// Base of every error raised by the library. Each subclass names one
// failure mode so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Transform requested below its abscissa of convergence.
class DivergentTransform : public Error {
public:
    using Error::Error;
};

// Lattice too short or too coarse: residual tail mass above the configured bound.
class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class InfiniteMean : public Error {
public:
    using Error::Error;
};

class InfiniteVariance : public Error {
public:
    using Error::Error;
};

// Group law with all its mass on the empty group.
class DegenerateModel : public Error {
public:
    using Error::Error;
};

// c <= lambda * E[Y1]; ruin is certain for every initial capital.
class NetProfitViolated : public Error {
public:
    using Error::Error;
};

class UnknownPreset : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class NoRuinObserved : public Error {
public:
    using Error::Error;
};

class ConfigParseError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace ruin

#endif  // RUIN_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace bezsimplex {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateSimplex : public Error {
public:
    using Error::Error;
};

/// A multi-index set (or exact multinomial) exceeds the supported size.
class SizeOverflow : public Error {
public:
    using Error::Error;
};

/// A barycentric weight is below -tolerance, i.e. the point lies outside the simplex.
class NegativeWeight : public Error {
public:
    using Error::Error;
};

/// exp() argument beyond the guarded range.
class Overflow : public Error {
public:
    using Error::Error;
};

class EmptyGrid : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Every error in a rate fit is below the noise floor: the function is reproduced exactly.
class ZeroError : public Error {
public:
    using Error::Error;
};

/// Evaluating a user-supplied function at a control point failed.
class SampleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bezsimplex

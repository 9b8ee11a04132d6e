#pragma once

#include <stdexcept>
#include <string>

namespace hcfbeam {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A physical parameter that must be strictly positive is zero or negative.
class NonPositiveParameter : public Error {
public:
    explicit NonPositiveParameter(const std::string& msg) : Error(msg) {}
};

/// The shear wave speed does not strictly dominate the bending wave speed
/// somewhere on [0, 1].
class SpeedOrderingViolation : public Error {
public:
    explicit SpeedOrderingViolation(const std::string& msg) : Error(msg) {}
};

/// A discretization is too coarse for the requested operation.
class GridTooCoarse : public Error {
public:
    explicit GridTooCoarse(const std::string& msg) : Error(msg) {}
};

/// Two discretizations that must coincide do not.
class GridMismatch : public Error {
public:
    explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

/// An iterative solve failed to reach the requested tolerance.
class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

/// A time window that must have positive length is empty or inverted.
class DegenerateWindow : public Error {
public:
    explicit DegenerateWindow(const std::string& msg) : Error(msg) {}
};

/// A signal was queried before the start of its recorded history.
class WindowUnderflow : public Error {
public:
    explicit WindowUnderflow(const std::string& msg) : Error(msg) {}
};

/// A quantity that must be nonnegative (offset, horizon, duration) is negative.
class NegativeOffset : public Error {
public:
    explicit NegativeOffset(const std::string& msg) : Error(msg) {}
};

/// A configuration file is malformed or fails validation.
class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const std::string& msg) : Error(msg) {}
};

/// An explicit transport step violates its stability bound.
class CflViolation : public Error {
public:
    explicit CflViolation(const std::string& msg) : Error(msg) {}
};

/// The requested scheme does not support the given model.
class SchemeUnsupported : public Error {
public:
    explicit SchemeUnsupported(const std::string& msg) : Error(msg) {}
};

}  // namespace hcfbeam

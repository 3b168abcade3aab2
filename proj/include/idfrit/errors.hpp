#pragma once

#include <stdexcept>
#include <string>

namespace idfrit {

/// Base for all library errors so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DegenerateLoop : public Error {
public:
    using Error::Error;
};

class NonInvertible : public Error {
public:
    using Error::Error;
};

class NonProperResult : public Error {
public:
    using Error::Error;
};

class PoleHit : public Error {
public:
    using Error::Error;
};

class AlphaOutOfRange : public Error {
public:
    using Error::Error;
};

class ReferenceModelUnstable : public Error {
public:
    using Error::Error;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

class SingularLeadingSample : public Error {
public:
    using Error::Error;
};

class ControllerNotInvertible : public Error {
public:
    using Error::Error;
};

class AlgebraicLoopSingular : public Error {
public:
    using Error::Error;
};

class NotBiproper : public Error {
public:
    using Error::Error;
};

class NoCrossing : public Error {
public:
    using Error::Error;
};

class BadData : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace idfrit

#pragma once

#include <stdexcept>
#include <string>

namespace gibbstf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

// A test function was combined with a model it cannot be evaluated against.
class ModelMismatch : public Error {
public:
    using Error::Error;
};

// The carrier window does not contain the estimation window grown by the
// interaction range.
class CollarMissing : public Error {
public:
    using Error::Error;
};

class DegenerateCounts : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class TooFewBlocks : public Error {
public:
    using Error::Error;
};

class SingularE : public Error {
public:
    using Error::Error;
};

class InsufficientSupport : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace gibbstf

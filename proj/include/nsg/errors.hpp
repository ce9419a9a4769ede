#pragma once

#include <stdexcept>
#include <string>

namespace nsg {

// Base class for everything this library throws on purpose. Callers that
// only care about "input was bad" vs "internal contract broke" can catch
// the two subtrees below.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- input / precondition errors (CLI exit code 1) ----

class InvalidSpec : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroDirection : public Error {
public:
    using Error::Error;
};

// The orthogonality definitions presuppose a nonzero reference vector.
class ZeroLeft : public Error {
public:
    using Error::Error;
};

class SetTooLarge : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class NotOnSphere : public Error {
public:
    using Error::Error;
};

// ---- construction-stage errors ----

class CertificateFailed : public Error {
public:
    using Error::Error;
};

class SingularBasis : public Error {
public:
    using Error::Error;
};

class AttainmentNotUnique : public Error {
public:
    using Error::Error;
};

class VerificationFailed : public Error {
public:
    using Error::Error;
};

// A pipeline stage contradicted the exposedness classification. The three
// conditions stand or fall together, so this signals a tolerance or logic
// bug rather than a property of the input (CLI exit code 2).
class InconsistentClassification : public Error {
public:
    using Error::Error;
};

} // namespace nsg

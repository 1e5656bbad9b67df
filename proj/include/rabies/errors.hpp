#pragma once

#include <stdexcept>
#include <string>

namespace rabies {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// integrator
class StepBudgetExceeded : public Error {
public:
    StepBudgetExceeded(const std::string& what, double last_good_time)
        : Error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

class NonFiniteState : public Error {
public:
    NonFiniteState(const std::string& what, double last_good_time)
        : Error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

// ngm analysis
class SingularTransfer : public Error {
public:
    using Error::Error;
};

class NegativeDiscriminant : public Error {
public:
    using Error::Error;
};

class ZeroParameter : public Error {
public:
    using Error::Error;
};

class ZeroR0 : public Error {
public:
    using Error::Error;
};

// equilibria
class NoConvergence : public Error {
public:
    using Error::Error;
};

class NegativeEquilibrium : public Error {
public:
    using Error::Error;
};

// estimation
class NoImprovement : public Error {
public:
    using Error::Error;
};

class SingularInformation : public Error {
public:
    using Error::Error;
};

} // namespace rabies

// SPDX-License-Identifier: Apache-2.0

#ifndef XLSWIPT_ERRORS_HPP
#define XLSWIPT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace xlswipt {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

// Scenario-level inconsistency (bad region, bad user ordering, cap violation).
class InvalidScenario : public Error {
public:
    using Error::Error;
};

// A user sits on top of an antenna element or a subarray reference point.
class DegenerateDistance : public Error {
public:
    using Error::Error;
};

class ZeroChannel : public Error {
public:
    using Error::Error;
};

// Harvested-power floor at or above the EH saturation level.
class InfeasibleThreshold : public Error {
public:
    using Error::Error;
};

class InternalConsistency : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class UndefinedSurrogate : public Error {
public:
    using Error::Error;
};

// Config file does not match the schema. `field()` is the dotted key path.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace xlswipt

#endif  // XLSWIPT_ERRORS_HPP

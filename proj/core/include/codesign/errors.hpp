// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace codesign {

// Bad user input: config files, characterization tables, CLI values.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Valid-looking input that violates a model precondition (zero dims, bw <= 0, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// No configuration satisfies the device budget. Carries the binding resource class.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& msg, std::string binding)
        : std::runtime_error(msg), binding_resource(std::move(binding)) {}
    std::string binding_resource;
};

class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A coordinate move that would break model invariants; callers skip the move.
class MoveError : public std::runtime_error {
public:
    explicit MoveError(const std::string& msg) : std::runtime_error(msg) {}
};

// Codegen planning failure (e.g. buffer plan exceeds device BRAM).
class PlanError : public std::runtime_error {
public:
    explicit PlanError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace codesign

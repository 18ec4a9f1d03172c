#pragma once

#include <stdexcept>
#include <string>

namespace sle0 {

enum class ErrorKind {
    degenerate_configuration,
    symmetry_violation,
    unsupported_charge,
    invalid_reference,
    proximity,
    bad_launch,
    launch_selection,
    ill_defined_winding,
    collision,
    configuration,
    inversion_failure,
    pole,
    internal,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Two driving points (or a driving point and a boundary marked point) met.
/// The collision time lies in [t_lo, t_hi].
class CollisionError : public Error {
public:
    CollisionError(double t_lo, double t_hi, const std::string& what)
        : Error(ErrorKind::collision, what), t_lo_(t_lo), t_hi_(t_hi) {}

    double t_lo() const noexcept { return t_lo_; }
    double t_hi() const noexcept { return t_hi_; }

private:
    double t_lo_;
    double t_hi_;
};

}  // namespace sle0

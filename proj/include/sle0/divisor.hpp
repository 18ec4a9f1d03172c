#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sle0/errors.hpp"

namespace sle0 {

using Complex = std::complex<double>;

inline constexpr double kDistinctTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-10;

enum class Domain { half_plane, disk, sphere };

const char* to_string(Domain domain);

/// A point of the Riemann sphere: a finite complex coordinate or infinity.
class SpherePoint {
public:
    SpherePoint() = default;
    static SpherePoint at(Complex z) { return SpherePoint(false, z); }
    static SpherePoint infinity() { return SpherePoint(true, {}); }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    /// Throws for the point at infinity.
    Complex value() const;

    bool operator==(const SpherePoint&) const = default;

private:
    SpherePoint(bool infinite, Complex z) : infinite_(infinite), z_(z) {}

    bool infinite_ = false;
    Complex z_{};
};

/// A real charge. Half-integers are stored exactly as numerator/denominator
/// with denominator 1 or 2 (2 only for odd numerators). Any other real value
/// goes through the escape hatch and is only accepted by the Loewner path.
class Charge {
public:
    Charge() = default;
    static Charge half_integer(int numerator, int denominator = 1);
    /// Snaps to the exact half-integer form when 2*sigma is integral within 1e-12.
    static Charge real(double sigma);

    double value() const noexcept;
    bool is_half_integer() const noexcept { return exact_; }
    int numerator() const;
    int denominator() const;
    /// 2*sigma; requires a half-integer charge.
    int twice() const;

    bool operator==(const Charge&) const = default;

private:
    bool exact_ = true;
    int numerator_ = 0;
    int denominator_ = 1;
    double real_ = 0.0;
};

struct MarkedPoint {
    SpherePoint point;
    Charge charge;

    bool operator==(const MarkedPoint&) const = default;
};

/// Growth points carry an implicit charge +1. On the half-plane they live on
/// the extended real line, on the disk on the unit circle. Divisors produced
/// by general Möbius maps are tagged `sphere` and carry no symmetry.
struct SymmetricDivisor {
    Domain domain = Domain::half_plane;
    std::vector<SpherePoint> growth;
    std::vector<MarkedPoint> marked;

    /// n + sum of charges.
    double total_charge() const;
    bool all_half_integer() const;

    bool operator==(const SymmetricDivisor&) const = default;
};

enum class Violation {
    no_growth_points,
    growth_off_boundary,
    not_distinct,
    asymmetric,
    non_neutral,
};

const char* to_string(Violation violation);

struct ValidationIssue {
    Violation kind;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const noexcept { return issues.empty(); }
    bool has(Violation kind) const noexcept;
};

ValidationReport validate(const SymmetricDivisor& divisor);

double conformal_dimension(double sigma);
double conformal_dimension(const Charge& sigma);

/// log|C[sigma]|, summed over pairs of finite points. Growth points enter with
/// charge +1; factors involving infinity are dropped.
double log_coulomb_correlation_abs(const SymmetricDivisor& divisor);
double coulomb_correlation_abs(const SymmetricDivisor& divisor);

/// log|Z(x, q)| for growth coordinates x and marked points (infinite ones dropped).
double log_partition_abs(std::span<const Complex> x, std::span<const MarkedPoint> marked);
double partition_abs(std::span<const Complex> x, std::span<const MarkedPoint> marked);

/// d/dx_j log Z for real growth coordinates:
///   sum_{k != j} 2/(x_j - x_k) + sum_l 2 sigma_l/(x_j - q_l).
/// Conjugate-closed marked points make this real; an imaginary residue above
/// 1e-10 (relative) raises a symmetry violation.
double dlog_partition(std::span<const double> x, std::span<const MarkedPoint> marked, std::size_t j);

/// z -> (a z + b)/(c z + d), stored as the 2x2 coefficient matrix so that
/// composition is a matrix product.
class MoebiusMap {
public:
    MoebiusMap(Complex a, Complex b, Complex c, Complex d);
    explicit MoebiusMap(const Eigen::Matrix2cd& coefficients);

    static MoebiusMap identity();
    /// w = (z - i)/(z + i), upper half-plane onto the unit disk.
    static MoebiusMap cayley();
    static MoebiusMap rotation(double angle);

    const Eigen::Matrix2cd& coefficients() const noexcept { return m_; }
    Complex determinant() const { return m_.determinant(); }

    SpherePoint operator()(const SpherePoint& p) const;
    /// Finite image of a finite point; throws ErrorKind::pole at the pole.
    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;

    MoebiusMap inverse() const;
    /// (*this) after `inner`.
    MoebiusMap compose(const MoebiusMap& inner) const;

private:
    Eigen::Matrix2cd m_;
};

/// Image divisor; charges untouched. The output domain tag is detected from
/// where the map sends the input domain (half-plane, disk, or neither).
SymmetricDivisor moebius_pushforward(const SymmetricDivisor& divisor, const MoebiusMap& map);

}  // namespace sle0

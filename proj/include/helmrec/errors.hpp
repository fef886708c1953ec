#pragma once

#include <stdexcept>
#include <string>

namespace helmrec {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: out-of-range parameters, malformed configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// The wavenumber sits too close to a discrete Neumann eigenvalue, the
/// Helmholtz system matrix is numerically singular.
class NearResonance : public Error {
public:
    explicit NearResonance(const std::string& msg) : Error(msg) {}
};

/// The closed-form background solution is undefined: the radial derivative
/// denominator vanishes for some mode.
class BackgroundResonance : public Error {
public:
    BackgroundResonance(int mode, double denom)
        : Error("background field undefined: J'_" + std::to_string(mode) +
                " denominator " + std::to_string(denom)),
          mode(mode), denominator(denom) {}
    int mode;
    double denominator;
};

class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(int index, double pivot)
        : Error("Cholesky pivot " + std::to_string(index) + " is " +
                std::to_string(pivot)),
          pivot_index(index), pivot(pivot) {}
    int pivot_index;
    double pivot;
};

class SingularFactor : public Error {
public:
    SingularFactor(int index, double value)
        : Error("triangular factor diagonal " + std::to_string(index) +
                " is " + std::to_string(value)),
          index(index), value(value) {}
    int index;
    double value;
};

class DegenerateTriangle : public Error {
public:
    DegenerateTriangle(int triangle, double area)
        : Error("triangle " + std::to_string(triangle) + " has area " +
                std::to_string(area)),
          triangle(triangle), area(area) {}
    int triangle;
    double area;
};

/// Measurement matrix asymmetry exceeds the trust threshold; the forward
/// solve is under-resolved.
class AsymmetryTooLarge : public Error {
public:
    explicit AsymmetryTooLarge(double asym)
        : Error("measurement asymmetry " + std::to_string(asym)),
          asymmetry(asym) {}
    double asymmetry;
};

/// Sensitivity matrix is numerically semidefinite, the Cholesky route for
/// the monotonicity bound is undefined.
class SemidefiniteSensitivity : public Error {
public:
    explicit SemidefiniteSensitivity(double lambda_min)
        : Error("sensitivity matrix numerically semidefinite, lambda_min " +
                std::to_string(lambda_min)),
          lambda_min(lambda_min) {}
    double lambda_min;
};

/// Reconstruction produced an empty support mask.
class EmptySupport : public Error {
public:
    EmptySupport() : Error("support mask is empty") {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// Malformed on-disk artifact (bad magic, truncated file, bad CSV).
class DataFormatError : public Error {
public:
    explicit DataFormatError(const std::string& msg) : Error(msg) {}
};

}  // namespace helmrec

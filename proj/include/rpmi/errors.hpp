#pragma once

#include <stdexcept>
#include <string>

namespace rpmi {

/// Thrown when an LFSR polynomial fails the maximal-period check.
/// Carries the period actually observed before a state revisit.
class NonPrimitivePolynomialError : public std::invalid_argument {
public:
    NonPrimitivePolynomialError(int order, long observed_period)
        : std::invalid_argument("polynomial of order " + std::to_string(order) +
                                " is not primitive: state revisited after " +
                                std::to_string(observed_period) + " steps (expected " +
                                std::to_string((1L << order) - 1) + ")"),
          order_(order),
          observed_period_(observed_period) {}

    int order() const { return order_; }
    long observed_period() const { return observed_period_; }

private:
    int order_;
    long observed_period_;
};

/// Thrown when no subset-XOR-free shift selection of the requested size
/// exists for the given polynomial order.
class InfeasibleSelectionError : public std::runtime_error {
public:
    InfeasibleSelectionError(int order, int requested, int max_independent)
        : std::runtime_error("no subset-XOR-free selection of " + std::to_string(requested) +
                             " shifts exists for order n=" + std::to_string(order) +
                             " (search exhausted all shifts; largest independent family has " +
                             std::to_string(max_independent) + " members)"),
          order_(order),
          requested_(requested),
          max_independent_(max_independent) {}

    int order() const { return order_; }
    int requested() const { return requested_; }
    int max_independent() const { return max_independent_; }

private:
    int order_;
    int requested_;
    int max_independent_;
};

/// A value fell outside the domain of an inverse map by more than the
/// documented tolerance.
class OutOfRangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Error propagation requested at a fringe turning point where the
/// derivative vanishes.
class SingularOperatingPointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rpmi

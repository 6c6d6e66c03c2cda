#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "axialmap/axial.hpp"
#include "axialmap/geometry.hpp"
#include "axialmap/natural_streets.hpp"

namespace axialmap {

// Values above the arithmetic mean form the head, the rest the tail.
struct HeadTailSplit {
    double mean = 0.0;
    std::vector<std::size_t> head;
    std::vector<std::size_t> tail;
    double head_fraction = 0.0;

    double tail_fraction() const { return 1.0 - head_fraction; }
};

HeadTailSplit head_tail_split(std::span<const double> values);

struct LognormalFit {
    double mu = 0.0;     // mean of log-values
    double sigma = 0.0;  // population standard deviation of log-values
    std::size_t sample_size = 0;
    double ks_statistic = 0.0;  // sup-distance between empirical and fitted CDF
};

// Maximum-likelihood lognormal fit. Throws DomainError on a nonpositive value
// and InsufficientDataError for fewer than two values.
LognormalFit fit_lognormal(std::span<const double> values);

double lognormal_cdf(double value, double mu, double sigma);

// Pearson correlation. Throws DomainError for mismatched lengths, n < 3, or a
// constant input.
double pearson_r(std::span<const double> xs, std::span<const double> ys);
double r_squared(std::span<const double> flows, std::span<const double> metric);

struct TTestResult {
    double t = 0.0;             // +/-inf when |r| = 1
    double critical = 0.0;      // two-tailed 5% value at df = n - 2
    bool significant = false;
};

// Two-tailed 5% critical value of Student's t.
double t_critical_95(std::size_t degrees_of_freedom);

TTestResult correlation_t_test(double r, std::size_t n);

struct GateObservation {
    Point location;
    double flow = 0.0;
    std::optional<std::size_t> assigned_unit;
    std::optional<double> assigned_distance;
};

// A unit of analysis for gate assignment: an id with its geometry.
struct UnitShape {
    std::size_t id = 0;
    Polyline geometry;
};

std::vector<UnitShape> unit_shapes(std::span<const AxialLine> lines);
std::vector<UnitShape> unit_shapes(std::span<const NaturalStreet> streets);

// Nearest unit within `max_distance` of each gate (ties to the smaller id);
// gates with no unit in reach stay unassigned.
std::vector<GateObservation> assign_gates(std::span<const GateObservation> gates,
                                          std::span<const UnitShape> units, double max_distance);

}  // namespace axialmap

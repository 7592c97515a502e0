#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ballflow {

/// One positive radius per vertex.
class PackingVector {
public:
    /// Throws InputError unless every entry is positive and finite.
    explicit PackingVector(std::vector<double> radii);

    static PackingVector uniform(std::size_t n, double radius);

    std::size_t size() const { return r_.size(); }
    double operator[](std::size_t i) const { return r_[i]; }
    std::span<const double> values() const { return r_; }
    const std::vector<double>& vector() const { return r_; }

    /// Sum of radii (the l1 norm).
    double l1() const;
    double min() const;
    double max() const;

    PackingVector scaled(double c) const;

private:
    std::vector<double> r_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

}  // namespace ballflow

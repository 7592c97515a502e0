#include "ballflow/packing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ballflow/error.hpp"

namespace ballflow {

PackingVector::PackingVector(std::vector<double> radii) : r_(std::move(radii)) {
    if (r_.empty()) throw InputError("packing must have at least one radius");
    for (std::size_t i = 0; i < r_.size(); ++i) {
        if (!(r_[i] > 0.0) || !std::isfinite(r_[i]))
            throw InputError("radius " + std::to_string(i) + " must be positive and finite");
    }
}

PackingVector PackingVector::uniform(std::size_t n, double radius) {
    return PackingVector(std::vector<double>(n, radius));
}

double PackingVector::l1() const {
    return compensated_sum(r_);
}

double PackingVector::min() const {
    return *std::min_element(r_.begin(), r_.end());
}

double PackingVector::max() const {
    return *std::max_element(r_.begin(), r_.end());
}

PackingVector PackingVector::scaled(double c) const {
    std::vector<double> out(r_);
    for (double& x : out) x *= c;
    return PackingVector(std::move(out));
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace ballflow

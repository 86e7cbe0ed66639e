#include "layerfd/solution.hpp"

#include <cmath>
#include <stdexcept>

namespace layerfd {

namespace {
void check_sizes(const Mesh& mesh, std::size_t n_values, std::size_t n_segments) {
    if (n_values != mesh.nodes().size())
        throw std::invalid_argument("nodal value count does not match mesh");
    if (n_segments != static_cast<std::size_t>(mesh.intervals()))
        throw std::invalid_argument("segment count does not match mesh");
}
}  // namespace

DiscreteSolution::DiscreteSolution(Mesh mesh, std::vector<double> values,
                                   std::vector<ExpSegment> segments)
    : mesh_(std::move(mesh)), values_(std::move(values)), segments_(std::move(segments)) {
    check_sizes(mesh_, values_.size(), std::get<std::vector<ExpSegment>>(segments_).size());
}

DiscreteSolution::DiscreteSolution(Mesh mesh, std::vector<double> values,
                                   std::vector<PowSegment> segments, double epsilon)
    : mesh_(std::move(mesh)),
      values_(std::move(values)),
      segments_(std::move(segments)),
      epsilon_(epsilon) {
    check_sizes(mesh_, values_.size(), std::get<std::vector<PowSegment>>(segments_).size());
}

std::span<const ExpSegment> DiscreteSolution::exp_segments() const {
    return std::get<std::vector<ExpSegment>>(segments_);
}

std::span<const PowSegment> DiscreteSolution::pow_segments() const {
    return std::get<std::vector<PowSegment>>(segments_);
}

double DiscreteSolution::value(double x) const {
    int n = mesh_.interval_containing(x);
    if (x == mesh_.node(n)) return values_[static_cast<std::size_t>(n)];
    if (x == mesh_.node(n - 1)) return values_[static_cast<std::size_t>(n) - 1];
    return value_on_interval(n, x);
}

double DiscreteSolution::derivative(double x) const {
    return derivative_on_interval(mesh_.interval_containing(x), x);
}

double DiscreteSolution::value_on_interval(int n, double x) const {
    if (n < 1 || n > mesh_.intervals()) throw std::out_of_range("interval index out of range");
    double xn = mesh_.node(n);
    double vn = values_[static_cast<std::size_t>(n)];
    if (is_exponential()) {
        // anchored at the right node: exact there, stable for rate*(x-xn) -> 0
        const ExpSegment& s = exp_segments()[static_cast<std::size_t>(n) - 1];
        return vn + s.c2 * std::expm1(s.rate * (x - xn)) + s.slope * (x - xn);
    }
    const PowSegment& s = pow_segments()[static_cast<std::size_t>(n) - 1];
    return vn - s.f_n * std::log1p((x - xn) / (epsilon_ + xn)) + s.c1 * (x - xn);
}

double DiscreteSolution::derivative_on_interval(int n, double x) const {
    if (n < 1 || n > mesh_.intervals()) throw std::out_of_range("interval index out of range");
    double xn = mesh_.node(n);
    if (is_exponential()) {
        const ExpSegment& s = exp_segments()[static_cast<std::size_t>(n) - 1];
        return s.rate * s.c2 * std::exp(s.rate * (x - xn)) + s.slope;
    }
    const PowSegment& s = pow_segments()[static_cast<std::size_t>(n) - 1];
    return -s.f_n / (epsilon_ + x) + s.c1;
}

}  // namespace layerfd

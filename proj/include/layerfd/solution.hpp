#pragma once

#include <span>
#include <variant>
#include <vector>

#include "layerfd/mesh.hpp"

namespace layerfd {

/// Interval piece of the exponential-layer reconstruction:
///   V(x) = c1 + c2 * e^{rate (x - x_n)} + slope * x,   rate = a_n / eps.
/// The exponent is always evaluated with x <= x_n, so it never overflows.
struct ExpSegment {
    double c1;
    double c2;
    double slope;
    double rate;
};

/// Interval piece of the power-layer reconstruction:
///   v(x) = -f_n ln(eps + x) + c1 x + c2.
struct PowSegment {
    double f_n;
    double c1;
    double c2;
};

/// Mesh + nodal values + per-interval reconstruction coefficients.
/// Supports evaluation of V(x) and V'(x) anywhere in the domain.
/// At a node the interval ending there is used (one-sided convention);
/// exact node hits return the stored nodal value.
class DiscreteSolution {
public:
    DiscreteSolution(Mesh mesh, std::vector<double> values, std::vector<ExpSegment> segments);
    DiscreteSolution(Mesh mesh, std::vector<double> values, std::vector<PowSegment> segments,
                     double epsilon);

    const Mesh& mesh() const { return mesh_; }
    std::span<const double> values() const { return values_; }

    double value(double x) const;
    double derivative(double x) const;

    /// Evaluate using a specific interval n in 1..N; x may be either
    /// endpoint, which is how one-sided limits at a node are taken.
    double value_on_interval(int n, double x) const;
    double derivative_on_interval(int n, double x) const;

    bool is_exponential() const { return std::holds_alternative<std::vector<ExpSegment>>(segments_); }
    std::span<const ExpSegment> exp_segments() const;
    std::span<const PowSegment> pow_segments() const;

private:
    Mesh mesh_;
    std::vector<double> values_;
    std::variant<std::vector<ExpSegment>, std::vector<PowSegment>> segments_;
    double epsilon_ = 0.0;  // used by the power form only
};

}  // namespace layerfd

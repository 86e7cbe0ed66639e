#pragma once

#include <span>
#include <vector>

namespace layerfd {

/// Strictly increasing node sequence x_0 < x_1 < ... < x_N on [0, length],
/// with x_0 = 0 and x_N assigned to the exact endpoint (never accumulated).
/// Intervals are 1-based: interval n is [x_{n-1}, x_n] with step h_n.
class Mesh {
public:
    /// x_n = n * length / N, last node pinned to length.
    static Mesh uniform(double length, int n_intervals);

    /// Logarithmically equidistributed layer mesh on [0, 1]:
    /// x_n = eps * ((1 + 1/eps)^(n/N) - 1), evaluated through
    /// expm1/log1p so the first steps keep full precision for tiny eps.
    /// Steps grow monotonically; ln((eps+x_n)/(eps+x_{n-1})) is the same
    /// for every interval.
    static Mesh power_layer(double epsilon, int n_intervals);

    /// Wrap an explicit node sequence (validated).
    static Mesh from_nodes(std::vector<double> nodes);

    int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
    double node(int n) const { return nodes_[static_cast<std::size_t>(n)]; }
    double step(int n) const {  // h_n, n in 1..N
        return nodes_[static_cast<std::size_t>(n)] - nodes_[static_cast<std::size_t>(n) - 1];
    }
    double length() const { return nodes_.back(); }
    std::span<const double> nodes() const { return nodes_; }

    /// Interval index for evaluation at x: the smallest n in 1..N with
    /// x <= x_n (so a node belongs to the interval ending at it).
    int interval_containing(double x) const;

private:
    explicit Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
    std::vector<double> nodes_;
};

/// ln((eps + x_n) / (eps + x_{n-1})), n in 1..N, computed via log1p.
double log_ratio(const Mesh& mesh, double epsilon, int n);

}  // namespace layerfd

#include "layerfd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace layerfd {

Mesh Mesh::uniform(double length, int n_intervals) {
    if (!(length > 0.0)) throw std::invalid_argument("mesh length must be positive");
    if (n_intervals < 2) throw std::invalid_argument("mesh needs at least 2 intervals");
    std::vector<double> nodes(static_cast<std::size_t>(n_intervals) + 1);
    for (int n = 0; n <= n_intervals; ++n)
        nodes[static_cast<std::size_t>(n)] = length * n / n_intervals;
    nodes.front() = 0.0;
    nodes.back() = length;
    return Mesh(std::move(nodes));
}

Mesh Mesh::power_layer(double epsilon, int n_intervals) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    if (n_intervals < 2) throw std::invalid_argument("mesh needs at least 2 intervals");
    const double log_base = std::log1p(1.0 / epsilon);  // ln(1 + 1/eps)
    std::vector<double> nodes(static_cast<std::size_t>(n_intervals) + 1);
    for (int n = 0; n <= n_intervals; ++n) {
        double t = static_cast<double>(n) / n_intervals;
        nodes[static_cast<std::size_t>(n)] = epsilon * std::expm1(t * log_base);
    }
    nodes.front() = 0.0;
    nodes.back() = 1.0;
    return Mesh(std::move(nodes));
}

Mesh Mesh::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 3) throw std::invalid_argument("mesh needs at least 2 intervals");
    if (nodes.front() != 0.0) throw std::invalid_argument("mesh must start at 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("mesh nodes must be strictly increasing (node " +
                                        std::to_string(i) + ")");
    return Mesh(std::move(nodes));
}

int Mesh::interval_containing(double x) const {
    if (x < nodes_.front() || x > nodes_.back())
        throw std::out_of_range("point outside mesh domain");
    auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), x);
    int n = static_cast<int>(it - nodes_.begin());
    return std::max(1, std::min(n, intervals()));
}

double log_ratio(const Mesh& mesh, double epsilon, int n) {
    if (n < 1 || n > mesh.intervals()) throw std::out_of_range("interval index out of range");
    return std::log1p(mesh.step(n) / (epsilon + mesh.node(n - 1)));
}

}  // namespace layerfd

#pragma once

#include "vlmrrt/geometry.hpp"

#include <vector>

namespace vlmrrt {

/// Search tree over 2D vertices. Vertex 0 is the root and has no parent;
/// every other vertex keeps exactly one parent link. The parent graph stays
/// acyclic under rewiring and cost_from_root is kept consistent with the
/// parent links at all times.
class Tree {
public:
    explicit Tree(const Point2& root);

    int size() const { return static_cast<int>(vertices_.size()); }
    const Point2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    int parent(int i) const { return parent_[static_cast<std::size_t>(i)]; }
    double cost_from_root(int i) const { return cost_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& children(int i) const { return children_[static_cast<std::size_t>(i)]; }
    bool is_leaf(int i) const { return children_[static_cast<std::size_t>(i)].empty(); }

    /// Appends a vertex attached to `parent`; returns its index.
    int add_vertex(const Point2& p, int parent);

    /// Reattaches vertex `v` under `new_parent` and propagates the cost
    /// change through v's subtree. Caller is responsible for having
    /// collision-checked the new edge.
    void rewire(int v, int new_parent);

    /// Indices of all child-free vertices, ascending. The root qualifies only
    /// when it is the sole vertex.
    std::vector<int> leaves() const;

    /// Vertices within `radius` of `q`, ascending by index.
    std::vector<int> near(const Point2& q, double radius) const;

private:
    std::vector<Point2> vertices_;
    std::vector<int> parent_;
    std::vector<double> cost_;
    std::vector<std::vector<int>> children_;
};

/// Index of the vertex closest to `q` in Euclidean distance; ties go to the
/// lowest index. Linear scan — the scan order is part of the determinism
/// contract.
int nearest_neighbor(const Tree& tree, const Point2& q);

/// Root-to-terminal vertex sequence along parent links, root first.
std::vector<Point2> retrieve_plan(const Tree& tree, int terminal);

}  // namespace vlmrrt

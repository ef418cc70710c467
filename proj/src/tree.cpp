#include "vlmrrt/tree.hpp"

#include <algorithm>
#include <cassert>

namespace vlmrrt {

Tree::Tree(const Point2& root) {
    vertices_.push_back(root);
    parent_.push_back(-1);
    cost_.push_back(0.0);
    children_.emplace_back();
}

int Tree::add_vertex(const Point2& p, int parent) {
    assert(parent >= 0 && parent < size());
    const int idx = size();
    vertices_.push_back(p);
    parent_.push_back(parent);
    cost_.push_back(cost_[static_cast<std::size_t>(parent)] +
                    (p - vertices_[static_cast<std::size_t>(parent)]).norm());
    children_.emplace_back();
    children_[static_cast<std::size_t>(parent)].push_back(idx);
    return idx;
}

void Tree::rewire(int v, int new_parent) {
    assert(v > 0 && new_parent >= 0 && v != new_parent);
    const int old_parent = parent_[static_cast<std::size_t>(v)];
    auto& siblings = children_[static_cast<std::size_t>(old_parent)];
    siblings.erase(std::find(siblings.begin(), siblings.end(), v));
    parent_[static_cast<std::size_t>(v)] = new_parent;
    children_[static_cast<std::size_t>(new_parent)].push_back(v);

    const double new_cost =
        cost_[static_cast<std::size_t>(new_parent)] +
        (vertices_[static_cast<std::size_t>(v)] - vertices_[static_cast<std::size_t>(new_parent)])
            .norm();
    const double delta = new_cost - cost_[static_cast<std::size_t>(v)];

    // Propagate the cost shift through the whole subtree.
    std::vector<int> stack{v};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        cost_[static_cast<std::size_t>(u)] += delta;
        for (int c : children_[static_cast<std::size_t>(u)]) stack.push_back(c);
    }
}

std::vector<int> Tree::leaves() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        if (children_[static_cast<std::size_t>(i)].empty()) out.push_back(i);
    }
    return out;
}

std::vector<int> Tree::near(const Point2& q, double radius) const {
    std::vector<int> out;
    const double r2 = radius * radius;
    for (int i = 0; i < size(); ++i) {
        if ((vertices_[static_cast<std::size_t>(i)] - q).squaredNorm() <= r2) out.push_back(i);
    }
    return out;
}

int nearest_neighbor(const Tree& tree, const Point2& q) {
    assert(tree.size() > 0);
    int best = 0;
    double best_d2 = (tree.vertex(0) - q).squaredNorm();
    for (int i = 1; i < tree.size(); ++i) {
        const double d2 = (tree.vertex(i) - q).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

std::vector<Point2> retrieve_plan(const Tree& tree, int terminal) {
    std::vector<Point2> path;
    for (int v = terminal; v != -1; v = tree.parent(v)) path.push_back(tree.vertex(v));
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace vlmrrt

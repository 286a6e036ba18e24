#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rhcplan/atoms.hpp"

namespace rhcplan {

class non_transition : public std::runtime_error {
public:
    non_transition(std::uint32_t q, std::uint32_t q2)
        : std::runtime_error("no transition " + std::to_string(q) + " -> " +
                             std::to_string(q2)) {}
};

struct DtsEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    double weight = 0.0;
};

/// Weighted finite deterministic transition system. States carry planar
/// coordinates (used for Euclidean transition weights and rendering) and the
/// agent's current label knowledge, which sensing may rewrite over time.
class Dts {
public:
    explicit Dts(AtomSet atoms) : atoms_(std::move(atoms)) {}

    std::uint32_t add_state(double x, double y, LabelMask label = 0) {
        x_.push_back(x);
        y_.push_back(y);
        label_.push_back(label);
        return static_cast<std::uint32_t>(x_.size() - 1);
    }

    /// Adds a transition; weight defaults to the Euclidean distance between
    /// the endpoint coordinates. Weights must be strictly positive.
    void add_edge(std::uint32_t from, std::uint32_t to, double weight = -1.0) {
        check_state(from);
        check_state(to);
        if (weight < 0.0)
            weight = std::hypot(x_[to] - x_[from], y_[to] - y_[from]);
        if (!(weight > 0.0))
            throw std::invalid_argument("transition weight must be positive");
        edges_.push_back({from, to, weight});
    }

    void set_initial(std::uint32_t q) {
        check_state(q);
        initial_ = q;
    }

    void finalize() {
        std::sort(edges_.begin(), edges_.end(), [](const DtsEdge& a, const DtsEdge& b) {
            return a.from != b.from ? a.from < b.from : a.to < b.to;
        });
        edges_.erase(std::unique(edges_.begin(), edges_.end(),
                                 [](const DtsEdge& a, const DtsEdge& b) {
                                     return a.from == b.from && a.to == b.to;
                                 }),
                     edges_.end());
        off_.assign(num_states() + 1, 0);
        for (const auto& e : edges_) off_[e.from + 1]++;
        for (std::size_t i = 1; i < off_.size(); ++i) off_[i] += off_[i - 1];
    }

    std::uint32_t num_states() const { return static_cast<std::uint32_t>(x_.size()); }
    std::uint32_t initial() const { return initial_; }
    const AtomSet& atoms() const { return atoms_; }
    double x(std::uint32_t q) const { return x_[q]; }
    double y(std::uint32_t q) const { return y_[q]; }
    LabelMask label(std::uint32_t q) const { return label_[q]; }
    void set_label(std::uint32_t q, LabelMask l) { label_[q] = l; }
    const std::vector<DtsEdge>& edges() const { return edges_; }
    std::uint32_t out_begin(std::uint32_t q) const { return off_[q]; }
    std::uint32_t out_end(std::uint32_t q) const { return off_[q + 1]; }

    int edge_index(std::uint32_t from, std::uint32_t to) const {
        for (auto i = off_[from]; i < off_[from + 1]; ++i)
            if (edges_[i].to == to) return static_cast<int>(i);
        return -1;
    }

    bool has_edge(std::uint32_t from, std::uint32_t to) const {
        return edge_index(from, to) >= 0;
    }

    // Grid helpers; width/height are zero for hand-built systems.
    std::uint32_t grid_width() const { return grid_w_; }
    std::uint32_t grid_height() const { return grid_h_; }
    void set_grid(std::uint32_t w, std::uint32_t h) {
        grid_w_ = w;
        grid_h_ = h;
    }
    std::uint32_t cell_id(std::uint32_t cx, std::uint32_t cy) const {
        return cy * grid_w_ + cx;
    }

private:
    void check_state(std::uint32_t q) const {
        if (q >= num_states())
            throw std::out_of_range("dts state " + std::to_string(q) + " out of range");
    }

    AtomSet atoms_;
    std::vector<double> x_, y_;
    std::vector<LabelMask> label_;
    std::vector<DtsEdge> edges_;
    std::vector<std::uint32_t> off_;
    std::uint32_t initial_ = 0;
    std::uint32_t grid_w_ = 0, grid_h_ = 0;
};

inline double transition_weight(const Dts& d, std::uint32_t q, std::uint32_t q2) {
    int i = d.edge_index(q, q2);
    if (i < 0) throw non_transition(q, q2);
    return d.edges()[i].weight;
}

/// Unit grid with 4-neighbor moves plus self-loops. Self-loops let the agent
/// wait in place; they carry weight 1 so that every transition stays strictly
/// positive.
inline Dts build_grid_dts(std::uint32_t width, std::uint32_t height,
                          std::uint32_t initial_cell,
                          const std::vector<LabelMask>& labels, const AtomSet& atoms) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("grid dimensions must be at least 1x1");
    if (initial_cell >= width * height)
        throw std::out_of_range("initial cell outside the grid");
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("label table size must match the grid");

    Dts d(atoms);
    d.set_grid(width, height);
    for (std::uint32_t cy = 0; cy < height; ++cy)
        for (std::uint32_t cx = 0; cx < width; ++cx) {
            std::uint32_t q = d.add_state(cx, cy);
            if (!labels.empty()) d.set_label(q, labels[q]);
        }
    for (std::uint32_t cy = 0; cy < height; ++cy)
        for (std::uint32_t cx = 0; cx < width; ++cx) {
            std::uint32_t q = d.cell_id(cx, cy);
            d.add_edge(q, q, 1.0);
            if (cx + 1 < width) {
                d.add_edge(q, d.cell_id(cx + 1, cy));
                d.add_edge(d.cell_id(cx + 1, cy), q);
            }
            if (cy + 1 < height) {
                d.add_edge(q, d.cell_id(cx, cy + 1));
                d.add_edge(d.cell_id(cx, cy + 1), q);
            }
        }
    d.set_initial(initial_cell);
    d.finalize();
    return d;
}

inline int chebyshev(const Dts& d, std::uint32_t a, std::uint32_t b) {
    return static_cast<int>(
        std::max(std::abs(d.x(a) - d.x(b)), std::abs(d.y(a) - d.y(b))));
}

} // namespace rhcplan

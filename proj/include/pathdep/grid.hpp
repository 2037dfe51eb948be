#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace pathdep {

// Finite time grid on [0, horizon]. times[0] == 0, strictly increasing,
// times.back() == horizon. Immutable after construction and normally shared
// between every path of a run through a shared_ptr.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    // uniform grid with step dt; horizon is rounded to an integer number of
    // steps (dt must divide horizon up to 1e-9 relative tolerance)
    static std::shared_ptr<const TimeGrid> uniform(double horizon, double dt);

    std::size_t size() const { return times_.size(); }
    double time(std::size_t k) const { return times_[k]; }
    const std::vector<double>& times() const { return times_; }
    double horizon() const { return times_.back(); }
    double mesh() const { return mesh_; }

    // floor rule: largest k with times[k] <= t (a small tolerance absorbs
    // representation noise in t). Throws std::out_of_range outside [0, T].
    std::size_t index_at(double t) const;

    // index_at restricted to exact nodes; throws std::invalid_argument if t
    // is not a grid node up to tolerance
    std::size_t node_of(double t) const;

    bool is_node(double t) const;
    bool same_as(const TimeGrid& other) const;

private:
    std::vector<double> times_;
    double mesh_ = 0.0;
    bool uniform_ = false;
    double dt_ = 0.0;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

// Non-owning read view over (grid, values); the engine hands these to
// coefficient functionals while a path is still being filled in.
class PathView {
public:
    PathView(const TimeGrid& grid, const double* values, int dim)
        : grid_(&grid), values_(values), dim_(dim) {}

    const TimeGrid& grid() const { return *grid_; }
    int dim() const { return dim_; }
    const double* node(std::size_t k) const { return values_ + k * dim_; }
    double node(std::size_t k, int coord) const {
        return values_[k * dim_ + coord];
    }
    // right-continuous step evaluation
    const double* at(double t) const { return node(grid_->index_at(t)); }
    double at(double t, int coord) const {
        return node(grid_->index_at(t), coord);
    }

private:
    const TimeGrid* grid_;
    const double* values_;
    int dim_;
};

// Piecewise-constant cadlag path on a grid: the value on [t_k, t_{k+1}) is
// values[k], and the value at the horizon is the last node value.
class CadlagPath {
public:
    CadlagPath() = default; // empty sentinel; use only after assignment
    CadlagPath(GridPtr grid, int dim, std::vector<double> values);

    static CadlagPath constant(GridPtr grid, const std::vector<double>& x);

    int dim() const { return dim_; }
    const TimeGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t nodes() const { return grid_->size(); }

    const double* node(std::size_t k) const { return values_.data() + k * dim_; }
    double node(std::size_t k, int coord) const {
        return values_[k * dim_ + coord];
    }
    const std::vector<double>& values() const { return values_; }

    std::vector<double> evaluate(double t) const;
    double evaluate(double t, int coord) const;

    // path stopped at time t: r -> path(r & t); t is floor-snapped to a node
    CadlagPath stopped(double t) const;

    PathView view() const { return PathView(*grid_, values_.data(), dim_); }

    bool operator==(const CadlagPath& other) const;

private:
    GridPtr grid_;
    int dim_ = 0;
    std::vector<double> values_; // nodes * dim, row-major
};

// eta (x)_s omega: eta on [0,s), omega on [s, horizon]. Both paths must live
// on the same grid and s must be a node (floor-snapped).
CadlagPath concat(const CadlagPath& eta, double s, const CadlagPath& omega);

// Starting datum (s, eta). eta is canonicalized to eta^s (constant after s),
// so the pair always represents an element of the start set.
struct InitialCondition {
    double s = 0.0;
    CadlagPath eta;

    static InitialCondition make(double s, const CadlagPath& eta);
    static InitialCondition from_value(double s, const std::vector<double>& x,
                                       GridPtr grid);
};

// CSV path files: header "t,x1,...,xm", one row per grid node.
void write_path_csv(const CadlagPath& path, const std::string& filename);
CadlagPath read_path_csv(const std::string& filename);

} // namespace pathdep

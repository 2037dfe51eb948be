#include "pathdep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pathdep {

namespace {
constexpr double kNodeTol = 1e-9;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2)
        throw std::invalid_argument("TimeGrid: need at least two nodes");
    if (times_.front() != 0.0)
        throw std::invalid_argument("TimeGrid: times[0] must be 0");
    mesh_ = 0.0;
    for (std::size_t k = 1; k < times_.size(); ++k) {
        const double gap = times_[k] - times_[k - 1];
        if (gap <= 0.0)
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
        mesh_ = std::max(mesh_, gap);
    }
    const double dt0 = times_[1] - times_[0];
    uniform_ = true;
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (std::abs((times_[k] - times_[k - 1]) - dt0) > kNodeTol * std::max(1.0, horizon())) {
            uniform_ = false;
            break;
        }
    }
    dt_ = dt0;
}

GridPtr TimeGrid::uniform(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("TimeGrid::uniform: horizon and dt must be positive");
    const double steps_real = horizon / dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real)
        throw std::invalid_argument("TimeGrid::uniform: dt must divide horizon");
    std::vector<double> times(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
        times[k] = (static_cast<double>(k) * horizon) / static_cast<double>(steps);
    times[steps] = horizon;
    return std::make_shared<const TimeGrid>(std::move(times));
}

std::size_t TimeGrid::index_at(double t) const {
    const double tol = kNodeTol * std::max(1.0, horizon());
    if (t < -tol || t > horizon() + tol)
        throw std::out_of_range("TimeGrid: time outside [0, horizon]");
    if (t <= 0.0) return 0;
    if (t >= horizon()) return times_.size() - 1;
    if (uniform_) {
        auto k = static_cast<std::size_t>((t + tol) / dt_);
        if (k >= times_.size()) k = times_.size() - 1;
        // guard against rounding at the cell boundary
        while (k + 1 < times_.size() && times_[k + 1] <= t + tol) ++k;
        while (k > 0 && times_[k] > t + tol) --k;
        return k;
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t + tol);
    return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
}

std::size_t TimeGrid::node_of(double t) const {
    const std::size_t k = index_at(t);
    const double tol = kNodeTol * std::max(1.0, horizon());
    if (std::abs(times_[k] - t) > tol)
        throw std::invalid_argument("TimeGrid: time is not a grid node");
    return k;
}

bool TimeGrid::is_node(double t) const {
    const double tol = kNodeTol * std::max(1.0, horizon());
    if (t < -tol || t > horizon() + tol) return false;
    const std::size_t k = index_at(t);
    return std::abs(times_[k] - t) <= tol;
}

bool TimeGrid::same_as(const TimeGrid& other) const {
    if (this == &other) return true;
    if (times_.size() != other.times_.size()) return false;
    const double tol = kNodeTol * std::max(1.0, horizon());
    for (std::size_t k = 0; k < times_.size(); ++k)
        if (std::abs(times_[k] - other.times_[k]) > tol) return false;
    return true;
}

CadlagPath::CadlagPath(GridPtr grid, int dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("CadlagPath: null grid");
    if (dim_ < 1) throw std::invalid_argument("CadlagPath: dim must be >= 1");
    if (values_.size() != grid_->size() * static_cast<std::size_t>(dim_))
        throw std::invalid_argument("CadlagPath: values size must equal nodes * dim");
}

CadlagPath CadlagPath::constant(GridPtr grid, const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("CadlagPath::constant: empty value");
    const std::size_t n = grid->size();
    std::vector<double> values(n * x.size());
    for (std::size_t k = 0; k < n; ++k)
        std::copy(x.begin(), x.end(), values.begin() + k * x.size());
    return CadlagPath(std::move(grid), static_cast<int>(x.size()), std::move(values));
}

std::vector<double> CadlagPath::evaluate(double t) const {
    const std::size_t k = grid_->index_at(t);
    return std::vector<double>(node(k), node(k) + dim_);
}

double CadlagPath::evaluate(double t, int coord) const {
    return node(grid_->index_at(t), coord);
}

CadlagPath CadlagPath::stopped(double t) const {
    const std::size_t j = grid_->index_at(t);
    std::vector<double> values(values_.size());
    const std::size_t n = grid_->size();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = std::min(k, j);
        std::copy(node(src), node(src) + dim_, values.begin() + k * dim_);
    }
    return CadlagPath(grid_, dim_, std::move(values));
}

bool CadlagPath::operator==(const CadlagPath& other) const {
    return dim_ == other.dim_ && grid_->same_as(*other.grid_) &&
           values_ == other.values_;
}

CadlagPath concat(const CadlagPath& eta, double s, const CadlagPath& omega) {
    if (eta.dim() != omega.dim())
        throw std::invalid_argument("concat: dimension mismatch");
    if (!eta.grid().same_as(omega.grid()))
        throw std::invalid_argument("concat: grid mismatch");
    const std::size_t j = eta.grid().index_at(s);
    std::vector<double> values(omega.values().size());
    const std::size_t n = eta.grid().size();
    const int m = eta.dim();
    for (std::size_t k = 0; k < n; ++k) {
        const double* src = (k < j) ? eta.node(k) : omega.node(k);
        std::copy(src, src + m, values.begin() + k * m);
    }
    return CadlagPath(eta.grid_ptr(), m, std::move(values));
}

InitialCondition InitialCondition::make(double s, const CadlagPath& eta) {
    const std::size_t j = eta.grid().index_at(s);
    return InitialCondition{eta.grid().time(j), eta.stopped(eta.grid().time(j))};
}

InitialCondition InitialCondition::from_value(double s, const std::vector<double>& x,
                                              GridPtr grid) {
    return make(s, CadlagPath::constant(std::move(grid), x));
}

void write_path_csv(const CadlagPath& path, const std::string& filename) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw std::runtime_error("write_path_csv: cannot open " + filename);
    out << "t";
    for (int d = 1; d <= path.dim(); ++d) out << ",x" << d;
    out << "\n";
    char buf[32];
    for (std::size_t k = 0; k < path.nodes(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", path.grid().time(k));
        out << buf;
        for (int d = 0; d < path.dim(); ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", path.node(k, d));
            out << ',' << buf;
        }
        out << "\n";
    }
}

CadlagPath read_path_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("read_path_csv: cannot open " + filename);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_path_csv: empty file " + filename);
    // header: t,x1,...,xm
    int dim = 0;
    {
        std::stringstream ss(line);
        std::string tok;
        if (!std::getline(ss, tok, ',') || tok != "t")
            throw std::runtime_error("read_path_csv: bad header in " + filename);
        while (std::getline(ss, tok, ',')) ++dim;
        if (dim < 1)
            throw std::runtime_error("read_path_csv: no value columns in " + filename);
    }
    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        if (!std::getline(ss, tok, ','))
            throw std::runtime_error("read_path_csv: bad row in " + filename);
        times.push_back(std::stod(tok));
        for (int d = 0; d < dim; ++d) {
            if (!std::getline(ss, tok, ','))
                throw std::runtime_error("read_path_csv: short row in " + filename);
            values.push_back(std::stod(tok));
        }
    }
    auto grid = std::make_shared<const TimeGrid>(std::move(times));
    return CadlagPath(std::move(grid), dim, std::move(values));
}

} // namespace pathdep

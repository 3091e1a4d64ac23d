#pragma once
// Finite point sets in R^d (row-major storage) and their plain-text exchange
// format: one point per line, d whitespace-separated coordinates, everything
// after '#' ignored.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tailbound {

class PointSet {
  public:
    PointSet(std::size_t n, std::size_t d, std::vector<double> coords)
        : n_(n), d_(d), coords_(std::move(coords)) {
        if (n_ == 0 || d_ == 0)
            throw std::invalid_argument("PointSet: n and d must be positive");
        if (coords_.size() != n_ * d_)
            throw std::invalid_argument("PointSet: expected n*d coordinates");
        for (double c : coords_)
            if (!std::isfinite(c)) throw std::invalid_argument("PointSet: coordinates must be finite");
    }

    static PointSet from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw std::invalid_argument("PointSet: need at least one point");
        const std::size_t d = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * d);
        for (const auto& row : rows) {
            if (row.size() != d)
                throw std::invalid_argument("PointSet: rows must all have the same dimension");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return PointSet(rows.size(), d, std::move(flat));
    }

    std::size_t size() const { return n_; }
    std::size_t dimension() const { return d_; }

    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * d_, d_}; }
    double coord(std::size_t i, std::size_t j) const { return coords_[i * d_ + j]; }
    std::span<const double> flat() const { return coords_; }

  private:
    std::size_t n_, d_;
    std::vector<double> coords_;
};

inline PointSet read_points(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> row;
        double x = 0.0;
        while (fields >> x) row.push_back(x);
        if (!fields.eof()) {
            std::ostringstream msg;
            msg << "read_points: malformed coordinate on line " << lineno;
            throw std::invalid_argument(msg.str());
        }
        if (row.empty()) continue;  // blank or comment-only line
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream msg;
            msg << "read_points: line " << lineno << " has " << row.size() << " coordinates, expected "
                << rows.front().size();
            throw std::invalid_argument(msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("read_points: no points found");
    return PointSet::from_rows(rows);
}

inline PointSet read_points_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_points_file: cannot open " + path);
    return read_points(in);
}

inline void write_points(const PointSet& points, std::ostream& out) {
    out.precision(17);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points.point(i);
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out << ' ';
            out << p[j];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_points: output stream failed");
}

}  // namespace tailbound

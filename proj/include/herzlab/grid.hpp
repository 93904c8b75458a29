#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <vector>

#include "herzlab/common.hpp"

namespace herzlab {

/// Sampled function on a uniform grid, n in {1, 2}. Row-major storage; sample
/// (i, j) sits at (origin[0] + i h, origin[1] + j h).
class GridFunction {
public:
    GridFunction(int dim, std::array<std::size_t, 2> dims, std::array<double, 2> origin, double h)
        : dim_(dim), dims_(dims), origin_(origin), h_(h) {
        if (dim != 1 && dim != 2) throw std::invalid_argument("GridFunction: n must be 1 or 2");
        if (!(h > 0.0)) throw std::invalid_argument("GridFunction: spacing must be > 0");
        if (dim == 1) dims_[1] = 1;
        if (dims_[0] < 4 || (dim == 2 && dims_[1] < 4))
            throw std::invalid_argument("GridFunction: need at least 4 samples per axis");
        samples_.assign(dims_[0] * dims_[1], 0.0);
    }

    static GridFunction sample_1d(double origin, double h, std::size_t n,
                                  const std::function<double(double)>& f) {
        GridFunction g(1, {n, 1}, {origin, 0.0}, h);
        for (std::size_t i = 0; i < n; ++i) g.samples_[i] = f(origin + double(i) * h);
        return g;
    }

    static GridFunction sample_2d(std::array<double, 2> origin, double h, std::size_t n0,
                                  std::size_t n1, const std::function<double(double, double)>& f) {
        GridFunction g(2, {n0, n1}, origin, h);
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j)
                g.samples_[i * n1 + j] = f(origin[0] + double(i) * h, origin[1] + double(j) * h);
        return g;
    }

    int dimension() const { return dim_; }
    std::size_t size(int axis) const { return dims_[axis]; }
    double spacing() const { return h_; }
    double origin(int axis) const { return origin_[axis]; }
    double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

    double& at(std::size_t i, std::size_t j = 0) { return samples_[i * dims_[1] + j]; }
    double at(std::size_t i, std::size_t j = 0) const { return samples_[i * dims_[1] + j]; }
    double coordinate(int axis, std::size_t idx) const { return origin_[axis] + double(idx) * h_; }
    const std::vector<double>& samples() const { return samples_; }
    std::vector<double>& samples() { return samples_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : samples_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest |sample| on the outermost layer of the grid.
    double boundary_max_abs() const {
        double m = 0.0;
        const std::size_t n0 = dims_[0], n1 = dims_[1];
        for (std::size_t j = 0; j < n1; ++j)
            m = std::max({m, std::abs(at(0, j)), std::abs(at(n0 - 1, j))});
        if (dim_ == 2)
            for (std::size_t i = 0; i < n0; ++i)
                m = std::max({m, std::abs(at(i, 0)), std::abs(at(i, n1 - 1))});
        return m;
    }

    // --- serialization: little-endian 64-bit header (n, dims, origin, h), then samples ---

    void write_binary(std::ostream& os) const {
        write_u64(os, std::uint64_t(dim_));
        for (int a = 0; a < dim_; ++a) write_u64(os, std::uint64_t(dims_[a]));
        for (int a = 0; a < dim_; ++a) write_f64(os, origin_[a]);
        write_f64(os, h_);
        for (double v : samples_) write_f64(os, v);
    }

    void write_binary_file(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open for write: " + path);
        write_binary(os);
    }

    static GridFunction read_binary(std::istream& is) {
        const auto dim = int(read_u64(is));
        if (dim != 1 && dim != 2) throw std::runtime_error("GridFunction: bad dimension in stream");
        std::array<std::size_t, 2> dims{1, 1};
        for (int a = 0; a < dim; ++a) dims[a] = std::size_t(read_u64(is));
        std::array<double, 2> origin{0.0, 0.0};
        for (int a = 0; a < dim; ++a) origin[a] = read_f64(is);
        const double h = read_f64(is);
        GridFunction g(dim, dims, origin, h);
        for (double& v : g.samples_) v = read_f64(is);
        if (!is) throw std::runtime_error("GridFunction: truncated stream");
        return g;
    }

    static GridFunction read_binary_file(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open for read: " + path);
        return read_binary(is);
    }

    void write_csv(std::ostream& os) const {
        os << std::setprecision(17);
        if (dim_ == 1) {
            os << "x,value\n";
            for (std::size_t i = 0; i < dims_[0]; ++i)
                os << coordinate(0, i) << "," << at(i) << "\n";
        } else {
            os << "x,y,value\n";
            for (std::size_t i = 0; i < dims_[0]; ++i)
                for (std::size_t j = 0; j < dims_[1]; ++j)
                    os << coordinate(0, i) << "," << coordinate(1, j) << "," << at(i, j) << "\n";
        }
    }

private:
    static void write_u64(std::ostream& os, std::uint64_t v) {
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = (unsigned char)((v >> (8 * i)) & 0xff);
        os.write(reinterpret_cast<const char*>(buf), 8);
    }
    static void write_f64(std::ostream& os, double d) {
        std::uint64_t v;
        std::memcpy(&v, &d, 8);
        write_u64(os, v);
    }
    static std::uint64_t read_u64(std::istream& is) {
        unsigned char buf[8];
        is.read(reinterpret_cast<char*>(buf), 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
        return v;
    }
    static double read_f64(std::istream& is) {
        const std::uint64_t v = read_u64(is);
        double d;
        std::memcpy(&d, &v, 8);
        return d;
    }

    int dim_;
    std::array<std::size_t, 2> dims_;
    std::array<double, 2> origin_;
    double h_;
    std::vector<double> samples_;
};

} // namespace herzlab

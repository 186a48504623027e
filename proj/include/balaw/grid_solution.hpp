#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "balaw/common.hpp"

namespace balaw {

/// Uniformly sampled solution slices u(t_k, ·) on a periodic box, values in
/// [0,1]. Cell-centered storage, row-major with the last axis fastest.
struct GridSolution {
    int d = 1;
    std::array<int, 3> shape{1, 1, 1};        // cells per axis; axes >= d unused (1)
    std::array<double, 3> extent{1.0, 1.0, 1.0};
    double dx = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> slices;  // one array per time, size prod(shape)

    std::size_t cells() const {
        std::size_t n = 1;
        for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(shape[a]);
        return n;
    }

    std::size_t index(std::span<const int> idx) const {
        std::size_t lin = 0;
        for (int a = 0; a < d; ++a) lin = lin * shape[a] + static_cast<std::size_t>(idx[a]);
        return lin;
    }

    static int wrap(int i, int n) {
        int r = i % n;
        return r < 0 ? r + n : r;
    }

    double cell_center(int /*axis*/, int i) const { return (i + 0.5) * dx; }

    /// Nearest cell index along an axis for a physical coordinate (periodic).
    int cell_of(int axis, double x) const {
        int i = static_cast<int>(std::floor(x / dx));
        return wrap(i, shape[axis]);
    }

    double value(int t_index, std::span<const int> idx) const {
        return slices[t_index][index(idx)];
    }

    int time_index(double t) const {
        double dt_tol = 1e-9 + (times.size() > 1 ? 0.5 * min_time_gap() : 0.0);
        for (std::size_t k = 0; k < times.size(); ++k)
            if (std::abs(times[k] - t) <= dt_tol) return static_cast<int>(k);
        throw numeric_error("GridSolution: no stored slice near t = " + std::to_string(t));
    }

    void validate() const {
        if (d < 1 || d > 3) throw std::invalid_argument("GridSolution: d must be 1..3");
        if (dx <= 0.0) throw std::invalid_argument("GridSolution: dx must be positive");
        for (int a = 0; a < d; ++a) {
            if (shape[a] < 1) throw std::invalid_argument("GridSolution: empty axis");
            if (std::abs(shape[a] * dx - extent[a]) > 1e-9 * (1.0 + extent[a]))
                throw std::invalid_argument("GridSolution: extent inconsistent with shape * dx");
        }
        if (times.size() != slices.size())
            throw std::invalid_argument("GridSolution: times/slices length mismatch");
        for (const auto& s : slices) {
            if (s.size() != cells())
                throw std::invalid_argument("GridSolution: slice size mismatch");
            for (double u : s)
                if (!(u >= -1e-12 && u <= 1.0 + 1e-12))
                    throw std::invalid_argument("GridSolution: value outside [0,1]");
        }
    }

private:
    double min_time_gap() const {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < times.size(); ++k)
            g = std::min(g, std::abs(times[k] - times[k - 1]));
        return std::isfinite(g) ? g : 1.0;
    }
};

namespace io {

inline constexpr char kMagic[4] = {'B', 'L', 'A', 'W'};
inline constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("solution file truncated");
    return v;
}

/// Binary layout: magic, version, u32 d, u32 shape[d], f64 extent[d],
/// f64 dx, u32 n_times, f64 times[n_times], then row-major f64 slices.
inline void write_solution(const std::string& path, const GridSolution& sol) {
    sol.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(kMagic, 4);
    write_raw(os, kVersion);
    write_raw(os, static_cast<std::uint32_t>(sol.d));
    for (int a = 0; a < sol.d; ++a) write_raw(os, static_cast<std::uint32_t>(sol.shape[a]));
    for (int a = 0; a < sol.d; ++a) write_raw(os, sol.extent[a]);
    write_raw(os, sol.dx);
    write_raw(os, static_cast<std::uint32_t>(sol.times.size()));
    for (double t : sol.times) write_raw(os, t);
    for (const auto& s : sol.slices)
        os.write(reinterpret_cast<const char*>(s.data()),
                 static_cast<std::streamsize>(s.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline GridSolution read_solution(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a solution file: " + path);
    auto version = read_raw<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("unsupported solution format version " + std::to_string(version));
    GridSolution sol;
    sol.d = static_cast<int>(read_raw<std::uint32_t>(is));
    if (sol.d < 1 || sol.d > 3) throw std::runtime_error("corrupt solution file: bad dimension");
    for (int a = 0; a < sol.d; ++a) sol.shape[a] = static_cast<int>(read_raw<std::uint32_t>(is));
    for (int a = 0; a < sol.d; ++a) sol.extent[a] = read_raw<double>(is);
    sol.dx = read_raw<double>(is);
    auto n_times = read_raw<std::uint32_t>(is);
    sol.times.resize(n_times);
    for (auto& t : sol.times) t = read_raw<double>(is);
    sol.slices.assign(n_times, std::vector<double>(sol.cells()));
    for (auto& s : sol.slices) {
        is.read(reinterpret_cast<char*>(s.data()),
                static_cast<std::streamsize>(s.size() * sizeof(double)));
        if (!is) throw std::runtime_error("solution file truncated: " + path);
    }
    sol.validate();
    return sol;
}

}  // namespace io
}  // namespace balaw

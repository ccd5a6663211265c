#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace dipde {

/// Row-major time x space field; row k is the snapshot at t[k].
using Field = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TrajectoryMeta {
    std::string system;
    std::map<std::string, double> parameters;
    std::uint64_t ic_seed = 0;
    double noise_sigma = 0.0;  // relative to std(u)
    std::uint64_t noise_seed = 0;
};

/// Samples u(x, t) on a uniform periodic x grid and a uniform t grid.
struct TrajectoryGrid {
    Eigen::ArrayXd x;  // x[i] = i * L / Nx
    Eigen::ArrayXd t;
    Field u;           // Nt x Nx
    double length = 0.0;
    TrajectoryMeta meta;

    int nx() const { return static_cast<int>(x.size()); }
    int nt() const { return static_cast<int>(t.size()); }
    double dx() const { return length / nx(); }
    double dt() const { return nt() > 1 ? t[1] - t[0] : 0.0; }

    /// Throws std::invalid_argument on shape mismatch or non-finite data.
    void validate(bool strict_sizes = true) const;
};

/// Add i.i.d. N(0, (sigma * std(u))^2) noise in place; records it in meta.
void add_noise(TrajectoryGrid& traj, double sigma, std::uint64_t seed);

}  // namespace dipde

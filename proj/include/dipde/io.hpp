#pragma once

#include <string>
#include <vector>

#include "dipde/trajectory.hpp"

namespace dipde {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

/// DIR/manifest (JSON) plus DIR/traj_<k>.csv with header t,x0,x1,... and one
/// row per time sample. All trajectories must share the x grid.
void write_dataset(const std::string& dir, const std::vector<TrajectoryGrid>& trajs);
std::vector<TrajectoryGrid> read_dataset(const std::string& dir);

}  // namespace dipde

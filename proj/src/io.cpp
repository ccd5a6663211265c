#include "dipde/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace dipde {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw IoError("not a number: '" + std::string(s) + "'");
    return v;
}

namespace {

std::string csv_path(const std::string& dir, std::size_t k) {
    return (fs::path(dir) / ("traj_" + std::to_string(k) + ".csv")).string();
}

}  // namespace

void write_dataset(const std::string& dir, const std::vector<TrajectoryGrid>& trajs) {
    if (trajs.empty()) throw IoError("empty dataset");
    fs::create_directories(dir);
    json m;
    m["count"] = trajs.size();
    m["nx"] = trajs[0].nx();
    m["length"] = trajs[0].length;
    json items = json::array();
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const auto& tr = trajs[k];
        if (tr.nx() != trajs[0].nx() || tr.length != trajs[0].length) throw IoError("trajectories use different x grids");
        items.push_back({{"file", "traj_" + std::to_string(k) + ".csv"},
                         {"system", tr.meta.system},
                         {"parameters", tr.meta.parameters},
                         {"nt", tr.nt()},
                         {"ic_seed", tr.meta.ic_seed},
                         {"noise_sigma", tr.meta.noise_sigma},
                         {"noise_seed", tr.meta.noise_seed}});
        std::ofstream os(csv_path(dir, k));
        if (!os) throw IoError("cannot write " + csv_path(dir, k));
        os << 't';
        for (int i = 0; i < tr.nx(); ++i) os << ",x" << i;
        os << '\n';
        for (int r = 0; r < tr.nt(); ++r) {
            os << format_double(tr.t[r]);
            for (int i = 0; i < tr.nx(); ++i) os << ',' << format_double(tr.u(r, i));
            os << '\n';
        }
    }
    m["trajectories"] = items;
    std::ofstream(fs::path(dir) / "manifest") << m.dump(2) << '\n';
}

std::vector<TrajectoryGrid> read_dataset(const std::string& dir) {
    std::ifstream mf(fs::path(dir) / "manifest");
    if (!mf) throw IoError("no manifest in " + dir);
    json m;
    try {
        m = json::parse(mf);
    } catch (const json::exception& e) {
        throw IoError(std::string("bad manifest: ") + e.what());
    }
    const int nx = m.at("nx").get<int>();
    const double length = m.at("length").get<double>();
    std::vector<TrajectoryGrid> out;
    for (const auto& item : m.at("trajectories")) {
        TrajectoryGrid tr;
        tr.length = length;
        tr.x = Eigen::ArrayXd::LinSpaced(nx, 0.0, nx - 1.0) * (length / nx);
        tr.meta.system = item.value("system", "");
        if (item.contains("parameters"))
            tr.meta.parameters = item["parameters"].get<std::map<std::string, double>>();
        tr.meta.ic_seed = item.value("ic_seed", std::uint64_t{0});
        tr.meta.noise_sigma = item.value("noise_sigma", 0.0);
        tr.meta.noise_seed = item.value("noise_seed", std::uint64_t{0});
        const int nt = item.at("nt").get<int>();
        const std::string path = (fs::path(dir) / item.at("file").get<std::string>()).string();
        std::ifstream in(path);
        if (!in) throw IoError("cannot read " + path);
        std::string line;
        std::getline(in, line);
        if (std::count(line.begin(), line.end(), ',') != nx) throw IoError(path + ": header does not match nx");
        tr.t.resize(nt);
        tr.u.resize(nt, nx);
        for (int r = 0; r < nt; ++r) {
            if (!std::getline(in, line)) throw IoError(path + ": expected " + std::to_string(nt) + " rows");
            std::string_view sv(line);
            for (int c = 0; c <= nx; ++c) {
                const auto comma = sv.find(',');
                if ((comma == std::string_view::npos) != (c == nx)) throw IoError(path + ": bad column count");
                const double v = parse_double(sv.substr(0, comma));
                if (c == 0)
                    tr.t[r] = v;
                else
                    tr.u(r, c - 1) = v;
                if (comma != std::string_view::npos) sv.remove_prefix(comma + 1);
            }
        }
        out.push_back(std::move(tr));
    }
    return out;
}

}  // namespace dipde

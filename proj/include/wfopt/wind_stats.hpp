#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfopt {

// One observation of wind speed (m/s) and meteorological direction (degrees).
struct WindRecord {
    double speed = 0.0;      // >= 0
    double direction = 0.0;  // in [0, 360)
};

// Discretized joint probability mass p(v, theta) on the integer grid
// v in {0..v_max}, theta in {0..359}. Entries sum to 1.
struct WindDistribution {
    int v_max = 25;
    std::vector<double> table;   // (v_max + 1) * 360, row-major in v
    Eigen::Matrix2d bandwidth;   // KDE bandwidth matrix H

    double at(int v, int theta) const { return table[static_cast<std::size_t>(v) * 360 + theta]; }
    double& at(int v, int theta) { return table[static_cast<std::size_t>(v) * 360 + theta]; }
    std::size_t cells() const { return table.size(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim whitespace and CR
        const auto b = field.find_first_not_of(" \t\r\n");
        const auto e = field.find_last_not_of(" \t\r\n");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace detail

// Reads wind records from a headered CSV. Only the two named columns are
// consumed; other columns are ignored. Throws on a missing file or column,
// an unparseable row, an invariant violation, or fewer than 2 valid rows.
inline std::vector<WindRecord> load_wind_csv(const std::filesystem::path& path,
                                             const std::string& speed_column = "wind_speed",
                                             const std::string& direction_column = "wind_direction") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("wind csv: cannot open file " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("wind csv: empty file " + path.string());

    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t speed_idx = -1, dir_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == speed_column) speed_idx = static_cast<std::ptrdiff_t>(i);
        if (header[i] == direction_column) dir_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (speed_idx < 0)
        throw std::runtime_error("wind csv: missing column '" + speed_column + "'");
    if (dir_idx < 0)
        throw std::runtime_error("wind csv: missing column '" + direction_column + "'");

    std::vector<WindRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        const auto need = static_cast<std::size_t>(std::max(speed_idx, dir_idx));
        if (fields.size() <= need)
            throw std::runtime_error("wind csv: row " + std::to_string(row) + " has too few fields");
        WindRecord rec;
        try {
            rec.speed = std::stod(fields[static_cast<std::size_t>(speed_idx)]);
            rec.direction = std::stod(fields[static_cast<std::size_t>(dir_idx)]);
        } catch (const std::exception&) {
            throw std::runtime_error("wind csv: row " + std::to_string(row) + " does not parse as numbers");
        }
        if (!(rec.speed >= 0.0))
            throw std::runtime_error("wind csv: row " + std::to_string(row) + " has negative wind speed");
        if (!(rec.direction >= 0.0 && rec.direction < 360.0))
            throw std::runtime_error("wind csv: row " + std::to_string(row) +
                                     " has direction outside [0, 360)");
        records.push_back(rec);
    }
    if (records.size() < 2)
        throw std::runtime_error("wind csv: need at least 2 valid rows, got " +
                                 std::to_string(records.size()));
    return records;
}

// Fits a bivariate Gaussian KDE with Scott's-rule bandwidth
// (factor n^(-1/(d+4)), d = 2, applied to the sample covariance), evaluates
// it on the integer (v, theta) grid and renormalizes the table to sum to 1.
//
// `covariance_jitter` is added to the diagonal of the sample covariance
// before scaling; needed when the sample covariance is rank-deficient.
inline WindDistribution fit_distribution(const std::vector<WindRecord>& records, int v_max,
                                         double covariance_jitter = 0.0) {
    if (records.size() < 2)
        throw std::invalid_argument("kde: need at least 2 records");
    if (v_max < 1) throw std::invalid_argument("kde: v_max must be >= 1");

    const std::size_t n = records.size();
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& r : records) mean += Eigen::Vector2d(r.speed, r.direction);
    mean /= static_cast<double>(n);

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& r : records) {
        const Eigen::Vector2d d = Eigen::Vector2d(r.speed, r.direction) - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(n - 1);
    cov += covariance_jitter * Eigen::Matrix2d::Identity();

    // Scott's rule: H = cov * n^(-2/(d+4)), d = 2.
    const double factor = std::pow(static_cast<double>(n), -1.0 / 6.0);
    Eigen::Matrix2d H = cov * (factor * factor);

    const Eigen::LLT<Eigen::Matrix2d> llt(H);
    const double det = H.determinant();
    if (llt.info() != Eigen::Success || !(det > 0.0))
        throw std::runtime_error(
            "kde: sample covariance is rank-deficient; add covariance jitter or more varied data");
    const Eigen::Matrix2d Hinv = H.inverse();
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));

    WindDistribution dist;
    dist.v_max = v_max;
    dist.bandwidth = H;
    dist.table.assign(static_cast<std::size_t>(v_max + 1) * 360, 0.0);

    double total = 0.0;
    for (int v = 0; v <= v_max; ++v) {
        for (int theta = 0; theta < 360; ++theta) {
            double density = 0.0;
            for (const auto& r : records) {
                const Eigen::Vector2d d(v - r.speed, theta - r.direction);
                density += std::exp(-0.5 * d.dot(Hinv * d));
            }
            density *= norm / static_cast<double>(n);
            dist.at(v, theta) = density;
            total += density;
        }
    }
    if (!(total > 0.0))
        throw std::runtime_error("kde: density vanishes on the whole grid; check v_max and data range");
    for (double& p : dist.table) p /= total;
    return dist;
}

// Flat (v, theta, probability) table, one triple per line, '#' comments.
inline void save_distribution(const WindDistribution& dist, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("distribution: cannot write " + path.string());
    out << "# v theta probability\n";
    char buf[96];
    for (int v = 0; v <= dist.v_max; ++v)
        for (int theta = 0; theta < 360; ++theta) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", v, theta, dist.at(v, theta));
            out << buf;
        }
}

inline WindDistribution load_distribution(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("distribution: cannot open " + path.string());
    struct Cell { int v, theta; double p; };
    std::vector<Cell> cells;
    int v_max = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Cell c{};
        if (!(ss >> c.v >> c.theta >> c.p))
            throw std::runtime_error("distribution: malformed line in " + path.string());
        if (c.v < 0 || c.theta < 0 || c.theta >= 360 || c.p < 0.0)
            throw std::runtime_error("distribution: invalid cell in " + path.string());
        v_max = std::max(v_max, c.v);
        cells.push_back(c);
    }
    if (cells.empty()) throw std::runtime_error("distribution: no cells in " + path.string());

    WindDistribution dist;
    dist.v_max = v_max;
    dist.bandwidth = Eigen::Matrix2d::Zero();
    dist.table.assign(static_cast<std::size_t>(v_max + 1) * 360, 0.0);
    double total = 0.0;
    for (const auto& c : cells) {
        dist.at(c.v, c.theta) = c.p;
        total += c.p;
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw std::runtime_error("distribution: table does not sum to 1 in " + path.string());
    return dist;
}

}  // namespace wfopt

#include "catforge/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace catforge {

TrajectoryRecord::TrajectoryRecord(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void TrajectoryRecord::append(Row row) {
    if (row.size() != columns_.size()) {
        throw std::invalid_argument("TrajectoryRecord::append: row width does not match header");
    }
    rows_.push_back(std::move(row));
}

std::size_t TrajectoryRecord::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("TrajectoryRecord: no column named " + name);
}

std::vector<double> TrajectoryRecord::column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
        out.push_back(row[idx].value_or(std::numeric_limits<double>::quiet_NaN()));
    }
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) {
        value = 0.0; // drop the sign of -0
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void TrajectoryRecord::write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out << (i ? "," : "") << columns_[i];
    }
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (row[i]) out << format_number(*row[i]);
        }
        out << '\n';
    }
}

} // namespace catforge

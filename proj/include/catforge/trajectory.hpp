#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace catforge {

/// Time series of named observables. Missing values are written as empty
/// CSV fields.
class TrajectoryRecord {
public:
    using Row = std::vector<std::optional<double>>;

    explicit TrajectoryRecord(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<Row>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    void append(Row row);

    /// Index of a column; throws std::out_of_range for unknown names.
    std::size_t column_index(const std::string& name) const;

    /// Values of one column (missing entries become NaN).
    std::vector<double> column(const std::string& name) const;

    void write_csv(std::ostream& out) const;

private:
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
};

/// Fixed-format number used by every CSV writer: 12 significant digits.
std::string format_number(double value);

} // namespace catforge

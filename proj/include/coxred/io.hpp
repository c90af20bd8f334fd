#pragma once

#include "coxred/types.hpp"

#include <string>
#include <vector>

namespace coxred::io {

/// Raw numeric table with its header.
struct Table {
    std::vector<std::string> header;
    Matrix values;  ///< rows x columns, as parsed
};

/// Parses comma-separated text with a header row. Blank trailing lines are
/// ignored. Rows and columns in error messages are 1-based; row 1 is the header.
Table parse_csv(const std::string& text);
Table read_csv(const std::string& path);

/// Shortest text that parses back to the same doubles.
std::string format_csv(const std::vector<std::string>& header, const Matrix& values);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Response and covariates after centring.
struct DataSet {
    std::string response_name;
    std::vector<std::string> covariate_names;
    Vector y;  ///< centred
    Matrix x;  ///< column-centred
    double y_mean = 0.0;
    Vector x_means;
    IndexSet constant_columns;  ///< zero sample variance; kept out of the arrangement

    std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(x.cols()); }
};

/// Splits off the response (`response` names it; empty means the first
/// column) and centres everything.
DataSet make_dataset(const Table& table, const std::string& response = {});
DataSet ingest(const std::string& path, const std::string& response = {});

/// Column index of `name` in covariate order, or -1.
int covariate_index(const DataSet& data, const std::string& name);

}  // namespace coxred::io

#include "coxred/io.hpp"

#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace coxred::io {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                             : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& cell, double& value) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

}  // namespace

Table parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> lines;
    std::vector<std::size_t> line_numbers;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        lines.push_back(split_line(line));
        line_numbers.push_back(number);
    }
    if (lines.empty()) throw DataError("input has no header row");

    Table t;
    t.header = lines.front();
    const std::size_t cols = t.header.size();
    for (std::size_t c = 0; c < cols; ++c)
        if (t.header[c].empty()) throw ParseError("empty column name", line_numbers.front(), c + 1);

    t.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& cells = lines[r];
        if (cells.size() != cols)
            throw ParseError("expected " + std::to_string(cols) + " cells, found " + std::to_string(cells.size()),
                             line_numbers[r], std::min(cells.size(), cols) + 1);
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v))
                throw ParseError("non-numeric cell '" + cells[c] + "' in column '" + t.header[c] + "'",
                                 line_numbers[r], c + 1);
            t.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return t;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
    if (!out) throw DataError("write to '" + path + "' failed");
}

Table read_csv(const std::string& path) { return parse_csv(read_text(path)); }

std::string format_csv(const std::vector<std::string>& header, const Matrix& values) {
    if (static_cast<Eigen::Index>(header.size()) != values.cols())
        throw DataError("header width differs from column count");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c) out += ',';
            const auto res = std::to_chars(buf, buf + sizeof buf, values(r, c));
            out.append(buf, res.ptr);
        }
        out += '\n';
    }
    return out;
}

DataSet make_dataset(const Table& table, const std::string& response) {
    const auto cols = static_cast<Eigen::Index>(table.header.size());
    if (cols < 2) throw DataError("need a response and at least one covariate");
    if (table.values.rows() < 2) throw DataError("need at least two observations");
    Eigen::Index ry = 0;
    if (!response.empty()) {
        ry = -1;
        for (Eigen::Index c = 0; c < cols; ++c)
            if (table.header[static_cast<std::size_t>(c)] == response) ry = c;
        if (ry < 0) throw ConfigError("response column '" + response + "' not found");
    }
    DataSet d;
    d.response_name = table.header[static_cast<std::size_t>(ry)];
    Matrix x(table.values.rows(), cols - 1);
    for (Eigen::Index c = 0, j = 0; c < cols; ++c) {
        if (c == ry) continue;
        d.covariate_names.push_back(table.header[static_cast<std::size_t>(c)]);
        x.col(j++) = table.values.col(c);
    }
    const auto cy = linalg::centre(Vector(table.values.col(ry)));
    const auto cx = linalg::centre(x);
    d.y = cy.values;
    d.y_mean = cy.mean;
    d.x = cx.values;
    d.x_means = cx.means;
    for (Eigen::Index j = 0; j < d.x.cols(); ++j)
        if ((x.col(j).array() == x(0, j)).all()) {
            d.constant_columns.push_back(static_cast<int>(j));
            d.x.col(j).setZero();
        }
    return d;
}

DataSet ingest(const std::string& path, const std::string& response) { return make_dataset(read_csv(path), response); }

int covariate_index(const DataSet& data, const std::string& name) {
    for (std::size_t j = 0; j < data.covariate_names.size(); ++j)
        if (data.covariate_names[j] == name) return static_cast<int>(j);
    return -1;
}

}  // namespace coxred::io

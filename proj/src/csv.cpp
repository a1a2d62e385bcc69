#include "seqlasso/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "seqlasso/error.hpp"

namespace seqlasso {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    s = s.substr(b, e - b);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Index CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<Index>(i);
    return -1;
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line) && blank(line)) {}
    if (blank(line)) throw Error(ErrorCode::Io, "csv: missing header row");
    t.header = split(line);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i].empty())
            throw Error(ErrorCode::Io, "csv: empty column name at position " + std::to_string(i + 1));
        if (!seen.insert(t.header[i]).second)
            throw Error(ErrorCode::DuplicateHeader, "duplicate header: " + t.header[i],
                        static_cast<std::ptrdiff_t>(i));
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw Error(ErrorCode::Io, "csv: line " + std::to_string(lineno) + " has " +
                                           std::to_string(cells.size()) + " fields, expected " +
                                           std::to_string(t.header.size()));
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            if (!parse_double(cells[j], row[j]))
                throw Error(ErrorCode::NonNumericColumn,
                            "non-numeric value '" + cells[j] + "' in column " + t.header[j] +
                                " (line " + std::to_string(lineno) + ")",
                            static_cast<std::ptrdiff_t>(j));
        rows.push_back(std::move(row));
    }
    t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t j = 0; j < table.header.size(); ++j)
        out << (j ? "," : "") << table.header[j];
    out << '\n';
    char buf[40];
    for (Index i = 0; i < table.values.rows(); ++i) {
        for (Index j = 0; j < table.values.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", table.values(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

LabeledData split_response(const CsvTable& table, const std::string& response) {
    const Index r = table.column(response);
    if (r < 0) throw Error(ErrorCode::MissingColumn, "response column not found: " + response);
    LabeledData d;
    d.response = response;
    d.y = table.values.col(r);
    d.x.resize(table.values.rows(), table.values.cols() - 1);
    Index k = 0;
    for (Index j = 0; j < table.values.cols(); ++j) {
        if (j == r) continue;
        d.x.col(k++) = table.values.col(j);
        d.feature_names.push_back(table.header[static_cast<std::size_t>(j)]);
    }
    return d;
}

CsvTable join_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const std::string& response) {
    CsvTable t;
    for (Index j = 0; j < x.cols(); ++j) t.header.push_back("x" + std::to_string(j + 1));
    t.header.push_back(response);
    t.values.resize(x.rows(), x.cols() + 1);
    t.values.leftCols(x.cols()) = x;
    t.values.col(x.cols()) = y;
    return t;
}

}  // namespace seqlasso

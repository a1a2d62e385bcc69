#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqlasso/dataset.hpp"

namespace seqlasso {

// Numeric table with a mandatory header row.
struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;  // rows x header.size()

    Index column(const std::string& name) const;  // -1 when absent
};

// Throws DuplicateHeader, NonNumericColumn (naming the column) or Io.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const CsvTable& table);

struct LabeledData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> feature_names;
    std::string response;
};

// Splits off the response column; every other column is a feature.
// Throws MissingColumn naming the response when it is absent.
LabeledData split_response(const CsvTable& table, const std::string& response);

CsvTable join_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const std::string& response = "y");

}  // namespace seqlasso

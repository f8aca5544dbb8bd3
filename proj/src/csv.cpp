#include "deepc/csv.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace deepc {

namespace {

void write_rows(std::ostream& os, const Matrix& m) {
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << m(i, j);
        }
        os << '\n';
    }
}

Matrix read_rows(std::istream& is, int rows, int cols) {
    Matrix m(rows, cols);
    std::string line;
    for (int i = 0; i < rows; ++i) {
        if (!std::getline(is, line)) throw DimensionMismatch("csv: fewer data rows than header claims");
        std::stringstream ss(line);
        std::string cell;
        for (int j = 0; j < cols; ++j) {
            if (!std::getline(ss, cell, ',')) throw DimensionMismatch("csv: short row");
            m(i, j) = std::stod(cell);
        }
    }
    return m;
}

}  // namespace

void write_matrix_csv(std::ostream& os, const TrajectoryMatrix& m) {
    os << "# rows=" << m.rows() << " cols=" << m.cols() << " structure=" << to_string(m.structure)
       << '\n';
    write_rows(os, m.entries);
}

TrajectoryMatrix read_matrix_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# rows=", 0) != 0)
        throw DimensionMismatch("csv: missing '# rows=...' header");
    int rows = 0, cols = 0;
    char structure_buf[16] = {0};
    if (std::sscanf(header.c_str(), "# rows=%d cols=%d structure=%15s", &rows, &cols,
                    structure_buf) != 3)
        throw DimensionMismatch("csv: malformed header");
    TrajectoryMatrix m;
    m.entries = read_rows(is, rows, cols);
    m.structure = structure_from_string(structure_buf);
    m.depth = rows;      // block structure is not recorded; callers that need the
    m.block_dim = 1;     // original blocking must track it separately
    return m;
}

void write_matrix_csv_file(const std::string& path, const TrajectoryMatrix& m) {
    std::ofstream f(path);
    if (!f) throw SolverFailure("csv: cannot open " + path + " for writing");
    write_matrix_csv(f, m);
}

TrajectoryMatrix read_matrix_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SolverFailure("csv: cannot open " + path);
    return read_matrix_csv(f);
}

void write_distribution_csv(std::ostream& os, const EmpiricalDistribution& d) {
    d.validate();
    write_rows(os, d.samples.transpose());
}

EmpiricalDistribution read_distribution_csv(std::istream& is, NormIndex r) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DimensionMismatch("csv: ragged distribution rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DimensionMismatch("csv: empty distribution file");
    Matrix samples(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            samples(static_cast<int>(j), static_cast<int>(i)) = rows[i][j];
    return EmpiricalDistribution::uniform(std::move(samples), r);
}

}  // namespace deepc

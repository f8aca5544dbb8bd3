#pragma once

#include <iosfwd>
#include <string>

#include "deepc/ambiguity.hpp"
#include "deepc/trajlib.hpp"

namespace deepc {

/// Row-major CSV with a `# rows=<r> cols=<c> structure=<hankel|page>` header.
void write_matrix_csv(std::ostream& os, const TrajectoryMatrix& m);
TrajectoryMatrix read_matrix_csv(std::istream& is);

void write_matrix_csv_file(const std::string& path, const TrajectoryMatrix& m);
TrajectoryMatrix read_matrix_csv_file(const std::string& path);

/// One sample per row, uniform weights on load.
void write_distribution_csv(std::ostream& os, const EmpiricalDistribution& d);
EmpiricalDistribution read_distribution_csv(std::istream& is, NormIndex r = NormIndex::Two);

}  // namespace deepc

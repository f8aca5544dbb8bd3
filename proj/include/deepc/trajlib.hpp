#pragma once

#include <vector>

#include "deepc/signal.hpp"

namespace deepc {

enum class MatrixStructure { Hankel, Page };

const char* to_string(MatrixStructure s);
MatrixStructure structure_from_string(const std::string& s);

/// Block-structured data matrix built from a signal: depth L block rows of
/// dimension block_dim. Hankel columns are sliding windows, Page columns are
/// consecutive non-overlapping windows.
struct TrajectoryMatrix {
    Matrix entries;
    MatrixStructure structure;
    int depth;
    int block_dim;

    int cols() const { return static_cast<int>(entries.cols()); }
    int rows() const { return static_cast<int>(entries.rows()); }
};

TrajectoryMatrix build_hankel(const Signal& u, int depth);
TrajectoryMatrix build_page(const Signal& u, int depth);

/// Numerical rank via SVD: singular values below rank_tol * sigma_max count as zero.
int numerical_rank(const Matrix& m, double rank_tol = 1e-9);

/// True iff the depth-L Hankel matrix of u has full row rank.
bool is_hankel_exciting(const Signal& u, int depth, double rank_tol = 1e-9);

/// True iff the stack of M vertically concatenated shifted depth-L Page
/// matrices has full row rank. The length bound T >= L((mL+1)M - 1) is
/// necessary for a true verdict (fewer columns than rows otherwise).
bool is_page_exciting(const Signal& u, int depth, int order, double rank_tol = 1e-9);

/// Reports whether T meets the sufficient length bound for L-Page excitation
/// of the given order (the rank condition itself may hold or fail either way).
bool page_excitation_length_bound(int T, int depth, int order, int m);

/// Partitioned input/output data matrices shared across N output batches.
/// All batches reuse the same input blocks Up/Uf.
struct DataBlocks {
    Matrix Up;               // m*T_ini x K
    Matrix Uf;               // m*T_f x K
    std::vector<Matrix> Yp;  // N matrices, p*T_ini x K
    std::vector<Matrix> Yf;  // N matrices, p*T_f x K
    MatrixStructure structure;
    int T_ini;
    int T_f;
    int m;
    int p;
    int K;
    int N;

    /// col(Up, Yp(batch), Uf, Yf(batch))
    Matrix stacked(int batch) const;
    /// Vectorized output sample col(Yp(batch), Yf(batch)) row-by-row, the
    /// ambiguity-space point this batch contributes.
    Vector xi_sample(int batch) const;
};

DataBlocks partition_data(const Signal& u, const std::vector<Signal>& ys, int T_ini, int T_f,
                          MatrixStructure structure);

/// Numerical rank of col(Up, Yp, Uf, Yf) for one batch.
int data_matrix_rank(const DataBlocks& blocks, int batch, double rank_tol = 1e-9);

/// Least-squares span-membership test: true iff
/// min_g ||stacked(batch) g - w||_2 <= tol * max(1, ||w||_2),
/// with w ordered col(u_past, y_past, u_future, y_future).
bool check_membership(const DataBlocks& blocks, int batch, const Vector& w, double tol);

/// Best rank-target approximation (truncated SVD) of a Page matrix.
TrajectoryMatrix svd_denoise_page(const TrajectoryMatrix& m, int target_rank);

}  // namespace deepc

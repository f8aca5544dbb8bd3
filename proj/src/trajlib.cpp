#include "deepc/trajlib.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace deepc {

const char* to_string(MatrixStructure s) {
    return s == MatrixStructure::Hankel ? "hankel" : "page";
}

MatrixStructure structure_from_string(const std::string& s) {
    if (s == "hankel" || s == "Hankel") return MatrixStructure::Hankel;
    if (s == "page" || s == "Page") return MatrixStructure::Page;
    throw DimensionMismatch("unknown matrix structure: " + s);
}

TrajectoryMatrix build_hankel(const Signal& u, int depth) {
    const int T = u.length();
    const int m = u.dim();
    if (depth < 1 || depth > T) throw DepthTooLarge("build_hankel: depth exceeds signal length");
    const int K = T - depth + 1;
    Matrix H(m * depth, K);
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < depth; ++i) H.block(i * m, j, m, 1) = u.sample(i + j);
    return {std::move(H), MatrixStructure::Hankel, depth, m};
}

TrajectoryMatrix build_page(const Signal& u, int depth) {
    const int T = u.length();
    const int m = u.dim();
    if (depth < 1 || depth > T) throw DepthTooLarge("build_page: depth exceeds signal length");
    const int K = T / depth;  // trailing T - K*depth samples are dropped
    Matrix P(m * depth, K);
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < depth; ++i) P.block(i * m, j, m, 1) = u.sample(j * depth + i);
    return {std::move(P), MatrixStructure::Page, depth, m};
}

int numerical_rank(const Matrix& m, double rank_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * sv(0)) ++r;
    return r;
}

bool is_hankel_exciting(const Signal& u, int depth, double rank_tol) {
    const int T = u.length();
    const int m = u.dim();
    if (depth > T) throw DepthTooLarge("is_hankel_exciting: depth exceeds signal length");
    if (T < depth * (m + 1) - 1) return false;  // full row rank impossible
    TrajectoryMatrix H = build_hankel(u, depth);
    return numerical_rank(H.entries, rank_tol) == H.rows();
}

bool page_excitation_length_bound(int T, int depth, int order, int m) {
    return T >= depth * ((m * depth + 1) * order - 1);
}

bool is_page_exciting(const Signal& u, int depth, int order, double rank_tol) {
    const int T = u.length();
    const int m = u.dim();
    if (T < depth * order) throw InsufficientData("is_page_exciting: T < L*M");
    // Shifted Page matrices P_L(u_[kL+1, T-(M-1-k)L]) for k = 0..M-1, stacked.
    const int seg_len = T - (order - 1) * depth;
    const int K = seg_len / depth;
    Matrix stackmat(m * depth * order, K);
    for (int k = 0; k < order; ++k) {
        TrajectoryMatrix Pk = build_page(u.segment(k * depth, seg_len), depth);
        stackmat.middleRows(k * m * depth, m * depth) = Pk.entries;
    }
    return numerical_rank(stackmat, rank_tol) == stackmat.rows();
}

Matrix DataBlocks::stacked(int batch) const {
    Matrix s(Up.rows() + Yp[batch].rows() + Uf.rows() + Yf[batch].rows(), K);
    s << Up, Yp[batch], Uf, Yf[batch];
    return s;
}

Vector DataBlocks::xi_sample(int batch) const {
    Matrix Y(Yp[batch].rows() + Yf[batch].rows(), K);
    Y << Yp[batch], Yf[batch];
    Vector xi(Y.size());
    for (Eigen::Index i = 0; i < Y.rows(); ++i) xi.segment(i * K, K) = Y.row(i).transpose();
    return xi;
}

DataBlocks partition_data(const Signal& u, const std::vector<Signal>& ys, int T_ini, int T_f,
                          MatrixStructure structure) {
    if (ys.empty()) throw DimensionMismatch("partition_data: need at least one output batch");
    const int T = u.length();
    const int L = T_ini + T_f;
    for (const auto& y : ys)
        if (y.length() != T) throw DimensionMismatch("partition_data: output length differs from input");
    if (T < L) throw InsufficientData("partition_data: T < T_ini + T_f");

    auto build = [&](const Signal& s) {
        return structure == MatrixStructure::Hankel ? build_hankel(s, L) : build_page(s, L);
    };
    TrajectoryMatrix U = build(u);

    DataBlocks blocks;
    blocks.structure = structure;
    blocks.T_ini = T_ini;
    blocks.T_f = T_f;
    blocks.m = u.dim();
    blocks.p = ys.front().dim();
    blocks.K = U.cols();
    blocks.N = static_cast<int>(ys.size());
    blocks.Up = U.entries.topRows(blocks.m * T_ini);
    blocks.Uf = U.entries.bottomRows(blocks.m * T_f);
    for (const auto& y : ys) {
        if (y.dim() != blocks.p) throw DimensionMismatch("partition_data: output dimension differs across batches");
        TrajectoryMatrix Y = build(y);
        blocks.Yp.push_back(Y.entries.topRows(blocks.p * T_ini));
        blocks.Yf.push_back(Y.entries.bottomRows(blocks.p * T_f));
    }
    return blocks;
}

int data_matrix_rank(const DataBlocks& blocks, int batch, double rank_tol) {
    return numerical_rank(blocks.stacked(batch), rank_tol);
}

bool check_membership(const DataBlocks& blocks, int batch, const Vector& w, double tol) {
    Matrix S = blocks.stacked(batch);
    if (w.size() != S.rows()) throw DimensionMismatch("check_membership: w dimension mismatch");
    Vector g = S.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(w);
    double resid = (S * g - w).norm();
    return resid <= tol * std::max(1.0, w.norm());
}

TrajectoryMatrix svd_denoise_page(const TrajectoryMatrix& m, int target_rank) {
    if (m.structure != MatrixStructure::Page)
        throw StructureViolation("svd_denoise_page: truncation destroys Hankel structure");
    if (target_rank < 0) throw DimensionMismatch("svd_denoise_page: negative target rank");
    TrajectoryMatrix out = m;
    if (target_rank == 0) {
        out.entries.setZero();
        return out;
    }
    Eigen::BDCSVD<Matrix> svd(m.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int r = std::min<int>(target_rank, static_cast<int>(svd.singularValues().size()));
    out.entries = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
                  svd.matrixV().leftCols(r).transpose();
    return out;
}

}  // namespace deepc

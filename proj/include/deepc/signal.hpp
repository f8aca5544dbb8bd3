#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "deepc/errors.hpp"

namespace deepc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A finite vector-valued time series. Samples are stored column-wise in a
/// dim x length matrix, so sample(t) is the t-th column (0-based).
class Signal {
  public:
    explicit Signal(Matrix samples) : data_(std::move(samples)) {
        if (data_.rows() < 1 || data_.cols() < 1)
            throw DimensionMismatch("Signal: need at least one sample of dimension >= 1");
    }

    /// Scalar signal from a list of values.
    static Signal scalar(const std::vector<double>& values) {
        Matrix m(1, static_cast<Eigen::Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = values[i];
        return Signal(m);
    }

    static Signal scalar(std::initializer_list<double> values) {
        return scalar(std::vector<double>(values));
    }

    /// Reshape a stacked vector col(w_1,...,w_T) into a signal of the given dimension.
    static Signal from_stacked(const Vector& stacked, int dim) {
        if (dim < 1 || stacked.size() % dim != 0)
            throw DimensionMismatch("Signal::from_stacked: size not a multiple of dim");
        Eigen::Index T = stacked.size() / dim;
        Matrix m(dim, T);
        for (Eigen::Index t = 0; t < T; ++t) m.col(t) = stacked.segment(t * dim, dim);
        return Signal(m);
    }

    static Signal zeros(int dim, int length) { return Signal(Matrix::Zero(dim, length)); }

    int dim() const { return static_cast<int>(data_.rows()); }
    int length() const { return static_cast<int>(data_.cols()); }

    Vector sample(int t) const { return data_.col(t); }
    const Matrix& samples() const { return data_; }

    /// col(w_1,...,w_T)
    Vector stacked() const {
        Vector v(data_.size());
        for (Eigen::Index t = 0; t < data_.cols(); ++t)
            v.segment(t * data_.rows(), data_.rows()) = data_.col(t);
        return v;
    }

    /// Sub-signal of `len` samples starting at sample `start` (0-based).
    Signal segment(int start, int len) const {
        if (start < 0 || len < 1 || start + len > length())
            throw DimensionMismatch("Signal::segment: range out of bounds");
        return Signal(data_.middleCols(start, len));
    }

    /// Append the samples of another signal of the same dimension.
    Signal concat(const Signal& tail) const {
        if (tail.dim() != dim()) throw DimensionMismatch("Signal::concat: dimension mismatch");
        Matrix m(dim(), length() + tail.length());
        m << data_, tail.data_;
        return Signal(m);
    }

  private:
    Matrix data_;
};

}  // namespace deepc

#pragma once

#include <variant>
#include <vector>

#include "deepc/ambiguity.hpp"
#include "deepc/signal.hpp"

namespace deepc {

/// One cost piece w * ||M z - c||_2 (Norm2) or w * ||M z - c||_2^2 (SqNorm2),
/// applied to the stacked argument of its group (future inputs for f1, future
/// outputs for f2, initial-window output mismatch for f3).
struct CostTerm {
    enum class Form { Norm2, SqNorm2 };
    double weight;
    Matrix M;
    Vector c;
    Form form = Form::Norm2;

    static CostTerm norm2(double w, Matrix M, Vector c) { return {w, std::move(M), std::move(c), Form::Norm2}; }
    static CostTerm sq_norm2(double w, Matrix M, Vector c) { return {w, std::move(M), std::move(c), Form::SqNorm2}; }
    static CostTerm tracking_norm2(double w, const Vector& ref) {
        return norm2(w, Matrix::Identity(ref.size(), ref.size()), ref);
    }
    static CostTerm tracking_sq(double w, const Vector& ref) {
        return sq_norm2(w, Matrix::Identity(ref.size(), ref.size()), ref);
    }

    double evaluate(const Vector& z) const {
        double nrm = (M * z - c).norm();
        return form == Form::Norm2 ? weight * nrm : weight * nrm * nrm;
    }
    /// Lipschitz bound w * sigma_max(M) w.r.t. the 2-norm of the argument
    /// (only meaningful for Norm2 terms).
    double lipschitz_bound() const;
};

struct CostSpec {
    std::vector<CostTerm> f1;  // on Uf g
    std::vector<CostTerm> f2;  // on Yf g
    std::vector<CostTerm> f3;  // on Yp g - y_ini

    bool robust_compatible() const;  // all f2/f3 terms Norm2
    /// Lipschitz constant of the stacked (f2, f3) map w.r.t. the r-norm,
    /// assembled as the q-norm of the per-term bounds (safe upper bound).
    double objective_lipschitz(NormIndex r) const;

    double evaluate(const Vector& uf, const Vector& yf, const Vector& yp_mismatch) const;
};

/// Per-coordinate box on the future outputs; the associated constraint
/// function h(y) = max_j max(y_j - ub_j, lb_j - y_j) has L_con = 1 (signed
/// unit-basis gradients have dual norm 1 for every r in {1,2,inf}).
struct OutputBox {
    Vector lower, upper;

    double h(const Vector& y) const {
        double v = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < y.size(); ++j)
            v = std::max({v, y(j) - upper(j), lower(j) - y(j)});
        return v;
    }
};

/// Piecewise affine constraint on the ambiguity variable:
/// l(g, xi) = max_k <a_k applied to the future-output block of xi against g> + b_k,
/// i.e. pieces act on y = Yf g via h(y) = max_k a_k' y + b_k. The support of
/// xi is the polyhedron {F xi <= d}; empty F/d means unrestricted support.
struct PiecewiseAffineOutput {
    std::vector<std::pair<Vector, double>> pieces;  // (a_k on p*T_f coords, b_k)
    Matrix F;
    Vector d;

    double h(const Vector& y) const {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : pieces) v = std::max(v, a.dot(y) + b);
        return v;
    }
};

struct ConstraintSpec {
    Vector u_lower, u_upper;  // per input coordinate per step, m*T_f each
    std::variant<std::monostate, OutputBox, PiecewiseAffineOutput> output;
    double alpha = 0.1;  // CVaR level for the robust formulations

    bool has_output_box() const { return std::holds_alternative<OutputBox>(output); }
    bool has_piecewise() const { return std::holds_alternative<PiecewiseAffineOutput>(output); }
};

}  // namespace deepc

#include "deepc/robustctl.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "deepc/mpc.hpp"

namespace deepc {

namespace {

using Term = std::vector<std::pair<int, double>>;  // sparse linear functional

// Incremental cone-program builder; rows may reference variables created later.
class ProgramBuilder {
  public:
    int new_var(double lin_cost = 0.0) {
        lin_.push_back(lin_cost);
        return n_++;
    }
    void add_lin_cost(int v, double c) { lin_[v] += c; }
    void add_quad(int i, int j, double v) { quad_.push_back({i, j, v}); }
    void add_const(double v) { const_ += v; }

    void add_eq(Term row, double rhs) { eq_.push_back({std::move(row), rhs}); }
    /// sum coef*x <= rhs
    void add_le(Term row, double rhs) { ineq_.push_back({std::move(row), rhs}); }
    /// second-order cone: slack rows (b_i - row_i x) form the cone vector
    void add_soc(std::vector<Term> rows, Vector b) {
        soc_.push_back({std::move(rows), std::move(b)});
    }

    ConicProgram finalize() const {
        ConicProgram prog;
        prog.var_count = n_;
        prog.q = Eigen::Map<const Vector>(lin_.data(), n_);
        prog.obj_const = const_;
        if (!quad_.empty()) {
            prog.P = Matrix::Zero(n_, n_);
            // v is the Hessian entry: symmetric fill so 1/2 x'Px recovers it
            for (const auto& [i, j, v] : quad_) {
                prog.P(i, j) += v;
                if (i != j) prog.P(j, i) += v;
            }
        }
        prog.Aeq = Matrix::Zero(static_cast<int>(eq_.size()), n_);
        prog.beq.resize(static_cast<int>(eq_.size()));
        for (std::size_t r = 0; r < eq_.size(); ++r) {
            for (const auto& [v, c] : eq_[r].first) prog.Aeq(static_cast<int>(r), v) += c;
            prog.beq(static_cast<int>(r)) = eq_[r].second;
        }
        if (!ineq_.empty()) {
            Matrix A = Matrix::Zero(static_cast<int>(ineq_.size()), n_);
            Vector b(static_cast<int>(ineq_.size()));
            for (std::size_t r = 0; r < ineq_.size(); ++r) {
                for (const auto& [v, c] : ineq_[r].first) A(static_cast<int>(r), v) += c;
                b(static_cast<int>(r)) = ineq_[r].second;
            }
            prog.add_nonneg(std::move(A), std::move(b));
        }
        for (const auto& [rows, b] : soc_) {
            Matrix A = Matrix::Zero(static_cast<int>(rows.size()), n_);
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (const auto& [v, c] : rows[r]) A(static_cast<int>(r), v) += c;
            prog.add_soc(std::move(A), b);
        }
        return prog;
    }

  private:
    int n_ = 0;
    std::vector<double> lin_;
    double const_ = 0.0;
    struct QuadEntry {
        int i, j;
        double v;
    };
    std::vector<QuadEntry> quad_;
    std::vector<std::pair<Term, double>> eq_;
    std::vector<std::pair<Term, double>> ineq_;
    std::vector<std::pair<std::vector<Term>, Vector>> soc_;
};

Term row_from(const Eigen::Ref<const Eigen::RowVectorXd>& coefs, int var_offset) {
    Term t;
    for (Eigen::Index j = 0; j < coefs.size(); ++j)
        if (coefs(j) != 0.0) t.push_back({var_offset + static_cast<int>(j), coefs(j)});
    return t;
}

/// cost += w * ||A x_sub - c||_2 via an epigraph variable (returns its index)
int add_norm_cost(ProgramBuilder& B, double w, const Matrix& A, const Vector& c, int var_offset) {
    int t = B.new_var(w);
    std::vector<Term> rows;
    rows.push_back({{t, -1.0}});
    Vector b(A.rows() + 1);
    b(0) = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        rows.push_back(row_from(-A.row(i), var_offset));
        b(i + 1) = -c(i);
    }
    B.add_soc(std::move(rows), std::move(b));
    return t;
}

/// cost += w * ||A x_sub - c||_2^2 folded into the quadratic term
void add_sq_cost(ProgramBuilder& B, double w, const Matrix& A, const Vector& c, int var_offset) {
    Matrix H = 2.0 * w * A.transpose() * A;
    Vector lin = -2.0 * w * A.transpose() * c;
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
        for (Eigen::Index j = i; j < H.cols(); ++j)
            if (H(i, j) != 0.0)
                B.add_quad(var_offset + static_cast<int>(i), var_offset + static_cast<int>(j), H(i, j));
        B.add_lin_cost(var_offset + static_cast<int>(i), lin(i));
    }
    B.add_const(w * c.squaredNorm());
}

void add_cost_terms(ProgramBuilder& B, const std::vector<CostTerm>& terms, const Matrix& G,
                    const Vector& shift, double scale, int g_offset, bool forbid_sq) {
    // argument z = G g - shift
    for (const auto& term : terms) {
        Matrix A = term.M * G;
        Vector c = term.c + term.M * shift;
        if (term.form == CostTerm::Form::Norm2) {
            add_norm_cost(B, scale * term.weight, A, c, g_offset);
        } else {
            if (forbid_sq)
                throw SquaredTermInRobustMode(
                    "squared cost terms are not globally Lipschitz; use norm form when epsilon > 0");
            add_sq_cost(B, scale * term.weight, A, c, g_offset);
        }
    }
}

/// Linear functional bounding ||g||_q from above (epigraph construction
/// appropriate to the dual norm q of r).
Term add_dual_norm_bound(ProgramBuilder& B, int g_offset, int K, NormIndex r) {
    switch (r) {
        case NormIndex::Two: {  // q = 2
            int t = B.new_var();
            std::vector<Term> rows;
            rows.push_back({{t, -1.0}});
            Vector b = Vector::Zero(K + 1);
            for (int j = 0; j < K; ++j) rows.push_back({{g_offset + j, -1.0}});
            B.add_soc(std::move(rows), std::move(b));
            return {{t, 1.0}};
        }
        case NormIndex::One: {  // q = inf
            int t = B.new_var();
            for (int j = 0; j < K; ++j) {
                B.add_le({{g_offset + j, 1.0}, {t, -1.0}}, 0.0);
                B.add_le({{g_offset + j, -1.0}, {t, -1.0}}, 0.0);
            }
            return {{t, 1.0}};
        }
        default: {  // r = inf, q = 1
            Term sum;
            for (int j = 0; j < K; ++j) {
                int h = B.new_var();
                B.add_le({{g_offset + j, 1.0}, {h, -1.0}}, 0.0);
                B.add_le({{g_offset + j, -1.0}, {h, -1.0}}, 0.0);
                sum.push_back({h, 1.0});
            }
            return sum;
        }
    }
}

void add_box_rows(ProgramBuilder& B, const Matrix& G, const Vector& lower, const Vector& upper,
                  int g_offset) {
    if (lower.size() != G.rows() || upper.size() != G.rows())
        throw DimensionMismatch("box bounds do not match the constrained dimension");
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
        if (lower(i) > upper(i)) throw DimensionMismatch("box: lower > upper");
        if (std::isfinite(upper(i))) B.add_le(row_from(G.row(i), g_offset), upper(i));
        if (std::isfinite(lower(i))) B.add_le(row_from(-G.row(i), g_offset), -lower(i));
    }
}

void check_window_dims(const DataBlocks& blocks, const Vector& u_ini, const Vector& y_ini) {
    if (u_ini.size() != blocks.m * blocks.T_ini)
        throw DimensionMismatch("u_ini dimension does not match m*T_ini");
    if (y_ini.size() != blocks.p * blocks.T_ini)
        throw DimensionMismatch("y_ini dimension does not match p*T_ini");
}

bool support_nonempty(const Matrix& F, const Vector& d) {
    if (F.rows() == 0) return true;
    // feasibility margin LP: min t s.t. F xi - t <= d, t >= -1
    ProgramBuilder B;
    std::vector<int> xi(F.cols());
    for (auto& v : xi) v = B.new_var();
    int t = B.new_var(1.0);
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
        Term row = row_from(F.row(i), 0);
        row.push_back({t, -1.0});
        B.add_le(std::move(row), d(i));
    }
    B.add_le({{t, -1.0}}, 1.0);
    SolveResult res = solve(B.finalize());
    return res.status == SolveStatus::Optimal && res.objective <= 1e-6;
}

}  // namespace

double CostTerm::lipschitz_bound() const {
    Eigen::JacobiSVD<Matrix> svd(M);
    double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    return weight * smax;
}

bool CostSpec::robust_compatible() const {
    for (const auto& t : f2)
        if (t.form != CostTerm::Form::Norm2) return false;
    for (const auto& t : f3)
        if (t.form != CostTerm::Form::Norm2) return false;
    return true;
}

double CostSpec::objective_lipschitz(NormIndex r) const {
    // per-block bounds (f2 on the future slice, f3 on the past slice),
    // combined with the q-norm across the two blocks
    auto block_bound = [&](const std::vector<CostTerm>& terms) {
        double L = 0.0;
        for (const auto& t : terms) {
            double b = t.lipschitz_bound();
            if (r == NormIndex::Inf) b *= std::sqrt(static_cast<double>(t.M.cols()));
            L += b;
        }
        return L;
    };
    Vector per_block(2);
    per_block << block_bound(f2), block_bound(f3);
    return norm_dual(per_block, r);
}

double CostSpec::evaluate(const Vector& uf, const Vector& yf, const Vector& yp_mismatch) const {
    double v = 0.0;
    for (const auto& t : f1) v += t.evaluate(uf);
    for (const auto& t : f2) v += t.evaluate(yf);
    for (const auto& t : f3) v += t.evaluate(yp_mismatch);
    return v;
}

double evaluate_robust_objective(const DataBlocks& blocks, const CostSpec& cost,
                                 const AmbiguitySpec& spec, const Vector& y_ini, const Vector& g) {
    double v = 0.0;
    Vector uf = blocks.Uf * g;
    for (const auto& t : cost.f1) v += t.evaluate(uf);
    for (int i = 0; i < blocks.N; ++i) {
        Vector yf = blocks.Yf[i] * g;
        Vector mism = blocks.Yp[i] * g - y_ini;
        double vi = 0.0;
        for (const auto& t : cost.f2) vi += t.evaluate(yf);
        for (const auto& t : cost.f3) vi += t.evaluate(mism);
        v += vi / blocks.N;
    }
    if (spec.epsilon > 0.0)
        v += cost.objective_lipschitz(spec.r) * spec.epsilon * norm_dual(g, spec.r);
    return v;
}

AssembledProgram assemble_deterministic(const DataBlocks& blocks, const CostSpec& cost,
                                        const ConstraintSpec& constraints, const Vector& u_ini,
                                        const Vector& y_ini) {
    if (blocks.N != 1) throw DimensionMismatch("assemble_deterministic: expects a single data batch");
    check_window_dims(blocks, u_ini, y_ini);
    ProgramBuilder B;
    const int K = blocks.K;
    for (int j = 0; j < K; ++j) B.new_var();

    for (Eigen::Index i = 0; i < blocks.Up.rows(); ++i)
        B.add_eq(row_from(blocks.Up.row(i), 0), u_ini(i));
    for (Eigen::Index i = 0; i < blocks.Yp[0].rows(); ++i)
        B.add_eq(row_from(blocks.Yp[0].row(i), 0), y_ini(i));

    if (constraints.u_lower.size() > 0)
        add_box_rows(B, blocks.Uf, constraints.u_lower, constraints.u_upper, 0);
    if (constraints.has_output_box()) {
        const auto& box = std::get<OutputBox>(constraints.output);
        add_box_rows(B, blocks.Yf[0], box.lower, box.upper, 0);
    }

    add_cost_terms(B, cost.f1, blocks.Uf, Vector::Zero(blocks.Uf.rows()), 1.0, 0, false);
    add_cost_terms(B, cost.f2, blocks.Yf[0], Vector::Zero(blocks.Yf[0].rows()), 1.0, 0, false);

    AssembledProgram out;
    out.program = B.finalize();
    out.map.K = K;
    return out;
}

AssembledProgram assemble_robust(const DataBlocks& blocks, const CostSpec& cost,
                                 const ConstraintSpec& constraints, const AmbiguitySpec& spec,
                                 const Vector& u_ini, const Vector& y_ini) {
    check_window_dims(blocks, u_ini, y_ini);
    if (constraints.has_piecewise())
        throw DimensionMismatch("assemble_robust: piecewise constraints use assemble_robust_affine");
    const double eps_obj = spec.epsilon;
    const double eps_con = spec.constraint_epsilon();
    const bool forbid_sq = eps_obj > 0.0 || eps_con > 0.0;
    if (forbid_sq && !cost.robust_compatible())
        throw SquaredTermInRobustMode("assemble_robust: f2/f3 must be norm-form when epsilon > 0");

    ProgramBuilder B;
    const int K = blocks.K;
    const int N = blocks.N;
    for (int j = 0; j < K; ++j) B.new_var();

    VariableMap map;
    map.K = K;

    for (Eigen::Index i = 0; i < blocks.Up.rows(); ++i)
        B.add_eq(row_from(blocks.Up.row(i), 0), u_ini(i));
    if (constraints.u_lower.size() > 0)
        add_box_rows(B, blocks.Uf, constraints.u_lower, constraints.u_upper, 0);

    add_cost_terms(B, cost.f1, blocks.Uf, Vector::Zero(blocks.Uf.rows()), 1.0, 0, false);
    for (int i = 0; i < N; ++i) {
        add_cost_terms(B, cost.f2, blocks.Yf[i], Vector::Zero(blocks.Yf[i].rows()), 1.0 / N, 0,
                       forbid_sq);
        add_cost_terms(B, cost.f3, blocks.Yp[i], y_ini, 1.0 / N, 0, forbid_sq);
    }

    Term gq_bound;
    if (eps_obj > 0.0 || (eps_con > 0.0 && constraints.has_output_box()))
        gq_bound = add_dual_norm_bound(B, 0, K, spec.r);
    if (eps_obj > 0.0) {
        double L_obj = cost.objective_lipschitz(spec.r);
        for (const auto& [v, c] : gq_bound) B.add_lin_cost(v, L_obj * eps_obj * c);
    }

    if (constraints.has_output_box()) {
        const auto& box = std::get<OutputBox>(constraints.output);
        const double L_con = 1.0;
        map.tau = B.new_var();
        map.s_offset = B.new_var();
        for (int i = 1; i < N; ++i) B.new_var();
        map.s_count = N;
        // master row: -tau*alpha + L_con*eps*||g||_q + (1/N) sum s_i <= 0
        Term master{{map.tau, -constraints.alpha}};
        for (int i = 0; i < N; ++i) master.push_back({map.s_offset + i, 1.0 / N});
        if (eps_con > 0.0)
            for (const auto& [v, c] : gq_bound) master.push_back({v, L_con * eps_con * c});
        B.add_le(std::move(master), 0.0);
        for (int i = 0; i < N; ++i) {
            B.add_le({{map.s_offset + i, -1.0}}, 0.0);  // s_i >= 0
            // tau + h(Yf^i g) <= s_i expanded over the box pieces
            const Matrix& Yf = blocks.Yf[i];
            for (Eigen::Index j = 0; j < Yf.rows(); ++j) {
                Term up = row_from(Yf.row(j), 0);
                up.push_back({map.tau, 1.0});
                up.push_back({map.s_offset + i, -1.0});
                B.add_le(std::move(up), box.upper(j));
                Term lo = row_from(-Yf.row(j), 0);
                lo.push_back({map.tau, 1.0});
                lo.push_back({map.s_offset + i, -1.0});
                B.add_le(std::move(lo), -box.lower(j));
            }
        }
    }

    AssembledProgram out;
    out.program = B.finalize();
    out.map = map;
    return out;
}

AssembledProgram assemble_robust_affine(const DataBlocks& blocks, const CostSpec& cost,
                                        const ConstraintSpec& constraints, const AmbiguitySpec& spec,
                                        const Vector& u_ini, const Vector& y_ini) {
    check_window_dims(blocks, u_ini, y_ini);
    if (!constraints.has_piecewise())
        throw DimensionMismatch("assemble_robust_affine: needs a piecewise-affine output constraint");
    const auto& pw = std::get<PiecewiseAffineOutput>(constraints.output);
    if (pw.pieces.empty()) throw DimensionMismatch("assemble_robust_affine: no pieces");
    if (pw.F.rows() != pw.d.size()) throw DimensionMismatch("assemble_robust_affine: F/d mismatch");
    const int xi_dim = blocks.p * (blocks.T_ini + blocks.T_f) * blocks.K;
    if (pw.F.rows() > 0 && pw.F.cols() != xi_dim)
        throw DimensionMismatch("assemble_robust_affine: F columns must match the sample dimension");
    if (!support_nonempty(pw.F, pw.d))
        throw EmptySupport("assemble_robust_affine: support polyhedron is empty");

    const double eps_obj = spec.epsilon;
    const double eps_con = spec.constraint_epsilon();
    if (eps_obj > 0.0 && !cost.robust_compatible())
        throw SquaredTermInRobustMode("assemble_robust_affine: f2/f3 must be norm-form when epsilon > 0");

    ProgramBuilder B;
    const int K = blocks.K;
    const int N = blocks.N;
    const int n_pieces = static_cast<int>(pw.pieces.size());
    const int n_sup = static_cast<int>(pw.F.rows());
    for (int j = 0; j < K; ++j) B.new_var();

    VariableMap map;
    map.K = K;

    for (Eigen::Index i = 0; i < blocks.Up.rows(); ++i)
        B.add_eq(row_from(blocks.Up.row(i), 0), u_ini(i));
    if (constraints.u_lower.size() > 0)
        add_box_rows(B, blocks.Uf, constraints.u_lower, constraints.u_upper, 0);

    add_cost_terms(B, cost.f1, blocks.Uf, Vector::Zero(blocks.Uf.rows()), 1.0, 0, false);
    for (int i = 0; i < N; ++i) {
        add_cost_terms(B, cost.f2, blocks.Yf[i], Vector::Zero(blocks.Yf[i].rows()), 1.0 / N, 0,
                       eps_obj > 0.0);
        add_cost_terms(B, cost.f3, blocks.Yp[i], y_ini, 1.0 / N, 0, eps_obj > 0.0);
    }
    if (eps_obj > 0.0) {
        Term gq_bound = add_dual_norm_bound(B, 0, K, spec.r);
        double L_obj = cost.objective_lipschitz(spec.r);
        for (const auto& [v, c] : gq_bound) B.add_lin_cost(v, L_obj * eps_obj * c);
    }

    map.tau = B.new_var();
    map.lambda = B.new_var();
    map.s_offset = B.new_var();
    for (int i = 1; i < N; ++i) B.new_var();
    map.s_count = N;
    std::vector<std::vector<int>> gamma(N, std::vector<int>(n_pieces * n_sup));
    for (int i = 0; i < N; ++i)
        for (int kk = 0; kk < n_pieces * n_sup; ++kk) gamma[i][kk] = B.new_var();

    // master: -tau*alpha + lambda*eps + (1/N) sum s_i <= 0
    Term master{{map.tau, -constraints.alpha}, {map.lambda, eps_con}};
    for (int i = 0; i < N; ++i) master.push_back({map.s_offset + i, 1.0 / N});
    B.add_le(std::move(master), 0.0);
    for (int i = 0; i < N; ++i) B.add_le({{map.s_offset + i, -1.0}}, 0.0);

    // M_k g in sample space: block row l of xi (length K) carries a_k[l - p*T_ini] * g
    // for future rows l; hence <M_k g, xi_hat> = a_k' Yf^(i) g.
    const int past_rows = blocks.p * blocks.T_ini;
    for (int i = 0; i < N; ++i) {
        Vector xi_hat = blocks.xi_sample(i);
        for (int k = 0; k < n_pieces; ++k) {
            const auto& [a_k, b_k] = pw.pieces[k];
            if (a_k.size() != blocks.p * blocks.T_f)
                throw DimensionMismatch("assemble_robust_affine: piece dimension mismatch");
            // b_k + tau + a_k' Yf g + gamma'(d - F xi_hat) <= s_i
            Term row = row_from(a_k.transpose() * blocks.Yf[i], 0);
            row.push_back({map.tau, 1.0});
            row.push_back({map.s_offset + i, -1.0});
            if (n_sup > 0) {
                Vector slackvec = pw.d - pw.F * xi_hat;
                for (int t = 0; t < n_sup; ++t) {
                    row.push_back({gamma[i][k * n_sup + t], slackvec(t)});
                    B.add_le({{gamma[i][k * n_sup + t], -1.0}}, 0.0);  // gamma >= 0
                }
            }
            B.add_le(std::move(row), -b_k);

            // ||F' gamma_ik - M_k g||_q <= lambda
            auto component = [&](int coord) {
                Term comp;
                if (n_sup > 0)
                    for (int t = 0; t < n_sup; ++t)
                        if (pw.F(t, coord) != 0.0)
                            comp.push_back({gamma[i][k * n_sup + t], pw.F(t, coord)});
                int block_row = coord / K;
                int col = coord % K;
                if (block_row >= past_rows) {
                    double a_val = a_k(block_row - past_rows);
                    if (a_val != 0.0) comp.push_back({col, -a_val});
                }
                return comp;
            };
            if (spec.r == NormIndex::Two) {
                std::vector<Term> rows;
                rows.push_back({{map.lambda, -1.0}});
                for (int coord = 0; coord < xi_dim; ++coord) {
                    Term comp = component(coord);
                    for (auto& [v, c] : comp) c = -c;
                    rows.push_back(std::move(comp));
                }
                B.add_soc(std::move(rows), Vector::Zero(xi_dim + 1));
            } else if (spec.r == NormIndex::One) {  // q = inf: |v_j| <= lambda
                for (int coord = 0; coord < xi_dim; ++coord) {
                    Term comp = component(coord);
                    if (comp.empty()) continue;
                    Term up = comp;
                    up.push_back({map.lambda, -1.0});
                    B.add_le(std::move(up), 0.0);
                    for (auto& [v, c] : comp) c = -c;
                    comp.push_back({map.lambda, -1.0});
                    B.add_le(std::move(comp), 0.0);
                }
            } else {  // r = inf, q = 1: sum |v_j| <= lambda via aux vars
                Term sum;
                for (int coord = 0; coord < xi_dim; ++coord) {
                    Term comp = component(coord);
                    if (comp.empty()) continue;
                    int h = B.new_var();
                    Term up = comp;
                    up.push_back({h, -1.0});
                    B.add_le(std::move(up), 0.0);
                    for (auto& [v, c] : comp) c = -c;
                    comp.push_back({h, -1.0});
                    B.add_le(std::move(comp), 0.0);
                    sum.push_back({h, 1.0});
                }
                sum.push_back({map.lambda, -1.0});
                B.add_le(std::move(sum), 0.0);
            }
        }
    }

    AssembledProgram out;
    out.program = B.finalize();
    out.map = map;
    return out;
}

RobustSolution extract_solution(const AssembledProgram& assembled, const SolveResult& raw,
                                const DataBlocks& blocks) {
    if (raw.status != SolveStatus::Optimal)
        throw SolverFailure(std::string("extract_solution: solver status ") + to_string(raw.status));
    RobustSolution sol;
    sol.status = raw.status;
    sol.g_star = raw.x.head(assembled.map.K);
    sol.u_star = Signal::from_stacked(blocks.Uf * sol.g_star, blocks.m);
    for (int i = 0; i < blocks.N; ++i) sol.y_pred.push_back(blocks.Yf[i] * sol.g_star);
    sol.objective = assembled.program.objective_at(raw.x);
    if (assembled.map.tau >= 0) sol.tau = raw.x(assembled.map.tau);
    if (assembled.map.s_offset >= 0)
        sol.s = raw.x.segment(assembled.map.s_offset, assembled.map.s_count);
    return sol;
}

MpcSolution mpc_solve(const SystemModel& sys, const Vector& x0, const CostSpec& cost,
                      const ConstraintSpec& constraints, int T_f, const SolveSettings& settings) {
    if (x0.size() != sys.n) throw DimensionMismatch("mpc_solve: x0 dimension mismatch");
    if (T_f < 1) throw DimensionMismatch("mpc_solve: T_f < 1");
    // y = O x0 + T u with the recursion eliminated
    Matrix G = toeplitz_impulse(sys, T_f);
    Vector y0 = observability_matrix(sys, T_f) * x0;

    ProgramBuilder B;
    const int nu = sys.m * T_f;
    for (int j = 0; j < nu; ++j) B.new_var();

    if (constraints.u_lower.size() > 0)
        add_box_rows(B, Matrix::Identity(nu, nu), constraints.u_lower, constraints.u_upper, 0);
    if (constraints.has_output_box()) {
        const auto& box = std::get<OutputBox>(constraints.output);
        add_box_rows(B, G, box.lower - y0, box.upper - y0, 0);
    }
    add_cost_terms(B, cost.f1, Matrix::Identity(nu, nu), Vector::Zero(nu), 1.0, 0, false);
    add_cost_terms(B, cost.f2, G, -y0, 1.0, 0, false);

    SolveResult res = solve(B.finalize(), settings);
    if (res.status == SolveStatus::Infeasible) throw Infeasible("mpc_solve: problem infeasible");
    if (res.status != SolveStatus::Optimal)
        throw SolverFailure(std::string("mpc_solve: solver status ") + to_string(res.status));

    MpcSolution sol;
    Vector u = res.x.head(nu);
    Vector y = G * u + y0;
    sol.u = Signal::from_stacked(u, sys.m);
    sol.y = Signal::from_stacked(y, sys.p);
    double obj = 0.0;
    for (const auto& t : cost.f1) obj += t.evaluate(u);
    for (const auto& t : cost.f2) obj += t.evaluate(y);
    sol.objective = obj;
    sol.status = res.status;
    return sol;
}

}  // namespace deepc

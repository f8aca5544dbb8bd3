#include "deepc/conic.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <iostream>
#include <ostream>

namespace deepc {

namespace {

enum class RowCone { Zero, Nonneg, Soc };

// Flattened view of the program: A x + s = b with s in K, K a product of
// {0}, R+, and second-order cones.
struct Stacked {
    Matrix A;
    Vector b;
    std::vector<RowCone> row_cone;          // per row
    std::vector<std::pair<int, int>> socs;  // (offset, dim) of each SOC block
    int n = 0;
    int M = 0;
    int eq = 0;
};

Stacked stack(const ConicProgram& prog) {
    Stacked st;
    st.n = prog.var_count;
    st.eq = prog.eq_rows();
    int rows = st.eq;
    for (const auto& blk : prog.cone_rows) rows += static_cast<int>(blk.A.rows());
    st.M = rows;
    st.A.setZero(rows, st.n);
    st.b.setZero(rows);
    st.row_cone.assign(rows, RowCone::Zero);
    if (st.eq > 0) {
        st.A.topRows(st.eq) = prog.Aeq;
        st.b.head(st.eq) = prog.beq;
    }
    int off = st.eq;
    for (const auto& blk : prog.cone_rows) {
        int d = static_cast<int>(blk.A.rows());
        st.A.middleRows(off, d) = blk.A;
        st.b.segment(off, d) = blk.b;
        for (int i = 0; i < d; ++i)
            st.row_cone[off + i] = blk.cone == ConeType::Nonneg ? RowCone::Nonneg : RowCone::Soc;
        if (blk.cone == ConeType::SecondOrder) st.socs.emplace_back(off, d);
        off += d;
    }
    return st;
}

Vector project_soc(const Vector& v) {
    const int d = static_cast<int>(v.size());
    if (d == 1) return Vector::Constant(1, std::max(v(0), 0.0));
    double t = v(0);
    double nu = v.tail(d - 1).norm();
    if (nu <= t) return v;
    Vector out = Vector::Zero(d);
    if (nu <= -t) return out;
    double a = 0.5 * (1.0 + t / nu);
    out(0) = a * nu;
    out.tail(d - 1) = a * v.tail(d - 1);
    return out;
}

// Projection of s = b - Ax candidates onto K, blockwise.
Vector project_cone(const Stacked& st, const Vector& s) {
    Vector out = s;
    for (int i = 0; i < st.M; ++i) {
        if (st.row_cone[i] == RowCone::Zero)
            out(i) = 0.0;
        else if (st.row_cone[i] == RowCone::Nonneg)
            out(i) = std::max(out(i), 0.0);
    }
    for (const auto& [off, d] : st.socs) out.segment(off, d) = project_soc(s.segment(off, d));
    return out;
}

// Projection onto the dual cone K* (equality duals are free).
Vector project_dual_cone(const Stacked& st, const Vector& y) {
    Vector out = y;
    for (int i = 0; i < st.M; ++i)
        if (st.row_cone[i] == RowCone::Nonneg) out(i) = std::max(out(i), 0.0);
    for (const auto& [off, d] : st.socs) out.segment(off, d) = project_soc(y.segment(off, d));
    return out;
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

#define POLISH_FAIL(reason) \
    do { if (std::getenv("CONIC_DEBUG")) std::cerr << "polish fail: " << reason << "\n"; return false; } while (0)


struct Scaling {
    Vector D;  // variable scaling
    Vector E;  // row scaling
    double c = 1.0;
};

Scaling equilibrate(Matrix& P, Vector& q, Stacked& st) {
    const int n = st.n;
    const int M = st.M;
    Scaling sc;
    sc.D = Vector::Ones(n);
    sc.E = Vector::Ones(M);
    for (int iter = 0; iter < 10; ++iter) {
        Vector dcol(n), erow(M);
        for (int j = 0; j < n; ++j) {
            double nrm = M > 0 ? st.A.col(j).lpNorm<Eigen::Infinity>() : 0.0;
            if (P.size() > 0) nrm = std::max(nrm, P.col(j).lpNorm<Eigen::Infinity>());
            dcol(j) = nrm > 1e-12 ? 1.0 / std::sqrt(nrm) : 1.0;
        }
        for (int i = 0; i < M; ++i) {
            double nrm = st.A.row(i).lpNorm<Eigen::Infinity>();
            erow(i) = nrm > 1e-12 ? 1.0 / std::sqrt(nrm) : 1.0;
        }
        // SOC blocks must be scaled uniformly to stay cone-invariant; leave
        // them at unit scale (mixed per-row factors would deform the cone).
        for (const auto& [off, d] : st.socs)
            for (int i = 0; i < d; ++i) erow(off + i) = 1.0;
        if (P.size() > 0) P = dcol.asDiagonal() * P * dcol.asDiagonal();
        q = dcol.cwiseProduct(q);
        if (M > 0) st.A = erow.asDiagonal() * st.A * dcol.asDiagonal();
        st.b = st.b.cwiseProduct(erow);
        sc.D = sc.D.cwiseProduct(dcol);
        sc.E = sc.E.cwiseProduct(erow);
    }
    // cost normalization
    double cost_nrm = inf_norm(q);
    if (P.size() > 0) {
        for (int j = 0; j < n; ++j) cost_nrm = std::max(cost_nrm, P.col(j).lpNorm<Eigen::Infinity>());
    }
    if (cost_nrm > 1e-12) {
        sc.c = 1.0 / cost_nrm;
        P *= sc.c;
        q *= sc.c;
    }
    return sc;
}

Vector rho_vector(const Stacked& st, double rho) {
    Vector R(st.M);
    for (int i = 0; i < st.M; ++i) R(i) = st.row_cone[i] == RowCone::Zero ? rho * 1e3 : rho;
    return R;
}

// Unscaled residual computation used for termination.
struct Unscaled {
    double rp, rd, gap;
    double rp_rel, rd_rel, gap_rel;
};

Unscaled unscaled_residuals(const ConicProgram& prog, const Stacked& raw, const Vector& x,
                            const Vector& y, const Vector& z_unscaled) {
    Unscaled u{};
    Vector Ax = raw.M > 0 ? Vector(raw.A * x) : Vector();
    Vector Px = prog.P.size() > 0 ? Vector(prog.P * x) : Vector::Zero(x.size());
    Vector Aty = raw.M > 0 ? Vector(raw.A.transpose() * y) : Vector::Zero(x.size());
    u.rp = raw.M > 0 ? inf_norm(Ax - z_unscaled) : 0.0;
    u.rd = inf_norm(Px + prog.q + Aty);
    double pscale = raw.M > 0 ? std::max({inf_norm(Ax), inf_norm(z_unscaled), inf_norm(raw.b)}) : 0.0;
    double dscale = std::max({inf_norm(Px), inf_norm(Aty), inf_norm(prog.q)});
    u.rp_rel = 1.0 + pscale;
    u.rd_rel = 1.0 + dscale;
    double pobj = 0.5 * x.dot(Px) + prog.q.dot(x);
    double gap = x.dot(Px) + prog.q.dot(x) + (raw.M > 0 ? raw.b.dot(y) : 0.0);
    u.gap = std::abs(gap);
    u.gap_rel = 1.0 + std::abs(pobj);
    return u;
}

// Candidate z (= Ax clipped into b - K) used to evaluate unscaled residuals at
// an arbitrary primal point.
Vector feasible_z(const Stacked& raw, const Vector& x) {
    Vector z = raw.A * x;
    Vector s = raw.b - z;
    Vector sp = project_cone(raw, s);
    return raw.b - sp;
}

// Active-set polish. The cone rows are classified from the current iterate
// (nonneg rows active/inactive; SOC blocks inactive, on the smooth boundary
// ||s_tail|| = s_0, or pinned at the vertex s = 0). Each pass then runs three
// well-conditioned steps: Gauss-Newton restoration onto the active manifold,
// a complementarity-preserving least-squares dual fit, and a few damped Newton
// iterations on the resulting KKT system. Failed sign or cone checks repair
// the classification for the next pass; a candidate is accepted only when its
// genuine unscaled residuals meet the solver tolerances.
bool polish(const ConicProgram& prog, const Stacked& raw, const SolveSettings& settings, Vector& x,
            Vector& y) {
    const int n = raw.n;
    const double act_tol = 1e-4;

    enum Kind { Inactive, Smooth, Vertex };
    const int n_soc = static_cast<int>(raw.socs.size());
    std::vector<bool> lin_active(raw.M, false);
    std::vector<Kind> soc_kind(n_soc, Inactive);
    std::vector<bool> in_soc(raw.M, false);
    for (const auto& [off, d] : raw.socs)
        for (int i = 0; i < d; ++i) in_soc[off + i] = true;

    Vector s_now = raw.b - raw.A * x;
    for (int i = 0; i < raw.M; ++i) {
        if (in_soc[i]) continue;
        if (raw.row_cone[i] == RowCone::Zero)
            lin_active[i] = true;
        else if (s_now(i) < act_tol * (1.0 + std::abs(raw.b(i))) || y(i) > act_tol)
            lin_active[i] = true;
    }
    // For SOC blocks the dual is the more reliable signal near the solution:
    // an inactive block has a vanishing dual, a smooth-boundary block has its
    // dual on the boundary ray of the dual cone, and a vertex block has a
    // strictly interior dual.
    for (int b = 0; b < n_soc; ++b) {
        const auto& [off, d] = raw.socs[b];
        if (d == 1) {
            if (s_now(off) < act_tol || y(off) > act_tol) soc_kind[b] = Vertex;  // t = 0
            continue;
        }
        double s0 = s_now(off);
        double tail = s_now.segment(off + 1, d - 1).norm();
        double y0 = y(off);
        double ytail = y.segment(off + 1, d - 1).norm();
        bool primal_interior = s0 - tail > act_tol * (1.0 + s0);
        bool dual_zero = y0 + ytail < act_tol * (1.0 + std::abs(y0));
        if (primal_interior && dual_zero)
            soc_kind[b] = Inactive;
        else if (y0 - ytail > act_tol * (1.0 + std::abs(y0)))
            soc_kind[b] = Vertex;
        else if (!dual_zero || !primal_interior)
            soc_kind[b] = Smooth;
    }

    Vector xp = x;
    Vector x_best, y_best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 4; ++pass) {
        std::vector<int> active;
        for (int i = 0; i < raw.M; ++i)
            if (lin_active[i]) active.push_back(i);
        const int n_lin = static_cast<int>(active.size());
        std::vector<int> smooth, vertex;
        for (int b = 0; b < n_soc; ++b) {
            if (soc_kind[b] == Smooth) smooth.push_back(b);
            if (soc_kind[b] == Vertex) vertex.push_back(b);
        }
        int n_vertex = 0;
        for (int b : vertex) n_vertex += raw.socs[b].second;
        const int n_smooth = static_cast<int>(smooth.size());
        const int mlt = n_lin + n_smooth + n_vertex;
        if (mlt == 0 && prog.P.size() == 0) POLISH_FAIL("no multipliers, no curvature");

        // constraint values c(x) and Jacobian G(x) of the active manifold
        auto constraint_vals = [&](const Vector& xv) {
            Vector c(mlt);
            Vector s = raw.b - raw.A * xv;
            int k = 0;
            for (int i : active) c(k++) = -s(i);
            for (int b : smooth) {
                const auto& [off, d] = raw.socs[b];
                c(k++) = s.segment(off + 1, d - 1).norm() - s(off);
            }
            for (int b : vertex) {
                const auto& [off, d] = raw.socs[b];
                for (int i = 0; i < d; ++i) c(k++) = -s(off + i);
            }
            return c;
        };
        auto constraint_jac = [&](const Vector& xv) {
            Matrix G = Matrix::Zero(mlt, n);
            Vector s = raw.b - raw.A * xv;
            int k = 0;
            for (int i : active) G.row(k++) = raw.A.row(i);
            for (int b : smooth) {
                const auto& [off, d] = raw.socs[b];
                Vector tail = s.segment(off + 1, d - 1);
                double nt = std::max(tail.norm(), 1e-300);
                Vector grad_s(d);
                grad_s(0) = -1.0;
                grad_s.tail(d - 1) = tail / nt;
                G.row(k++) = -grad_s.transpose() * raw.A.middleRows(off, d);
            }
            for (int b : vertex) {
                const auto& [off, d] = raw.socs[b];
                for (int i = 0; i < d; ++i) G.row(k++) = raw.A.row(off + i);
            }
            return G;
        };

        // 1) Gauss-Newton restoration onto the active manifold
        for (int it = 0; it < 20 && mlt > 0; ++it) {
            Vector c = constraint_vals(xp);
            if (c.lpNorm<Eigen::Infinity>() < 1e-13 * (1.0 + inf_norm(raw.b))) break;
            Matrix G = constraint_jac(xp);
            Matrix GGt = G * G.transpose() + 1e-12 * Matrix::Identity(mlt, mlt);
            Vector dx = -G.transpose() * GGt.llt().solve(c);
            if (!dx.allFinite()) dx = -G.transpose() * GGt.completeOrthogonalDecomposition().solve(c);
            if (!dx.allFinite()) POLISH_FAIL("restoration breakdown");
            xp += dx;
        }

        // 2) complementarity-preserving dual fit: one multiplier per active
        //    nonneg/eq row and smooth block (along the boundary ray), a free
        //    multiplier per vertex row
        Vector grad0 = prog.q;
        if (prog.P.size() > 0) grad0 += prog.P * xp;
        Vector mu = Vector::Zero(mlt);
        if (mlt > 0) {
            Matrix B = constraint_jac(xp).transpose();  // n x mlt
            mu = B.completeOrthogonalDecomposition().solve(-grad0);
        }

        // 3) damped Newton on the KKT system with iterative refinement; the
        //    Lagrangian curvature of small-norm boundary blocks makes the
        //    system stiff, so the linear solves avoid rank truncation
        auto evaluate = [&](const Vector& xv, const Vector& mv, Matrix& G, Vector& c,
                            Vector& grad) {
            G = constraint_jac(xv);
            c = constraint_vals(xv);
            grad = prog.q;
            if (prog.P.size() > 0) grad += prog.P * xv;
            grad += G.transpose() * mv;
        };
        Matrix G;
        Vector c, grad;
        evaluate(xp, mu, G, c, grad);
        for (int newton = 0; newton < 30; ++newton) {
            double phi0 = grad.lpNorm<Eigen::Infinity>() + (mlt > 0 ? c.lpNorm<Eigen::Infinity>() : 0.0);
            if (phi0 < 1e-11 * (1.0 + inf_norm(prog.q))) break;
            Matrix H = prog.P.size() > 0 ? prog.P : Matrix::Zero(n, n);
            {
                Vector s = raw.b - raw.A * xp;
                int k = n_lin;
                for (int b : smooth) {
                    const auto& [off, d] = raw.socs[b];
                    Vector tail = s.segment(off + 1, d - 1);
                    double nt = tail.norm();
                    if (nt > 1e-300) {
                        Matrix Hs = (Matrix::Identity(d - 1, d - 1) -
                                     (tail / nt) * (tail / nt).transpose()) /
                                    nt;
                        const Matrix& At = raw.A.middleRows(off + 1, d - 1);
                        H += mu(k) * At.transpose() * Hs * At;
                    }
                    ++k;
                }
            }
            Matrix K = Matrix::Zero(n + mlt, n + mlt);
            K.topLeftCorner(n, n) = H + 1e-12 * Matrix::Identity(n, n);
            K.topRightCorner(n, mlt) = G.transpose();
            K.bottomLeftCorner(mlt, n) = G;
            // small dual regularization keeps K invertible when the guessed
            // active set carries redundant rows
            K.bottomRightCorner(mlt, mlt) -= 1e-11 * Matrix::Identity(mlt, mlt);
            Vector rhs(n + mlt);
            rhs.head(n) = -grad;
            rhs.tail(mlt) = -c;
            const double kscale = K.cwiseAbs().maxCoeff();
            double t = 1.0;
            bool accepted = false;
            Matrix Gt;
            Vector ct, gradt, step;
            // far from the solution the exact step overshoots along the stiff
            // curvature directions; escalating Levenberg regularization then
            // plays the role of a trust region
            for (double reg : {0.0, 1e-8, 1e-5, 1e-3, 1e-1}) {
                Matrix Kr = K;
                double d = reg * kscale;
                Kr.diagonal().head(n).array() += d;
                Kr.diagonal().tail(mlt).array() -= d;
                Eigen::PartialPivLU<Matrix> lu(Kr);
                step = lu.solve(rhs);
                if (step.allFinite()) {
                    // one refinement pass in extended precision against the
                    // stiff curvature of near-vertex blocks
                    Eigen::Matrix<long double, Eigen::Dynamic, 1> r =
                        rhs.cast<long double>() - Kr.cast<long double>() * step.cast<long double>();
                    step += lu.solve(Vector(r.cast<double>()));
                }
                if (!step.allFinite()) continue;
                t = 1.0;
                for (int bt = 0; bt < 20; ++bt, t *= 0.5) {
                    evaluate(xp + t * step.head(n), mu + t * step.tail(mlt), Gt, ct, gradt);
                    double phi = gradt.lpNorm<Eigen::Infinity>() +
                                 (mlt > 0 ? ct.lpNorm<Eigen::Infinity>() : 0.0);
                    if (phi <= (1.0 - 1e-4 * t) * phi0) {
                        accepted = true;
                        break;
                    }
                }
                if (accepted) break;
            }
            if (!accepted) break;  // residual floor reached; use best point
            xp += t * step.head(n);
            mu += t * step.tail(mlt);
            G = std::move(Gt);
            c = std::move(ct);
            grad = std::move(gradt);
        }

        // reconstruct the full dual vector from the multipliers
        Vector yp = Vector::Zero(raw.M);
        {
            Vector s = raw.b - raw.A * xp;
            int k = 0;
            for (int i : active) yp(i) = mu(k++);
            for (int b : smooth) {
                const auto& [off, d] = raw.socs[b];
                Vector tail = s.segment(off + 1, d - 1);
                double nt = tail.norm();
                yp(off) = mu(k);
                if (nt > 1e-300) yp.segment(off + 1, d - 1) = -mu(k) * tail / nt;
                ++k;
            }
            for (int b : vertex) {
                const auto& [off, d] = raw.socs[b];
                for (int i = 0; i < d; ++i) yp(off + i) = mu(k++);
            }
        }

        // candidate acceptance: project the dual into its cone and measure the
        // genuine unscaled residuals; a point passing the full tolerances is
        // certified regardless of how the classification looked
        {
            Vector ycand = project_dual_cone(raw, yp);
            Unscaled cand = unscaled_residuals(prog, raw, xp, ycand, feasible_z(raw, xp));
            double score = std::max({cand.rp / cand.rp_rel / settings.tol_primal,
                                     cand.rd / cand.rd_rel / settings.tol_dual,
                                     cand.gap / cand.gap_rel / settings.tol_gap});
            if (std::getenv("CONIC_DEBUG"))
                std::cerr << "  pass " << pass << " score=" << score << " nlin=" << n_lin
                          << " nsm=" << n_smooth << " nvx=" << static_cast<int>(vertex.size())
                          << " rp=" << cand.rp / cand.rp_rel << " rd=" << cand.rd / cand.rd_rel
                          << " gap=" << cand.gap / cand.gap_rel << "\n";
            if (score < best_score) {
                best_score = score;
                x_best = xp;
                y_best = ycand;
            }
            if (score <= 1.0) {
                x = xp;
                y = ycand;
                return true;
            }
        }

        // repair the classification from whichever check failed
        bool changed = false;
        const double chk = 1e-7;
        Vector s = raw.b - raw.A * xp;
        for (int i = 0; i < raw.M; ++i) {
            if (in_soc[i] || raw.row_cone[i] != RowCone::Nonneg) continue;
            if (!lin_active[i] && s(i) < -chk * (1.0 + std::abs(raw.b(i)))) {
                lin_active[i] = true;
                changed = true;
            } else if (lin_active[i] && yp(i) < -chk) {
                lin_active[i] = false;
                changed = true;
            }
        }
        for (int b = 0; b < n_soc; ++b) {
            const auto& [off, d] = raw.socs[b];
            Vector blk = s.segment(off, d);
            Vector dual = yp.segment(off, d);
            double sdev = (blk - project_soc(blk)).lpNorm<Eigen::Infinity>();
            double ddev = (dual - project_soc(dual)).lpNorm<Eigen::Infinity>();
            if (sdev > chk * (1.0 + inf_norm(raw.b))) {
                // slack escaped the cone: an inactive block was active after
                // all, a smooth block has degenerated to the tip
                soc_kind[b] = soc_kind[b] == Smooth ? Vertex : Smooth;
                changed = true;
            } else if (ddev > chk * (1.0 + dual.lpNorm<Eigen::Infinity>())) {
                // dual escaped its cone: a pinned vertex actually sits on the
                // smooth boundary, a smooth block is not active after all
                soc_kind[b] = soc_kind[b] == Smooth ? Inactive : Smooth;
                changed = true;
            }
        }
        if (!changed) break;  // stable classification that still misses tolerance
    }

    // no pass met the tolerances outright; keep the best candidate if it at
    // least improves on the iterate the polish started from
    Unscaled before = unscaled_residuals(prog, raw, x, y, feasible_z(raw, x));
    double before_score = std::max({before.rp / before.rp_rel / settings.tol_primal,
                                    before.rd / before.rd_rel / settings.tol_dual,
                                    before.gap / before.gap_rel / settings.tol_gap});
    if (best_score < before_score) {
        x = x_best;
        y = y_best;
        return best_score <= 1.0;
    }
    POLISH_FAIL("no improvement: best=" << best_score << " before=" << before_score);
}



}  // namespace

int ConicProgram::total_cone_rows() const {
    int r = 0;
    for (const auto& blk : cone_rows) r += static_cast<int>(blk.A.rows());
    return r;
}

void ConicProgram::add_nonneg(Matrix A, Vector b) {
    if (A.rows() != b.size() || A.cols() != var_count)
        throw DimensionMismatch("ConicProgram::add_nonneg: shape mismatch");
    cone_rows.push_back({std::move(A), std::move(b), ConeType::Nonneg});
}

void ConicProgram::add_soc(Matrix A, Vector b) {
    if (A.rows() != b.size() || A.cols() != var_count || A.rows() < 1)
        throw DimensionMismatch("ConicProgram::add_soc: shape mismatch");
    cone_rows.push_back({std::move(A), std::move(b), ConeType::SecondOrder});
}

double ConicProgram::objective_at(const Vector& x) const {
    double v = q.dot(x) + obj_const;
    if (P.size() > 0) v += 0.5 * x.dot(P * x);
    return v;
}

void ConicProgram::validate() const {
    if (var_count < 1) throw DimensionMismatch("ConicProgram: no variables");
    if (q.size() != var_count) throw DimensionMismatch("ConicProgram: q size");
    if (P.size() > 0) {
        if (P.rows() != var_count || P.cols() != var_count)
            throw DimensionMismatch("ConicProgram: P shape");
        if ((P - P.transpose()).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + P.lpNorm<Eigen::Infinity>()))
            throw DimensionMismatch("ConicProgram: P not symmetric");
        Eigen::LLT<Matrix> llt(P + 1e-9 * (1.0 + P.lpNorm<Eigen::Infinity>()) * Matrix::Identity(var_count, var_count));
        if (llt.info() != Eigen::Success) throw DimensionMismatch("ConicProgram: P not PSD");
    }
    if (Aeq.rows() != beq.size()) throw DimensionMismatch("ConicProgram: Aeq/beq rows");
    if (Aeq.rows() > 0 && Aeq.cols() != var_count) throw DimensionMismatch("ConicProgram: Aeq cols");
    for (const auto& blk : cone_rows)
        if (blk.A.cols() != var_count || blk.A.rows() != blk.b.size())
            throw DimensionMismatch("ConicProgram: cone block shape");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        default: return "iter_limit";
    }
}

void ConicProgram::dump(std::ostream& os) const {
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "vars " << var_count << "\n";
    os << "obj_const " << obj_const << "\n";
    auto triplets = [&os](const char* name, const Matrix& A) {
        os << name << " " << A.rows() << " " << A.cols() << "\n";
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                if (A(i, j) != 0.0) os << i << " " << j << " " << A(i, j) << "\n";
        os << "end\n";
    };
    if (P.size() > 0) triplets("P", P);
    os << "q";
    for (Eigen::Index i = 0; i < q.size(); ++i) os << " " << q(i);
    os << "\n";
    triplets("Aeq", Aeq);
    os << "beq";
    for (Eigen::Index i = 0; i < beq.size(); ++i) os << " " << beq(i);
    os << "\n";
    for (const auto& blk : cone_rows) {
        os << "cone " << (blk.cone == ConeType::Nonneg ? "nonneg" : "soc") << "\n";
        triplets("A", blk.A);
        os << "b";
        for (Eigen::Index i = 0; i < blk.b.size(); ++i) os << " " << blk.b(i);
        os << "\n";
    }
}

SolveResult solve(const ConicProgram& prog, const SolveSettings& settings) {
    prog.validate();
    Stacked raw = stack(prog);
    const int n = raw.n;
    const int M = raw.M;

    // scaled working copies
    Stacked st = raw;
    Matrix P = prog.P.size() > 0 ? prog.P : Matrix();
    Vector q = prog.q;
    Scaling sc;
    sc.D = Vector::Ones(n);
    sc.E = Vector::Ones(M);
    if (settings.scaling) sc = equilibrate(P, q, st);

    double rho = settings.rho;
    Vector R = rho_vector(st, rho);
    const double sigma = settings.sigma;

    auto factorize = [&](const Vector& Rv) {
        Matrix Mmat = sigma * Matrix::Identity(n, n);
        if (P.size() > 0) Mmat += P;
        if (M > 0) Mmat += st.A.transpose() * Rv.asDiagonal() * st.A;
        Eigen::LLT<Matrix> llt(Mmat);
        if (llt.info() != Eigen::Success) throw NumericalBreakdown("conic solve: KKT factorization failed");
        return llt;
    };
    Eigen::LLT<Matrix> llt = factorize(R);

    Vector x = Vector::Zero(n);
    Vector z = project_cone(st, st.b);  // z lives in C = b - K after the first projection
    z = st.b - z;
    Vector y = Vector::Zero(M);
    Vector x_chk = x, y_chk = y;

    SolveResult res;
    res.status = SolveStatus::IterLimit;
    const int check_every = 25;
    const double alpha = settings.relax;
    int polish_interval = 250;
    int next_polish = 500;
    int iter = 0;
    for (iter = 1; iter <= settings.max_iter; ++iter) {
        Vector rhs = sigma * x - q;
        if (M > 0) rhs += st.A.transpose() * (R.cwiseProduct(z) - y);
        Vector xt = llt.solve(rhs);
        Vector zt = M > 0 ? Vector(st.A * xt) : Vector();
        x = alpha * xt + (1.0 - alpha) * x;
        if (M > 0) {
            Vector v = alpha * zt + (1.0 - alpha) * z;
            Vector cand = v + y.cwiseQuotient(R);
            z = st.b - project_cone(st, st.b - cand);
            y += R.cwiseProduct(v - z);
        }

        if (iter % check_every != 0 && iter != settings.max_iter) continue;

        // unscaled candidates
        Vector xu = sc.D.cwiseProduct(x);
        Vector yu = M > 0 ? Vector(sc.E.cwiseProduct(y) / sc.c) : Vector();
        Vector zu = M > 0 ? Vector(z.cwiseQuotient(sc.E)) : Vector();
        Unscaled u = unscaled_residuals(prog, raw, xu, yu, zu);
        if (u.rp <= settings.tol_primal * u.rp_rel && u.rd <= settings.tol_dual * u.rd_rel &&
            u.gap <= settings.tol_gap * u.gap_rel) {
            res.status = SolveStatus::Optimal;
            res.x = xu;
            res.y = yu;
            res.iterations = iter;
            break;
        }

        // once moderately converged the active set is usually stable: try the
        // Newton polish early and stop if it already meets the tolerances.
        // Failed attempts back off exponentially — on degenerate programs the
        // active set only becomes identifiable late, and each attempt costs
        // many factorization-sized solves.
        if (settings.polish && iter >= next_polish && u.rp <= 1e-3 * u.rp_rel &&
            u.rd <= 1e-3 * u.rd_rel) {
            polish_interval = std::min(polish_interval * 2, 16000);
            next_polish = iter + polish_interval;
            Vector xp = xu, yp = yu;
            if (polish(prog, raw, settings, xp, yp)) {
                Unscaled up = unscaled_residuals(prog, raw, xp, yp, feasible_z(raw, xp));
                if (up.rp <= settings.tol_primal * up.rp_rel &&
                    up.rd <= settings.tol_dual * up.rd_rel &&
                    up.gap <= settings.tol_gap * up.gap_rel) {
                    res.status = SolveStatus::Optimal;
                    res.x = xp;
                    res.y = yp;
                    res.iterations = iter;
                    break;
                }
            }
        }

        // infeasibility certificates from iterate differences
        Vector dy = sc.E.cwiseProduct(y - y_chk) / sc.c;
        Vector dx = sc.D.cwiseProduct(x - x_chk);
        double ndy = inf_norm(dy);
        if (M > 0 && ndy > 1e-12) {
            Vector dyn = dy / ndy;
            Vector dproj = project_dual_cone(raw, dyn);
            bool in_dual = (dyn - dproj).lpNorm<Eigen::Infinity>() <= 1e-5;
            double aty = inf_norm(raw.A.transpose() * dyn);
            if (in_dual && aty <= settings.tol_infeas * 1e3 && raw.b.dot(dyn) < -settings.tol_infeas) {
                res.status = SolveStatus::Infeasible;
                res.x = xu;
                res.y = yu;
                res.iterations = iter;
                break;
            }
        }
        double ndx = inf_norm(dx);
        if (ndx > 1e-12) {
            Vector dxn = dx / ndx;
            double pdx = prog.P.size() > 0 ? inf_norm(prog.P * dxn) : 0.0;
            bool recession = true;
            if (M > 0) {
                Vector adx = raw.A * dxn;
                for (int i = 0; i < M && recession; ++i) {
                    if (raw.row_cone[i] == RowCone::Zero && std::abs(adx(i)) > 1e-6) recession = false;
                    if (raw.row_cone[i] == RowCone::Nonneg && adx(i) > 1e-6) recession = false;
                }
                for (const auto& [off, d] : raw.socs) {
                    Vector blk = -adx.segment(off, d);
                    if ((blk - project_soc(blk)).lpNorm<Eigen::Infinity>() > 1e-6) recession = false;
                }
            }
            if (pdx <= settings.tol_infeas * 1e3 && prog.q.dot(dxn) < -settings.tol_infeas && recession) {
                res.status = SolveStatus::Unbounded;
                res.x = xu;
                res.y = yu;
                res.iterations = iter;
                break;
            }
        }
        x_chk = x;
        y_chk = y;

        // rho adaptation only early on: it corrects a badly scaled start but
        // keeps perturbing the slow tail convergence of degenerate programs
        if (settings.adaptive_rho && iter % 1000 == 0 && iter <= 10000 && M > 0) {
            double pr = u.rp / u.rp_rel;
            double dr = std::max(u.rd / u.rd_rel, 1e-14);
            double ratio = std::sqrt(std::max(pr, 1e-14) / dr);
            if (ratio > 5.0 || ratio < 0.2) {
                rho = std::clamp(rho * ratio, 1e-6, 1e6);
                R = rho_vector(st, rho);
                llt = factorize(R);
            }
        }
    }
    if (res.x.size() == 0) {
        res.x = sc.D.cwiseProduct(x);
        res.y = M > 0 ? Vector(sc.E.cwiseProduct(y) / sc.c) : Vector();
        res.iterations = settings.max_iter;
    }

    if (res.status == SolveStatus::Optimal && settings.polish) polish(prog, raw, settings, res.x, res.y);

    // last-chance polish: a stalled run may still sit on the right active set
    if (res.status == SolveStatus::IterLimit && settings.polish) {
        Vector xp = res.x, yp = res.y;
        if (polish(prog, raw, settings, xp, yp)) {
            Unscaled up = unscaled_residuals(prog, raw, xp, yp, feasible_z(raw, xp));
            if (up.rp <= settings.tol_primal * up.rp_rel && up.rd <= settings.tol_dual * up.rd_rel &&
                up.gap <= settings.tol_gap * up.gap_rel) {
                res.status = SolveStatus::Optimal;
                res.x = xp;
                res.y = yp;
            }
        }
    }

    if (res.status == SolveStatus::Optimal || res.status == SolveStatus::IterLimit) {
        ResidualTriple rt = residuals(prog, res.x, res.y);
        res.primal_residual = rt.primal;
        res.dual_residual = rt.dual;
        res.gap = rt.gap;
        res.slack = M > 0 ? Vector(raw.b - raw.A * res.x) : Vector();
        res.objective = prog.objective_at(res.x);
    }
    return res;
}

ResidualTriple residuals(const ConicProgram& prog, const Vector& x, const Vector& y) {
    Stacked raw = stack(prog);
    if (x.size() != raw.n || (raw.M > 0 && y.size() != raw.M))
        throw DimensionMismatch("residuals: candidate size mismatch");
    ResidualTriple rt{0.0, 0.0, 0.0};
    Vector Px = prog.P.size() > 0 ? Vector(prog.P * x) : Vector::Zero(raw.n);
    double dscale = 1.0 + std::max(inf_norm(Px), inf_norm(prog.q));
    double pscale = 1.0;
    if (raw.M > 0) {
        Vector s = raw.b - raw.A * x;
        Vector sproj = project_cone(raw, s);
        rt.primal = (s - sproj).lpNorm<Eigen::Infinity>();
        pscale += std::max(inf_norm(Vector(raw.A * x)), inf_norm(raw.b));
        Vector Aty = raw.A.transpose() * y;
        dscale = 1.0 + std::max({inf_norm(Px), inf_norm(prog.q), inf_norm(Aty)});
        Vector ydist = y - project_dual_cone(raw, y);
        rt.dual = std::max((Px + prog.q + Aty).lpNorm<Eigen::Infinity>(), ydist.lpNorm<Eigen::Infinity>());
        double gap = x.dot(Px) + prog.q.dot(x) + raw.b.dot(y);
        rt.gap = std::abs(gap) / (1.0 + std::abs(0.5 * x.dot(Px) + prog.q.dot(x)));
    } else {
        rt.dual = (Px + prog.q).lpNorm<Eigen::Infinity>();
        rt.gap = 0.0;
    }
    rt.primal /= pscale;
    rt.dual /= dscale;
    return rt;
}

}  // namespace deepc

#include "seiar/qp.hpp"

#include "seiar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace seiar::qp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kMaxActiveSetChanges = 1 << 8;
constexpr double kMaxCondition = 1e12;

void check_shape(const QpProblem& p)
{
    if (p.n <= 0 || p.H.rows() != p.n || p.H.cols() != p.n || p.B.size() != p.n)
        throw ValidationError("qp: H must be n x n and B of length n");
    for (const auto& row : p.rows) {
        if (row.a.size() != p.n)
            throw ValidationError("qp: constraint row has the wrong length");
    }
    if (!p.H.allFinite() || !p.B.allFinite())
        throw NonFinite("qp: non-finite cost data");
}

bool feasible(const QpProblem& p, const VectorXd& x)
{
    return std::all_of(p.rows.begin(), p.rows.end(), [&](const QpRow& r) {
        return r.a.dot(x) <= r.b + feasibility_tol(r.b);
    });
}

MatrixXd stack_rows(const QpProblem& p, const std::vector<int>& idx)
{
    MatrixXd A(static_cast<Eigen::Index>(idx.size()), p.n);
    for (std::size_t k = 0; k < idx.size(); ++k)
        A.row(static_cast<Eigen::Index>(k)) = p.rows[static_cast<std::size_t>(idx[k])].a.transpose();
    return A;
}

VectorXd stack_rhs(const QpProblem& p, const std::vector<int>& idx)
{
    VectorXd b(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
        b[static_cast<Eigen::Index>(k)] = p.rows[static_cast<std::size_t>(idx[k])].b;
    return b;
}

/// Condition number of a symmetric positive matrix after Jacobi scaling.
double scaled_condition(const MatrixXd& M)
{
    const VectorXd d = M.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    const MatrixXd S = d.asDiagonal() * M * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0))
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

// Condition number of a square matrix after alternating row/column
// max-norm scaling.
double equilibrated_condition(MatrixXd M)
{
    for (int it = 0; it < 20; ++it) {
        const VectorXd r = M.rowwise().lpNorm<Eigen::Infinity>().cwiseMax(std::numeric_limits<double>::min());
        M = r.cwiseSqrt().cwiseInverse().asDiagonal() * M;
        const VectorXd c = M.colwise().lpNorm<Eigen::Infinity>().transpose().cwiseMax(std::numeric_limits<double>::min());
        M = M * c.cwiseSqrt().cwiseInverse().asDiagonal();
    }
    Eigen::JacobiSVD<MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 0.0))
        return std::numeric_limits<double>::infinity();
    return sv[0] / sv[sv.size() - 1];
}

template <class Visit>
void for_each_combination(int m, int k, Visit visit)
{
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    if (k > m)
        return;
    while (true) {
        visit(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i)
            --i;
        if (i < 0)
            return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

struct Factor {
    Eigen::LLT<MatrixXd> llt;
    bool regularized = false;
};

Factor factor_hessian(const MatrixXd& H)
{
    Factor f;
    f.llt.compute(H);
    if (f.llt.info() == Eigen::Success)
        return f;
    const double shift = 1e-12 * std::max(H.trace(), std::numeric_limits<double>::min());
    f.llt.compute(H + shift * MatrixXd::Identity(H.rows(), H.cols()));
    f.regularized = true;
    if (f.llt.info() != Eigen::Success)
        throw IllConditioned("qp: H is not positive definite even after regularization");
    return f;
}

QpSolution finish(const QpProblem& p, VectorXd x, const std::vector<int>& working,
                  const VectorXd& lambda_w, int iterations, bool regularized)
{
    QpSolution s;
    s.status = QpStatus::Optimal;
    s.objective = p.objective(x);
    s.x = std::move(x);
    s.multipliers = VectorXd::Zero(static_cast<Eigen::Index>(p.rows.size()));
    for (std::size_t k = 0; k < working.size(); ++k)
        s.multipliers[working[k]] = lambda_w[static_cast<Eigen::Index>(k)];
    s.active_set = working;
    std::sort(s.active_set.begin(), s.active_set.end());
    s.iterations = iterations;
    s.regularized = regularized;
    return s;
}

} // namespace

QpSolution solve(const QpProblem& p)
{
    check_shape(p);
    const Factor hf = factor_hessian(p.H);
    const auto& llt = hf.llt;
    const int m = static_cast<int>(p.rows.size());

    VectorXd x = llt.solve(-p.B);
    std::vector<int> working;

    if (!feasible(p, x)) {
        // Centroid of the feasible vertices of the polyhedron (restricted to
        // the H^-1-weighted row space when the rows do not span). It is
        // feasible by convexity and lies off every row that is not tight on
        // the whole feasible set, so the iteration does not start in a
        // degenerate corner.
        std::vector<int> all(static_cast<std::size_t>(m));
        std::iota(all.begin(), all.end(), 0);
        const MatrixXd A = stack_rows(p, all);
        const Eigen::Index rank = Eigen::FullPivLU<MatrixXd>(A).rank();

        VectorXd sum = VectorXd::Zero(p.n);
        int count = 0;
        for_each_combination(m, static_cast<int>(rank), [&](const std::vector<int>& idx) {
            const MatrixXd As = stack_rows(p, idx);
            VectorXd v;
            if (rank == p.n) {
                Eigen::FullPivLU<MatrixXd> lu(As);
                if (!lu.isInvertible())
                    return;
                v = lu.solve(stack_rhs(p, idx));
            } else {
                const MatrixXd hinv_at = llt.solve(As.transpose());
                const MatrixXd G = As * hinv_at;
                Eigen::FullPivLU<MatrixXd> lu(G);
                if (!lu.isInvertible() || scaled_condition(G) > kMaxCondition)
                    return;
                v = hinv_at * lu.solve(stack_rhs(p, idx));
            }
            if (!feasible(p, v))
                return;
            sum += v;
            ++count;
        });
        if (count == 0) {
            QpSolution s;
            s.status = QpStatus::Infeasible;
            s.regularized = hf.regularized;
            return s;
        }
        x = sum / count;
        if (!feasible(p, x))
            throw IllConditioned("qp: vertex centroid lost feasibility to rounding");
    }

    int changes = 0;
    int last_added = -1;
    bool at_subspace_minimum = false;
    while (true) {
        VectorXd step;
        VectorXd lambda;
        // A full working set pins a vertex: no step, x is snapped onto it and
        // the multipliers follow from the square system Aw' lambda = -g.
        const bool vertex = static_cast<int>(working.size()) == p.n;
        MatrixXd Av;
        if (vertex) {
            Av = stack_rows(p, working);
            if (equilibrated_condition(Av) > kMaxCondition)
                throw IllConditioned("qp: active vertex condition estimate above 1e12");
            x = Eigen::FullPivLU<MatrixXd>(Av).solve(stack_rhs(p, working));
        }
        const VectorXd g = p.H * x + p.B;
        const VectorXd hinv_g = llt.solve(g);

        if (vertex) {
            lambda = Eigen::FullPivLU<MatrixXd>(Av.transpose()).solve(-g);
            at_subspace_minimum = true;
        } else if (working.empty()) {
            step = -hinv_g;
        } else {
            const MatrixXd Aw = stack_rows(p, working);
            const MatrixXd hinv_at = llt.solve(Aw.transpose());
            const MatrixXd M = Aw * hinv_at;
            if (scaled_condition(M) > kMaxCondition) {
                if (last_added >= 0) {
                    working.erase(std::find(working.begin(), working.end(), last_added));
                    last_added = -1;
                    if (++changes > kMaxActiveSetChanges)
                        throw IllConditioned("qp: active-set iteration limit reached");
                    continue;
                }
                throw IllConditioned("qp: active-set KKT system condition estimate above 1e12");
            }
            // residual of the working rows pulls x back onto the face
            const VectorXd r = stack_rhs(p, working) - Aw * x;
            Eigen::LDLT<MatrixXd> ldlt(M);
            lambda = ldlt.solve(-(Aw * hinv_g + r));
            step = -(hinv_g + hinv_at * lambda);
        }

        const double scale = 1.0 + x.cwiseAbs().maxCoeff();
        if (at_subspace_minimum || step.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
            at_subspace_minimum = false;
            if (working.empty())
                return finish(p, x, working, VectorXd(), changes, hf.regularized);

            const double gscale = 1.0 + g.cwiseAbs().maxCoeff();
            int drop = -1;
            double most_negative = 0.0;
            for (std::size_t k = 0; k < working.size(); ++k) {
                const double anorm = p.rows[static_cast<std::size_t>(working[k])].a.cwiseAbs().maxCoeff();
                const double scaled = lambda[static_cast<Eigen::Index>(k)] * anorm;
                if (scaled < -1e-11 * gscale && scaled < most_negative) {
                    most_negative = scaled;
                    drop = static_cast<int>(k);
                }
            }
            if (drop < 0)
                return finish(p, x, working, lambda, changes, hf.regularized);
            working.erase(working.begin() + drop);
            last_added = -1;
        } else {
            double alpha = 1.0;
            int blocking = -1;
            for (int i = 0; i < m; ++i) {
                if (std::find(working.begin(), working.end(), i) != working.end())
                    continue;
                const QpRow& row = p.rows[static_cast<std::size_t>(i)];
                const double rate = row.a.dot(step);
                if (rate <= 0.0)
                    continue;
                const double room = std::max(row.b - row.a.dot(x), 0.0);
                const double a = room / rate;
                if (a < alpha) {
                    alpha = a;
                    blocking = i;
                }
            }
            x += alpha * step;
            if (blocking < 0) {
                // full step: x minimizes over the current working set
                at_subspace_minimum = true;
                continue;
            }
            working.push_back(blocking);
            last_added = blocking;
        }
        if (++changes > kMaxActiveSetChanges)
            throw IllConditioned("qp: active-set iteration limit reached");
    }
}

QpSolution kkt_enumerate_oracle(const QpProblem& p)
{
    check_shape(p);
    const int m = static_cast<int>(p.rows.size());
    if (p.n > 4 || m > 10)
        throw ValidationError("kkt_enumerate_oracle: limited to n <= 4 and at most 10 rows");

    QpSolution best;
    best.status = QpStatus::Infeasible;
    double best_obj = std::numeric_limits<double>::infinity();

    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i))
                idx.push_back(i);
        }
        const auto k = static_cast<Eigen::Index>(idx.size());
        if (k > p.n)
            continue;

        MatrixXd K = MatrixXd::Zero(p.n + k, p.n + k);
        VectorXd rhs(p.n + k);
        K.topLeftCorner(p.n, p.n) = p.H;
        rhs.head(p.n) = -p.B;
        if (k > 0) {
            const MatrixXd As = stack_rows(p, idx);
            K.topRightCorner(p.n, k) = As.transpose();
            K.bottomLeftCorner(k, p.n) = As;
            rhs.tail(k) = stack_rhs(p, idx);
        }
        Eigen::FullPivLU<MatrixXd> lu(K);
        if (!lu.isInvertible())
            continue;
        const VectorXd sol = lu.solve(rhs);
        const VectorXd x = sol.head(p.n);
        const VectorXd lam = sol.tail(k);

        if (!feasible(p, x))
            continue;
        const double lscale = 1e-9 * (1.0 + p.B.cwiseAbs().maxCoeff());
        if (k > 0 && lam.minCoeff() < -lscale)
            continue;

        const double obj = p.objective(x);
        if (obj < best_obj) {
            best_obj = obj;
            best.status = QpStatus::Optimal;
            best.x = x;
            best.objective = obj;
            best.active_set = idx;
            best.multipliers = VectorXd::Zero(m);
            for (Eigen::Index j = 0; j < k; ++j)
                best.multipliers[idx[static_cast<std::size_t>(j)]] = lam[j];
        }
    }
    return best;
}

KktReport check_kkt(const QpProblem& p, const QpSolution& s)
{
    KktReport r;
    VectorXd grad = p.H * s.x + p.B;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const double lam = s.multipliers[static_cast<Eigen::Index>(i)];
        const double slack = p.rows[i].a.dot(s.x) - p.rows[i].b;
        grad += lam * p.rows[i].a;
        r.primal = std::max(r.primal, slack);
        r.dual = std::max(r.dual, -lam);
        r.complementarity = std::max(r.complementarity, std::abs(lam * slack));
    }
    r.stationarity = grad.cwiseAbs().maxCoeff();
    return r;
}

} // namespace seiar::qp

#include "eigensymm/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace eigensymm {

namespace {
constexpr std::size_t kDirectSolverLimit = 100000;  // sparse LU up to 1e5 unknowns
}

struct Operator2D::Impl {
    Eigen::SparseMatrix<double> L;  // column-major for SparseLU
};

Operator2D::Operator2D(GridPtr grid, const MatrixField2D& A, const VectorField2D& v,
                       const ScalarField2D& V)
    : grid_(std::move(grid)), impl_(std::make_shared<Impl>()) {
    const Grid2D& g = *grid_;
    if (!A.positive_definite())
        throw std::invalid_argument("assemble: A must be positive definite on the mask");

    eq_of_cell_.assign(g.size(), -1);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) {
                eq_of_cell_[g.index(i, j)] = static_cast<int>(cell_of_eq_.size());
                cell_of_eq_.push_back(g.index(i, j));
            }
    if (cell_of_eq_.empty()) throw std::runtime_error("assemble: no interior cells");

    min_V_ = std::numeric_limits<double>::infinity();
    for (std::size_t k : cell_of_eq_) min_V_ = std::min(min_V_, V.data()[k]);

    const int n = static_cast<int>(cell_of_eq_.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * cell_of_eq_.size());

    const double hx = g.hx(), hy = g.hy();
    auto add = [&](int row, int i, int j, double val) {
        const int col = eq_of_cell_[g.index(i, j)];
        trip.emplace_back(row, col, val);
    };

    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const int row = eq_of_cell_[g.index(i, j)];
            double diag = V(i, j);

            const bool mW = g.masked(i - 1, j), mE = g.masked(i + 1, j);
            const bool mS = g.masked(i, j - 1), mN = g.masked(i, j + 1);

            // x-direction diffusion with boundary-distance spacing
            const double hW = mW ? hx : g.boundary_theta(i, j, -1, 0) * hx;
            const double hE = mE ? hx : g.boundary_theta(i, j, +1, 0) * hx;
            const double aW = mW ? 0.5 * (A.a11(i, j) + A.a11(i - 1, j)) : A.a11(i, j);
            const double aE = mE ? 0.5 * (A.a11(i, j) + A.a11(i + 1, j)) : A.a11(i, j);
            const double hax = 0.5 * (hW + hE);
            diag += aW / (hW * hax) + aE / (hE * hax);
            if (mW) add(row, i - 1, j, -aW / (hW * hax));
            if (mE) add(row, i + 1, j, -aE / (hE * hax));

            // y-direction
            const double hS = mS ? hy : g.boundary_theta(i, j, 0, -1) * hy;
            const double hN = mN ? hy : g.boundary_theta(i, j, 0, +1) * hy;
            const double aS = mS ? 0.5 * (A.a22(i, j) + A.a22(i, j - 1)) : A.a22(i, j);
            const double aN = mN ? 0.5 * (A.a22(i, j) + A.a22(i, j + 1)) : A.a22(i, j);
            const double hay = 0.5 * (hS + hN);
            diag += aS / (hS * hay) + aN / (hN * hay);
            if (mS) add(row, i, j - 1, -aS / (hS * hay));
            if (mN) add(row, i, j + 1, -aN / (hN * hay));

            // mixed-derivative part, interior faces only:
            // -d/dx(a12 du/dy) - d/dy(a12 du/dx) as shared face fluxes
            if (A.a12(i, j) != 0.0 || mW || mE || mS || mN) {
                auto mixed_x_face = [&](int ic, double sign) {
                    // face between (ic,j) and (ic+1,j)
                    if (!g.masked(ic, j) || !g.masked(ic + 1, j)) return;
                    const double a12f = 0.5 * (A.a12(ic, j) + A.a12(ic + 1, j));
                    if (a12f == 0.0) return;
                    const double c = sign * a12f / (4.0 * hy * hx);
                    for (int dx = 0; dx <= 1; ++dx)
                        for (int dy = -1; dy <= 1; dy += 2)
                            if (g.masked(ic + dx, j + dy))
                                add(row, ic + dx, j + dy, -c * dy);
                };
                auto mixed_y_face = [&](int jc, double sign) {
                    if (!g.masked(i, jc) || !g.masked(i, jc + 1)) return;
                    const double a12f = 0.5 * (A.a12(i, jc) + A.a12(i, jc + 1));
                    if (a12f == 0.0) return;
                    const double c = sign * a12f / (4.0 * hx * hy);
                    for (int dy = 0; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; dx += 2)
                            if (g.masked(i + dx, jc + dy))
                                add(row, i + dx, jc + dy, -c * dx);
                };
                mixed_x_face(i, +1.0);       // east face
                mixed_x_face(i - 1, -1.0);   // west face
                mixed_y_face(j, +1.0);       // north face
                mixed_y_face(j - 1, -1.0);   // south face
            }

            // drift v.grad: central when the row stays an M-matrix row,
            // upwind at the boundary band and at high face Peclet number
            const double vx = v.x(i, j), vy = v.y(i, j);
            if (vx != 0.0) {
                const bool central_ok =
                    mW && mE && std::abs(vx) * hx * 0.5 < 0.95 * std::min(aW, aE);
                if (central_ok) {
                    add(row, i + 1, j, vx / (2.0 * hx));
                    add(row, i - 1, j, -vx / (2.0 * hx));
                } else if (vx > 0.0) {
                    diag += vx / hW;
                    if (mW) add(row, i - 1, j, -vx / hW);
                } else {
                    diag += -vx / hE;
                    if (mE) add(row, i + 1, j, vx / hE);
                }
            }
            if (vy != 0.0) {
                const bool central_ok =
                    mS && mN && std::abs(vy) * hy * 0.5 < 0.95 * std::min(aS, aN);
                if (central_ok) {
                    add(row, i, j + 1, vy / (2.0 * hy));
                    add(row, i, j - 1, -vy / (2.0 * hy));
                } else if (vy > 0.0) {
                    diag += vy / hS;
                    if (mS) add(row, i, j - 1, -vy / hS);
                } else {
                    diag += -vy / hN;
                    if (mN) add(row, i, j + 1, vy / hN);
                }
            }

            trip.emplace_back(row, row, diag);
        }
    }

    impl_->L.resize(n, n);
    impl_->L.setFromTriplets(trip.begin(), trip.end());
    impl_->L.makeCompressed();
}

Operator2D assemble(GridPtr grid, const MatrixField2D& A, const VectorField2D& v,
                    const ScalarField2D& V) {
    return Operator2D(std::move(grid), A, v, V);
}

std::vector<double> Operator2D::apply(const std::vector<double>& x) const {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd yv = impl_->L * xv;
    return std::vector<double>(yv.data(), yv.data() + yv.size());
}

ScalarField2D Operator2D::to_field(const std::vector<double>& x) const {
    ScalarField2D f(grid_);
    for (std::size_t e = 0; e < cell_of_eq_.size(); ++e) f.data()[cell_of_eq_[e]] = x[e];
    return f;
}

std::vector<double> Operator2D::from_field(const ScalarField2D& f) const {
    std::vector<double> x(cell_of_eq_.size());
    for (std::size_t e = 0; e < cell_of_eq_.size(); ++e) x[e] = f.data()[cell_of_eq_[e]];
    return x;
}

namespace {

// One linear-solver context per shifted matrix, reused across iterations.
class ShiftedSolver {
public:
    ShiftedSolver(const Eigen::SparseMatrix<double>& L, double shift, double linear_tol)
        : n_(L.rows()) {
        Eigen::SparseMatrix<double> M = L;
        Eigen::SparseMatrix<double> I(n_, n_);
        I.setIdentity();
        M -= shift * I;
        M.makeCompressed();
        if (static_cast<std::size_t>(n_) <= kDirectSolverLimit) {
            lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
            lu_->compute(M);
            if (lu_->info() != Eigen::Success)
                throw std::runtime_error("principal_eigenpair: sparse LU factorization failed");
        } else {
            ilu_ = std::make_unique<
                Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>();
            ilu_->setTolerance(linear_tol);
            ilu_->compute(M);
            if (ilu_->info() != Eigen::Success)
                throw std::runtime_error("principal_eigenpair: ILU setup failed");
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x;
        if (lu_)
            x = lu_->solve(b);
        else
            x = ilu_->solve(b);
        if ((lu_ && lu_->info() != Eigen::Success) || (ilu_ && ilu_->info() != Eigen::Success))
            throw std::runtime_error("principal_eigenpair: linear solve breakdown");
        return x;
    }

private:
    Eigen::Index n_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
    std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>
        ilu_;
};

}  // namespace

EigenResult principal_eigenpair(const Operator2D& op, const EigenOptions& opts) {
    const auto& L = op.impl().L;
    const Eigen::Index n = L.rows();
    const double shift = opts.shift.value_or(op.min_potential() - 1.0);
    ShiftedSolver solver(L, shift, opts.linear_tol);

    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);  // interior indicator start
    x /= x.norm();
    double lambda = shift;
    double lambda_prev = std::numeric_limits<double>::infinity();
    int it = 0;
    bool converged = false;
    for (; it < opts.maxiter; ++it) {
        Eigen::VectorXd y = solver.solve(x);
        const double mu = x.dot(y) / x.dot(x);
        if (!(std::abs(mu) > 0.0) || !std::isfinite(mu))
            throw std::runtime_error("principal_eigenpair: breakdown (zero or non-finite ratio)");
        lambda = shift + 1.0 / mu;
        x = y / y.norm();
        if (x.maxCoeff() < -x.minCoeff()) x = -x;
        if (std::abs(lambda - lambda_prev) <= opts.tol * std::max(1.0, std::abs(lambda))) {
            const double resid =
                (L * x - lambda * x).lpNorm<Eigen::Infinity>() / x.lpNorm<Eigen::Infinity>();
            if (resid <= 1e-6 * std::max(1.0, std::abs(lambda))) {
                converged = true;
                ++it;
                break;
            }
        }
        lambda_prev = lambda;
    }
    if (!converged && it >= opts.maxiter)
        throw std::runtime_error("principal_eigenpair: no convergence in maxiter iterations");

    // sup-norm 1, positive
    if (x.maxCoeff() < -x.minCoeff()) x = -x;
    x /= x.maxCoeff();
    if (x.minCoeff() <= 0.0)
        throw std::runtime_error(
            "principal_eigenpair: converged eigenvector has a nonpositive component "
            "(discretization failure)");

    Eigen::VectorXd r = L * x - lambda * x;
    EigenResult res{lambda, op.to_field(std::vector<double>(x.data(), x.data() + n)),
                    r.lpNorm<Eigen::Infinity>(), it};
    return res;
}

ScalarField2D dirichlet_solve(GridPtr grid, const MatrixField2D& A, const ScalarField2D& f) {
    VectorField2D zero_v(grid);
    ScalarField2D zero_V(grid);
    Operator2D op(grid, A, zero_v, zero_V);
    const auto& L = op.impl().L;

    std::vector<double> b = op.from_field(f);
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x;
    if (op.unknowns() <= kDirectSolverLimit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(L);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("dirichlet_solve: factorization failed");
        x = lu.solve(bv);
        if (lu.info() != Eigen::Success) throw std::runtime_error("dirichlet_solve: solve failed");
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.setTolerance(1e-12);
        it.compute(L);
        x = it.solve(bv);
        if (it.info() != Eigen::Success)
            throw std::runtime_error("dirichlet_solve: iterative solve breakdown");
    }
    return op.to_field(std::vector<double>(x.data(), x.data() + x.size()));
}

ScalarField2D torsion_function(GridPtr grid, const MatrixField2D& A) {
    ScalarField2D one(grid);
    const Grid2D& g = *grid;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) one(i, j) = 1.0;
    return dirichlet_solve(std::move(grid), A, one);
}

}  // namespace eigensymm

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "eigensymm/fields.hpp"
#include "eigensymm/geometry.hpp"

namespace eigensymm {

/// Sparse discretization of L = -div(A grad) + v.grad + V over the masked
/// cells, Dirichlet rows eliminated. Faces against the boundary use the
/// distance from the cell center to the true domain boundary (found by
/// bisection on the membership test), which keeps the eigenvalue error at
/// O(h^2) on smooth domains. The drift term is differenced centrally where
/// the face Peclet number permits an M-matrix row, upwinded otherwise.
class Operator2D {
public:
    Operator2D(GridPtr grid, const MatrixField2D& A, const VectorField2D& v,
               const ScalarField2D& V);

    const Grid2D& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    std::size_t unknowns() const { return cell_of_eq_.size(); }
    double min_potential() const { return min_V_; }

    int eq_of_cell(int i, int j) const { return eq_of_cell_[grid_->index(i, j)]; }

    /// y = L x over the eliminated system.
    std::vector<double> apply(const std::vector<double>& x) const;

    ScalarField2D to_field(const std::vector<double>& x) const;
    std::vector<double> from_field(const ScalarField2D& f) const;

    struct Impl;
    const Impl& impl() const { return *impl_; }

private:
    GridPtr grid_;
    std::vector<int> eq_of_cell_;
    std::vector<std::size_t> cell_of_eq_;
    double min_V_ = 0.0;
    std::shared_ptr<Impl> impl_;
};

Operator2D assemble(GridPtr grid, const MatrixField2D& A, const VectorField2D& v,
                    const ScalarField2D& V);

struct EigenResult {
    double lambda1 = 0.0;
    ScalarField2D phi;
    double residual = 0.0;  // sup norm of L phi - lambda phi over the interior
    int iterations = 0;
};

struct EigenOptions {
    std::optional<double> shift;  // default: min V - 1
    double tol = 1e-8;            // eigenvalue stagnation
    double linear_tol = 1e-10;    // iterative linear solves (large grids)
    int maxiter = 400;
};

/// Principal eigenpair by inverse power iteration on (L - shift I).
/// The eigenvector is normalized to sup-norm 1 and must come out positive
/// at every interior cell.
EigenResult principal_eigenpair(const Operator2D& op, const EigenOptions& opts = {});

/// Solve -div(A grad u) = f with zero Dirichlet data.
ScalarField2D dirichlet_solve(GridPtr grid, const MatrixField2D& A, const ScalarField2D& f);

/// Torsion function: -div(A grad psi) = 1, psi = 0 on the boundary.
ScalarField2D torsion_function(GridPtr grid, const MatrixField2D& A);

}  // namespace eigensymm

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "eigensymm/geometry.hpp"

namespace eigensymm {

using GridPtr = std::shared_ptr<const Grid2D>;

/// Scalar samples at cell centers. Dirichlet fields vanish on unmasked cells.
class ScalarField2D {
public:
    explicit ScalarField2D(GridPtr grid, double fill = 0.0)
        : grid_(std::move(grid)), v_(grid_->size(), fill) {}

    static ScalarField2D from_function(GridPtr grid,
                                       const std::function<double(double, double)>& f,
                                       bool masked_only = true);

    const Grid2D& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }

    double& operator()(int i, int j) { return v_[grid_->index(i, j)]; }
    double operator()(int i, int j) const { return v_[grid_->index(i, j)]; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    double max_abs() const;
    double max() const;
    double min_masked() const;       // min over masked cells
    double max_masked() const;       // max over masked cells
    double integral_masked() const;  // cell-area weighted sum over masked cells

private:
    GridPtr grid_;
    std::vector<double> v_;
};

class VectorField2D {
public:
    explicit VectorField2D(GridPtr grid)
        : grid_(std::move(grid)), vx_(grid_->size(), 0.0), vy_(grid_->size(), 0.0) {}

    const Grid2D& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }

    double& x(int i, int j) { return vx_[grid_->index(i, j)]; }
    double& y(int i, int j) { return vy_[grid_->index(i, j)]; }
    double x(int i, int j) const { return vx_[grid_->index(i, j)]; }
    double y(int i, int j) const { return vy_[grid_->index(i, j)]; }

    double sup_norm() const;
    ScalarField2D magnitude() const;

private:
    GridPtr grid_;
    std::vector<double> vx_, vy_;
};

/// Symmetric 2x2 matrix samples (a11, a12, a22) at cell centers.
class MatrixField2D {
public:
    explicit MatrixField2D(GridPtr grid, double diag = 1.0)
        : grid_(std::move(grid)),
          a11_(grid_->size(), diag),
          a12_(grid_->size(), 0.0),
          a22_(grid_->size(), diag) {}

    static MatrixField2D identity(GridPtr grid, double scale = 1.0) {
        return MatrixField2D(std::move(grid), scale);
    }

    const Grid2D& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }

    double& a11(int i, int j) { return a11_[grid_->index(i, j)]; }
    double& a12(int i, int j) { return a12_[grid_->index(i, j)]; }
    double& a22(int i, int j) { return a22_[grid_->index(i, j)]; }
    double a11(int i, int j) const { return a11_[grid_->index(i, j)]; }
    double a12(int i, int j) const { return a12_[grid_->index(i, j)]; }
    double a22(int i, int j) const { return a22_[grid_->index(i, j)]; }

    /// Positive definiteness at every masked cell.
    bool positive_definite() const;

private:
    GridPtr grid_;
    std::vector<double> a11_, a12_, a22_;
};

/// Regularization floor applied to |grad psi| where it appears in denominators.
inline constexpr double kGradientFloor = 1e-12;

/// Central differences at interior cells, one-sided at the boundary band.
VectorField2D gradient(const ScalarField2D& f);

/// Conservative flux-form div(A grad f). Face fluxes are shared between the
/// two adjacent cells, so sums over any cell set telescope to the net
/// boundary flux exactly. Unmasked neighbors enter through the reflected
/// ghost value -f (Dirichlet 0 on the face).
ScalarField2D div_A_grad(const MatrixField2D& A, const ScalarField2D& f);

/// Pointwise smallest eigenvalue of A.
ScalarField2D lambda_of_A(const MatrixField2D& A);

/// Text field format: "nx ny hx hy x0 y0" then nx*ny row-major values,
/// NaN marking exterior cells.
void write_field(std::ostream& os, const ScalarField2D& f);
void write_field_file(const std::string& path, const ScalarField2D& f);
ScalarField2D read_field(std::istream& is, const DomainSpec& domain);
ScalarField2D read_field_file(const std::string& path, const DomainSpec& domain);

}  // namespace eigensymm

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eigensymm {

/// Volume of the unit n-ball, pi^{n/2} / Gamma(n/2 + 1).
double alpha_n(int n);

/// Radius of the ball of measure m in dimension n, (m / alpha_n)^{1/n}.
double equal_measure_ball_radius(double m, int n);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Parametric planar domain with an analytic membership test.
/// All size parameters are strictly positive; the polygon variant must be
/// simple and counterclockwise.
class DomainSpec {
public:
    enum class Kind { Disk, Ellipse, Rectangle, Stadium, Polygon };

    static DomainSpec disk(double radius, Point center = {});
    static DomainSpec ellipse(double a, double b, Point center = {});
    static DomainSpec rectangle(double lx, double ly, Point center = {});
    /// Stadium: rectangle len x 2*rad capped by two half-disks of radius rad.
    static DomainSpec stadium(double len, double rad, Point center = {});
    static DomainSpec polygon(std::vector<Point> vertices);

    Kind kind() const { return kind_; }
    Point center() const { return center_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<Point>& vertices() const { return vertices_; }

    bool inside(double x, double y) const;
    bool inside(Point p) const { return inside(p.x, p.y); }

    /// Axis-aligned bounding box: {xmin, ymin, xmax, ymax}.
    std::array<double, 4> bounding_box() const;

    /// Closed-form area when available (all variants here have one).
    double closed_form_area() const;

    bool is_ball() const { return kind_ == Kind::Disk; }
    std::string describe() const;

private:
    DomainSpec(Kind k, std::vector<double> p, Point c)
        : kind_(k), params_(std::move(p)), center_(c) {}

    Kind kind_;
    std::vector<double> params_;
    Point center_;
    std::vector<Point> vertices_;
};

/// Uniform Cartesian cell grid over the domain's bounding box. Unknowns live
/// at cell centers; the mask selects cells whose center is strictly inside.
/// Cells outside the mask carry Dirichlet value 0.
class Grid2D {
public:
    Grid2D(const DomainSpec& domain, int nx_cells);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    double cell_area() const { return hx_ * hy_; }

    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    double cx(int i) const { return x0_ + (i + 0.5) * hx_; }
    double cy(int j) const { return y0_ + (j + 0.5) * hy_; }

    bool masked(int i, int j) const {
        return i >= 0 && i < nx_ && j >= 0 && j < ny_ && mask_[index(i, j)];
    }
    const std::vector<char>& mask() const { return mask_; }
    std::size_t interior_count() const { return interior_count_; }

    /// Fraction of the cell inside the domain, from 4x4 subsampling.
    double interior_fraction(int i, int j) const { return fraction_[index(i, j)]; }
    const std::vector<double>& fractions() const { return fraction_; }

    const DomainSpec& domain() const { return domain_; }

    /// Measure of the union of masked cells (the discrete solver domain).
    double masked_measure() const { return interior_count_ * cell_area(); }

    /// Distance fraction theta in (0,1] from the center of masked cell (i,j)
    /// to the domain boundary along +-x / +-y, relative to hx / hy. Only
    /// meaningful when the neighbor in that direction is unmasked.
    double boundary_theta(int i, int j, int di, int dj) const;

private:
    DomainSpec domain_;
    int nx_, ny_;
    double hx_, hy_, x0_, y0_;
    std::vector<char> mask_;
    std::vector<double> fraction_;
    std::size_t interior_count_ = 0;
};

struct MeasureResult {
    double grid_area = 0.0;                 // sum of cell areas weighted by interior fraction
    std::optional<double> closed_form;      // analytic area for cross-checking
};

/// Lebesgue measure of the domain from the grid's cut-cell fractions.
/// Throws if the grid resolves fewer than 10 interior cells.
MeasureResult measure(const DomainSpec& domain, const Grid2D& grid);

}  // namespace eigensymm

#include "eigensymm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eigensymm {

double alpha_n(int n) {
    if (n < 1) throw std::invalid_argument("alpha_n: n must be >= 1");
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double equal_measure_ball_radius(double m, int n) {
    if (m <= 0.0) throw std::invalid_argument("equal_measure_ball_radius: measure must be positive");
    return std::pow(m / alpha_n(n), 1.0 / n);
}

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be strictly positive");
}

double polygon_signed_area(const std::vector<Point>& vs) {
    double s = 0.0;
    const std::size_t n = vs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = vs[i];
        const Point& q = vs[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

// Even-odd ray casting; points on an edge count as inside.
bool polygon_inside(const std::vector<Point>& vs, double x, double y) {
    const std::size_t n = vs.size();
    bool in = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = vs[i].x, yi = vs[i].y;
        const double xj = vs[j].x, yj = vs[j].y;
        // on-edge tie-break
        const double cross = (xj - xi) * (y - yi) - (yj - yi) * (x - xi);
        if (cross == 0.0 && std::min(xi, xj) <= x && x <= std::max(xi, xj) &&
            std::min(yi, yj) <= y && y <= std::max(yi, yj))
            return true;
        if ((yi > y) != (yj > y)) {
            const double xcross = xi + (y - yi) / (yj - yi) * (xj - xi);
            if (x < xcross) in = !in;
        }
    }
    return in;
}

}  // namespace

DomainSpec DomainSpec::disk(double radius, Point center) {
    require_positive(radius, "disk radius");
    return DomainSpec(Kind::Disk, {radius}, center);
}

DomainSpec DomainSpec::ellipse(double a, double b, Point center) {
    require_positive(a, "ellipse semi-axis a");
    require_positive(b, "ellipse semi-axis b");
    return DomainSpec(Kind::Ellipse, {a, b}, center);
}

DomainSpec DomainSpec::rectangle(double lx, double ly, Point center) {
    require_positive(lx, "rectangle Lx");
    require_positive(ly, "rectangle Ly");
    return DomainSpec(Kind::Rectangle, {lx, ly}, center);
}

DomainSpec DomainSpec::stadium(double len, double rad, Point center) {
    require_positive(len, "stadium length");
    require_positive(rad, "stadium radius");
    return DomainSpec(Kind::Stadium, {len, rad}, center);
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (polygon_signed_area(vertices) <= 0.0)
        throw std::invalid_argument("polygon must be counterclockwise with positive area");
    DomainSpec d(Kind::Polygon, {}, Point{});
    d.vertices_ = std::move(vertices);
    return d;
}

bool DomainSpec::inside(double x, double y) const {
    const double u = x - center_.x;
    const double v = y - center_.y;
    switch (kind_) {
        case Kind::Disk: {
            const double r = params_[0];
            return u * u + v * v < r * r;
        }
        case Kind::Ellipse: {
            const double a = params_[0], b = params_[1];
            return (u / a) * (u / a) + (v / b) * (v / b) < 1.0;
        }
        case Kind::Rectangle: {
            const double hx = 0.5 * params_[0], hy = 0.5 * params_[1];
            return std::abs(u) < hx && std::abs(v) < hy;
        }
        case Kind::Stadium: {
            const double half = 0.5 * params_[0], rad = params_[1];
            const double dx = std::max(std::abs(u) - half, 0.0);
            return dx * dx + v * v < rad * rad;
        }
        case Kind::Polygon:
            return polygon_inside(vertices_, x, y);
    }
    return false;
}

std::array<double, 4> DomainSpec::bounding_box() const {
    switch (kind_) {
        case Kind::Disk: {
            const double r = params_[0];
            return {center_.x - r, center_.y - r, center_.x + r, center_.y + r};
        }
        case Kind::Ellipse: {
            const double a = params_[0], b = params_[1];
            return {center_.x - a, center_.y - b, center_.x + a, center_.y + b};
        }
        case Kind::Rectangle: {
            const double hx = 0.5 * params_[0], hy = 0.5 * params_[1];
            return {center_.x - hx, center_.y - hy, center_.x + hx, center_.y + hy};
        }
        case Kind::Stadium: {
            const double half = 0.5 * params_[0] + params_[1], rad = params_[1];
            return {center_.x - half, center_.y - rad, center_.x + half, center_.y + rad};
        }
        case Kind::Polygon: {
            double x0 = vertices_[0].x, x1 = x0, y0 = vertices_[0].y, y1 = y0;
            for (const Point& p : vertices_) {
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
            return {x0, y0, x1, y1};
        }
    }
    return {0, 0, 0, 0};
}

double DomainSpec::closed_form_area() const {
    switch (kind_) {
        case Kind::Disk:
            return std::numbers::pi * params_[0] * params_[0];
        case Kind::Ellipse:
            return std::numbers::pi * params_[0] * params_[1];
        case Kind::Rectangle:
            return params_[0] * params_[1];
        case Kind::Stadium:
            return 2.0 * params_[0] * params_[1] + std::numbers::pi * params_[1] * params_[1];
        case Kind::Polygon:
            return polygon_signed_area(vertices_);
    }
    return 0.0;
}

std::string DomainSpec::describe() const {
    switch (kind_) {
        case Kind::Disk: return "disk(R=" + std::to_string(params_[0]) + ")";
        case Kind::Ellipse:
            return "ellipse(a=" + std::to_string(params_[0]) + ",b=" + std::to_string(params_[1]) + ")";
        case Kind::Rectangle:
            return "rectangle(Lx=" + std::to_string(params_[0]) + ",Ly=" + std::to_string(params_[1]) + ")";
        case Kind::Stadium:
            return "stadium(len=" + std::to_string(params_[0]) + ",rad=" + std::to_string(params_[1]) + ")";
        case Kind::Polygon: return "polygon(" + std::to_string(vertices_.size()) + " vertices)";
    }
    return "?";
}

Grid2D::Grid2D(const DomainSpec& domain, int nx_cells) : domain_(domain) {
    if (nx_cells < 4) throw std::invalid_argument("Grid2D: need at least 4 cells per side");
    const auto bb = domain.bounding_box();
    const double w = bb[2] - bb[0], h = bb[3] - bb[1];
    nx_ = nx_cells;
    hx_ = w / nx_;
    ny_ = std::max(4, static_cast<int>(std::lround(h / hx_)));
    hy_ = h / ny_;
    x0_ = bb[0];
    y0_ = bb[1];

    mask_.assign(size(), 0);
    fraction_.assign(size(), 0.0);
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const std::size_t k = index(i, j);
            if (domain.inside(cx(i), cy(j))) {
                mask_[k] = 1;
                ++interior_count_;
            }
            int hits = 0;
            for (int sj = 0; sj < 4; ++sj)
                for (int si = 0; si < 4; ++si)
                    if (domain.inside(x0_ + (i + (si + 0.5) / 4.0) * hx_,
                                      y0_ + (j + (sj + 0.5) / 4.0) * hy_))
                        ++hits;
            fraction_[k] = hits / 16.0;
        }
    }
}

double Grid2D::boundary_theta(int i, int j, int di, int dj) const {
    const double px = cx(i), py = cy(j);
    const double qx = px + di * hx_, qy = py + dj * hy_;
    // bisection on the membership test along the segment center -> neighbor center
    double lo = 0.0, hi = 1.0;
    if (domain_.inside(qx, qy)) return 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (domain_.inside(px + mid * (qx - px), py + mid * (qy - py)))
            lo = mid;
        else
            hi = mid;
    }
    return std::max(0.5 * (lo + hi), 1e-6);
}

MeasureResult measure(const DomainSpec& domain, const Grid2D& grid) {
    if (grid.interior_count() < 10)
        throw std::runtime_error("measure: grid too coarse (fewer than 10 interior cells)");
    double area = 0.0;
    for (double f : grid.fractions()) area += f;
    area *= grid.cell_area();
    return MeasureResult{area, domain.closed_form_area()};
}

}  // namespace eigensymm

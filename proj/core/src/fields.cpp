#include "eigensymm/fields.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace eigensymm {

ScalarField2D ScalarField2D::from_function(GridPtr grid,
                                           const std::function<double(double, double)>& f,
                                           bool masked_only) {
    ScalarField2D out(grid);
    const Grid2D& g = *grid;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (!masked_only || g.masked(i, j)) out(i, j) = f(g.cx(i), g.cy(j));
    return out;
}

double ScalarField2D::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double ScalarField2D::max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v_) m = std::max(m, x);
    return m;
}

double ScalarField2D::min_masked() const {
    const Grid2D& g = *grid_;
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) m = std::min(m, (*this)(i, j));
    return m;
}

double ScalarField2D::max_masked() const {
    const Grid2D& g = *grid_;
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) m = std::max(m, (*this)(i, j));
    return m;
}

double ScalarField2D::integral_masked() const {
    const Grid2D& g = *grid_;
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) s += (*this)(i, j);
    return s * g.cell_area();
}

double VectorField2D::sup_norm() const {
    double m = 0.0;
    for (std::size_t k = 0; k < vx_.size(); ++k)
        m = std::max(m, std::hypot(vx_[k], vy_[k]));
    return m;
}

ScalarField2D VectorField2D::magnitude() const {
    ScalarField2D out(grid_);
    for (std::size_t k = 0; k < vx_.size(); ++k)
        out.data()[k] = std::hypot(vx_[k], vy_[k]);
    return out;
}

bool MatrixField2D::positive_definite() const {
    const Grid2D& g = *grid_;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double d = a11(i, j) * a22(i, j) - a12(i, j) * a12(i, j);
            if (!(a11(i, j) > 0.0) || !(d > 0.0)) return false;
        }
    return true;
}

VectorField2D gradient(const ScalarField2D& f) {
    const Grid2D& g = f.grid();
    VectorField2D out(f.grid_ptr());
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const bool w = g.masked(i - 1, j), e = g.masked(i + 1, j);
            const bool s = g.masked(i, j - 1), n = g.masked(i, j + 1);
            double dx = 0.0, dy = 0.0;
            if (w && e)
                dx = (f(i + 1, j) - f(i - 1, j)) / (2.0 * g.hx());
            else if (e)
                dx = (f(i + 1, j) - f(i, j)) / g.hx();
            else if (w)
                dx = (f(i, j) - f(i - 1, j)) / g.hx();
            if (s && n)
                dy = (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.hy());
            else if (n)
                dy = (f(i, j + 1) - f(i, j)) / g.hy();
            else if (s)
                dy = (f(i, j) - f(i, j - 1)) / g.hy();
            out.x(i, j) = dx;
            out.y(i, j) = dy;
        }
    }
    return out;
}

namespace {

inline double value_or_zero(const Grid2D& g, const ScalarField2D& f, int i, int j) {
    return g.masked(i, j) ? f(i, j) : 0.0;
}

// Flux of A grad f through the east face of cell (i,j), per unit face length.
double east_flux(const MatrixField2D& A, const ScalarField2D& f, int i, int j) {
    const Grid2D& g = f.grid();
    const bool ce = g.masked(i + 1, j);
    const double fc = f(i, j);
    double a11f, a12f, dfdx, dfdy;
    if (ce) {
        a11f = 0.5 * (A.a11(i, j) + A.a11(i + 1, j));
        a12f = 0.5 * (A.a12(i, j) + A.a12(i + 1, j));
        dfdx = (f(i + 1, j) - fc) / g.hx();
        dfdy = (value_or_zero(g, f, i, j + 1) + value_or_zero(g, f, i + 1, j + 1) -
                value_or_zero(g, f, i, j - 1) - value_or_zero(g, f, i + 1, j - 1)) /
               (4.0 * g.hy());
    } else {
        a11f = A.a11(i, j);
        a12f = 0.0;  // tangential derivative vanishes on the Dirichlet face
        dfdx = -2.0 * fc / g.hx();
        dfdy = 0.0;
    }
    return a11f * dfdx + a12f * dfdy;
}

double north_flux(const MatrixField2D& A, const ScalarField2D& f, int i, int j) {
    const Grid2D& g = f.grid();
    const bool cn = g.masked(i, j + 1);
    const double fc = f(i, j);
    double a22f, a12f, dfdy, dfdx;
    if (cn) {
        a22f = 0.5 * (A.a22(i, j) + A.a22(i, j + 1));
        a12f = 0.5 * (A.a12(i, j) + A.a12(i, j + 1));
        dfdy = (f(i, j + 1) - fc) / g.hy();
        dfdx = (value_or_zero(g, f, i + 1, j) + value_or_zero(g, f, i + 1, j + 1) -
                value_or_zero(g, f, i - 1, j) - value_or_zero(g, f, i - 1, j + 1)) /
               (4.0 * g.hx());
    } else {
        a22f = A.a22(i, j);
        a12f = 0.0;
        dfdy = -2.0 * fc / g.hy();
        dfdx = 0.0;
    }
    return a12f * dfdx + a22f * dfdy;
}

}  // namespace

ScalarField2D div_A_grad(const MatrixField2D& A, const ScalarField2D& f) {
    if (!A.positive_definite())
        throw std::invalid_argument("div_A_grad: A must be positive definite on the mask");
    const Grid2D& g = f.grid();
    ScalarField2D out(f.grid_ptr());
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.masked(i, j)) continue;
            const double fe = east_flux(A, f, i, j);
            const double fw = g.masked(i - 1, j) ? east_flux(A, f, i - 1, j)
                                                 : -(A.a11(i, j) * (-2.0 * f(i, j) / g.hx()));
            const double fn = north_flux(A, f, i, j);
            const double fs = g.masked(i, j - 1) ? north_flux(A, f, i, j - 1)
                                                 : -(A.a22(i, j) * (-2.0 * f(i, j) / g.hy()));
            out(i, j) = (fe - fw) / g.hx() + (fn - fs) / g.hy();
        }
    }
    return out;
}

ScalarField2D lambda_of_A(const MatrixField2D& A) {
    const Grid2D& g = A.grid();
    ScalarField2D out(A.grid_ptr());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double m = 0.5 * (A.a11(i, j) + A.a22(i, j));
            const double d = 0.5 * (A.a11(i, j) - A.a22(i, j));
            out(i, j) = m - std::sqrt(d * d + A.a12(i, j) * A.a12(i, j));
        }
    return out;
}

void write_field(std::ostream& os, const ScalarField2D& f) {
    const Grid2D& g = f.grid();
    os.precision(17);
    os << g.nx() << ' ' << g.ny() << ' ' << g.hx() << ' ' << g.hy() << ' ' << g.x0() << ' '
       << g.y0() << '\n';
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (i) os << ' ';
            if (g.masked(i, j))
                os << f(i, j);
            else
                os << "nan";
        }
        os << '\n';
    }
}

void write_field_file(const std::string& path, const ScalarField2D& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field_file: cannot open " + path);
    write_field(os, f);
}

ScalarField2D read_field(std::istream& is, const DomainSpec& domain) {
    int nx, ny;
    double hx, hy, x0, y0;
    if (!(is >> nx >> ny >> hx >> hy >> x0 >> y0))
        throw std::runtime_error("read_field: malformed header");
    auto grid = std::make_shared<Grid2D>(domain, nx);
    if (grid->ny() != ny || std::abs(grid->hx() - hx) > 1e-12 * std::abs(hx) ||
        std::abs(grid->hy() - hy) > 1e-12 * std::abs(hy))
        throw std::runtime_error("read_field: header does not match the domain's grid");
    ScalarField2D f(grid);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            std::string tok;
            if (!(is >> tok)) throw std::runtime_error("read_field: truncated data");
            if (tok == "nan" || tok == "NaN" || tok == "-nan")
                f(i, j) = 0.0;
            else
                f(i, j) = std::stod(tok);
        }
    return f;
}

ScalarField2D read_field_file(const std::string& path, const DomainSpec& domain) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field_file: cannot open " + path);
    return read_field(is, domain);
}

}  // namespace eigensymm

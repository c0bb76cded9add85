#include "shf/testfunction.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shf {

TestFunction TestFunction::box(double half_side, double x0, double y0) {
    if (!(half_side > 0.0)) throw std::domain_error("test function box: half_side must be > 0");
    TestFunction f;
    f.kind = Kind::indicator_box;
    f.half_side = half_side;
    f.x0 = x0;
    f.y0 = y0;
    return f;
}

TestFunction TestFunction::bump(double delta, double x0, double y0) {
    if (!(delta > 0.0)) throw std::domain_error("test function bump: delta must be > 0");
    TestFunction f;
    f.kind = Kind::gaussian_bump;
    f.delta = delta;
    f.x0 = x0;
    f.y0 = y0;
    return f;
}

TestFunction TestFunction::ball(double radius, double x0, double y0) {
    if (!(radius > 0.0)) throw std::domain_error("test function ball: radius must be > 0");
    TestFunction f;
    f.kind = Kind::indicator_ball;
    f.radius = radius;
    f.x0 = x0;
    f.y0 = y0;
    return f;
}

TestFunction TestFunction::tabulate(int grid_n, double extent, std::vector<double> values) {
    if (grid_n < 1 || extent <= 0.0 || values.size() != static_cast<size_t>(grid_n) * grid_n)
        throw std::domain_error("test function tabulate: bad grid");
    TestFunction f;
    f.kind = Kind::tabulated;
    f.grid_n = grid_n;
    f.extent = extent;
    f.table = std::move(values);
    return f;
}

double TestFunction::operator()(double x, double y) const {
    const double dx = x - x0, dy = y - y0;
    switch (kind) {
        case Kind::indicator_box:
            return (std::abs(dx) <= half_side && std::abs(dy) <= half_side) ? 1.0 : 0.0;
        case Kind::gaussian_bump: {
            const double r2 = dx * dx + dy * dy;
            return std::exp(-r2 / (2.0 * delta)) / (6.283185307179586477 * delta);
        }
        case Kind::indicator_ball:
            return (dx * dx + dy * dy <= radius * radius) ? 1.0 : 0.0;
        case Kind::tabulated: {
            if (std::abs(x) >= extent || std::abs(y) >= extent) return 0.0;
            const double cell = 2.0 * extent / grid_n;
            const int i = static_cast<int>(std::floor((x + extent) / cell));
            const int j = static_cast<int>(std::floor((y + extent) / cell));
            return table[static_cast<size_t>(j) * grid_n + i];
        }
    }
    return 0.0;
}

double TestFunction::integral() const {
    switch (kind) {
        case Kind::indicator_box: return 4.0 * half_side * half_side;
        case Kind::gaussian_bump: return 1.0;
        case Kind::indicator_ball: return 3.14159265358979323846 * radius * radius;
        case Kind::tabulated: {
            const double cell = 2.0 * extent / grid_n;
            NeumaierSum s;
            for (double v : table) s.add(v);
            return s.value() * cell * cell;
        }
    }
    return 0.0;
}

double TestFunction::support_radius() const {
    double r = 0.0;
    switch (kind) {
        case Kind::indicator_box: r = half_side * 1.4142135623730951; break;
        case Kind::gaussian_bump: r = 5.0 * std::sqrt(delta); break; // tail < 4e-6 relative
        case Kind::indicator_ball: r = radius; break;
        case Kind::tabulated: r = extent * 1.4142135623730951; break;
    }
    return std::hypot(x0, y0) + r;
}

std::string TestFunction::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::indicator_box: os << "box(half_side=" << half_side; break;
        case Kind::gaussian_bump: os << "bump(delta=" << delta; break;
        case Kind::indicator_ball: os << "ball(radius=" << radius; break;
        case Kind::tabulated: os << "tabulated(n=" << grid_n << ",extent=" << extent; break;
    }
    os << ",center=(" << x0 << "," << y0 << "))";
    return os.str();
}

namespace {

int support_lattice_radius(const TestFunction& phi, int N) {
    return static_cast<int>(std::ceil(phi.support_radius() * std::sqrt(static_cast<double>(N)))) + 1;
}

} // namespace

double lattice_integral(const TestFunction& phi, int N) {
    const double sqn = std::sqrt(static_cast<double>(N));
    const int r = support_lattice_radius(phi, N);
    NeumaierSum s;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) s.add(phi(x / sqn, y / sqn));
    return s.value() / static_cast<double>(N);
}

double average_against(const ValueField& field, const TestFunction& phi, int N) {
    const double sqn = std::sqrt(static_cast<double>(N));
    const int r = support_lattice_radius(phi, N);
    const int cx = static_cast<int>(std::lround(phi.x0 * sqn));
    const int cy = static_cast<int>(std::lround(phi.y0 * sqn));
    if (!field.geom.contains(cx - r, cy - r) || !field.geom.contains(cx + r, cy + r))
        throw std::domain_error("average_against: test-function support " + phi.describe() +
                                " exceeds the computed field box");
    NeumaierSum s;
    for (int y = cy - r; y <= cy + r; ++y)
        for (int x = cx - r; x <= cx + r; ++x) {
            const double w = phi(x / sqn, y / sqn);
            if (w != 0.0) s.add(w * field.at(x, y));
        }
    return s.value() / static_cast<double>(N);
}

double average_log_against(const ValueField& field, const TestFunction& phi, int N) {
    const double sqn = std::sqrt(static_cast<double>(N));
    const int r = support_lattice_radius(phi, N);
    const int cx = static_cast<int>(std::lround(phi.x0 * sqn));
    const int cy = static_cast<int>(std::lround(phi.y0 * sqn));
    if (!field.geom.contains(cx - r, cy - r) || !field.geom.contains(cx + r, cy + r))
        throw std::domain_error("average_log_against: support exceeds the computed field box");
    NeumaierSum s;
    for (int y = cy - r; y <= cy + r; ++y)
        for (int x = cx - r; x <= cx + r; ++x) {
            const double w = phi(x / sqn, y / sqn);
            if (w == 0.0) continue;
            const double v = field.at(x, y);
            if (!(v > 0.0))
                throw numeric_error("average_log_against: non-positive partition value",
                                    field.start_time);
            s.add(w * std::log(v));
        }
    return s.value() / static_cast<double>(N);
}

double average_against(const PartitionSlice& slice, const TestFunction& phi, int N) {
    const double sqn = std::sqrt(static_cast<double>(N));
    NeumaierSum s;
    const int R = slice.geom.radius;
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x) {
            const double v = slice.at(slice.geom.center_x + x, slice.geom.center_y + y);
            if (v != 0.0)
                s.add(v * phi((slice.geom.center_x + x) / sqn, (slice.geom.center_y + y) / sqn));
        }
    return s.value();
}

double average_against(const RescaledMeasure& measure, const TestFunction& phi,
                       const TestFunction& psi) {
    const double sqn = std::sqrt(static_cast<double>(measure.N));
    const int zr = measure.start_geom.radius;
    if (phi.support_radius() * sqn > zr + 1)
        throw std::domain_error("average_against: phi support exceeds the measure's start box");
    NeumaierSum s;
    const int er = measure.end_geom.radius;
    for (int zy = -zr; zy <= zr; ++zy)
        for (int zx = -zr; zx <= zr; ++zx) {
            const double pw = phi(zx / sqn, zy / sqn);
            if (pw == 0.0) continue;
            const size_t zi = measure.start_geom.index(zx, zy);
            NeumaierSum inner;
            for (int wy = -er; wy <= er; ++wy)
                for (int wx = -er; wx <= er; ++wx) {
                    const double m = measure.mass_at(zi, measure.end_geom.index(wx, wy));
                    if (m != 0.0) inner.add(m * psi(wx / sqn, wy / sqn));
                }
            s.add(pw * inner.value());
        }
    return s.value();
}

} // namespace shf

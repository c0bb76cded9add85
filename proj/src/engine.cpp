#include "shf/engine.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace shf {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

double PartitionSlice::total() const {
    NeumaierSum s;
    for (double v : values) s.add(v);
    return s.value();
}

double PartitionSlice::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values) m = std::min(m, v);
    return m;
}

double PartitionSlice::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    return m;
}

namespace {

constexpr uint64_t time_salt = 0x9e3779b97f4a7c15ULL;

// Precomputed per-evolution weight parameters.
struct WeightPlan {
    DisorderLaw::Kind kind = DisorderLaw::Kind::zero;
    bool unit = false;      // beta == 0: weights identically 1
    bool constant = false;  // omega forced to 0: weight e^{-lambda}
    double beta = 0.0, lam = 0.0;
    double wp = 1.0, wm = 1.0;  // rademacher: e^{+-beta - lambda}
    double wconst = 1.0;
    uint64_t seed = 0;
};

WeightPlan make_plan(const DisorderField& field, double beta) {
    WeightPlan p;
    p.kind = field.law.kind;
    p.beta = beta;
    p.seed = field.seed;
    if (beta == 0.0) {
        p.unit = true;
        return p;
    }
    p.lam = lambda(field.law, beta);
    if (field.zero_disorder || field.law.kind == DisorderLaw::Kind::zero) {
        p.constant = true;
        p.wconst = fast_exp(-p.lam);
        return p;
    }
    if (field.law.kind == DisorderLaw::Kind::rademacher) {
        p.wp = fast_exp(beta - p.lam);
        p.wm = fast_exp(-beta - p.lam);
    }
    return p;
}

// Working buffers with a one-cell absorbing guard ring. Logical coordinates
// are relative to the buffer centre; the centre sits at lattice site
// (origin_x, origin_y).
struct Grid {
    int radius = 0;       // usable radius R
    int stride = 0;       // 2R+3
    int origin_x = 0, origin_y = 0;
    double* data = nullptr;

    double* row(int y) { return data + static_cast<size_t>(y + radius + 1) * stride + (radius + 1); }
    const double* crow(int y) const {
        return data + static_cast<size_t>(y + radius + 1) * stride + (radius + 1);
    }
    size_t cells() const { return static_cast<size_t>(stride) * stride; }
};

struct Evolver {
    Grid cur, nxt;
    WeightPlan plan;
    const WalkKernel* kernel = nullptr;
    int active = 0;          // current support radius (relative coords)
    int steps_done = 0;      // steps since the delta/flat start
    bool delta_start = true; // parity/diamond structure applies (simple walk)
    double lost = 0.0;
    double min_w = std::numeric_limits<double>::infinity();
    double max_w = 0.0;

    void bind(EngineWorkspace& ws, int R, int ox, int oy) {
        const size_t need = static_cast<size_t>(2 * R + 3) * (2 * R + 3);
        ws.a.assign(need, 0.0);
        ws.b.assign(need, 0.0);
        cur = Grid{R, 2 * R + 3, ox, oy, ws.a.data()};
        nxt = Grid{R, 2 * R + 3, ox, oy, ws.b.data()};
    }

    // Multiply the active region by the disorder weight at absolute time t.
    void weight(int t) {
        if (plan.unit) return;
        const int r = active;
        if (plan.constant) {
            for (int y = -r; y <= r; ++y) {
                double* row = cur.row(y);
                for (int x = -r; x <= r; ++x) row[x] *= plan.wconst;
            }
            min_w = std::min(min_w, plan.wconst);
            max_w = std::max(max_w, plan.wconst);
            return;
        }
        const uint64_t hn = mix64(plan.seed ^ (time_salt * static_cast<uint64_t>(t + 1)));
        const double beta = plan.beta, lam = plan.lam;
        double mn = min_w, mx = max_w;
        for (int y = -r; y <= r; ++y) {
            // restrict to the reachable diamond (and parity class for the
            // simple walk started from a delta): everything else is 0.
            int rx = r;
            if (delta_start) {
                rx = std::min(r, steps_done - std::abs(y));
                if (rx < 0) continue;
            }
            double* row = cur.row(y);
            const uint32_t ay = static_cast<uint32_t>(y + cur.origin_y);
            int x0 = -rx;
            int step = 1;
            if (delta_start && kernel->parity_constrained()) {
                step = 2;
                if (((x0 + y + steps_done) & 1) != 0) ++x0;
            }
            // min/max run over the weighted values on the reachable set:
            // positivity assertion and overflow detection in one pass.
            switch (plan.kind) {
                case DisorderLaw::Kind::gaussian:
                    for (int x = x0; x <= rx; x += step) {
                        const uint64_t key =
                            (static_cast<uint64_t>(static_cast<uint32_t>(x + cur.origin_x)) << 32) | ay;
                        const uint64_t h = mix64(hn ^ key);
                        const double u1 = u64_to_unit(h);
                        const double u2 = u64_to_unit(mix64(h ^ 0x6a09e667f3bcc909ULL));
                        const double omega = std::sqrt(-2.0 * fast_log(u1)) * fast_cos2pi(u2);
                        const double v = row[x] * fast_exp(beta * omega - lam);
                        row[x] = v;
                        mn = std::min(mn, v);
                        mx = std::max(mx, v);
                    }
                    break;
                case DisorderLaw::Kind::rademacher: {
                    const double wp = plan.wp, wm = plan.wm;
                    for (int x = x0; x <= rx; x += step) {
                        const uint64_t key =
                            (static_cast<uint64_t>(static_cast<uint32_t>(x + cur.origin_x)) << 32) | ay;
                        const uint64_t h = mix64(hn ^ key);
                        const double v = row[x] * ((h >> 63) ? wp : wm);
                        row[x] = v;
                        mn = std::min(mn, v);
                        mx = std::max(mx, v);
                    }
                    break;
                }
                case DisorderLaw::Kind::shifted_exponential:
                    for (int x = x0; x <= rx; x += step) {
                        const uint64_t key =
                            (static_cast<uint64_t>(static_cast<uint32_t>(x + cur.origin_x)) << 32) | ay;
                        const uint64_t h = mix64(hn ^ key);
                        const double omega = -fast_log(u64_to_unit(h)) - 1.0;
                        const double v = row[x] * fast_exp(beta * omega - lam);
                        row[x] = v;
                        mn = std::min(mn, v);
                        mx = std::max(mx, v);
                    }
                    break;
                case DisorderLaw::Kind::zero:
                    break; // handled by plan.constant
            }
        }
        min_w = mn;
        max_w = mx;
        if (!(max_w < std::numeric_limits<double>::infinity()) || !(min_w > 0.0))
            throw numeric_error("partition value lost positivity/finiteness at time " +
                                    std::to_string(t),
                                t);
    }

    // One walk-step convolution cur -> nxt with absorbing boundary.
    void spread() {
        const int R = cur.radius;
        if (active == R) {
            // boundary ring leaks: each exposed side loses leak * value
            const double leak = (kernel->kind == WalkKernel::Kind::simple)
                                    ? 0.25
                                    : (1.0 - kernel->p_stay) * 0.25;
            NeumaierSum edges;
            const double* top = cur.crow(-R);
            const double* bot = cur.crow(R);
            for (int x = -R; x <= R; ++x) { edges.add(top[x]); edges.add(bot[x]); }
            for (int y = -R; y <= R; ++y) {
                const double* row = cur.crow(y);
                edges.add(row[-R]);
                edges.add(row[R]);
            }
            lost += leak * edges.value();
        }
        const int r1 = std::min(active + 1, R);
        if (kernel->kind == WalkKernel::Kind::simple) {
            for (int y = -r1; y <= r1; ++y) {
                const double* rc = cur.crow(y);
                const double* rn = cur.crow(y - 1);
                const double* rs = cur.crow(y + 1);
                double* out = nxt.row(y);
                for (int x = -r1; x <= r1; ++x)
                    out[x] = 0.25 * ((rc[x - 1] + rc[x + 1]) + (rn[x] + rs[x]));
            }
        } else {
            const double ps = kernel->p_stay, q = (1.0 - ps) * 0.25;
            for (int y = -r1; y <= r1; ++y) {
                const double* rc = cur.crow(y);
                const double* rn = cur.crow(y - 1);
                const double* rs = cur.crow(y + 1);
                double* out = nxt.row(y);
                for (int x = -r1; x <= r1; ++x)
                    out[x] = ps * rc[x] + q * ((rc[x - 1] + rc[x + 1]) + (rn[x] + rs[x]));
            }
        }
        std::swap(cur.data, nxt.data);
        active = r1;
        ++steps_done;
    }
};

void require_window(const DisorderField& field, int t_lo, int t_hi, int max_abs_site) {
    if (field.n_min > t_lo || field.n_max < t_hi)
        throw std::out_of_range("disorder field window [" + std::to_string(field.n_min) + "," +
                                std::to_string(field.n_max) + "] does not cover times [" +
                                std::to_string(t_lo) + "," + std::to_string(t_hi) + "]");
    if (field.box_radius < max_abs_site)
        throw std::out_of_range("disorder field box radius " + std::to_string(field.box_radius) +
                                " < required " + std::to_string(max_abs_site));
}

int cone_radius(int duration, double factor) {
    const int r = static_cast<int>(std::ceil(factor * std::sqrt(static_cast<double>(duration))));
    return std::max(r, 2);
}

// Forward evolution of point-to-point slices Z_{M,n}(x,.) up to time N
// (weights at M+1..N-1). Returns the evolver holding the slice at N.
void run_forward(Evolver& ev, const DisorderField& field, int M, int N) {
    // delta at the start site, then a pure spread to M+1
    ev.cur.row(0)[0] = 1.0;
    ev.active = 0;
    ev.steps_done = 0;
    ev.spread();
    for (int t = M + 1; t <= N - 1; ++t) {
        ev.weight(t);
        ev.spread();
    }
}

PartitionSlice finish_slice(Evolver& ev, int time, int M, int xx, int xy) {
    PartitionSlice out;
    out.time = time;
    out.start_time = M;
    out.start_x = xx;
    out.start_y = xy;
    out.beta = ev.plan.beta;
    out.geom = SliceGeometry{ev.cur.origin_x, ev.cur.origin_y, ev.cur.radius};
    out.lost_mass = ev.lost;
    const int R = ev.cur.radius;
    out.values.resize(out.geom.cells());
    for (int y = -R; y <= R; ++y) {
        const double* row = ev.cur.crow(y);
        std::memcpy(out.values.data() + static_cast<size_t>(y + R) * (2 * R + 1),
                    row - R, sizeof(double) * (2 * R + 1));
    }
    return out;
}

void check_slice_reachable_positive(const Evolver& ev, int time, bool parity) {
    const int R = ev.cur.radius;
    for (int y = -R; y <= R; ++y) {
        int rx = std::min(R, ev.steps_done - std::abs(y));
        if (rx < 0) continue;
        const double* row = ev.cur.crow(y);
        int x0 = -rx, step = 1;
        if (parity && (((x0 + y + ev.steps_done) & 1) != 0)) ++x0;
        if (parity) step = 2;
        for (int x = x0; x <= rx; x += step) {
            const double v = row[x];
            if (!(v > 0.0) || !std::isfinite(v))
                throw numeric_error("non-positive partition value at time " + std::to_string(time) +
                                        " site (" + std::to_string(x + ev.cur.origin_x) + "," +
                                        std::to_string(y + ev.cur.origin_y) + ")",
                                    time);
        }
    }
}

} // namespace

PartitionSlice point_to_plane(const DisorderField& field, const CouplingSchedule& schedule,
                              int N, int m, int zx, int zy, double box_radius_factor,
                              EngineWorkspace* ws) {
    if (!(m >= 0 && m < N)) throw std::domain_error("point_to_plane: need 0 <= m < N");
    const double beta = schedule.beta_at(N);
    const int R = cone_radius(N - m, box_radius_factor);
    require_window(field, m + 1, N, std::max(std::abs(zx), std::abs(zy)) + R);

    EngineWorkspace local;
    EngineWorkspace& w = ws ? *ws : local;
    Evolver ev;
    ev.plan = make_plan(field, beta);
    ev.kernel = &schedule.kernel;
    ev.delta_start = true;
    ev.bind(w, R, zx, zy);
    run_forward(ev, field, m, N);
    ev.weight(N); // point-to-plane carries the terminal weight
    check_slice_reachable_positive(ev, N, schedule.kernel.parity_constrained());
    return finish_slice(ev, N, m, zx, zy);
}

PartitionSlice point_to_point_slice(const DisorderField& field, const CouplingSchedule& schedule,
                                    int scaling_N, int M, int N, int xx, int xy,
                                    double box_radius_factor, EngineWorkspace* ws) {
    if (!(M < N)) throw std::domain_error("point_to_point: need M < N");
    const double beta = schedule.beta_at(scaling_N);
    const int R = cone_radius(N - M, box_radius_factor);
    require_window(field, M + 1, N, std::max(std::abs(xx), std::abs(xy)) + R);

    EngineWorkspace local;
    EngineWorkspace& w = ws ? *ws : local;
    Evolver ev;
    ev.plan = make_plan(field, beta);
    ev.kernel = &schedule.kernel;
    ev.delta_start = true;
    ev.bind(w, R, xx, xy);
    run_forward(ev, field, M, N);
    check_slice_reachable_positive(ev, N, schedule.kernel.parity_constrained());
    return finish_slice(ev, N, M, xx, xy);
}

double point_to_point(const DisorderField& field, const CouplingSchedule& schedule,
                      int scaling_N, int M, int N, int xx, int xy, int yx, int yy,
                      double box_radius_factor, bool* parity_flag, EngineWorkspace* ws) {
    if (parity_flag) *parity_flag = false;
    if (schedule.kernel.parity_constrained()) {
        const int par = ((yx - xx) + (yy - xy) + (N - M)) & 1;
        if (par != 0) {
            if (parity_flag) *parity_flag = true;
            return 0.0;
        }
    }
    PartitionSlice s =
        point_to_point_slice(field, schedule, scaling_N, M, N, xx, xy, box_radius_factor, ws);
    if (!s.geom.contains(yx, yy)) return 0.0;
    return s.at(yx, yy);
}

double chapman_kolmogorov_check(const DisorderField& field, const CouplingSchedule& schedule,
                                int scaling_N, int M, int K, int N, int xx, int xy, int yx,
                                int yy) {
    if (!(M < K && K < N)) throw std::domain_error("chapman_kolmogorov: need M < K < N");
    // untruncated boxes: radius = duration makes absorption unreachable
    const double full = static_cast<double>(N - M) + 1.0;
    const double direct =
        point_to_point(field, schedule, scaling_N, M, N, xx, xy, yx, yy, full / std::sqrt(N - M));

    PartitionSlice left = point_to_point_slice(field, schedule, scaling_N, M, K, xx, xy,
                                               (static_cast<double>(K - M) + 1.0) / std::sqrt(K - M));
    if (left.lost_mass != 0.0)
        throw std::logic_error("chapman_kolmogorov_check requires untruncated windows");
    const double beta = schedule.beta_at(scaling_N);
    const double lam = (beta == 0.0) ? 0.0 : lambda(field.law, beta);

    NeumaierSum glued;
    const int R = left.geom.radius;
    EngineWorkspace ws;
    for (int y = -R; y <= R; ++y) {
        for (int x = -R; x <= R; ++x) {
            const double zv = left.at(xx + x, xy + y);
            if (zv == 0.0) continue;
            const double omega =
                field.zero_disorder ? 0.0 : field.value(K, xx + x, xy + y);
            const double w = (beta == 0.0) ? 1.0 : fast_exp(beta * omega - lam);
            const double right =
                point_to_point(field, schedule, scaling_N, K, N, xx + x, xy + y, yx, yy,
                               (static_cast<double>(N - K) + 1.0) / std::sqrt(N - K), nullptr, &ws);
            glued.add(zv * w * right);
        }
    }
    const double g = glued.value();
    const double denom = std::max(std::abs(direct), std::abs(g));
    return denom == 0.0 ? 0.0 : std::abs(direct - g) / denom;
}

ValueField value_field(const DisorderField& field, const CouplingSchedule& schedule,
                       int scaling_N, int M, int H, const SliceGeometry& geom,
                       EngineWorkspace* ws) {
    if (!(M < H)) throw std::domain_error("value_field: need M < H");
    const double beta = schedule.beta_at(scaling_N);
    require_window(field, M + 1, H,
                   std::max(std::abs(geom.center_x), std::abs(geom.center_y)) + geom.radius);

    EngineWorkspace local;
    EngineWorkspace& w = ws ? *ws : local;
    Evolver ev;
    ev.plan = make_plan(field, beta);
    ev.kernel = &schedule.kernel;
    ev.delta_start = false; // flat start: every cell live, both parities
    ev.bind(w, geom.radius, geom.center_x, geom.center_y);

    // V_{H-1} == 1; step t applies the weight at time t then spreads,
    // yielding V_{t-1}: V_n(x) = sum_e p(e) w(n+1, x+e) V_{n+1}(x+e).
    {
        const int R = geom.radius;
        for (int y = -R; y <= R; ++y) {
            double* row = ev.cur.row(y);
            for (int x = -R; x <= R; ++x) row[x] = 1.0;
        }
        ev.active = R;
        ev.steps_done = H; // no diamond restriction
    }
    for (int t = H - 1; t >= M + 1; --t) {
        ev.weight(t);
        ev.spread();
    }

    ValueField out;
    out.start_time = M;
    out.horizon = H;
    out.beta = beta;
    out.geom = geom;
    out.values.resize(geom.cells());
    const int R = geom.radius;
    for (int y = -R; y <= R; ++y) {
        const double* row = ev.cur.crow(y);
        for (int x = -R; x <= R; ++x) {
            const double v = row[x];
            if (!(v > 0.0) || !std::isfinite(v))
                throw numeric_error("non-positive partition value in value field", M);
            out.values[geom.index(x + geom.center_x, y + geom.center_y)] = v;
        }
    }
    return out;
}

std::vector<double> log_field(const PartitionSlice& slice) {
    std::vector<double> out(slice.values.size());
    for (size_t i = 0; i < out.size(); ++i) {
        const double v = slice.values[i];
        if (!(v > 0.0))
            throw numeric_error("log_field: non-positive entry (truncation-starved cell)",
                                slice.time);
        out[i] = std::log(v);
    }
    return out;
}

std::vector<double> log_field(const ValueField& field) {
    std::vector<double> out(field.values.size());
    for (size_t i = 0; i < out.size(); ++i) {
        const double v = field.values[i];
        if (!(v > 0.0))
            throw numeric_error("log_field: non-positive entry (truncation-starved cell)",
                                field.start_time);
        out[i] = std::log(v);
    }
    return out;
}

RescaledMeasure rescaled_measure(const DisorderField& field, const CouplingSchedule& schedule,
                                 int N, double s, double t, double macro_box_radius,
                                 double box_radius_factor) {
    if (!(0.0 <= s && s < t)) throw std::domain_error("rescaled_measure: need 0 <= s < t");
    const int M = static_cast<int>(N * s);
    const int H = static_cast<int>(N * t);
    if (M >= H) throw std::domain_error("rescaled_measure: [Ns] >= [Nt]; increase N or t-s");
    const double sqn = std::sqrt(static_cast<double>(N));
    const int zr = static_cast<int>(std::floor(macro_box_radius * sqn));
    const int cone = cone_radius(H - M, box_radius_factor);
    if (zr + cone > field.box_radius)
        throw std::domain_error("rescaled_measure: macro box plus diffusive margin exceeds the "
                                "field window (radius " + std::to_string(zr + cone) + " > " +
                                std::to_string(field.box_radius) + ")");

    RescaledMeasure out;
    out.N = N;
    out.s = s;
    out.t = t;
    out.start_geom = SliceGeometry{0, 0, zr};
    out.end_geom = SliceGeometry{0, 0, zr + cone};
    out.mass.assign(out.start_geom.cells() * out.end_geom.cells(), 0.0);

    EngineWorkspace ws;
    const double invN = 1.0 / static_cast<double>(N);
    for (int zy = -zr; zy <= zr; ++zy) {
        for (int zx = -zr; zx <= zr; ++zx) {
            PartitionSlice sl = point_to_point_slice(field, schedule, N, M, H, zx, zy,
                                                     box_radius_factor, &ws);
            out.lost_mass += sl.lost_mass;
            const size_t zi = out.start_geom.index(zx, zy);
            const int R = sl.geom.radius;
            for (int wy = -R; wy <= R; ++wy)
                for (int wx = -R; wx <= R; ++wx) {
                    const int ax = zx + wx, ay = zy + wy;
                    if (!out.end_geom.contains(ax, ay)) continue;
                    const double v = sl.at(ax, ay);
                    if (v != 0.0)
                        out.mass[zi * out.end_geom.cells() + out.end_geom.index(ax, ay)] +=
                            v * invN;
                }
        }
    }
    return out;
}

// ---------------------- snapshot I/O ----------------------

void write_snapshot(const std::string& path, const GridSnapshot& snap) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write("SHF1", 4);
    f.write(reinterpret_cast<const char*>(&snap.rows), 4);
    f.write(reinterpret_cast<const char*>(&snap.cols), 4);
    f.write(reinterpret_cast<const char*>(&snap.cell_side), 8);
    f.write(reinterpret_cast<const char*>(&snap.time), 8);
    f.write(reinterpret_cast<const char*>(snap.data.data()),
            static_cast<std::streamsize>(snap.data.size() * 8));
    if (!f) throw std::runtime_error("short write to " + path);
}

GridSnapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "SHF1", 4) != 0)
        throw std::runtime_error(path + ": bad magic (want SHF1)");
    GridSnapshot snap;
    f.read(reinterpret_cast<char*>(&snap.rows), 4);
    f.read(reinterpret_cast<char*>(&snap.cols), 4);
    f.read(reinterpret_cast<char*>(&snap.cell_side), 8);
    f.read(reinterpret_cast<char*>(&snap.time), 8);
    snap.data.resize(static_cast<size_t>(snap.rows) * snap.cols);
    f.read(reinterpret_cast<char*>(snap.data.data()),
           static_cast<std::streamsize>(snap.data.size() * 8));
    if (!f) throw std::runtime_error(path + ": truncated snapshot");
    return snap;
}

void write_snapshot_metadata(const std::string& path, uint64_t seed,
                             const CouplingSchedule& schedule, int N, double lost_mass) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "seed = " << seed << "\n"
      << "schedule = " << schedule.describe() << "\n"
      << "N = " << N << "\n"
      << "lost_mass = " << lost_mass << "\n";
}

} // namespace shf

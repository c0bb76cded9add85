#include "shf/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace shf {

namespace {

// Exact m-step transition probability of a kernel by direct convolution.
struct KernelPower {
    int steps = 0;
    int radius = 0;
    std::vector<double> p; // (2r+1)^2 row-major

    double at(int dx, int dy) const {
        if (std::abs(dx) > radius || std::abs(dy) > radius) return 0.0;
        return p[static_cast<size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
};

KernelPower kernel_power(const WalkKernel& k, int m) {
    KernelPower out;
    out.steps = m;
    out.radius = m;
    const int side = 2 * m + 1;
    out.p.assign(static_cast<size_t>(side) * side, 0.0);
    std::vector<double> cur(out.p.size(), 0.0), nxt(out.p.size(), 0.0);
    auto idx = [&](int x, int y) { return static_cast<size_t>(y + m) * side + (x + m); };
    cur[idx(0, 0)] = 1.0;
    for (int s = 0; s < m; ++s) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int y = -s; y <= s; ++y)
            for (int x = -s; x <= s; ++x) {
                const double v = cur[idx(x, y)];
                if (v == 0.0) continue;
                for (const auto& o : k.step_support) nxt[idx(x + o.dx, y + o.dy)] += v * o.prob;
            }
        cur.swap(nxt);
    }
    out.p = cur;
    return out;
}

double weight_at(const DisorderField& field, double beta, double lam, int n, int x, int y) {
    if (beta == 0.0) return 1.0;
    const double omega = field.value(n, x, y);
    return fast_exp(beta * omega - lam);
}

} // namespace

// ---------------------- path enumeration ----------------------

double enumerate_point_to_plane(const DisorderField& field, const WalkKernel& kernel,
                                double beta, int M, int N, int zx, int zy) {
    const int horizon = N - M;
    if (horizon < 1 || horizon > 8)
        throw std::domain_error("enumerate_point_to_plane: horizon must be in 1..8");
    const double lam = (beta == 0.0) ? 0.0 : lambda(field.law, beta);
    const size_t nsteps = kernel.step_support.size();
    size_t paths = 1;
    for (int i = 0; i < horizon; ++i) paths *= nsteps;

    NeumaierSum total;
    std::vector<int> digits(horizon, 0);
    for (size_t p = 0; p < paths; ++p) {
        size_t rem = p;
        int x = zx, y = zy;
        double w = 1.0;
        for (int s = 0; s < horizon; ++s) {
            const auto& o = kernel.step_support[rem % nsteps];
            rem /= nsteps;
            x += o.dx;
            y += o.dy;
            w *= o.prob * weight_at(field, beta, lam, M + 1 + s, x, y);
        }
        total.add(w);
    }
    return total.value();
}

double enumerate_point_to_point(const DisorderField& field, const WalkKernel& kernel,
                                double beta, int M, int N, int xx, int xy, int yx, int yy) {
    const int horizon = N - M;
    if (horizon < 1 || horizon > 8)
        throw std::domain_error("enumerate_point_to_point: horizon must be in 1..8");
    const double lam = (beta == 0.0) ? 0.0 : lambda(field.law, beta);
    const size_t nsteps = kernel.step_support.size();
    size_t paths = 1;
    for (int i = 0; i < horizon; ++i) paths *= nsteps;

    NeumaierSum total;
    for (size_t p = 0; p < paths; ++p) {
        size_t rem = p;
        int x = xx, y = xy;
        double w = 1.0;
        for (int s = 0; s < horizon; ++s) {
            const auto& o = kernel.step_support[rem % nsteps];
            rem /= nsteps;
            x += o.dx;
            y += o.dy;
            if (s < horizon - 1) w *= o.prob * weight_at(field, beta, lam, M + 1 + s, x, y);
            else w *= o.prob; // terminal time carries no weight
        }
        if (x == yx && y == yy) total.add(w);
    }
    return total.value();
}

// ---------------------- polynomial chaos ----------------------

namespace {

std::vector<ChaosSite> full_cone(const WalkKernel& kernel, int M, int zx, int zy, int horizon,
                                 int weighted_times) {
    std::vector<ChaosSite> sites;
    for (int s = 1; s <= weighted_times; ++s) {
        KernelPower kp = kernel_power(kernel, s);
        for (int dy = -s; dy <= s; ++dy)
            for (int dx = -s; dx <= s; ++dx)
                if (kp.at(dx, dy) > 0.0) sites.push_back({M + s, zx + dx, zy + dy});
    }
    (void)horizon;
    return sites;
}

} // namespace

ChaosExpansion chaos_expand_window(const WalkKernel& kernel, double beta, int M, int zx, int zy,
                                   int horizon, std::vector<ChaosSite> window,
                                   std::optional<std::pair<int, int>> endpoint) {
    if (horizon < 1) throw std::domain_error("chaos_expand: horizon must be >= 1");
    if (window.size() > 20)
        throw std::domain_error("chaos_expand: window of " + std::to_string(window.size()) +
                                " sites needs 2^" + std::to_string(window.size()) +
                                " subsets; refusing above 20");
    ChaosExpansion exp;
    exp.sites = std::move(window);
    exp.beta = beta;
    exp.start_time = M;
    exp.start_x = zx;
    exp.start_y = zy;
    exp.horizon = horizon;
    exp.endpoint = endpoint;
    const int k = static_cast<int>(exp.sites.size());
    exp.coeff.assign(static_cast<size_t>(1) << k, 0.0);

    // cache kernel powers up to the horizon
    std::vector<KernelPower> powers(static_cast<size_t>(horizon) + 1);
    for (int s = 1; s <= horizon; ++s) powers[static_cast<size_t>(s)] = kernel_power(kernel, s);
    auto trans = [&](int steps, int dx, int dy) -> double {
        if (steps == 0) return (dx == 0 && dy == 0) ? 1.0 : 0.0;
        return powers[static_cast<size_t>(steps)].at(dx, dy);
    };

    std::vector<int> order(exp.sites.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return exp.sites[static_cast<size_t>(a)].n < exp.sites[static_cast<size_t>(b)].n;
    });

    for (size_t mask = 0; mask < exp.coeff.size(); ++mask) {
        // psi_T: probability the walk passes through every site of T
        double psi = 1.0;
        int pt = M, px = zx, py = zy;
        bool dead = false;
        for (int oi : order) {
            if (!(mask >> oi & 1)) continue;
            const ChaosSite& s = exp.sites[static_cast<size_t>(oi)];
            if (s.n == pt && !(s.x == px && s.y == py)) { dead = true; break; }
            if (s.n == pt) continue; // same site twice cannot happen (distinct sites)
            psi *= trans(s.n - pt, s.x - px, s.y - py);
            if (psi == 0.0) { dead = true; break; }
            pt = s.n; px = s.x; py = s.y;
        }
        if (dead) { exp.coeff[mask] = 0.0; continue; }
        if (endpoint) {
            const int NT = M + horizon;
            psi *= trans(NT - pt, endpoint->first - px, endpoint->second - py);
        }
        exp.coeff[mask] = psi;
        if (psi != 0.0)
            exp.max_order = std::max(exp.max_order, __builtin_popcount(static_cast<unsigned>(mask)));
    }
    return exp;
}

ChaosExpansion chaos_expand(const WalkKernel& kernel, double beta, int M, int zx, int zy,
                            int horizon, std::optional<std::pair<int, int>> endpoint) {
    // point-to-plane weights run to the horizon, point-to-point to horizon-1
    const int weighted = endpoint ? horizon - 1 : horizon;
    return chaos_expand_window(kernel, beta, M, zx, zy, horizon,
                               full_cone(kernel, M, zx, zy, horizon, weighted), endpoint);
}

double chaos_evaluate(const ChaosExpansion& exp, const DisorderField& field) {
    const double lam = (exp.beta == 0.0) ? 0.0 : lambda(field.law, exp.beta);
    std::vector<double> eta(exp.sites.size());
    for (size_t i = 0; i < exp.sites.size(); ++i) {
        const ChaosSite& s = exp.sites[i];
        const double omega = field.value(s.n, s.x, s.y);
        eta[i] = std::expm1(exp.beta * omega - lam);
    }
    NeumaierSum total;
    for (size_t mask = 0; mask < exp.coeff.size(); ++mask) {
        const double c = exp.coeff[mask];
        if (c == 0.0) continue;
        double prod = c;
        size_t rem = mask;
        while (rem) {
            const int b = __builtin_ctzll(rem);
            prod *= eta[static_cast<size_t>(b)];
            rem &= rem - 1;
        }
        total.add(prod);
    }
    return total.value();
}

double enumerate_windowed(const ChaosExpansion& exp, const DisorderField& field,
                          const WalkKernel& kernel) {
    const int horizon = exp.horizon;
    if (horizon > 8) throw std::domain_error("enumerate_windowed: horizon must be <= 8");
    const double lam = (exp.beta == 0.0) ? 0.0 : lambda(field.law, exp.beta);
    std::map<std::tuple<int, int, int>, double> window_weight;
    for (const auto& s : exp.sites) {
        const double omega = field.value(s.n, s.x, s.y);
        window_weight[{s.n, s.x, s.y}] = fast_exp(exp.beta * omega - lam);
    }
    const size_t nsteps = kernel.step_support.size();
    size_t paths = 1;
    for (int i = 0; i < horizon; ++i) paths *= nsteps;

    NeumaierSum total;
    for (size_t p = 0; p < paths; ++p) {
        size_t rem = p;
        int x = exp.start_x, y = exp.start_y;
        double w = 1.0;
        for (int s = 0; s < horizon; ++s) {
            const auto& o = kernel.step_support[rem % nsteps];
            rem /= nsteps;
            x += o.dx;
            y += o.dy;
            w *= o.prob;
            auto it = window_weight.find({exp.start_time + 1 + s, x, y});
            if (it != window_weight.end()) w *= it->second;
        }
        if (exp.endpoint && !(x == exp.endpoint->first && y == exp.endpoint->second)) continue;
        total.add(w);
    }
    return total.value();
}

// ---------------------- second moments ----------------------

namespace {

// 1D distribution of one rotated difference coordinate of two independent
// simple walks: steps -1, 0, +1 with probabilities 1/4, 1/2, 1/4.
struct RotatedCoordDP {
    std::vector<double> h; // sites -n..n at offset n
    int n = 0;
    RotatedCoordDP() : h{1.0} {}
    void step() {
        std::vector<double> nx(h.size() + 2, 0.0);
        for (size_t j = 0; j < h.size(); ++j) {
            const double v = h[j];
            nx[j] += 0.25 * v;
            nx[j + 1] += 0.5 * v;
            nx[j + 2] += 0.25 * v;
        }
        h.swap(nx);
        ++n;
    }
    double at(int j) const {
        if (std::abs(j) > n) return 0.0;
        return h[static_cast<size_t>(j + n)];
    }
};

std::vector<double> renewal_mass(const std::vector<double>& u, double sigma2, int K) {
    // m(i) = sigma2 u(i) + sigma2 sum_{j<i} u(j) m(i-j)
    std::vector<double> m(static_cast<size_t>(K) + 1, 0.0);
    for (int i = 1; i <= K; ++i) {
        double acc = u[static_cast<size_t>(i)];
        for (int j = 1; j < i; ++j) acc += u[static_cast<size_t>(j)] * m[static_cast<size_t>(i - j)];
        m[static_cast<size_t>(i)] = sigma2 * acc;
    }
    return m;
}

} // namespace

double second_moment_exact(const WalkKernel& kernel, const DisorderLaw& law, double beta,
                           int N, int offset_x, int offset_y, int collision_horizon) {
    if (N < 1) throw std::domain_error("second_moment_exact: N must be >= 1");
    const int K = (collision_horizon < 0) ? N : collision_horizon;
    if (beta == 0.0 || K == 0) return 1.0;
    const double sigma2 = sigma2_pair(law, beta);

    if (kernel.parity_constrained() && (((offset_x + offset_y) & 1) != 0))
        return 1.0; // replicas on opposite parity classes never meet

    // q_d(n) = P(difference walk at 0 | started at d)
    std::vector<double> q(static_cast<size_t>(K) + 1, 0.0);
    if (kernel.kind == WalkKernel::Kind::simple) {
        const int i0 = (offset_x + offset_y) / 2;
        const int j0 = (offset_x - offset_y) / 2;
        RotatedCoordDP dp;
        for (int n = 1; n <= K; ++n) {
            dp.step();
            q[static_cast<size_t>(n)] = dp.at(i0) * dp.at(j0);
        }
    } else {
        // difference kernel of two lazy walks by direct 2D DP
        if (static_cast<long long>(K) * K * K > 2'000'000'000LL)
            throw std::domain_error("second_moment_exact: lazy-kernel DP beyond budget (K=" +
                                    std::to_string(K) + ")");
        std::vector<Offset> diff;
        for (const auto& a : kernel.step_support)
            for (const auto& b : kernel.step_support)
                diff.push_back({a.dx - b.dx, a.dy - b.dy, a.prob * b.prob});
        const int R = K;
        const int side = 2 * R + 1;
        std::vector<double> cur(static_cast<size_t>(side) * side, 0.0), nxt(cur.size());
        auto idx = [&](int x, int y) { return static_cast<size_t>(y + R) * side + (x + R); };
        cur[idx(offset_x, offset_y)] = 1.0;
        for (int n = 1; n <= K; ++n) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            const int r = std::min(R, std::max(std::abs(offset_x), std::abs(offset_y)) + n);
            for (int y = -r; y <= r; ++y)
                for (int x = -r; x <= r; ++x) {
                    const double v = cur[idx(x, y)];
                    if (v == 0.0) continue;
                    for (const auto& o : diff)
                        if (std::abs(x + o.dx) <= R && std::abs(y + o.dy) <= R)
                            nxt[idx(x + o.dx, y + o.dy)] += v * o.prob;
                }
            cur.swap(nxt);
            q[static_cast<size_t>(n)] = cur[idx(0, 0)];
        }
    }

    std::vector<double> u(static_cast<size_t>(K) + 1, 0.0);
    for (int n = 1; n <= K; ++n) u[static_cast<size_t>(n)] = return_probability(kernel, n);
    const std::vector<double> m = renewal_mass(u, sigma2, K);

    // E = 1 + sigma2 sum_n q(n) (1 + M(K-n)), M = partial sums of m
    std::vector<double> Mcum(static_cast<size_t>(K) + 1, 0.0);
    for (int i = 1; i <= K; ++i) Mcum[static_cast<size_t>(i)] = Mcum[static_cast<size_t>(i - 1)] + m[static_cast<size_t>(i)];
    NeumaierSum total;
    for (int n = 1; n <= K; ++n)
        total.add(q[static_cast<size_t>(n)] * (1.0 + Mcum[static_cast<size_t>(K - n)]));
    return 1.0 + sigma2 * total.value();
}

double variance_flat_exact(const CouplingSchedule& schedule, int N, int M, int H,
                           const TestFunction& phi) {
    if (schedule.kernel.kind != WalkKernel::Kind::simple)
        throw std::domain_error("variance_flat_exact: simple kernel only");
    if (!(M < H)) throw std::domain_error("variance_flat_exact: need M < H");
    const int K = H - M - 1; // collision times M+1..H-1
    const double beta = schedule.beta_at(N);
    if (beta == 0.0 || K == 0) return 0.0;
    const double sigma2 = sigma2_pair(schedule.law, beta);

    // A(d) = N^{-2} sum_z phi(z) phi(z+d) over lattice sites, reduced to the
    // rotated half-lattice (u,v) = ((d1+d2)/2, (d1-d2)/2).
    const double sqn = std::sqrt(static_cast<double>(N));
    const int r = static_cast<int>(std::ceil(phi.support_radius() * sqn)) + 1;
    const int side = 2 * r + 1;
    std::vector<double> ph(static_cast<size_t>(side) * side);
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            ph[static_cast<size_t>(y + r) * side + (x + r)] = phi(x / sqn, y / sqn);

    // autocorrelation over even-parity offsets
    const int ur = 2 * r; // |u|,|v| <= 2r in rotated units... (d1+-d2)/2 in [-2r,2r]
    const int uside = 2 * ur + 1;
    std::vector<double> A(static_cast<size_t>(uside) * uside, 0.0);
    const long long cost = static_cast<long long>(side) * side * side * side;
    if (cost > 4'000'000'000LL)
        throw std::domain_error("variance_flat_exact: autocorrelation cost " +
                                std::to_string(cost) + " exceeds budget; shrink phi or N");
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double a = ph[static_cast<size_t>(y + r) * side + (x + r)];
            if (a == 0.0) continue;
            for (int y2 = -r; y2 <= r; ++y2)
                for (int x2 = -r; x2 <= r; ++x2) {
                    const double b = ph[static_cast<size_t>(y2 + r) * side + (x2 + r)];
                    if (b == 0.0) continue;
                    const int dx = x2 - x, dy = y2 - y;
                    if (((dx + dy) & 1) != 0) continue; // odd parity never collides
                    const int uu = (dx + dy) / 2, vv = (dx - dy) / 2;
                    A[static_cast<size_t>(vv + ur) * uside + (uu + ur)] += a * b;
                }
        }
    const double invN2 = 1.0 / (static_cast<double>(N) * N);

    // Q(n) = sum_{u,v} A(u,v) h_n(u) h_n(v) via the separable 1D DP
    std::vector<double> Q(static_cast<size_t>(K) + 1, 0.0);
    RotatedCoordDP dp;
    // column sums: for each u, S_u(n) = sum_v A(u,v) h_n(v)
    for (int n = 1; n <= K; ++n) {
        dp.step();
        const int reach = std::min(dp.n, ur);
        NeumaierSum qn;
        for (int uu = -reach; uu <= reach; ++uu) {
            const double hu = dp.at(uu);
            if (hu == 0.0) continue;
            double inner = 0.0;
            for (int vv = -reach; vv <= reach; ++vv) {
                const double a = A[static_cast<size_t>(vv + ur) * uside + (uu + ur)];
                if (a != 0.0) inner += a * dp.at(vv);
            }
            if (inner != 0.0) qn.add(hu * inner);
        }
        Q[static_cast<size_t>(n)] = qn.value() * invN2;
    }

    std::vector<double> u(static_cast<size_t>(K) + 1, 0.0);
    for (int n = 1; n <= K; ++n) u[static_cast<size_t>(n)] = return_probability(schedule.kernel, n);
    const std::vector<double> m = renewal_mass(u, sigma2, K);
    std::vector<double> Mcum(static_cast<size_t>(K) + 1, 0.0);
    for (int i = 1; i <= K; ++i) Mcum[static_cast<size_t>(i)] = Mcum[static_cast<size_t>(i - 1)] + m[static_cast<size_t>(i)];

    NeumaierSum var;
    for (int n = 1; n <= K; ++n)
        var.add(Q[static_cast<size_t>(n)] * (1.0 + Mcum[static_cast<size_t>(K - n)]));
    return sigma2 * var.value();
}

double second_moment_flat(const CouplingSchedule& schedule, int N, int M, int H,
                          const TestFunction& phi) {
    const double mean = lattice_integral(phi, N);
    return mean * mean + variance_flat_exact(schedule, N, M, H, phi);
}

double second_moment_pair_enumeration(const WalkKernel& kernel, const DisorderLaw& law,
                                      double beta, int N, int offset_x, int offset_y,
                                      int collision_horizon) {
    if (N < 1 || N > 4) throw std::domain_error("pair enumeration: N must be in 1..4");
    const int K = (collision_horizon < 0) ? N : collision_horizon;
    const double sigma2 = (beta == 0.0) ? 0.0 : sigma2_pair(law, beta);
    const size_t nsteps = kernel.step_support.size();
    size_t paths = 1;
    for (int i = 0; i < N; ++i) paths *= nsteps;

    NeumaierSum total;
    for (size_t p1 = 0; p1 < paths; ++p1) {
        for (size_t p2 = 0; p2 < paths; ++p2) {
            size_t r1 = p1, r2 = p2;
            int x1 = 0, y1 = 0, x2 = offset_x, y2 = offset_y;
            double prob = 1.0;
            int coincidences = 0;
            for (int s = 0; s < N; ++s) {
                const auto& a = kernel.step_support[r1 % nsteps];
                const auto& b = kernel.step_support[r2 % nsteps];
                r1 /= nsteps;
                r2 /= nsteps;
                x1 += a.dx; y1 += a.dy;
                x2 += b.dx; y2 += b.dy;
                prob *= a.prob * b.prob;
                if (s < K && x1 == x2 && y1 == y2) ++coincidences;
            }
            total.add(prob * std::pow(1.0 + sigma2, coincidences));
        }
    }
    return total.value();
}

std::vector<double> renewal_weight_profile(const WalkKernel& kernel, double sigma2, int K) {
    std::vector<double> u(static_cast<size_t>(K) + 1, 0.0);
    for (int n = 1; n <= K; ++n) u[static_cast<size_t>(n)] = return_probability(kernel, n);
    const std::vector<double> m = renewal_mass(u, sigma2, K);
    std::vector<double> out(static_cast<size_t>(K) + 1, 0.0);
    double cum = 0.0;
    out[0] = sigma2;
    for (int k = 1; k <= K; ++k) {
        cum += m[static_cast<size_t>(k)];
        out[static_cast<size_t>(k)] = sigma2 * (1.0 + cum);
    }
    return out;
}

} // namespace shf

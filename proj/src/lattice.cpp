#include "shf/lattice.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace shf {

// ---------------------- walk kernels ----------------------

WalkKernel WalkKernel::make_simple() {
    WalkKernel k;
    k.kind = Kind::simple;
    k.p_stay = 0.0;
    k.step_support = {{1, 0, 0.25}, {-1, 0, 0.25}, {0, 1, 0.25}, {0, -1, 0.25}};
    return k;
}

WalkKernel WalkKernel::make_lazy(double p_stay) {
    if (!(p_stay > 0.0 && p_stay < 1.0))
        throw std::domain_error("lazy walk: p_stay must lie in (0,1)");
    WalkKernel k;
    k.kind = Kind::lazy;
    k.p_stay = p_stay;
    const double q = (1.0 - p_stay) / 4.0;
    k.step_support = {{0, 0, p_stay}, {1, 0, q}, {-1, 0, q}, {0, 1, q}, {0, -1, q}};
    return k;
}

double WalkKernel::coord_variance() const {
    double v = 0.0;
    for (const auto& o : step_support) v += o.prob * o.dx * o.dx;
    return v;
}

// ---------------------- disorder laws ----------------------

double DisorderLaw::beta_bound() const {
    switch (kind) {
        case Kind::gaussian: return std::numeric_limits<double>::infinity();
        case Kind::rademacher: return std::numeric_limits<double>::infinity();
        case Kind::shifted_exponential: return 1.0; // standardised Exp(1)-1
        case Kind::zero: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

std::string DisorderLaw::name() const {
    switch (kind) {
        case Kind::gaussian: return "gaussian";
        case Kind::rademacher: return "rademacher";
        case Kind::shifted_exponential: return "shifted_exponential";
        case Kind::zero: return "zero";
    }
    return "?";
}

double DisorderLaw::sample(uint64_t h) const {
    switch (kind) {
        case Kind::gaussian:
            return gaussian_from_counter(h);
        case Kind::rademacher:
            return (h >> 63) ? 1.0 : -1.0;
        case Kind::shifted_exponential:
            // standardised: omega = X - 1 with X ~ Exp(1)
            return -fast_log(u64_to_unit(h)) - 1.0;
        case Kind::zero:
            return 0.0;
    }
    return 0.0;
}

double lambda(const DisorderLaw& law, double beta) {
    const double bound = law.beta_bound();
    if (!(beta < bound))
        throw std::domain_error("lambda(" + law.name() + "): beta=" + std::to_string(beta) +
                                " outside finite-cumulant range beta < " + std::to_string(bound));
    switch (law.kind) {
        case DisorderLaw::Kind::gaussian:
            return 0.5 * beta * beta;
        case DisorderLaw::Kind::rademacher:
            // log cosh(beta), stable for large |beta|
            return std::abs(beta) + std::log1p(std::exp(-2.0 * std::abs(beta))) - std::log(2.0);
        case DisorderLaw::Kind::shifted_exponential:
            // E[e^{beta(X-1)}] = e^{-beta}/(1-beta), X ~ Exp(1)
            return -beta - std::log1p(-beta);
        case DisorderLaw::Kind::zero:
            return 0.0;
    }
    return 0.0;
}

double sigma2_pair(const DisorderLaw& law, double beta) {
    const double l2 = lambda(law, 2.0 * beta);
    const double l1 = lambda(law, beta);
    return std::expm1(l2 - 2.0 * l1);
}

double DisorderField::value_checked(int n, int x, int y) const {
    if (n < n_min || n > n_max)
        throw std::out_of_range("disorder access: time " + std::to_string(n) + " outside [" +
                                std::to_string(n_min) + "," + std::to_string(n_max) + "]");
    if (std::abs(x) > box_radius || std::abs(y) > box_radius)
        throw std::out_of_range("disorder access: site (" + std::to_string(x) + "," +
                                std::to_string(y) + ") outside box radius " +
                                std::to_string(box_radius));
    return value(n, x, y);
}

// ---------------------- difference-walk return probabilities ----------------------

namespace {

// Cache of u(n) = P(S_n = S'_n) and prefix sums R_n, extended on demand.
struct KernelCache {
    std::mutex mtx;
    std::vector<double> u; // u[n], n >= 1; u[0] unused sentinel
    std::vector<double> R; // R[n] = sum_{j<=n} u[j]

    // simple walk: 1D distribution of one rotated difference coordinate,
    // sites -n..n stored at offset n (steps {-1,0,1} w.p. {1/4,1/2,1/4})
    std::vector<double> dist1d;
    int dist_n = 0;

    // lazy walk: lgamma table, extended as needed
    std::vector<double> lg;
    double p_stay = 0.0;
};

std::shared_ptr<KernelCache> cache_for(const WalkKernel& k) {
    static std::mutex reg_mtx;
    static std::map<std::pair<int, double>, std::shared_ptr<KernelCache>> registry;
    std::lock_guard<std::mutex> g(reg_mtx);
    auto key = std::make_pair(static_cast<int>(k.kind), k.p_stay);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    auto c = std::make_shared<KernelCache>();
    c->u = {0.0};
    c->R = {0.0};
    c->dist1d = {1.0};
    c->p_stay = k.p_stay;
    registry[key] = c;
    return c;
}

// Extend the simple-walk cache to time n. The difference of two simple
// walks factorises: in the 45-degree rotated frame its two coordinates are
// independent 1D walks with steps {-1,0,1} w.p. {1/4,1/2,1/4} (after
// halving the lattice), so u(n) = P(coord at 0)^2. Exact, no truncation.
void extend_simple(KernelCache& c, int n) {
    while (c.dist_n < n) {
        const int m = c.dist_n;
        std::vector<double> next(2 * (m + 1) + 1, 0.0);
        const double* d = c.dist1d.data();
        for (int j = 0; j <= 2 * m; ++j) {
            const double v = d[j];
            next[j] += 0.25 * v;
            next[j + 1] += 0.5 * v;
            next[j + 2] += 0.25 * v;
        }
        c.dist1d.swap(next);
        ++c.dist_n;
        const double p0 = c.dist1d[c.dist_n];
        c.u.push_back(p0 * p0);
        c.R.push_back(c.R.back() + p0 * p0);
    }
}

// Lazy walk: condition the difference walk on the per-step move classes
// (both stay / one moves / both move). Conditionally the two rotated
// coordinates are independent sums of i.i.d. signs, giving the exact
// closed sum over the trinomial class counts.
double lazy_u(KernelCache& c, int n) {
    const double p = c.p_stay;
    const double p1 = p * p, p2 = 2.0 * p * (1.0 - p), p3 = (1.0 - p) * (1.0 - p);
    const size_t need = static_cast<size_t>(2 * n + 2);
    if (c.lg.size() < need) {
        size_t old = c.lg.size();
        c.lg.resize(need);
        if (old == 0) { c.lg[0] = 0.0; old = 1; }
        for (size_t t = old; t < need; ++t) c.lg[t] = c.lg[t - 1] + std::log(static_cast<double>(t));
    }
    const double lp1 = std::log(p1), lp2 = std::log(p2), lp3 = std::log(p3);
    const double ln2 = std::log(2.0);
    NeumaierSum total;
    for (int i = 0; i <= n; i += 2) {          // "one moves" count, must be even
        for (int j = 0; j + i <= n; ++j) {     // "both move" count
            const int k1 = n - i - j;
            const int m = i + 2 * j;           // number of +-1 summands per coordinate
            const double logT = c.lg[n] - c.lg[i] - c.lg[j] - c.lg[k1] +
                                i * lp2 + j * lp3 + k1 * lp1;
            const double logB = (m == 0) ? 0.0 : (c.lg[m] - 2.0 * c.lg[m / 2] - m * ln2);
            total.add(std::exp(logT + 2.0 * logB));
        }
    }
    return total.value();
}

void extend_lazy(KernelCache& c, int n) {
    while (static_cast<int>(c.u.size()) <= n) {
        const int m = static_cast<int>(c.u.size());
        const double um = lazy_u(c, m);
        c.u.push_back(um);
        c.R.push_back(c.R.back() + um);
    }
}

void extend(const WalkKernel& k, KernelCache& c, int n) {
    if (k.kind == WalkKernel::Kind::simple) extend_simple(c, n);
    else extend_lazy(c, n);
}

} // namespace

double return_probability(const WalkKernel& kernel, int n) {
    if (n < 1) throw std::domain_error("return_probability: n must be >= 1");
    auto c = cache_for(kernel);
    std::lock_guard<std::mutex> g(c->mtx);
    extend(kernel, *c, n);
    return c->u[static_cast<size_t>(n)];
}

double overlap_sum(const WalkKernel& kernel, int N) {
    if (N < 1) throw std::domain_error("overlap_sum: N must be >= 1");
    auto c = cache_for(kernel);
    std::lock_guard<std::mutex> g(c->mtx);
    extend(kernel, *c, N);
    return c->R[static_cast<size_t>(N)];
}

} // namespace shf

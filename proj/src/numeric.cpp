#include "shf/numeric.hpp"

#include <algorithm>
#include <array>

namespace shf {

// ---------------------- normal inverse CDF ----------------------
// Wichura, Algorithm AS 241, PPND16.

double normal_icdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_icdf: p must lie in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                   3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
               4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                   2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
               4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                   1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
               2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                   1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
               5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                   1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
               5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

// ---------------------- exponential integral ----------------------

double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1: x must be > 0");
    if (x <= 1.0) {
        // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return -euler_gamma - std::log(x) + sum;
    }
    // Continued fraction (modified Lentz): E1 = e^{-x} * cf.
    const double tiny = 1e-300;
    double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

// ---------------------- Kolmogorov distribution ----------------------

double kolmogorov_cdf(double lambda) {
    if (lambda <= 0.0) return 0.0;
    if (lambda < 1.18) {
        // Jacobi-theta form, accurate for small lambda.
        const double y = std::exp(-1.233700550136169827 / (lambda * lambda)); // pi^2/8
        return 2.5066282746310002 / lambda *
               (std::pow(y, 0.25) + std::pow(y, 2.25) + std::pow(y, 6.25));
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double t = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? t : -t;
        if (t < 1e-18) break;
    }
    return 1.0 - 2.0 * sum;
}

// ---------------------- Gauss-Kronrod 7/15 ----------------------

namespace {

constexpr std::array<double, 8> gk_nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = gk_wk[7] * fc;
    double resg = gk_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * gk_nodes[j];
        const double f1 = f(c - x), f2 = f(c + x);
        resk += gk_wk[j] * (f1 + f2);
        if (j % 2 == 1) resg += gk_wg[j / 2] * (f1 + f2);
    }
    Interval out;
    out.a = a;
    out.b = b;
    out.value = resk * h;
    out.error = std::abs((resk - resg) * h);
    return out;
}

} // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_intervals) {
    QuadResult res;
    if (a == b) return res;
    std::vector<Interval> heap;
    heap.push_back(gk15(f, a, b));
    res.evaluations = 15;
    auto worse = [](const Interval& l, const Interval& r) { return l.error < r.error; };
    while (static_cast<int>(heap.size()) < max_intervals) {
        double total = 0.0, err = 0.0;
        for (const auto& iv : heap) { total += iv.value; err += iv.error; }
        if (err <= std::max(abs_tol, rel_tol * std::abs(total))) break;
        std::pop_heap(heap.begin(), heap.end(), worse);
        const Interval top = heap.back();
        heap.pop_back();
        const double m = 0.5 * (top.a + top.b);
        heap.push_back(gk15(f, top.a, m));
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back(gk15(f, m, top.b));
        std::push_heap(heap.begin(), heap.end(), worse);
        res.evaluations += 30;
    }
    NeumaierSum v, e;
    std::sort(heap.begin(), heap.end(),
              [](const Interval& l, const Interval& r) { return l.a < r.a; });
    for (const auto& iv : heap) { v.add(iv.value); e.add(iv.error); }
    res.value = v.value();
    res.abs_error = e.value();
    res.converged = res.abs_error <= std::max(abs_tol, rel_tol * std::abs(res.value)) * 4.0;
    return res;
}

// ---------------------- tanh-sinh ----------------------

QuadResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                               double rel_tol, int max_level) {
    QuadResult res;
    if (a == b) return res;
    const double c = 0.5 * (a + b), h0 = 0.5 * (b - a);
    constexpr double pi_half = 1.5707963267948966192;

    auto node_sum = [&](double h, bool odd_only) {
        // sum f over nodes t_k = tanh(pi/2 sinh(kh)); k odd when refining.
        NeumaierSum s;
        for (int k = odd_only ? 1 : 0;; k += odd_only ? 2 : 1) {
            const double kh = k * h;
            const double sh = std::sinh(kh);
            const double ch = std::cosh(kh);
            const double q = pi_half * sh;
            if (q > 17.0) break; // 1 - tanh(q) below double resolution
            const double t = std::tanh(q);
            const double w = pi_half * ch / (std::cosh(q) * std::cosh(q));
            const double x1 = c + h0 * t;
            const double x2 = c - h0 * t;
            double contrib = f(x1) * w;
            if (k > 0) contrib += f(x2) * w;
            s.add(contrib);
            res.evaluations += (k > 0) ? 2 : 1;
            if (k == 0 && odd_only) break;
        }
        return s.value();
    };

    double h = 1.0;
    double sum = node_sum(h, false);
    double prev = h0 * h * sum;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        sum += node_sum(h, true);
        const double cur = h0 * h * sum;
        const double err = std::abs(cur - prev);
        res.value = cur;
        res.abs_error = err;
        if (err <= rel_tol * std::abs(cur) + 1e-300) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    res.converged = false;
    return res;
}

double neumaier_total(const std::vector<double>& xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

} // namespace shf

#pragma once
// Band-gap reservoir model: dispersion, oscillatory memory kernel, and the
// static spectral integrals consumed by the solver and bound-state search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace pbg {

using complexd = std::complex<double>;

class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dispersion and coupling parameters of the structured bath. Units: the
// band-edge frequency omega_c sets the frequency scale and c = 1 sets
// length, so k0 = omega_c and A = omega_c / k0^2 by default.
struct ReservoirParams {
    double omega_c = 1.0;   // band-edge frequency
    double curvature = 1.0; // dispersion curvature A
    double k0 = 1.0;        // band-edge wave vector
    double eta = 0.2;       // dimensionless coupling constant
    double k_max = 10.0;    // ultraviolet cutoff, units of k0
    int n_quad = 8;         // Gauss nodes per oscillation-resolved panel

    void validate() const {
        if (!(omega_c > 0.0)) throw std::invalid_argument("omega_c must be > 0");
        if (!(curvature > 0.0)) throw std::invalid_argument("curvature must be > 0");
        if (!(k0 > 0.0)) throw std::invalid_argument("k0 must be > 0");
        if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
        if (!(k_max > k0)) throw std::invalid_argument("k_max must exceed k0");
        if (n_quad < 8) throw std::invalid_argument("n_quad must be >= 8");
    }
};

struct EmitterParams {
    double omega_0 = 0.1; // transition frequency, units of omega_c

    void validate() const {
        if (!(omega_0 > 0.0)) throw std::invalid_argument("omega_0 must be > 0");
    }
};

// Natural spontaneous emission rate eta * omega_0.
inline double natural_rate(const ReservoirParams& res, const EmitterParams& em) {
    return res.eta * em.omega_0;
}

inline double dispersion(const ReservoirParams& p, double k) {
    if (k < 0.0) throw std::invalid_argument("dispersion: negative wave vector");
    const double d = k - p.k0;
    return p.omega_c + p.curvature * d * d;
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double xi, wi;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &xi, &wi, t);
        x[static_cast<size_t>(i)] = xi;
        w[static_cast<size_t>(i)] = wi;
    }
    gsl_integration_glfixed_table_free(t);
}

struct GslWorkspace {
    gsl_integration_workspace* ws;
    explicit GslWorkspace(size_t n) : ws(gsl_integration_workspace_alloc(n)) {}
    ~GslWorkspace() { gsl_integration_workspace_free(ws); }
    GslWorkspace(const GslWorkspace&) = delete;
    GslWorkspace& operator=(const GslWorkspace&) = delete;
};

struct GslErrorHandlerGuard {
    GslErrorHandlerGuard() { old = gsl_set_error_handler_off(); }
    ~GslErrorHandlerGuard() { gsl_set_error_handler(old); }
    gsl_error_handler_t* old;
};

template <typename F>
double gsl_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol) {
    GslErrorHandlerGuard guard;
    GslWorkspace ws(4096);
    using Fn = std::remove_reference_t<F>;
    gsl_function gf;
    gf.function = [](double x, void* params) -> double {
        return (*static_cast<Fn*>(params))(x);
    };
    gf.params = const_cast<void*>(static_cast<const void*>(&f));
    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, 4096, ws.ws, &result, &abserr);
    if (status != 0 && status != GSL_EROUND)
        throw numerical_error("adaptive quadrature failed: " + std::string(gsl_strerror(status)));
    return result;
}

} // namespace detail

// Oscillation-resolved panel quadrature of
//   eta * int_0^{k_max} k^2 / omega_k * exp(-i omega_k s) dk.
// Panel widths keep the local phase increment below max_phase at the largest
// |d omega / dk| in the panel; n_nodes Gauss points per panel.
inline complexd memory_kernel_panels(const ReservoirParams& p, double s,
                                     int n_nodes, double max_phase) {
    std::vector<double> gx, gw;
    detail::gauss_legendre(n_nodes, gx, gw);

    complexd acc(0.0, 0.0);
    double k = 0.0;
    const double base_width = (p.k_max) / 64.0; // floor resolution for the k^2/omega profile
    while (k < p.k_max) {
        // largest |d omega/dk| over [k, k + h] is at whichever end is farther from k0
        double h = base_width;
        if (s > 0.0) {
            // conservative: use slope at the outer edge of the trial panel
            for (int it = 0; it < 40; ++it) {
                const double far_edge = std::max(std::abs(k - p.k0), std::abs(k + h - p.k0));
                const double slope = 2.0 * p.curvature * far_edge;
                const double allowed = (slope > 0.0) ? max_phase / (slope * s) : h;
                if (h <= allowed * 1.0000001) break;
                h = allowed;
            }
        }
        h = std::min(h, p.k_max - k);
        const double mid = k + 0.5 * h;
        const double half = 0.5 * h;
        for (int i = 0; i < n_nodes; ++i) {
            const double kq = mid + half * gx[static_cast<size_t>(i)];
            const double w = dispersion(p, kq);
            const double amp = kq * kq / w;
            acc += gw[static_cast<size_t>(i)] * half * amp * std::polar(1.0, -w * s);
        }
        k += h;
    }
    return p.eta * acc;
}

// Memory kernel f(s) with a built-in convergence check: the quadrature is
// repeated with doubled node count and the refined value is returned; a
// relative shift above rel_tol signals non-convergence.
inline complexd memory_kernel(const ReservoirParams& p, double s, double rel_tol = 1e-6) {
    p.validate();
    if (s < 0.0) throw std::invalid_argument("memory_kernel: s must be >= 0");
    if (p.eta == 0.0) return {0.0, 0.0};
    const double max_phase = M_PI / 4.0;
    const complexd coarse = memory_kernel_panels(p, s, p.n_quad, max_phase);
    const complexd fine = memory_kernel_panels(p, s, 2 * p.n_quad, max_phase);
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) / scale > rel_tol)
        throw numerical_error("memory_kernel: quadrature not converged at s=" + std::to_string(s));
    return fine;
}

// Stationary-phase evaluation of the kernel around k = k0:
//   eta sqrt(pi/s) exp(-i(omega_c s + pi/4)) k0^2 c^3 / (omega_c sqrt(A)).
// Valid for omega_0 near omega_c and large s; cross-check only, production
// runs use the full integral kernel.
inline complexd band_edge_kernel(const ReservoirParams& p, double s) {
    p.validate();
    if (!(s > 0.0)) throw std::invalid_argument("band_edge_kernel: s must be > 0");
    const double mag = p.eta * std::sqrt(M_PI / s) * p.k0 * p.k0 /
                       (p.omega_c * std::sqrt(p.curvature));
    return mag * std::polar(1.0, -(p.omega_c * s + M_PI / 4.0));
}

namespace detail {

// int_0^{k_upper} k^2 / ((E - omega_k)^pow omega_k) dk for E < omega_c.
// The integrand peaks sharply at k0 as E approaches the band edge; the range
// is split on the peak-width scale and, for an infinite upper limit, the far
// tail is mapped to a finite interval with u = 1/k (the integrand decays as
// k^-2, so the improper integral is absolutely convergent).
inline double spectral_integral_pow(const ReservoirParams& p, double E, int pow_,
                                    double k_upper, double abs_tol) {
    const double eps = p.omega_c - E;
    const double d = std::sqrt(eps / p.curvature); // half-width of the pole peak
    auto f = [&](double k) {
        const double w = p.omega_c + p.curvature * (k - p.k0) * (k - p.k0);
        double den = (E - w) * w;
        if (pow_ == 2) den *= (E - w);
        return k * k / den;
    };

    const bool infinite = !std::isfinite(k_upper);
    const double k_cut = infinite ? std::max(10.0 * p.k0, p.k0 + 100.0 * d) : k_upper;

    std::vector<double> pts = {0.0};
    for (double c : {p.k0 - 100.0 * d, p.k0 - 10.0 * d, p.k0 - d, p.k0,
                     p.k0 + d, p.k0 + 10.0 * d, p.k0 + 100.0 * d, 2.0 * p.k0})
        if (c > 0.0 && c < k_cut) pts.push_back(c);
    pts.push_back(k_cut);
    std::sort(pts.begin(), pts.end());

    double total = 0.0;
    const double sub_tol = abs_tol / static_cast<double>(pts.size() + 1);
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1] > pts[i])
            total += detail::gsl_adaptive(f, pts[i], pts[i + 1], sub_tol, 0.0);

    if (infinite) {
        auto g = [&](double u) { return f(1.0 / u) / (u * u); };
        total += detail::gsl_adaptive(g, 1e-12, 1.0 / k_cut, sub_tol, 0.0);
        // remaining tail beyond k = 1e12 is bounded by 1/(A^2 k), i.e. < 1e-12/A^2
    }
    return total;
}

} // namespace detail

// eta * int_0^inf k^2 / ((E - omega_k) omega_k) dk, E strictly inside the gap.
// Strictly negative for eta > 0 and monotonically decreasing in E.
inline double spectral_integral(const ReservoirParams& p, double E, double abs_tol = 1e-9) {
    p.validate();
    if (!(E < p.omega_c)) throw std::invalid_argument("spectral_integral: E must be < omega_c");
    if (p.eta == 0.0) return 0.0;
    return p.eta * detail::spectral_integral_pow(p, E, 1,
                                                 std::numeric_limits<double>::infinity(), abs_tol / p.eta);
}

} // namespace pbg

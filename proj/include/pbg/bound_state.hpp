#pragma once
// Emitter-field bound-state search: root of y(E) = E inside the gap,
// residue weight of the root, and the existence classification.
//
// y(E) = omega_0 + eta * int_0^{k_max} k^2 / ((E - omega_k) omega_k) dk.
// The integrals here use the same ultraviolet cutoff k_max as the dynamical
// kernel, so the predicted plateau matches the solver's long-time amplitude
// for the model actually being evolved.
//
// Because the dispersion minimum is quadratic, y(E) -> -inf as E -> omega_c^-
// (the pole term grows like -pi/sqrt(omega_c - E)), so y(E) = E always has
// exactly one root below the edge. For transition frequencies far above the
// band the root hugs the edge and carries vanishing residue weight: it is
// dynamically irrelevant. The existence flag therefore requires the residue
// weight to exceed z_threshold; y_at_edge reports the regularized edge limit
//   lim_{eps->0} [ y(omega_c - eps) + eta pi k0^2 / (omega_c sqrt(A eps)) ]
// obtained by Richardson extrapolation in sqrt(eps).

#include <optional>

#include "reservoir.hpp"

namespace pbg {

struct BoundStateResult {
    bool exists = false;
    std::optional<double> E1; // bound-state energy, present iff exists
    std::optional<double> Z;  // residue weight in (0, 1], present iff exists
    double y_at_edge = 0.0;   // regularized y(omega_c^-)
    double root_energy = 0.0; // the sub-edge root, reported even when !exists
    double root_weight = 0.0; // its residue weight
};

struct BoundStateOptions {
    double root_tol = 1e-9;     // |y(E) - E| at the accepted root
    double z_threshold = 0.02;  // minimum residue weight to count as a bound state
    double integral_tol = 1e-10;
};

inline double y_function(const ReservoirParams& res, const EmitterParams& em, double E,
                         double abs_tol = 1e-10) {
    if (!(E < res.omega_c)) throw std::invalid_argument("y_function: E must be < omega_c");
    if (res.eta == 0.0) return em.omega_0;
    return em.omega_0 +
           res.eta * detail::spectral_integral_pow(res, E, 1, res.k_max, abs_tol / res.eta);
}

// Z = [1 + eta int k^2 / ((E1 - omega_k)^2 omega_k) dk]^-1, the squared
// overlap of the bound state with the bare excited state; also the
// asymptotic amplitude plateau |b(inf)|.
inline double residue_weight(const ReservoirParams& res, const EmitterParams& em, double E1,
                             double abs_tol = 1e-10) {
    res.validate();
    em.validate();
    if (!(E1 < res.omega_c)) throw std::invalid_argument("residue_weight: E1 must be < omega_c");
    if (res.eta == 0.0) return 1.0;
    const double j2 = detail::spectral_integral_pow(res, E1, 2, res.k_max, abs_tol / res.eta);
    return 1.0 / (1.0 + res.eta * j2);
}

inline double regularized_edge_value(const ReservoirParams& res, const EmitterParams& em) {
    if (res.eta == 0.0) return em.omega_0;
    const double coef = res.eta * M_PI * res.k0 * res.k0 /
                        (res.omega_c * std::sqrt(res.curvature));
    // y(omega_c - eps) + coef/sqrt(eps) converges linearly in sqrt(eps)
    const double e1 = 1e-4, e2 = 1e-5;
    const double v1 = y_function(res, em, res.omega_c - e1) + coef / std::sqrt(e1);
    const double v2 = y_function(res, em, res.omega_c - e2) + coef / std::sqrt(e2);
    const double s1 = std::sqrt(e1), s2 = std::sqrt(e2);
    return v2 + (v2 - v1) * (0.0 - s2) / (s2 - s1);
}

inline BoundStateResult find_bound_state(const ReservoirParams& res, const EmitterParams& em,
                                         const BoundStateOptions& opt = {}) {
    res.validate();
    em.validate();
    BoundStateResult out;
    out.y_at_edge = regularized_edge_value(res, em);

    if (res.eta == 0.0) {
        // decoupled emitter: the bare excited level is the bound state iff
        // it sits inside the gap
        out.exists = em.omega_0 < res.omega_c;
        out.root_energy = em.omega_0;
        out.root_weight = 1.0;
        if (out.exists) {
            out.E1 = em.omega_0;
            out.Z = 1.0;
        }
        return out;
    }

    auto g = [&](double E) { return y_function(res, em, E, opt.integral_tol) - E; };

    // upper bracket just below the edge, where the pole term dominates
    double hi = res.omega_c - 1e-9;
    double g_hi = g(hi);
    if (g_hi > 0.0)
        throw numerical_error("find_bound_state: y(E)-E positive at the band edge; "
                              "quadrature tolerance too loose");
    // expand the lower bracket geometrically below omega_0 - 10 eta omega_0
    double lo = std::min(em.omega_0 - 10.0 * natural_rate(res, em), res.omega_c - 0.5);
    double span = std::max(1.0, std::abs(lo));
    double g_lo = g(lo);
    int tries = 0;
    while (g_lo < 0.0) {
        if (++tries > 60)
            throw numerical_error("find_bound_state: failed to bracket the root; "
                                  "y(E)-E never positive (monotonicity violated numerically)");
        lo -= span;
        span *= 2.0;
        g_lo = g(lo);
    }
    // bisection, stopping on the residual |y(E) - E|
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) < opt.root_tol && (hi - lo) < 1e-7) break;
        (gm > 0.0 ? lo : hi) = mid;
    }
    out.root_energy = mid;
    out.root_weight = residue_weight(res, em, mid, opt.integral_tol);
    out.exists = out.root_weight >= opt.z_threshold;
    if (out.exists) {
        out.E1 = out.root_energy;
        out.Z = out.root_weight;
    }
    return out;
}

// Root-construction export: columns E then y_minus_E for each omega_0
// (the zero crossings locate the bound states).
inline void write_y_curves_csv(const ReservoirParams& res, const std::vector<double>& omega0s,
                               const std::vector<double>& energies, std::ostream& os) {
    os << "E";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    for (double w0 : omega0s) os << ",y_minus_E_omega0_" << num(w0);
    os << "\n";
    for (double E : energies) {
        os << num(E);
        for (double w0 : omega0s) {
            EmitterParams em{w0};
            os << ',' << num(y_function(res, em, E) - E);
        }
        os << "\n";
    }
}

} // namespace pbg

#pragma once
// Brute-force verification backend: the reservoir is discretized into N
// modes on a uniform wave-vector grid and the single-excitation Schrodinger
// equation is solved exactly by diagonalizing the (N+1) x (N+1) arrowhead
// Hamiltonian once. Midpoint couplings make the mode sum reproduce the
// kernel quadrature measure, so the kernel <-> bath correspondence is
// directly auditable. Not a production path; opt-in from the CLI only.

#include <lapacke.h>

#include "amplitude.hpp"
#include "bound_state.hpp"

namespace pbg {

struct DiscretizedBath {
    size_t n_modes = 0;
    double k_max = 0.0;
    double omega_c = 0.0;
    std::vector<double> k;     // midpoint wave vectors in (0, k_max]
    std::vector<double> omega; // dispersion frequencies
    std::vector<double> g;     // couplings, |g_j|^2 = eta k_j^2 dk / omega_j
};

inline DiscretizedBath discretize_bath(const ReservoirParams& p, size_t n_modes) {
    p.validate();
    if (n_modes < 2) throw std::invalid_argument("discretize_bath: need at least 2 modes");
    DiscretizedBath b;
    b.n_modes = n_modes;
    b.k_max = p.k_max;
    b.omega_c = p.omega_c;
    const double dk = p.k_max / static_cast<double>(n_modes);
    b.k.resize(n_modes);
    b.omega.resize(n_modes);
    b.g.resize(n_modes);
    for (size_t j = 0; j < n_modes; ++j) {
        const double kj = (static_cast<double>(j) + 0.5) * dk;
        b.k[j] = kj;
        b.omega[j] = dispersion(p, kj);
        b.g[j] = std::sqrt(p.eta * kj * kj * dk / b.omega[j]);
    }
    return b;
}

// Kernel reconstructed from the bath: sum_j |g_j|^2 exp(-i omega_j s).
inline complexd bath_kernel(const DiscretizedBath& b, double s) {
    complexd acc(0.0, 0.0);
    for (size_t j = 0; j < b.n_modes; ++j)
        acc += b.g[j] * b.g[j] * std::polar(1.0, -b.omega[j] * s);
    return acc;
}

// Shortest period the discrete spectrum can alias on; comparisons against
// the continuum solver must stay below half of this.
inline double recurrence_time(const DiscretizedBath& b) {
    std::vector<double> w = b.omega;
    std::sort(w.begin(), w.end());
    const double dw_typ = (w.back() - w.front()) / static_cast<double>(w.size() - 1);
    return 2.0 * M_PI / dw_typ;
}

struct DiagonalizedBath {
    std::vector<double> energy;          // ascending eigenvalues
    std::vector<double> emitter_overlap; // <excited| eigenvector m>
    double omega_c = 0.0;
    double edge_spacing = 0.0; // level spacing just above the band edge
};

inline DiagonalizedBath diagonalize(const DiscretizedBath& bath, const EmitterParams& em) {
    em.validate();
    const size_t n = bath.n_modes + 1;
    std::vector<double> H(n * n, 0.0); // row-major, real symmetric arrowhead
    H[0] = em.omega_0;
    for (size_t j = 1; j < n; ++j) {
        H[j] = bath.g[j - 1];           // first row
        H[j * n] = bath.g[j - 1];       // first column
        H[j * n + j] = bath.omega[j - 1];
    }
    std::vector<double> w(n);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<lapack_int>(n), H.data(),
                       static_cast<lapack_int>(n), w.data());
    if (info != 0) throw numerical_error("LAPACKE_dsyevd failed, info=" + std::to_string(info));
    DiagonalizedBath d;
    d.energy = std::move(w);
    d.emitter_overlap.resize(n);
    for (size_t m = 0; m < n; ++m) d.emitter_overlap[m] = H[m]; // row 0 of eigenvector matrix
    d.omega_c = bath.omega_c;
    // spacing of the continuum levels just above the edge
    size_t first_above = 0;
    while (first_above + 1 < n && d.energy[first_above] < bath.omega_c) ++first_above;
    d.edge_spacing = (first_above + 1 < n) ? d.energy[first_above + 1] - d.energy[first_above]
                                           : 0.0;
    return d;
}

struct OracleTrajectory {
    std::vector<double> t;
    std::vector<complexd> b;
    double max_norm_drift = 0.0;
    double recurrence = 0.0;
};

// b(t) = sum_m |<e|m>|^2 exp(-i E_m t).
inline OracleTrajectory evolve_exact(const DiscretizedBath& bath, const EmitterParams& em,
                                     const std::vector<double>& t_grid) {
    const DiagonalizedBath d = diagonalize(bath, em);
    const size_t n = d.energy.size();
    OracleTrajectory out;
    out.t = t_grid;
    out.b.resize(t_grid.size());
    std::vector<double> c2(n);
    for (size_t m = 0; m < n; ++m) c2[m] = d.emitter_overlap[m] * d.emitter_overlap[m];
    for (size_t i = 0; i < t_grid.size(); ++i) {
        complexd acc(0.0, 0.0);
        for (size_t m = 0; m < n; ++m) acc += c2[m] * std::polar(1.0, -d.energy[m] * t_grid[i]);
        out.b[i] = acc;
    }
    // sum_m |<e|m>|^2 = 1 is the exact norm statement; eigenvector
    // orthonormality error is what actually drifts
    double s = 0.0;
    for (double v : c2) s += v;
    out.max_norm_drift = std::abs(s - 1.0);
    if (out.max_norm_drift > 1e-8)
        throw numerical_error("evolve_exact: norm drift " + std::to_string(out.max_norm_drift));
    out.recurrence = recurrence_time(bath);
    return out;
}

struct OverlapResult {
    bool present = false;
    double energy = 0.0;
    double overlap_sq = 0.0; // independent estimate of the residue weight Z
};

// Discrete eigenvector below the band edge, if any. The lowest eigenvalue
// must clear the edge by more than 3x the local level spacing (otherwise it
// is discretization noise) and carry residue weight above z_threshold
// (otherwise it is the dynamically irrelevant edge root; same convention as
// find_bound_state).
inline OverlapResult bound_state_overlap(const DiscretizedBath& bath, const EmitterParams& em,
                                         double z_threshold = 0.02) {
    const DiagonalizedBath d = diagonalize(bath, em);
    OverlapResult r;
    const double e0 = d.energy[0];
    const double ov2 = d.emitter_overlap[0] * d.emitter_overlap[0];
    if (e0 < bath.omega_c - 3.0 * d.edge_spacing && ov2 >= z_threshold) {
        r.present = true;
        r.energy = e0;
        r.overlap_sq = ov2;
    }
    return r;
}

// Trajectory CSV in the amplitude_solver format plus a metadata header.
inline void write_oracle_csv(const OracleTrajectory& tr, const DiscretizedBath& bath,
                             std::ostream& os) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    os << "# mode_oracle n_modes=" << bath.n_modes << " k_max=" << num(bath.k_max)
       << " recurrence_time=" << num(tr.recurrence) << "\n";
    os << "t,re_b,im_b,pop,omega_shift,gamma_rate\n";
    for (size_t i = 0; i < tr.t.size(); ++i)
        os << num(tr.t[i]) << ',' << num(tr.b[i].real()) << ',' << num(tr.b[i].imag()) << ','
           << num(std::norm(tr.b[i])) << ",,\n";
}

} // namespace pbg

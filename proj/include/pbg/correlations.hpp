#pragma once
// Four-qubit effective pure state of the two-emitter/two-reservoir system,
// bipartite reductions, and the correlation measures: mutual information,
// entanglement of formation (Wootters) and quantum discord (optimized over
// rank-1 projective measurements on one side).

#include <array>
#include <mutex>
#include <thread>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "amplitude.hpp"

namespace pbg {

using Matrix4cd = Eigen::Matrix4cd;
using Matrix2cd = Eigen::Matrix2cd;
using Vector3d = Eigen::Vector3d;
using Matrix3d = Eigen::Matrix3d;

struct InitialWeights {
    complexd alpha; // amplitude of |-,->
    complexd beta;  // amplitude of |+,+>

    static InitialWeights from_alpha(complexd a) {
        const double rest = 1.0 - std::norm(a);
        if (rest < -1e-12) throw std::invalid_argument("|alpha| must be <= 1");
        return {a, std::sqrt(std::max(0.0, rest))};
    }
    void validate() const {
        if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
            throw std::invalid_argument("initial weights not normalized");
    }
};

// Subsystem order (emitter1, emitter2, reservoir1, reservoir2); each factor
// is two-level with |-> / |0bar> mapped to 0 and |+> / |1bar> mapped to 1.
// Amplitude index: n1*8 + n2*4 + r1*2 + r2.
enum class Subsystem { N1 = 0, N2 = 1, R1 = 2, R2 = 3 };

enum class Partition { N1N2, R1R2, N1R1, N1R2, N2R1, N2R2 };

inline std::pair<Subsystem, Subsystem> partition_subsystems(Partition p) {
    switch (p) {
        case Partition::N1N2: return {Subsystem::N1, Subsystem::N2};
        case Partition::R1R2: return {Subsystem::R1, Subsystem::R2};
        case Partition::N1R1: return {Subsystem::N1, Subsystem::R1};
        case Partition::N1R2: return {Subsystem::N1, Subsystem::R2};
        case Partition::N2R1: return {Subsystem::N2, Subsystem::R1};
        case Partition::N2R2: return {Subsystem::N2, Subsystem::R2};
    }
    throw std::invalid_argument("unknown partition");
}

inline std::string partition_name(Partition p) {
    switch (p) {
        case Partition::N1N2: return "n1n2";
        case Partition::R1R2: return "r1r2";
        case Partition::N1R1: return "n1r1";
        case Partition::N1R2: return "n1r2";
        case Partition::N2R1: return "n2r1";
        case Partition::N2R2: return "n2r2";
    }
    throw std::invalid_argument("unknown partition");
}

inline Partition partition_from_name(const std::string& s) {
    for (Partition p : {Partition::N1N2, Partition::R1R2, Partition::N1R1,
                        Partition::N1R2, Partition::N2R1, Partition::N2R2})
        if (partition_name(p) == s) return p;
    throw std::invalid_argument("unknown partition name: " + s);
}

struct CompositeState {
    Eigen::Vector<complexd, 16> amp;
};

// |Psi(t)> = alpha |--00> + beta (b|+0bar> + btilde|-1bar>)^{x2}; btilde is
// taken real non-negative.
inline CompositeState assemble_state(const InitialWeights& w, complexd b) {
    w.validate();
    if (std::abs(b) > 1.0 + 1e-9) throw std::invalid_argument("assemble_state: |b| > 1");
    const double bt = std::sqrt(std::max(0.0, 1.0 - std::norm(b)));
    CompositeState st;
    st.amp.setZero();
    st.amp[0b0000] = w.alpha;           // |--00>
    st.amp[0b1100] = w.beta * b * b;    // |++00>
    st.amp[0b1001] = w.beta * b * bt;   // |+-01>
    st.amp[0b0110] = w.beta * bt * b;   // |-+10>
    st.amp[0b0011] = w.beta * bt * bt;  // |--11>
    return st;
}

struct DensityMatrix2Q {
    Matrix4cd rho;
    Partition partition;
};

// Partial trace onto (keep_a, keep_b); keep_a indexes the first qubit of
// the reduced matrix.
inline DensityMatrix2Q reduce(const CompositeState& st, Partition part) {
    auto [ka, kb] = partition_subsystems(part);
    const int sa = 3 - static_cast<int>(ka); // bit position (N1 is the MSB)
    const int sb = 3 - static_cast<int>(kb);
    DensityMatrix2Q out;
    out.partition = part;
    out.rho.setZero();
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            // indices must agree on the traced-out subsystems
            const int mask = ~((1 << sa) | (1 << sb)) & 0xF;
            if ((i & mask) != (j & mask)) continue;
            const int ra = ((i >> sa) & 1) * 2 + ((i >> sb) & 1);
            const int rb = ((j >> sa) & 1) * 2 + ((j >> sb) & 1);
            out.rho(ra, rb) += st.amp[i] * std::conj(st.amp[j]);
        }
    }
    return out;
}

inline double binary_entropy(double x) {
    double acc = 0.0;
    for (double v : {x, 1.0 - x})
        if (v > 0.0) acc -= v * std::log2(v);
    return acc;
}

namespace detail {

inline std::array<double, 4> density_eigenvalues(const Matrix4cd& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
    std::array<double, 4> ev{};
    for (int i = 0; i < 4; ++i) {
        double v = es.eigenvalues()[i];
        if (v < -1e-8) throw numerical_error("density matrix has eigenvalue " + std::to_string(v));
        ev[static_cast<size_t>(i)] = std::max(0.0, v);
    }
    return ev;
}

inline double entropy4(const Matrix4cd& rho) {
    double s = 0.0;
    for (double v : density_eigenvalues(rho))
        if (v > 1e-15) s -= v * std::log2(v);
    return s;
}

inline Matrix2cd trace_out_second(const Matrix4cd& rho) {
    Matrix2cd r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            r(a, b) = rho(2 * a, 2 * b) + rho(2 * a + 1, 2 * b + 1);
    return r;
}

inline Matrix2cd trace_out_first(const Matrix4cd& rho) {
    Matrix2cd r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            r(a, b) = rho(a, b) + rho(a + 2, b + 2);
    return r;
}

inline double entropy2(const Matrix2cd& rho) {
    // 2x2 Hermitian: eigenvalues (1 +- r)/2 with r the Bloch vector length
    const double tr = rho(0, 0).real() + rho(1, 1).real();
    const double dz = rho(0, 0).real() - rho(1, 1).real();
    const double r = std::sqrt(dz * dz + 4.0 * std::norm(rho(0, 1)));
    return binary_entropy(std::clamp(0.5 * (tr + r), 0.0, 1.0));
}

} // namespace detail

// Wootters concurrence via the spin-flip route. With rho = L L^dag, the
// square roots of the eigenvalues of rho rho_tilde equal the singular
// values of the complex symmetric matrix tau = L^T (sy x sy) L
// (tau^dag tau is similar to rho_tilde rho), so an SVD delivers the
// lambda_i directly at machine precision; taking square roots of the
// near-zero eigenvalues of the product matrix instead loses ~1e-8.
inline double concurrence(const DensityMatrix2Q& dm) {
    static const Matrix4cd yy = [] {
        Matrix2cd sy;
        sy << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
        Matrix4cd m = Eigen::kroneckerProduct(sy, sy).eval();
        return m;
    }();
    Eigen::SelfAdjointEigenSolver<Matrix4cd> rho_es(dm.rho);
    Eigen::Vector4d d = rho_es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        if (d[i] < -1e-8)
            throw numerical_error("concurrence: density eigenvalue " + std::to_string(d[i]));
        d[i] = std::sqrt(std::max(0.0, d[i]));
    }
    const Matrix4cd L = rho_es.eigenvectors() * d.asDiagonal();
    const Matrix4cd tau = L.transpose() * yy * L;
    Eigen::JacobiSVD<Matrix4cd> svd(tau);
    const Eigen::Vector4d lam = svd.singularValues(); // sorted descending
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline double eof_from_concurrence(double c) {
    return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

inline double eof(const DensityMatrix2Q& dm) { return eof_from_concurrence(concurrence(dm)); }

inline double mutual_information(const DensityMatrix2Q& dm) {
    return detail::entropy2(detail::trace_out_second(dm.rho)) +
           detail::entropy2(detail::trace_out_first(dm.rho)) - detail::entropy4(dm.rho);
}

enum class MeasuredSide { A, B };

struct DiscordOptions {
    int grid = 64;           // coarse (theta, phi) grid per axis
    double refine_tol = 1e-8; // objective tolerance of the local refinement
    MeasuredSide side = MeasuredSide::B;
};

namespace detail {

// Pauli expansion rho = 1/4 (I + a.sigma x I + I x b.sigma + T_ij s_i x s_j).
struct BlochForm {
    Vector3d a, b;
    Matrix3d T;
};

inline BlochForm bloch_form(const Matrix4cd& rho) {
    std::array<Matrix2cd, 4> s;
    s[0] = Matrix2cd::Identity();
    s[1] << 0, 1, 1, 0;
    s[2] << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
    s[3] << 1, 0, 0, -1;
    BlochForm f;
    for (int i = 1; i <= 3; ++i) {
        f.a[i - 1] = (Eigen::kroneckerProduct(s[static_cast<size_t>(i)], s[0]).eval() * rho).trace().real();
        f.b[i - 1] = (Eigen::kroneckerProduct(s[0], s[static_cast<size_t>(i)]).eval() * rho).trace().real();
        for (int j = 1; j <= 3; ++j)
            f.T(i - 1, j - 1) =
                (Eigen::kroneckerProduct(s[static_cast<size_t>(i)], s[static_cast<size_t>(j)]).eval() * rho)
                    .trace()
                    .real();
    }
    return f;
}

// Classical correlation J(n) extracted by the projective measurement
// {(I +- n.sigma)/2} on the measured side; conditioned states are qubits,
// so their entropies come from Bloch vector lengths in closed form.
struct DiscordObjective {
    Vector3d meas_bloch;  // Bloch vector of the measured side
    Vector3d kept_bloch;  // Bloch vector of the unmeasured side
    Matrix3d corr;        // maps measurement axis into the kept side
    double kept_entropy;

    double operator()(double theta, double phi) const {
        const Vector3d n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                         std::cos(theta));
        const double pn = meas_bloch.dot(n);
        const Vector3d tn = corr * n;
        double j = kept_entropy;
        for (double sgn : {1.0, -1.0}) {
            const double p = 0.5 * (1.0 + sgn * pn);
            if (p < 1e-14) continue;
            const double r = ((kept_bloch + sgn * tn) / (2.0 * p)).norm();
            j -= p * binary_entropy(std::clamp(0.5 * (1.0 + r), 0.0, 1.0));
        }
        return j;
    }
};

inline DiscordObjective make_objective(const Matrix4cd& rho, MeasuredSide side) {
    const BlochForm f = bloch_form(rho);
    DiscordObjective obj;
    if (side == MeasuredSide::B) {
        obj.meas_bloch = f.b;
        obj.kept_bloch = f.a;
        obj.corr = f.T;
        obj.kept_entropy = entropy2(trace_out_second(rho));
    } else {
        obj.meas_bloch = f.a;
        obj.kept_bloch = f.b;
        obj.corr = f.T.transpose();
        obj.kept_entropy = entropy2(trace_out_first(rho));
    }
    return obj;
}

} // namespace detail

struct DiscordResult {
    double discord;
    double mutual_info;
    double classical; // maximized classical correlation
    double grid_classical;
};

// QD = I(rho) - max_n J(n); maximization by exhaustive coarse grid over the
// Bloch angles followed by compass-step local refinement.
inline DiscordResult discord_detailed(const DensityMatrix2Q& dm, const DiscordOptions& opt = {}) {
    const auto obj = detail::make_objective(dm.rho, opt.side);
    const double mi = mutual_information(dm);

    double best = -1.0, bth = 0.0, bph = 0.0;
    const int n = opt.grid;
    for (int i = 0; i < n; ++i) {
        const double th = M_PI * (static_cast<double>(i) + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            const double ph = 2.0 * M_PI * static_cast<double>(j) / n;
            const double v = obj(th, ph);
            if (v > best) {
                best = v;
                bth = th;
                bph = ph;
            }
        }
    }
    const double grid_best = best;
    double step = M_PI / n;
    while (step > 1e-9) {
        bool moved = false;
        for (int di = -1; di <= 1 && !moved; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                const double th = bth + di * step, ph = bph + dj * step;
                const double v = obj(th, ph);
                if (v > best + opt.refine_tol * 1e-2) {
                    best = v;
                    bth = th;
                    bph = ph;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) step *= 0.5;
    }
    if (best < grid_best - 1e-12)
        throw numerical_error("discord: refinement regressed below the grid optimum");
    DiscordResult r;
    r.mutual_info = mi;
    r.classical = best;
    r.grid_classical = grid_best;
    r.discord = std::max(0.0, mi - best);
    return r;
}

inline double discord(const DensityMatrix2Q& dm, const DiscordOptions& opt = {}) {
    return discord_detailed(dm, opt).discord;
}

struct CorrelationRecord {
    double t = 0.0;
    std::vector<double> qd;  // one entry per requested partition
    std::vector<double> eof;
    std::vector<double> mi;
};

// Per grid point (strided): assemble the state, reduce to each partition,
// compute QD/EoF/MI. Points are independent and processed in parallel.
inline std::vector<CorrelationRecord> correlation_timeseries(
    const AmplitudeTrajectory& traj, const InitialWeights& w,
    const std::vector<Partition>& partitions, size_t stride = 1,
    const DiscordOptions& opt = {}) {
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    w.validate();
    std::vector<size_t> idx;
    for (size_t i = 0; i < traj.t.size(); i += stride) idx.push_back(i);
    if (!idx.empty() && idx.back() != traj.t.size() - 1) idx.push_back(traj.t.size() - 1);

    std::vector<CorrelationRecord> recs(idx.size());
    std::exception_ptr err;
    std::mutex err_mtx;
    auto work = [&](size_t lo, size_t hi) {
        try {
            for (size_t r = lo; r < hi; ++r) {
                const size_t i = idx[r];
                complexd b = traj.b[i];
                if (std::abs(b) > 1.0) b /= std::abs(b); // 1e-8-level roundoff guard
                const CompositeState st = assemble_state(w, b);
                CorrelationRecord& rec = recs[r];
                rec.t = traj.t[i];
                for (Partition p : partitions) {
                    const DensityMatrix2Q dm = reduce(st, p);
                    rec.qd.push_back(discord(dm, opt));
                    rec.eof.push_back(eof(dm));
                    rec.mi.push_back(mutual_information(dm));
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mtx);
            if (!err) err = std::current_exception();
        }
    };
    const size_t nthreads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    const size_t chunk = (idx.size() + nthreads - 1) / std::max<size_t>(nthreads, 1);
    for (size_t t0 = 0; t0 < idx.size(); t0 += chunk)
        pool.emplace_back(work, t0, std::min(idx.size(), t0 + chunk));
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return recs;
}

// CSV: t, then qd_<partition>, eof_<partition>, mi_<partition> per
// requested partition.
inline void write_correlations_csv(const std::vector<CorrelationRecord>& recs,
                                   const std::vector<Partition>& partitions, std::ostream& os,
                                   const std::string& header_comment = "") {
    if (!header_comment.empty()) os << "# " << header_comment << "\n";
    os << "t";
    for (Partition p : partitions)
        os << ",qd_" << partition_name(p) << ",eof_" << partition_name(p) << ",mi_"
           << partition_name(p);
    os << "\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    for (const auto& r : recs) {
        os << num(r.t);
        for (size_t i = 0; i < partitions.size(); ++i)
            os << ',' << num(r.qd[i]) << ',' << num(r.eof[i]) << ',' << num(r.mi[i]);
        os << "\n";
    }
}

} // namespace pbg

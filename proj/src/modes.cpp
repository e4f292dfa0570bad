#include "wavesearch/modes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "wavesearch/error.hpp"

namespace wavesearch::modes {

namespace {

const char* const kModule = "modes";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void require_chain_params(double k, double m) {
    if (!(k > 0.0) || !(m > 0.0))
        throw Error(ErrorKind::validation, kModule, "k and m must be positive");
}

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double wrap_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi, two_pi);
    if (phi > std::numbers::pi) phi -= two_pi;
    if (phi <= -std::numbers::pi) phi += two_pi;
    return phi;
}

} // namespace

double ModeBasis::min_nonzero_frequency() const noexcept {
    for (double w : frequencies)
        if (w > 0.0) return w;
    return 0.0;
}

ModeBasis normal_modes(const lattice::StiffnessSystem& system) {
    const std::size_t d = system.dimension;
    std::vector<double> inv_sqrt_m(d);
    for (std::size_t i = 0; i < d; ++i) inv_sqrt_m[i] = 1.0 / std::sqrt(system.mass[i]);

    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            a(i, j) = system.stiffness(i, j) * inv_sqrt_m[i] * inv_sqrt_m[j];

    const double scale = max_abs_entry(a);
    auto eig = jacobi_eigen(a);

    double max_diag = 0.0;
    for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, system.stiffness(i, i));
    const double psd_eps = 1e-10 * max_diag;
    const double snap = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return eig.values[x] < eig.values[y]; });

    ModeBasis basis;
    basis.mass = system.mass;
    basis.frequencies.resize(d);
    basis.vectors = Matrix(d, d);
    for (std::size_t col = 0; col < d; ++col) {
        const std::size_t src = order[col];
        double lambda = eig.values[src];
        if (lambda < -psd_eps)
            throw Error(ErrorKind::numerical, kModule,
                        "stiffness is not positive semidefinite (eigenvalue " + fmt(lambda) + ")");
        if (std::abs(lambda) <= snap || lambda < 0.0) lambda = 0.0;
        basis.frequencies[col] = std::sqrt(lambda);

        // Sign rule: the largest-magnitude component (first on ties) is positive.
        std::size_t lead = 0;
        double lead_abs = -1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double v = std::abs(eig.vectors(i, src) * inv_sqrt_m[i]);
            if (v > lead_abs * (1.0 + 1e-12)) {
                lead = i;
                lead_abs = v;
            }
        }
        const double sign = eig.vectors(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i)
            basis.vectors(i, col) = sign * eig.vectors(i, src) * inv_sqrt_m[i];
    }

    // Residual and mass-orthonormality audit.
    const double k_norm = frobenius(system.stiffness);
    std::vector<double> v(d), kv;
    for (std::size_t col = 0; col < d; ++col) {
        for (std::size_t i = 0; i < d; ++i) v[i] = basis.vectors(i, col);
        kv = multiply(system.stiffness, v);
        const double w2 = basis.frequencies[col] * basis.frequencies[col];
        double res = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double r = kv[i] - w2 * system.mass[i] * v[i];
            res += r * r;
        }
        res = std::sqrt(res);
        if (res > 1e-9 * std::max(k_norm, 1.0))
            throw Error(ErrorKind::numerical, kModule,
                        "mode " + std::to_string(col) + " residual " + fmt(res) + " exceeds tolerance");
    }
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = x; y < d; ++y) {
            double g = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                g += basis.vectors(i, x) * system.mass[i] * basis.vectors(i, y);
            if (std::abs(g - (x == y ? 1.0 : 0.0)) > 1e-10)
                throw Error(ErrorKind::numerical, kModule,
                            "mass-orthonormality deviation " + fmt(g - (x == y ? 1.0 : 0.0)));
        }
    }
    return basis;
}

double chain_dispersion(double k, double m, double q) {
    require_chain_params(k, m);
    if (!(q >= 0.0 && q <= std::numbers::pi))
        throw Error(ErrorKind::range, kModule, "wavenumber q must lie in [0, pi]");
    return 2.0 * std::sqrt(k / m) * std::abs(std::sin(0.5 * q));
}

double group_velocity(double k, double m, double q) {
    require_chain_params(k, m);
    if (!(q >= 0.0 && q <= std::numbers::pi))
        throw Error(ErrorKind::range, kModule, "wavenumber q must lie in [0, pi]");
    if (q == std::numbers::pi) return 0.0;
    return std::sqrt(k / m) * std::cos(0.5 * q);
}

double wavenumber(double k, double m, double omega) {
    require_chain_params(k, m);
    const double band = 2.0 * std::sqrt(k / m);
    if (!(omega >= 0.0 && omega <= band))
        throw Error(ErrorKind::range, kModule,
                    "omega = " + fmt(omega) + " lies outside the band [0, " + fmt(band) + "]");
    return 2.0 * std::asin(std::min(1.0, omega / band));
}

ScatteringCoefficients side_branch_scattering(double k, double m, double K, double M,
                                              double omega) {
    require_chain_params(k, m);
    if (!(K >= 0.0) || !(M > 0.0))
        throw Error(ErrorKind::validation, kModule, "need K >= 0 and M > 0");
    const double band = 2.0 * std::sqrt(k / m);
    if (!(omega > 0.0 && omega < band))
        throw Error(ErrorKind::range, kModule,
                    "omega = " + fmt(omega) + " is outside the propagating band (0, " + fmt(band) +
                        "): evanescent");

    using cd = std::complex<double>;
    const double q = wavenumber(k, m, omega);
    const double w2 = omega * omega;
    const double detune = K - M * w2;  // the site equation is multiplied through by this
    const cd eiq = std::polar(1.0, q);

    // Unknowns (r, s):  r - s = -1  and the target-site equation of motion.
    const cd a11 = 1.0, a12 = -1.0, b1 = -1.0;
    const cd a21 = -detune * k * eiq;
    const cd a22 = detune * (2.0 * k - m * w2 - k * eiq) - K * M * w2;
    const cd b2 = detune * k * std::conj(eiq);
    const cd det = a11 * a22 - a12 * a21;
    if (std::abs(det) == 0.0)
        throw Error(ErrorKind::numerical, kModule, "singular matching system");

    ScatteringCoefficients out;
    out.omega = omega;
    out.q = q;
    out.r = (b1 * a22 - a12 * b2) / det;
    out.s = (a11 * b2 - a21 * b1) / det;
    return out;
}

std::vector<double> resonance_frequencies(std::size_t ring_n, double k, double m, double K,
                                          double M) {
    if (ring_n < 3) throw Error(ErrorKind::validation, kModule, "ring needs at least 3 nodes");
    require_chain_params(k, m);
    const double band = 2.0 * std::sqrt(k / m);
    const double n = static_cast<double>(ring_n);
    auto phase = [&](double w) {
        const auto sc = side_branch_scattering(k, m, K, M, w);
        return wrap_phase(sc.q * n + std::arg(sc.s));
    };

    constexpr int kGrid = 4096;
    std::vector<double> roots;
    double w_prev = band / kGrid;
    double f_prev = phase(w_prev);
    if (f_prev == 0.0) roots.push_back(w_prev);
    for (int i = 2; i < kGrid; ++i) {
        const double w = band * i / kGrid;
        const double f = phase(w);
        if (f == 0.0) {
            roots.push_back(w);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (f < 0.0) && std::abs(f - f_prev) < std::numbers::pi) {
            double lo = w_prev, hi = w, f_lo = f_prev;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double f_mid = phase(mid);
                if (f_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((f_mid < 0.0) == (f_lo < 0.0)) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            // A genuine zero crossing, not the phase jump at the transmission zero.
            if (std::abs(phase(root)) < 1e-6) roots.push_back(root);
        }
        w_prev = w;
        f_prev = f;
    }
    return roots;
}

} // namespace wavesearch::modes

#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Closed-form spectra of uniform chains, ascending.
inline std::vector<double> free_chain_frequencies(std::size_t n, double k, double m) {
    std::vector<double> w;
    for (std::size_t j = 0; j < n; ++j)
        w.push_back(2.0 * std::sqrt(k / m) * std::sin(std::numbers::pi * j / (2.0 * n)));
    return w;
}

inline std::vector<double> fixed_chain_frequencies(std::size_t n, double k, double m) {
    std::vector<double> w;
    for (std::size_t j = 1; j <= n; ++j)
        w.push_back(2.0 * std::sqrt(k / m) * std::sin(std::numbers::pi * j / (2.0 * (n + 1))));
    return w;
}

inline std::vector<double> ring_frequencies(std::size_t n, double k, double m) {
    std::vector<double> w;
    for (std::size_t j = 0; j < n; ++j)
        w.push_back(2.0 * std::sqrt(k / m) * std::abs(std::sin(std::numbers::pi * j / n)));
    std::sort(w.begin(), w.end());
    return w;
}

// Dense complex solve with partial pivoting.
inline std::vector<cplx> solve(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) == 0.0) throw std::runtime_error("singular system");
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const cplx f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
            b[r] -= f * b[c];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

struct Scattering {
    cplx r;
    cplx s;
};

// Finite chain of `sites` with a side oscillator at the middle and exact
// outgoing-wave closures at both ends. Unknowns: chain sites, then the oscillator.
inline Scattering transparent_chain_scattering(double k, double m, double K, double M, double omega,
                                               std::size_t sites = 401) {
    const double q = std::acos(1.0 - m * omega * omega / (2.0 * k));
    const std::size_t c = sites / 2;
    const std::size_t n = sites + 1;
    const cplx eiq = std::polar(1.0, q);
    auto incoming = [&](double pos) { return std::polar(1.0, q * (pos - static_cast<double>(c))); };

    std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n, 0.0));
    std::vector<cplx> b(n, 0.0);
    for (std::size_t i = 0; i < sites; ++i) {
        a[i][i] = 2.0 * k - m * omega * omega;
        if (i > 0) a[i][i - 1] = -k;
        if (i + 1 < sites) a[i][i + 1] = -k;
    }
    // Left ghost: x_{-1} = a_{-1} + (x_0 - a_0) e^{iq}
    a[0][0] += -k * eiq;
    b[0] += k * (incoming(-1.0) - incoming(0.0) * eiq);
    // Right ghost: x_N = x_{N-1} e^{iq}
    a[sites - 1][sites - 1] += -k * eiq;
    // Side branch
    a[c][c] += K;
    a[c][sites] = -K;
    a[sites][c] = -K;
    a[sites][sites] = K - M * omega * omega;

    const auto x = solve(std::move(a), std::move(b));
    Scattering out;
    out.r = (x[0] - incoming(0.0)) / std::polar(1.0, q * static_cast<double>(c));
    out.s = x[sites - 1] / incoming(static_cast<double>(sites - 1));
    return out;
}

// Two sites exchanging population at rate g: P0(t) = (1 + e^{-2 g t}) / 2.
inline double two_site_population(double g, double t) { return 0.5 * (1.0 + std::exp(-2.0 * g * t)); }

// Canonical code of a labelled graph by minimising over all vertex permutations.
inline std::uint64_t brute_force_code(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = ~std::uint64_t{0};
    do {
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (auto [i, j] : edges) adj[perm[i]][perm[j]] = adj[perm[j]][perm[i]] = true;
        std::uint64_t code = 0;
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) code = (code << 1) | (adj[i][j] ? 1u : 0u);
        best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// 1/2 sum p^2/m + 1/2 sum over springs k (x_i - x_j)^2 + 1/2 sum onsite x^2
struct SpringTerm {
    std::size_t i;
    std::size_t j;
    double k;
};

inline double spring_energy(const std::vector<double>& mass, const std::vector<double>& onsite,
                            const std::vector<SpringTerm>& springs, const std::vector<double>& x,
                            const std::vector<double>& p) {
    double e = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) e += 0.5 * p[i] * p[i] / mass[i] + 0.5 * onsite[i] * x[i] * x[i];
    for (const auto& s : springs) e += 0.5 * s.k * (x[s.i] - x[s.j]) * (x[s.i] - x[s.j]);
    return e;
}

} // namespace oracle

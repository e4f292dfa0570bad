#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wavesearch/lattice.hpp"
#include "wavesearch/linalg.hpp"

namespace wavesearch::modes {

/// Normal modes of a StiffnessSystem: K v = w^2 M v, columns mass-orthonormal.
struct ModeBasis {
    std::vector<double> frequencies;  // ascending, zero modes snapped to exactly 0
    Matrix vectors;                   // column a pairs with frequencies[a]
    std::vector<double> mass;

    std::size_t dimension() const noexcept { return frequencies.size(); }
    double max_frequency() const noexcept { return frequencies.empty() ? 0.0 : frequencies.back(); }
    /// Smallest strictly positive frequency, 0 if there is none.
    double min_nonzero_frequency() const noexcept;
};

/// Throws Error(numerical) on non-convergence, an indefinite stiffness, or
/// when the residual/orthonormality checks fail.
ModeBasis normal_modes(const lattice::StiffnessSystem& system);

/// w(q) = 2 sqrt(k/m) |sin(q/2)| for the infinite uniform chain, q in [0, pi].
double chain_dispersion(double k, double m, double q);
/// dw/dq = sqrt(k/m) cos(q/2), q in [0, pi].
double group_velocity(double k, double m, double q);
/// Inverse of chain_dispersion on [0, 2 sqrt(k/m)].
double wavenumber(double k, double m, double omega);

struct ScatteringCoefficients {
    double omega = 0.0;
    double q = 0.0;
    std::complex<double> r;
    std::complex<double> s;

    double flux_error() const { return std::abs(std::norm(r) + std::norm(s) - 1.0); }
};

/// Plane wave on a uniform chain hitting one side-coupled oscillator (K, M).
/// Displacement x_n = e^{iqn} + r e^{-iqn} (n <= 0), s e^{iqn} (n >= 0).
ScatteringCoefficients side_branch_scattering(double k, double m, double K, double M,
                                              double omega);

/// Roots of q(w) n + arg s(w) = 0 (mod 2 pi) inside the open band.
std::vector<double> resonance_frequencies(std::size_t ring_n, double k, double m, double K,
                                          double M);

} // namespace wavesearch::modes

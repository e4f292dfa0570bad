#include "wavesearch/linalg.hpp"

#include <cmath>
#include <string>

#include "wavesearch/error.hpp"

namespace wavesearch {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::range: return "range";
    case ErrorKind::guard: return "guard";
    case ErrorKind::config: return "config";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

namespace {
std::string join_problems(const std::vector<std::string>& problems) {
    std::string out;
    for (const auto& p : problems) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}
} // namespace

ValidationError::ValidationError(std::string module, std::vector<std::string> problems)
    : Error(ErrorKind::validation, std::move(module), join_problems(problems)),
      problems_(std::move(problems)) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs_entry(const Matrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

SparseRows SparseRows::from_dense(const Matrix& a) {
    SparseRows s;
    s.offsets.reserve(a.rows() + 1);
    s.offsets.push_back(0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0.0) {
                s.columns.push_back(j);
                s.values.push_back(a(i, j));
            }
        }
        s.offsets.push_back(s.columns.size());
    }
    return s;
}

void SparseRows::apply(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = offsets.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) acc += values[e] * x[columns[e]];
        out[i] = acc;
    }
}

SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps) {
    const std::size_t n = a.rows();
    // Rows of w are the eigenvectors, so rotations touch contiguous memory.
    Matrix w = Matrix::identity(n);
    std::vector<double> diag(n), b(n), z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = b[i] = a(i, i);

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
        if (off == 0.0) break;

        const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(diag[p]) + g == std::abs(diag[p]) &&
                    std::abs(diag[q]) + g == std::abs(diag[q])) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= threshold) continue;

                const double h = diag[q] - diag[p];
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double shift = t * apq;
                z[p] -= shift;
                z[q] += shift;
                diag[p] -= shift;
                diag[q] += shift;
                a(p, q) = a(q, p) = 0.0;

                auto rp = a.row(p);
                auto rq = a.row(q);
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double xp = rp[r];
                    const double xq = rq[r];
                    const double np = xp - s * (xq + xp * tau);
                    const double nq = xq + s * (xp - xq * tau);
                    rp[r] = np;
                    rq[r] = nq;
                    a(r, p) = np;
                    a(r, q) = nq;
                }
                auto wp = w.row(p);
                auto wq = w.row(q);
                for (std::size_t r = 0; r < n; ++r) {
                    const double xp = wp[r];
                    const double xq = wq[r];
                    wp[r] = xp - s * (xq + xp * tau);
                    wq[r] = xq + s * (xp - xq * tau);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            b[i] += z[i];
            diag[i] = b[i];
            z[i] = 0.0;
        }
    }
    if (sweep == max_sweeps) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        throw Error(ErrorKind::numerical, "modes",
                    "Jacobi eigensolver did not converge after " + std::to_string(max_sweeps) +
                        " sweeps (off-diagonal norm " + std::to_string(std::sqrt(off)) + ")");
    }
    return SymmetricEigen{std::move(diag), w.transposed(), sweep};
}

} // namespace wavesearch

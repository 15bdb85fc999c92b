// linalg.hpp — small dense LU solver used by the exact oracles
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace csma::detail {

class SingularSystem : public std::runtime_error {
public:
    explicit SingularSystem(const char* what) : std::runtime_error(what) {}
};

// Solves A x = b by row-equilibrated LU with partial pivoting and two steps
// of iterative refinement (residuals accumulated in long double). The
// conductance matrices here span many decades, so plain LU loses digits the
// electrical-identity checks cannot afford. `backward_error` receives
// ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf).
inline std::vector<double> lu_solve(std::vector<double> a_in, std::vector<double> b_in,
                                    double* backward_error = nullptr) {
    const std::size_t n = b_in.size();
    if (a_in.size() != n * n) throw std::invalid_argument("lu_solve: shape mismatch");
    if (n == 0) {
        if (backward_error) *backward_error = 0.0;
        return {};
    }

    // row equilibration
    std::vector<double> scale(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double big = 0.0;
        for (std::size_t j = 0; j < n; ++j) big = std::max(big, std::fabs(a_in[i * n + j]));
        if (big == 0.0 || !std::isfinite(big)) throw SingularSystem("lu_solve: zero or bad row");
        scale[i] = 1.0 / big;
    }

    std::vector<double> lu(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lu[i * n + j] = a_in[i * n + j] * scale[i];

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(lu[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::fabs(lu[i * n + k]);
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw SingularSystem("lu_solve: singular linear system");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
            std::swap(perm[k], perm[piv]);
        }
        double d = lu[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = lu[i * n + k] / d;
            lu[i * n + k] = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
        }
    }

    auto substitute = [&](const std::vector<double>& rhs) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = rhs[perm[i]] * scale[perm[i]];
            for (std::size_t j = 0; j < i; ++j) acc -= lu[i * n + j] * y[j];
            y[i] = acc;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double acc = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) acc -= lu[ii * n + j] * y[j];
            y[ii] = acc / lu[ii * n + ii];
            if (!std::isfinite(y[ii])) throw SingularSystem("lu_solve: non-finite solution");
        }
        return y;
    };

    std::vector<double> x = substitute(b_in);

    // iterative refinement with extended-precision residuals
    std::vector<double> r(n);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < n; ++i) {
            long double acc = -static_cast<long double>(b_in[i]);
            for (std::size_t j = 0; j < n; ++j)
                acc += static_cast<long double>(a_in[i * n + j]) * static_cast<long double>(x[j]);
            r[i] = static_cast<double>(acc);
        }
        std::vector<double> dx = substitute(r);
        for (std::size_t i = 0; i < n; ++i) x[i] -= dx[i];
    }

    if (backward_error) {
        double res = 0.0, norm_a = 0.0, norm_b = 0.0, norm_x = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            long double acc = -static_cast<long double>(b_in[i]);
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += static_cast<long double>(a_in[i * n + j]) * static_cast<long double>(x[j]);
                row += std::fabs(a_in[i * n + j]);
            }
            res = std::max(res, std::fabs(static_cast<double>(acc)));
            norm_a = std::max(norm_a, row);
            norm_b = std::max(norm_b, std::fabs(b_in[i]));
            norm_x = std::max(norm_x, std::fabs(x[i]));
        }
        double denom = norm_a * norm_x + norm_b;
        *backward_error = denom > 0 ? res / denom : res;
    }
    return x;
}

} // namespace csma::detail

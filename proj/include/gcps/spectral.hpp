#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace gcps {

/// Closed-form Laplacian eigenfamilies on [-1,1] x [0,1)^{d-1} for the three
/// axis boundary problems. Axis factors:
///   V (Neumann both faces):      cos(k1 pi x/2 + pi/2), alpha = (k1 pi)^2/4
///   W (Dirichlet left, Neumann right):
///       [(-1)^{k1} cos(a x) + sin(a x)]/sqrt(2), a = pi/4 + k1 pi/2,
///       gamma = a^2
///   U (Dirichlet both faces):    sin(k1 pi x), delta = (k1 pi)^2
/// Periodic directions contribute sqrt(2) sin(k_i pi x_i) factors with
/// k_i >= 1 and k_i^2 pi^2 eigenvalue increments.
enum class EigenKind { NeumannNeumann, DirichletNeumann, DirichletDirichlet };

namespace detail {

inline constexpr double kPi = std::numbers::pi;
// The stated W axis factor has L2 norm sqrt(2) on (-1,1); it is divided out
// so every family is orthonormal.
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

inline void check_index(EigenKind kind, std::span<const int> k) {
    if (k.empty()) throw std::invalid_argument("eigenfamily: empty index");
    const int k1_min = (kind == EigenKind::DirichletDirichlet) ? 1 : 0;
    if (k[0] < k1_min) throw std::invalid_argument("eigenfamily: invalid axis index");
    for (std::size_t i = 1; i < k.size(); ++i)
        if (k[i] < 1) throw std::invalid_argument("eigenfamily: periodic index must be >= 1");
}

inline double torus_product(std::span<const int> k, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t i = 1; i < k.size(); ++i)
        v *= std::sqrt(2.0) * std::sin(k[i] * kPi * x[i]);
    return v;
}

inline double torus_eigen(std::span<const int> k) {
    double v = 0;
    for (std::size_t i = 1; i < k.size(); ++i)
        v += static_cast<double>(k[i]) * static_cast<double>(k[i]) * kPi * kPi;
    return v;
}

}  // namespace detail

inline double axis_value(EigenKind kind, int k1, double x) {
    using detail::kPi;
    switch (kind) {
        case EigenKind::NeumannNeumann:
            return std::cos(k1 * kPi * x / 2.0 + kPi / 2.0);
        case EigenKind::DirichletNeumann: {
            double a = kPi / 4.0 + k1 * kPi / 2.0;
            double sign = (k1 % 2 == 0) ? 1.0 : -1.0;
            return (sign * std::cos(a * x) + std::sin(a * x)) * detail::kInvSqrt2;
        }
        case EigenKind::DirichletDirichlet:
            return std::sin(k1 * kPi * x);
    }
    throw std::logic_error("axis_value: unknown kind");
}

inline double axis_derivative(EigenKind kind, int k1, double x) {
    using detail::kPi;
    switch (kind) {
        case EigenKind::NeumannNeumann:
            return -(k1 * kPi / 2.0) * std::sin(k1 * kPi * x / 2.0 + kPi / 2.0);
        case EigenKind::DirichletNeumann: {
            double a = kPi / 4.0 + k1 * kPi / 2.0;
            double sign = (k1 % 2 == 0) ? 1.0 : -1.0;
            return a * (-sign * std::sin(a * x) + std::cos(a * x)) * detail::kInvSqrt2;
        }
        case EigenKind::DirichletDirichlet:
            return k1 * kPi * std::cos(k1 * kPi * x);
    }
    throw std::logic_error("axis_derivative: unknown kind");
}

inline double axis_eigenvalue(EigenKind kind, int k1) {
    using detail::kPi;
    switch (kind) {
        case EigenKind::NeumannNeumann:
            return (k1 * kPi) * (k1 * kPi) / 4.0;
        case EigenKind::DirichletNeumann: {
            double a = kPi / 4.0 + k1 * kPi / 2.0;
            return a * a;
        }
        case EigenKind::DirichletDirichlet:
            return (k1 * kPi) * (k1 * kPi);
    }
    throw std::logic_error("axis_eigenvalue: unknown kind");
}

inline double eval_eigenfunction(EigenKind kind, std::span<const int> k,
                                 std::span<const double> x) {
    detail::check_index(kind, k);
    if (x.size() != k.size())
        throw std::invalid_argument("eval_eigenfunction: dimension mismatch");
    return axis_value(kind, k[0], x[0]) * detail::torus_product(k, x);
}

inline double eigenvalue(EigenKind kind, std::span<const int> k) {
    detail::check_index(kind, k);
    return axis_eigenvalue(kind, k[0]) + detail::torus_eigen(k);
}

inline double eval_V(std::span<const int> k, std::span<const double> x) {
    return eval_eigenfunction(EigenKind::NeumannNeumann, k, x);
}
inline double alpha_k(std::span<const int> k) {
    return eigenvalue(EigenKind::NeumannNeumann, k);
}
inline double eval_W(std::span<const int> k, std::span<const double> x) {
    return eval_eigenfunction(EigenKind::DirichletNeumann, k, x);
}
inline double gamma_k(std::span<const int> k) {
    return eigenvalue(EigenKind::DirichletNeumann, k);
}
inline double eval_U(std::span<const int> k, std::span<const double> x) {
    return eval_eigenfunction(EigenKind::DirichletDirichlet, k, x);
}
inline double delta_k(std::span<const int> k) {
    return eigenvalue(EigenKind::DirichletDirichlet, k);
}

/// First n axis indices of the enumerated family. The Neumann-Neumann closed
/// form meets its boundary conditions only at odd k1 (k1 = 0 is the zero
/// function and even k1 carry a nonzero face derivative), so the enumeration
/// walks the odd indices there.
inline std::vector<int> family_axis_indices(EigenKind kind, int n) {
    if (n < 1) throw std::invalid_argument("family_axis_indices: n must be >= 1");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    switch (kind) {
        case EigenKind::NeumannNeumann:
            for (int i = 0; i < n; ++i) out.push_back(2 * i + 1);
            break;
        case EigenKind::DirichletNeumann:
            for (int i = 0; i < n; ++i) out.push_back(i);
            break;
        case EigenKind::DirichletDirichlet:
            for (int i = 0; i < n; ++i) out.push_back(i + 1);
            break;
    }
    return out;
}

/// Pairwise L2(-1,1) inner products of the first n axis members by composite
/// Simpson quadrature with n_quad subintervals (n_quad made even).
inline Eigen::MatrixXd gram_matrix(EigenKind kind, int n, std::size_t n_quad) {
    auto idx = family_axis_indices(kind, n);
    if (n_quad < 2) throw std::invalid_argument("gram_matrix: quadrature too coarse");
    if (n_quad % 2 == 1) ++n_quad;
    const double h = 2.0 / static_cast<double>(n_quad);
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        samples[static_cast<std::size_t>(j)].resize(n_quad + 1);
        for (std::size_t q = 0; q <= n_quad; ++q)
            samples[static_cast<std::size_t>(j)][q] =
                axis_value(kind, idx[static_cast<std::size_t>(j)],
                           -1.0 + static_cast<double>(q) * h);
    }
    Eigen::MatrixXd G(n, n);
    for (int a = 0; a < n; ++a) {
        for (int bb = a; bb < n; ++bb) {
            double s = 0;
            const auto& fa = samples[static_cast<std::size_t>(a)];
            const auto& fb = samples[static_cast<std::size_t>(bb)];
            for (std::size_t q = 0; q <= n_quad; ++q) {
                double w = (q == 0 || q == n_quad) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
                s += w * fa[q] * fb[q];
            }
            G(a, bb) = G(bb, a) = s * h / 3.0;
        }
    }
    return G;
}

/// Max interior residual of the 3-point finite-difference eigenproblem
/// |Lap_h phi + lambda phi| on a uniform axis mesh with n_cells intervals.
inline double fd_eigen_residual(EigenKind kind, int k1, int n_cells) {
    if (n_cells < 4) throw std::invalid_argument("fd_eigen_residual: mesh too coarse");
    const double h = 2.0 / static_cast<double>(n_cells);
    const double lambda = axis_eigenvalue(kind, k1);
    double worst = 0;
    for (int i = 1; i < n_cells; ++i) {
        double x = -1.0 + i * h;
        double lap = (axis_value(kind, k1, x - h) + axis_value(kind, k1, x + h) -
                      2.0 * axis_value(kind, k1, x)) /
                     (h * h);
        worst = std::max(worst, std::abs(lap + lambda * axis_value(kind, k1, x)));
    }
    return worst;
}

/// Smallest Dirichlet eigenvalue used by condition H2; the stated family
/// gives d pi^2. The conservative variant admits the half-frequency axis
/// mode pi^2/4 + (d-1) pi^2.
inline double default_delta1(int d) {
    if (d < 1) throw std::invalid_argument("default_delta1: d must be >= 1");
    return d * detail::kPi * detail::kPi;
}

inline double conservative_delta1(int d) {
    if (d < 1) throw std::invalid_argument("conservative_delta1: d must be >= 1");
    return detail::kPi * detail::kPi / 4.0 + (d - 1) * detail::kPi * detail::kPi;
}

}  // namespace gcps

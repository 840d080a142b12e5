#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gcps {

/// Dynamics parameters: D diffusivity, lambda1/lambda2 birth rates
/// (lambda2 < lambda1), r sterile release rate, theta_l/theta_r boundary
/// slowdown exponents.
struct ModelParams {
    double D = 1.0;
    double lambda1 = 0.75;
    double lambda2 = 0.25;
    double r = 1.0;
    double theta_l = 0.0;
    double theta_r = 0.0;

    void validate() const {
        if (!(D > 0)) throw std::invalid_argument("ModelParams: D must be positive");
        if (!(lambda1 > 0) || !(lambda2 > 0))
            throw std::invalid_argument("ModelParams: growth rates must be positive");
        if (!(lambda2 < lambda1))
            throw std::invalid_argument("ModelParams: lambda2 < lambda1 required");
        if (!(r > 0)) throw std::invalid_argument("ModelParams: r must be positive");
        if (theta_l < 0 || theta_r < 0)
            throw std::invalid_argument("ModelParams: slowdown exponents must be nonnegative");
    }
};

/// Reservoir densities b_hat = (b1,b2,b3) on the two faces, as a function of
/// the torus coordinate of the face point; b0 = 1 - b1 - b2 - b3.
class BoundaryData {
public:
    using Fn = std::function<std::array<double, 3>(int face, std::span<const double> torus_point)>;

    explicit BoundaryData(Fn fn) : fn_(std::move(fn)) {}

    /// Constant densities per face.
    static BoundaryData constant(std::array<double, 3> left, std::array<double, 3> right) {
        return BoundaryData([left, right](int face, std::span<const double>) {
            return face < 0 ? left : right;
        });
    }

    static BoundaryData constant(std::array<double, 3> both) { return constant(both, both); }

    /// face: -1 for Gamma^-, +1 for Gamma^+.
    std::array<double, 3> operator()(int face, std::span<const double> torus_point) const {
        auto b = fn_(face, torus_point);
        double sum = 0;
        for (double v : b) {
            if (!(v >= 0.0) || !(v <= 1.0))
                throw std::invalid_argument("BoundaryData: components must lie in [0,1]");
            sum += v;
        }
        if (sum > 1.0)
            throw std::invalid_argument("BoundaryData: b1+b2+b3 must be <= 1");
        return b;
    }

    /// Full 4-vector including b0.
    std::array<double, 4> full(int face, std::span<const double> torus_point) const {
        auto b = (*this)(face, torus_point);
        return {1.0 - b[0] - b[1] - b[2], b[0], b[1], b[2]};
    }

private:
    Fn fn_;
};

enum class BoundaryCondition { Dirichlet, Robin, Neumann };

struct BoundaryRegime {
    BoundaryCondition left;
    BoundaryCondition right;
};

inline BoundaryCondition condition_from_theta(double theta) {
    if (theta < 0) throw std::invalid_argument("condition_from_theta: theta must be >= 0");
    if (theta < 1.0) return BoundaryCondition::Dirichlet;
    if (theta == 1.0) return BoundaryCondition::Robin;
    return BoundaryCondition::Neumann;
}

inline BoundaryRegime regime_from_theta(double theta_l, double theta_r) {
    return {condition_from_theta(theta_l), condition_from_theta(theta_r)};
}

/// Parameter regions under which the stationary profile is a unique global
/// attractor. delta1 is the smallest Dirichlet Laplacian eigenvalue.
struct ConditionReport {
    bool h1 = false;
    bool h2 = false;
    bool h3 = false;
    double delta1 = 0.0;
};

inline ConditionReport check_conditions(const ModelParams& p, int d, double delta1) {
    if (!(delta1 > 0)) throw std::invalid_argument("check_conditions: delta1 must be positive");
    ConditionReport rep;
    rep.delta1 = delta1;
    const double gap = 2.0 * d * (p.lambda1 - p.lambda2);
    rep.h1 = (p.D >= 1.0) && (p.r + 1.0 > gap) && (1.0 > 2.0 * d * p.lambda2);
    rep.h2 = (p.D * delta1 + p.r + 2.0 > gap) && (p.D * delta1 + 1.0 > 2.0 * d * p.lambda2);
    rep.h3 = (p.r + 2.0 > gap) && (1.0 > 2.0 * d * p.lambda2);
    return rep;
}

}  // namespace gcps

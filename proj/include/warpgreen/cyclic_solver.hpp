#pragma once

#include <span>
#include <vector>

#include "warpgreen/errors.hpp"

namespace warpgreen {

class SingularSystem : public Error {
public:
    using Error::Error;
};

// Symmetric cyclic tridiagonal matrix: diagonal d_i and coupling c_i = A(i, i+1 mod n).
class CyclicTridiagonal {
public:
    CyclicTridiagonal(std::vector<double> diag, std::vector<double> coupling);

    std::size_t size() const noexcept { return diag_.size(); }
    std::span<const double> diag() const noexcept { return diag_; }
    std::span<const double> coupling() const noexcept { return coupling_; }

    void apply(std::span<const double> x, std::span<double> y) const;
    // |A| |x|, used for componentwise backward errors.
    void apply_abs(std::span<const double> x, std::span<double> y) const;
    CyclicTridiagonal shifted(std::span<const double> extra_diag) const;

    // Inertia test: symmetric elimination without pivoting, all pivots > 0.
    bool positive_definite() const;

private:
    std::vector<double> diag_;
    std::vector<double> coupling_;
};

// Banded LU with partial pivoting of the corner-free part plus a rank-one
// Sherman-Morrison update for the two corner entries.
class CyclicFactorization {
public:
    explicit CyclicFactorization(const CyclicTridiagonal& m);

    void solve(std::span<double> rhs) const;
    // Column-major block of nrhs right-hand sides.
    void solve_many(std::span<double> cols, std::size_t nrhs) const;

private:
    void solve_banded(std::span<double> cols, std::size_t nrhs) const;

    std::size_t n_;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
    std::vector<double> z_;  // T^{-1} u
    double corner_ratio_;    // beta / gamma
    double denom_;           // 1 + v.z
};

}  // namespace warpgreen

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace warpgreen {

// Value and first two derivatives at a point.
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Wrap r into [0,1).
double wrap_unit(double r) noexcept;

// Smooth 1-periodic function with derivative access.
class PeriodicFn {
public:
    class Impl;

    static PeriodicFn constant(double c);
    // a0 + sum_k a_k cos(2 pi k r) + b_k sin(2 pi k r); coefficients a0, a1, b1, a2, b2, ...
    static PeriodicFn trig(std::vector<double> coeffs);
    // amp * exp(rate * cos(2 pi r))
    static PeriodicFn exp_trig(double amp, double rate);
    // Values on the uniform grid i/N; derivatives by periodic differences.
    static PeriodicFn sampled(std::vector<double> samples);
    // "const:c", "trig:a0,a1,b1,...", "exptrig:a,b"
    static PeriodicFn parse(std::string_view text);

    Jet jet(double r) const;
    double operator()(double r) const { return jet(r).value; }
    double derivative(double r) const { return jet(r).d1; }
    double second_derivative(double r) const { return jet(r).d2; }

    // Canonical text form; parse(describe()) reproduces the function for built-in families.
    std::string describe() const;
    bool is_constant() const;

    PeriodicFn operator+(const PeriodicFn& other) const;
    PeriodicFn scaled(double factor) const;

private:
    explicit PeriodicFn(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// sup over a uniform scan of |theta| + |theta'| + |theta''|.
double ball_norm(const PeriodicFn& fn, int scan_points = 4001);
double scan_min(const PeriodicFn& fn, int scan_points);

class Grid {
public:
    static constexpr int min_points = 16;

    explicit Grid(int n);

    int size() const noexcept { return n_; }
    double spacing() const noexcept { return 1.0 / n_; }
    double node(long i) const noexcept { return static_cast<double>(i) / n_; }
    int wrap(long i) const noexcept {
        long m = i % n_;
        return static_cast<int>(m < 0 ? m + n_ : m);
    }
    bool operator==(const Grid&) const = default;

private:
    int n_;
};

// Samples on the nodes of a grid.
class GridFn {
public:
    GridFn() = default;
    explicit GridFn(std::vector<double> values) : values_(std::move(values)) {}
    GridFn(std::size_t n, double fill) : values_(n, fill) {}

    static GridFn sample(const Grid& grid, const std::function<double(double)>& fn);
    static GridFn sample(const Grid& grid, const PeriodicFn& fn);

    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(values_.size()); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double at_wrapped(long i) const noexcept {
        const long n = static_cast<long>(values_.size());
        long m = i % n;
        return values_[static_cast<std::size_t>(m < 0 ? m + n : m)];
    }
    std::span<double> span() noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    double max_abs() const noexcept;
    double max() const noexcept;
    double min() const noexcept;

private:
    std::vector<double> values_;
};

GridFn operator-(const GridFn& a, const GridFn& b);
GridFn operator+(const GridFn& a, const GridFn& b);
GridFn operator*(double c, const GridFn& a);

// h * sum v_i
double quad_periodic(const GridFn& v);

// Signed integral of g over [s, r] (adaptive Gauss-Kronrod).
double quad_segment(const std::function<double(double)>& g, double s, double r);

// Central periodic differences, order 1 or 2.
GridFn diff_periodic(const GridFn& v, int order);

// 4-point Lagrange interpolation of periodic nodal data at r (any real r).
double interp_periodic(std::span<const double> values, double r);
double interp_periodic_derivative(std::span<const double> values, double r);

}  // namespace warpgreen

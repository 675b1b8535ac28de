#include "warpgreen/cyclic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <lapacke.h>

namespace warpgreen {

CyclicTridiagonal::CyclicTridiagonal(std::vector<double> diag, std::vector<double> coupling)
    : diag_(std::move(diag)), coupling_(std::move(coupling)) {
    if (diag_.size() != coupling_.size() || diag_.size() < 3)
        throw Error("cyclic tridiagonal: inconsistent sizes");
}

void CyclicTridiagonal::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        y[i] = diag_[i] * x[i] + coupling_[i] * x[ip] + coupling_[im] * x[im];
    }
}

void CyclicTridiagonal::apply_abs(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        y[i] = std::abs(diag_[i] * x[i]) + std::abs(coupling_[i] * x[ip]) +
               std::abs(coupling_[im] * x[im]);
    }
}

CyclicTridiagonal CyclicTridiagonal::shifted(std::span<const double> extra_diag) const {
    auto d = diag_;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += extra_diag[i];
    return CyclicTridiagonal(std::move(d), coupling_);
}

bool CyclicTridiagonal::positive_definite() const {
    const std::size_t n = size();
    double pivot = diag_[0];
    double last = diag_[n - 1];
    double w = coupling_[n - 1];  // entry (i, n-1) of the partially reduced matrix
    for (std::size_t i = 0; i + 2 < n; ++i) {
        if (!(pivot > 0.0)) return false;
        const double l = coupling_[i] / pivot;
        const double next = diag_[i + 1] - l * coupling_[i];
        last -= w * w / pivot;
        w = (i + 2 == n - 1 ? coupling_[n - 2] : 0.0) - l * w;
        pivot = next;
    }
    if (!(pivot > 0.0)) return false;
    last -= w * w / pivot;
    return last > 0.0;
}

CyclicFactorization::CyclicFactorization(const CyclicTridiagonal& m) : n_(m.size()) {
    const auto diag = m.diag();
    const auto cpl = m.coupling();
    const double alpha = cpl[n_ - 1];  // A(n-1, 0)
    const double beta = cpl[n_ - 1];   // A(0, n-1)
    const double gamma = diag[0] != 0.0 ? -diag[0] : -1.0;
    corner_ratio_ = beta / gamma;

    d_.assign(diag.begin(), diag.end());
    d_[0] -= gamma;
    d_[n_ - 1] -= alpha * beta / gamma;
    dl_.assign(cpl.begin(), cpl.begin() + static_cast<long>(n_ - 1));
    du_ = dl_;
    du2_.assign(n_ - 2, 0.0);
    ipiv_.assign(n_, 0);

    double scale = 0.0;
    for (std::size_t i = 0; i < n_; ++i) scale = std::max(scale, std::abs(diag[i]) + 2 * std::abs(cpl[i]));

    const lapack_int info = LAPACKE_dgttrf(static_cast<lapack_int>(n_), dl_.data(), d_.data(),
                                           du_.data(), du2_.data(), ipiv_.data());
    if (info != 0) throw SingularSystem("cyclic system: zero pivot in banded factorization");
    const double tiny = 64 * std::numeric_limits<double>::epsilon() * scale;
    for (double u : d_)
        if (std::abs(u) < tiny) throw SingularSystem("cyclic system: numerically singular pivot");

    z_.assign(n_, 0.0);
    z_[0] = gamma;
    z_[n_ - 1] = alpha;
    solve_banded(z_, 1);
    const double vz = z_[0] + corner_ratio_ * z_[n_ - 1];
    denom_ = 1.0 + vz;
    if (std::abs(denom_) <= 1e-13 * (1.0 + std::abs(vz)))
        throw SingularSystem("cyclic system: singular corner correction");
}

void CyclicFactorization::solve_banded(std::span<double> cols, std::size_t nrhs) const {
    const lapack_int info = LAPACKE_dgttrs(
        LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), static_cast<lapack_int>(nrhs), dl_.data(),
        d_.data(), du_.data(), du2_.data(), ipiv_.data(), cols.data(), static_cast<lapack_int>(n_));
    if (info != 0) throw SingularSystem("cyclic system: banded solve failed");
}

void CyclicFactorization::solve(std::span<double> rhs) const { solve_many(rhs, 1); }

void CyclicFactorization::solve_many(std::span<double> cols, std::size_t nrhs) const {
    solve_banded(cols, nrhs);
    for (std::size_t k = 0; k < nrhs; ++k) {
        double* y = cols.data() + k * n_;
        const double coef = (y[0] + corner_ratio_ * y[n_ - 1]) / denom_;
        for (std::size_t i = 0; i < n_; ++i) y[i] -= coef * z_[i];
    }
}

}  // namespace warpgreen

#include "warpgreen/periodic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "warpgreen/errors.hpp"

namespace warpgreen {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt_num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

double wrap_unit(double r) noexcept {
    double w = r - std::floor(r);
    return w >= 1.0 ? 0.0 : w;
}

class PeriodicFn::Impl {
public:
    virtual ~Impl() = default;
    virtual Jet eval(double r) const = 0;  // r in [0,1)
    virtual std::string describe() const = 0;
    virtual bool is_constant() const { return false; }
    virtual std::shared_ptr<const Impl> scaled(double factor) const = 0;
    // Non-null when the function is a trigonometric polynomial.
    virtual const std::vector<double>* trig_coeffs() const { return nullptr; }
};

namespace {

class TrigImpl final : public PeriodicFn::Impl {
public:
    explicit TrigImpl(std::vector<double> c) : c_(std::move(c)) {
        if (c_.empty()) c_.push_back(0.0);
        if (c_.size() % 2 == 0) c_.push_back(0.0);
    }
    Jet eval(double r) const override {
        Jet j{c_[0], 0.0, 0.0};
        for (std::size_t k = 1; 2 * k - 1 < c_.size(); ++k) {
            const double a = c_[2 * k - 1];
            const double b = c_[2 * k];
            if (a == 0.0 && b == 0.0) continue;
            const double w = two_pi * static_cast<double>(k);
            const double cs = std::cos(w * r);
            const double sn = std::sin(w * r);
            j.value += a * cs + b * sn;
            j.d1 += w * (b * cs - a * sn);
            j.d2 -= w * w * (a * cs + b * sn);
        }
        return j;
    }
    std::string describe() const override {
        if (is_constant()) return "const:" + fmt_num(c_[0]);
        std::size_t last = c_.size();
        while (last > 1 && c_[last - 1] == 0.0) --last;
        std::string out = "trig:";
        for (std::size_t i = 0; i < last; ++i) {
            if (i) out += ',';
            out += fmt_num(c_[i]);
        }
        return out;
    }
    bool is_constant() const override {
        return std::all_of(c_.begin() + 1, c_.end(), [](double x) { return x == 0.0; });
    }
    std::shared_ptr<const Impl> scaled(double factor) const override {
        auto c = c_;
        for (double& x : c) x *= factor;
        return std::make_shared<TrigImpl>(std::move(c));
    }
    const std::vector<double>* trig_coeffs() const override { return &c_; }

private:
    std::vector<double> c_;
};

class ExpTrigImpl final : public PeriodicFn::Impl {
public:
    ExpTrigImpl(double amp, double rate) : amp_(amp), rate_(rate) {}
    Jet eval(double r) const override {
        const double cs = std::cos(two_pi * r);
        const double sn = std::sin(two_pi * r);
        const double g = amp_ * std::exp(rate_ * cs);
        const double u1 = -two_pi * rate_ * sn;
        const double u2 = -two_pi * two_pi * rate_ * cs;
        return {g, g * u1, g * (u1 * u1 + u2)};
    }
    std::string describe() const override {
        return "exptrig:" + fmt_num(amp_) + "," + fmt_num(rate_);
    }
    bool is_constant() const override { return rate_ == 0.0 || amp_ == 0.0; }
    std::shared_ptr<const Impl> scaled(double factor) const override {
        return std::make_shared<ExpTrigImpl>(amp_ * factor, rate_);
    }

private:
    double amp_;
    double rate_;
};

class SampledImpl final : public PeriodicFn::Impl {
public:
    explicit SampledImpl(std::vector<double> v)
        : v_(std::move(v)),
          d1_(diff_periodic(GridFn(v_), 1).values()),
          d2_(diff_periodic(GridFn(v_), 2).values()) {}
    Jet eval(double r) const override {
        const auto n = static_cast<long>(v_.size());
        const double h = 1.0 / static_cast<double>(n);
        const double x = r * static_cast<double>(n);
        long i = static_cast<long>(std::floor(x));
        const double t = x - static_cast<double>(i);
        i = std::clamp(i, 0L, n - 1);
        const auto i1 = static_cast<std::size_t>((i + 1) % n);
        const auto i0 = static_cast<std::size_t>(i);
        // cubic Hermite on the cell, slopes from periodic differences
        const double t2 = t * t, t3 = t2 * t;
        const double p0 = v_[i0], p1 = v_[i1], m0 = d1_[i0] * h, m1 = d1_[i1] * h;
        Jet j;
        j.value = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 +
                  (t3 - t2) * m1;
        j.d1 = ((6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * p1 +
                (3 * t2 - 2 * t) * m1) / h;
        j.d2 = (1 - t) * d2_[i0] + t * d2_[i1];
        return j;
    }
    std::string describe() const override { return "samples:" + std::to_string(v_.size()); }
    bool is_constant() const override {
        return std::all_of(v_.begin(), v_.end(), [&](double x) { return x == v_[0]; });
    }
    std::shared_ptr<const Impl> scaled(double factor) const override {
        auto v = v_;
        for (double& x : v) x *= factor;
        return std::make_shared<SampledImpl>(std::move(v));
    }

private:
    std::vector<double> v_, d1_, d2_;
};

class SumImpl final : public PeriodicFn::Impl {
public:
    SumImpl(std::shared_ptr<const Impl> a, std::shared_ptr<const Impl> b)
        : a_(std::move(a)), b_(std::move(b)) {}
    Jet eval(double r) const override {
        const Jet x = a_->eval(r), y = b_->eval(r);
        return {x.value + y.value, x.d1 + y.d1, x.d2 + y.d2};
    }
    std::string describe() const override { return a_->describe() + " + " + b_->describe(); }
    bool is_constant() const override { return a_->is_constant() && b_->is_constant(); }
    std::shared_ptr<const Impl> scaled(double factor) const override {
        return std::make_shared<SumImpl>(a_->scaled(factor), b_->scaled(factor));
    }

private:
    std::shared_ptr<const Impl> a_, b_;
};

double parse_number(std::string_view s, std::string_view whole) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x))
        throw ParseError("function", 0,
                         "bad number '" + std::string(s) + "' in '" + std::string(whole) + "'");
    return x;
}

std::vector<double> parse_list(std::string_view s, std::string_view whole) {
    std::vector<double> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(parse_number(s.substr(0, comma), whole));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

PeriodicFn parse_term(std::string_view term) {
    while (!term.empty() && term.front() == ' ') term.remove_prefix(1);
    while (!term.empty() && term.back() == ' ') term.remove_suffix(1);
    const auto colon = term.find(':');
    if (colon == std::string_view::npos)
        throw ParseError("function", 0, "expected family:args, got '" + std::string(term) + "'");
    const auto family = term.substr(0, colon);
    const auto args = parse_list(term.substr(colon + 1), term);
    if (family == "const") {
        if (args.size() != 1) throw ParseError("function", 0, "const takes one value");
        return PeriodicFn::constant(args[0]);
    }
    if (family == "trig") return PeriodicFn::trig(args);
    if (family == "exptrig") {
        if (args.size() != 2) throw ParseError("function", 0, "exptrig takes a,b");
        return PeriodicFn::exp_trig(args[0], args[1]);
    }
    throw ParseError("function", 0, "unknown family '" + std::string(family) + "'");
}

}  // namespace

PeriodicFn PeriodicFn::constant(double c) { return PeriodicFn(std::make_shared<TrigImpl>(std::vector{c})); }

PeriodicFn PeriodicFn::trig(std::vector<double> coeffs) {
    return PeriodicFn(std::make_shared<TrigImpl>(std::move(coeffs)));
}

PeriodicFn PeriodicFn::exp_trig(double amp, double rate) {
    return PeriodicFn(std::make_shared<ExpTrigImpl>(amp, rate));
}

PeriodicFn PeriodicFn::sampled(std::vector<double> samples) {
    if (samples.size() < static_cast<std::size_t>(Grid::min_points))
        throw ValidationError("sampled function needs at least 16 samples");
    return PeriodicFn(std::make_shared<SampledImpl>(std::move(samples)));
}

PeriodicFn PeriodicFn::parse(std::string_view text) {
    // terms joined by '+' where the next token starts a family name
    std::vector<std::string_view> terms;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '+') continue;
        std::size_t k = i + 1;
        while (k < text.size() && text[k] == ' ') ++k;
        if (k < text.size() && std::isalpha(static_cast<unsigned char>(text[k]))) {
            terms.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    terms.push_back(text.substr(start));
    PeriodicFn out = parse_term(terms[0]);
    for (std::size_t t = 1; t < terms.size(); ++t) out = out + parse_term(terms[t]);
    return out;
}

Jet PeriodicFn::jet(double r) const { return impl_->eval(wrap_unit(r)); }

std::string PeriodicFn::describe() const { return impl_->describe(); }

bool PeriodicFn::is_constant() const { return impl_->is_constant(); }

PeriodicFn PeriodicFn::operator+(const PeriodicFn& other) const {
    const auto* a = impl_->trig_coeffs();
    const auto* b = other.impl_->trig_coeffs();
    if (a && b) {
        std::vector<double> c(std::max(a->size(), b->size()), 0.0);
        for (std::size_t i = 0; i < a->size(); ++i) c[i] += (*a)[i];
        for (std::size_t i = 0; i < b->size(); ++i) c[i] += (*b)[i];
        return trig(std::move(c));
    }
    return PeriodicFn(std::make_shared<SumImpl>(impl_, other.impl_));
}

PeriodicFn PeriodicFn::scaled(double factor) const { return PeriodicFn(impl_->scaled(factor)); }

double ball_norm(const PeriodicFn& fn, int scan_points) {
    double best = 0.0;
    for (int i = 0; i < scan_points; ++i) {
        const Jet j = fn.jet(static_cast<double>(i) / (scan_points - 1));
        best = std::max(best, std::abs(j.value) + std::abs(j.d1) + std::abs(j.d2));
    }
    return best;
}

double scan_min(const PeriodicFn& fn, int scan_points) {
    double m = fn(0.0);
    for (int i = 1; i < scan_points; ++i) m = std::min(m, fn(static_cast<double>(i) / scan_points));
    return m;
}

Grid::Grid(int n) : n_(n) {
    if (n < min_points) throw ValidationError("grid needs N >= 16, got " + std::to_string(n));
}

GridFn GridFn::sample(const Grid& grid, const std::function<double(double)>& fn) {
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) v[static_cast<std::size_t>(i)] = fn(grid.node(i));
    return GridFn(std::move(v));
}

GridFn GridFn::sample(const Grid& grid, const PeriodicFn& fn) {
    return sample(grid, [&](double r) { return fn(r); });
}

double GridFn::max_abs() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
}

double GridFn::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
double GridFn::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

GridFn operator-(const GridFn& a, const GridFn& b) {
    GridFn out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

GridFn operator+(const GridFn& a, const GridFn& b) {
    GridFn out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

GridFn operator*(double c, const GridFn& a) {
    GridFn out = a;
    for (double& x : out.values()) x *= c;
    return out;
}

double quad_periodic(const GridFn& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s * v.spacing();
}

double quad_segment(const std::function<double(double)>& g, double s, double r) {
    if (s == r) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    const double lo = std::min(s, r), hi = std::max(s, r);
    const double val = gauss_kronrod<double, 15>::integrate(g, lo, hi, 8, 1e-12);
    return r > s ? val : -val;
}

GridFn diff_periodic(const GridFn& v, int order) {
    if (order != 1 && order != 2) throw ValidationError("diff_periodic order must be 1 or 2");
    const long n = static_cast<long>(v.size());
    const double h = v.spacing();
    GridFn out(v.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        const double lo = v.at_wrapped(i - 1), hi = v.at_wrapped(i + 1);
        out[static_cast<std::size_t>(i)] =
            order == 1 ? (hi - lo) / (2 * h) : (hi - 2 * v[static_cast<std::size_t>(i)] + lo) / (h * h);
    }
    return out;
}

namespace {

struct Stencil {
    long base;
    double t;
};

Stencil locate_cell(std::size_t n, double r) {
    const double x = wrap_unit(r) * static_cast<double>(n);
    const double fl = std::floor(x);
    return {static_cast<long>(fl), x - fl};
}

double at(std::span<const double> v, long i) {
    const long n = static_cast<long>(v.size());
    long m = i % n;
    return v[static_cast<std::size_t>(m < 0 ? m + n : m)];
}

}  // namespace

double interp_periodic(std::span<const double> v, double r) {
    const auto [i, t] = locate_cell(v.size(), r);
    const double wm = -t * (t - 1) * (t - 2) / 6;
    const double w0 = (t + 1) * (t - 1) * (t - 2) / 2;
    const double w1 = -(t + 1) * t * (t - 2) / 2;
    const double w2 = (t + 1) * t * (t - 1) / 6;
    return wm * at(v, i - 1) + w0 * at(v, i) + w1 * at(v, i + 1) + w2 * at(v, i + 2);
}

double interp_periodic_derivative(std::span<const double> v, double r) {
    const auto [i, t] = locate_cell(v.size(), r);
    const double wm = -(3 * t * t - 6 * t + 2) / 6;
    const double w0 = (3 * t * t - 4 * t - 1) / 2;
    const double w1 = -(3 * t * t - 2 * t - 2) / 2;
    const double w2 = (3 * t * t - 1) / 6;
    const double n = static_cast<double>(v.size());
    return n * (wm * at(v, i - 1) + w0 * at(v, i) + w1 * at(v, i + 1) + w2 * at(v, i + 2));
}

}  // namespace warpgreen

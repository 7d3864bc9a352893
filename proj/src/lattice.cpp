#include "ruin/lattice.hpp"

#include "ruin/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <sstream>

namespace ruin {

namespace {

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t fft_size(std::size_t n) {
    std::size_t size = 1;
    while (size < n) size <<= 1;
    return size;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b,
                                    std::size_t out_len) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size() && i < out_len; ++i) {
        if (a[i] == 0.0) continue;
        const std::size_t jmax = std::min(b.size(), out_len - i);
        for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b,
                                 std::size_t out_len) {
    const std::size_t n = fft_size(a.size() + b.size() - 1);
    const std::size_t nc = n / 2 + 1;
    auto ra = fftw_buffer<double>(n);
    auto rb = fftw_buffer<double>(n);
    auto ca = fftw_buffer<fftw_complex>(nc);
    auto cb = fftw_buffer<fftw_complex>(nc);
    std::fill(ra.get(), ra.get() + n, 0.0);
    std::fill(rb.get(), rb.get() + n, 0.0);
    std::copy(a.begin(), a.end(), ra.get());
    std::copy(b.begin(), b.end(), rb.get());

    fftw_plan fa, fb, back;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra.get(), ca.get(), FFTW_ESTIMATE);
        fb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb.get(), cb.get(), FFTW_ESTIMATE);
        back = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca.get(), ra.get(), FFTW_ESTIMATE);
    }
    fftw_execute(fa);
    fftw_execute(fb);
    for (std::size_t k = 0; k < nc; ++k) {
        const std::complex<double> x(ca[k][0], ca[k][1]);
        const std::complex<double> y(cb[k][0], cb[k][1]);
        const auto z = x * y;
        ca[k][0] = z.real();
        ca[k][1] = z.imag();
    }
    fftw_execute(back);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fa);
        fftw_destroy_plan(fb);
        fftw_destroy_plan(back);
    }

    std::vector<double> out(out_len, 0.0);
    const double scale = 1.0 / static_cast<double>(n);
    const std::size_t m = std::min(out_len, a.size() + b.size() - 1);
    for (std::size_t i = 0; i < m; ++i) {
        // roundoff can leave tiny negatives where the true mass is zero
        out[i] = std::max(0.0, ra[i] * scale);
    }
    return out;
}

std::span<const double> trim_trailing_zeros(std::span<const double> v) {
    std::size_t n = v.size();
    while (n > 0 && v[n - 1] == 0.0) --n;
    return v.first(n);
}

std::size_t leading_zeros(std::span<const double> v) {
    std::size_t k = 0;
    while (k < v.size() && v[k] == 0.0) ++k;
    return k;
}

}  // namespace

GriddedDistribution::GriddedDistribution(double step, std::vector<double> values, double tail_mass)
    : step_(step), values_(std::move(values)), tail_mass_(tail_mass) {
    if (!(step_ > 0.0)) throw InvalidParams("GriddedDistribution: step must be positive");
    if (values_.size() < 2) throw InvalidParams("GriddedDistribution: need at least two nodes");
}

GriddedDistribution GriddedDistribution::from_values(double step, std::vector<double> values) {
    const double last = values.empty() ? 0.0 : values.back();
    return GriddedDistribution(step, std::move(values), std::max(0.0, 1.0 - last));
}

double GriddedDistribution::cdf(double x) const {
    if (x < 0.0) return 0.0;
    const double t = x / step_;
    const auto last = values_.size() - 1;
    if (t >= static_cast<double>(last)) return values_.back();
    const auto k = static_cast<std::size_t>(t);
    const double w = t - static_cast<double>(k);
    return values_[k] + w * (values_[k + 1] - values_[k]);
}

double GriddedDistribution::quantile(double p) const {
    if (p <= values_.front()) return 0.0;
    if (p >= values_.back()) return upper();
    // first node with value >= p
    const auto it = std::lower_bound(values_.begin(), values_.end(), p);
    const auto k = static_cast<std::size_t>(it - values_.begin());
    const double lo = values_[k - 1];
    const double hi = values_[k];
    const double w = hi > lo ? (p - lo) / (hi - lo) : 1.0;
    return (static_cast<double>(k - 1) + w) * step_;
}

std::vector<double> GriddedDistribution::cell_masses() const {
    std::vector<double> m(values_.size() - 1);
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) m[k] = values_[k + 1] - values_[k];
    return m;
}

double GriddedDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
        acc += 0.5 * ((1.0 - values_[k]) + (1.0 - values_[k + 1]));
    }
    return acc * step_;
}

double GriddedDistribution::second_moment() const {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
        acc += 0.5 * (node(k) * (1.0 - values_[k]) + node(k + 1) * (1.0 - values_[k + 1]));
    }
    return 2.0 * acc * step_;
}

double GriddedDistribution::lst(double s) const {
    double acc = values_.front();
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
        acc += (values_[k + 1] - values_[k]) * std::exp(-s * (static_cast<double>(k) + 0.5) * step_);
    }
    return acc;
}

void GriddedDistribution::validate(double tol) const {
    std::ostringstream why;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] < -tol || values_[k] > 1.0 + tol) {
            why << "value " << values_[k] << " at node " << k << " outside [0,1]";
            throw InvalidParams(why.str());
        }
        if (k > 0 && values_[k] < values_[k - 1] - tol) {
            why << "cdf decreases at node " << k;
            throw InvalidParams(why.str());
        }
    }
    const double total = values_.back() + tail_mass_;
    if (total < 1.0 - tol || total > 1.0 + tol) {
        why << "values.back() + tail_mass = " << total;
        throw InvalidParams(why.str());
    }
}

double LatticeMasses::total() const {
    double acc = 0.0;
    for (double m : mass) acc += m;
    return acc;
}

LatticeMasses unit_mass(double step, std::size_t points) {
    LatticeMasses out{step, std::vector<double>(half_length(points), 0.0)};
    out.mass[0] = 1.0;
    return out;
}

LatticeMasses discretize_cdf(const std::function<double(double)>& cdf, double step,
                             std::size_t points) {
    LatticeMasses out{step, std::vector<double>(half_length(points), 0.0)};
    double prev = cdf(0.0);
    out.mass[0] = prev;
    for (std::size_t k = 0; k + 1 < points; ++k) {
        const double next = cdf(static_cast<double>(k + 1) * step);
        out.mass[2 * k + 1] = std::max(0.0, next - prev);
        prev = next;
    }
    return out;
}

LatticeMasses discretize(const GriddedDistribution& grid) {
    const auto v = grid.values();
    LatticeMasses out{grid.step(), std::vector<double>(half_length(v.size()), 0.0)};
    out.mass[0] = v[0];
    for (std::size_t k = 0; k + 1 < v.size(); ++k) out.mass[2 * k + 1] = std::max(0.0, v[k + 1] - v[k]);
    return out;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b,
                             std::size_t max_len) {
    a = trim_trailing_zeros(a);
    b = trim_trailing_zeros(b);
    if (a.empty() || b.empty()) return std::vector<double>(max_len, 0.0);

    // shift out leading zeros so sparse operands stay cheap
    const std::size_t za = leading_zeros(a);
    const std::size_t zb = leading_zeros(b);
    const std::size_t shift = za + zb;
    std::vector<double> out(max_len, 0.0);
    if (shift >= max_len) return out;
    a = a.subspan(za);
    b = b.subspan(zb);
    const std::size_t len = max_len - shift;
    a = a.first(std::min(a.size(), len));
    b = b.first(std::min(b.size(), len));

    const bool small = std::min(a.size(), b.size()) <= 64 ||
                       static_cast<double>(a.size()) * static_cast<double>(b.size()) < 2.0e5;
    const auto core = small ? convolve_direct(a, b, len) : convolve_fft(a, b, len);
    std::copy(core.begin(), core.end(), out.begin() + static_cast<std::ptrdiff_t>(shift));
    return out;
}

LatticeMasses convolve(const LatticeMasses& a, const LatticeMasses& b, std::size_t max_len) {
    return LatticeMasses{a.step, convolve(std::span<const double>(a.mass), std::span<const double>(b.mass), max_len)};
}

void axpy(double weight, const LatticeMasses& src, LatticeMasses& dst) {
    if (dst.mass.size() < src.mass.size()) dst.mass.resize(src.mass.size(), 0.0);
    if (dst.step == 0.0) dst.step = src.step;
    for (std::size_t i = 0; i < src.mass.size(); ++i) dst.mass[i] += weight * src.mass[i];
}

std::vector<double> node_sums(const LatticeMasses& m, std::size_t points) {
    std::vector<double> values(points, 0.0);
    const auto at = [&](std::size_t i) { return i < m.mass.size() ? m.mass[i] : 0.0; };
    double below = at(0);  // the atom at zero counts fully at node 0
    values[0] = below;
    for (std::size_t j = 1; j < points; ++j) {
        below += at(2 * j - 1);
        values[j] = below + 0.5 * at(2 * j);
        below += at(2 * j);
    }
    return values;
}

GriddedDistribution to_gridded(const LatticeMasses& m, std::size_t points) {
    auto values = node_sums(m, points);
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
    return GriddedDistribution::from_values(m.step, std::move(values));
}

GriddedDistribution integrated_tail_of(const GriddedDistribution& grid, double mean) {
    if (!std::isfinite(mean)) throw InfiniteMean("integrated tail requires a finite mean");
    if (!(mean > 0.0)) throw InvalidParams("integrated tail requires a positive mean");
    const auto v = grid.values();
    // Tail integrals summed from the right keep the far survival accurate.
    std::vector<double> tail(v.size(), 0.0);
    for (std::size_t k = v.size() - 1; k-- > 0;) {
        tail[k] = tail[k + 1] + 0.5 * grid.step() * ((1.0 - v[k]) + (1.0 - v[k + 1]));
    }
    // The part beyond the lattice comes from a power-law fit of the survival
    // over the last octave. mean - tail[0] would also carry the O(h^2)
    // quadrature error, which swamps F_I-bar far out.
    const double bar_end = 1.0 - v.back();
    const double bar_mid = 1.0 - grid.cdf(0.5 * grid.upper());
    double beyond = 0.0;
    if (bar_end > 1e-14 && bar_mid > bar_end) {
        const double index = std::log2(bar_mid / bar_end);
        beyond = index > 1.05 ? bar_end * grid.upper() / (index - 1.0) : std::max(0.0, mean - tail[0]);
    }
    const double norm = tail[0] + beyond;
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = tail[0] / norm - tail[k] / norm;
    out[0] = 0.0;
    return GriddedDistribution::from_values(grid.step(), std::move(out));
}

}  // namespace ruin

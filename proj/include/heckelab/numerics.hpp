// numerics.hpp
//
// Special functions and quadrature for the archimedean side of the
// L-value machinery:
//
//   gamma_factor(s)   Gamma(s) / (2*pi)^s            (holomorphic GL(2)/Q case)
//   mellin_phi(t)     Phi(t) = int Psi(y) y^t dy/y   (Mellin transform of the bump)
//   cutoff_V(j,s,x)   (1/2*pi*i) int_(sigma) Phi((-1)^(j-1) t) gamma_factor(s+t) x^-t dt/t
//
// Psi is a fixed normalized C^inf bump supported on [1/2, 2]:
//   Psi(u) = c * exp(-1/(1-v^2)),  v = log(u)/log(2),  c chosen so Phi(0) = 1.
// Phi is entire and decays super-polynomially on vertical lines, so the
// contour for V can be truncated once the integrand drops below 1e-17 of its
// peak; the truncation height is grown adaptively and an a-posteriori tail
// estimate is attached to every V evaluation.
//
// V is smooth, positive and strictly decreasing for real s > 0, with
// V(x) -> gamma_factor(s) as x -> 0 and super-polynomial decay as x -> inf.
// CutoffGrid tabulates log V on a uniform grid in log x and interpolates with
// 4-point Lagrange; direct contour quadrature stays available as the oracle
// path and as the fallback for complex s.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace heckelab {

using cdouble = std::complex<double>;

inline constexpr double pi_const = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi_const;
inline constexpr double log2_const = 0.69314718055994530941723212145817657;

namespace detail {

// 12-point Gauss-Legendre rule on [-1, 1].
inline constexpr double gl12_x[6] = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
inline constexpr double gl12_w[6] = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

// Lanczos approximation (g = 7, 9 terms), ~14 correct digits on the ranges
// used here.  Reflection handles Re z < 0.5.
inline cdouble gamma_complex(cdouble z)
{
    static const double c[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return pi_const / (std::sin(pi_const * z) * gamma_complex(1.0 - z));
    }
    z -= 1.0;
    cdouble a = c[0];
    for (int i = 1; i < 9; ++i)
        a += c[i] / (z + static_cast<double>(i));
    cdouble t = z + 7.5;
    return std::sqrt(two_pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

inline bool near_nonpositive_integer(cdouble s)
{
    if (std::abs(s.imag()) > 1e-12) return false;
    double r = s.real();
    return r < 0.5 && std::abs(r - std::round(r)) < 1e-12;
}

// exp(-1/(1-v^2)) on (-1,1), zero outside.
inline double bump_raw(double v)
{
    double w = 1.0 - v * v;
    if (w <= 0.0) return 0.0;
    return std::exp(-1.0 / w);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Gamma factor
// ---------------------------------------------------------------------------

// Archimedean data of a holomorphic form over Q: weight k, zero m-shift,
// sign set J = all real places (so the leading rational constant is 1 and
// the archimedean root number is +1).
struct GammaFactorSpec {
    int weight = 2;
    int m_shift = 0;

    void validate() const
    {
        if (weight < 2) throw std::invalid_argument("GammaFactorSpec: weight must be >= 2");
        if (m_shift != 0) throw std::invalid_argument("GammaFactorSpec: m-shift is fixed to 0");
    }
};

// Gamma(s) / (2 pi)^s.  Throws on (numerically exact) Gamma poles.
inline cdouble gamma_factor(cdouble s, const GammaFactorSpec& spec)
{
    spec.validate();
    if (detail::near_nonpositive_integer(s))
        throw std::domain_error("gamma_factor: pole of Gamma at s = " + std::to_string(s.real()));
    return detail::gamma_complex(s) * std::exp(-s * std::log(two_pi));
}

// ---------------------------------------------------------------------------
// Smoothing kernel
// ---------------------------------------------------------------------------

struct SmoothingKernel {
    double support_lo = 0.5;     // bump support [1/2, 2] on the positive reals
    double support_hi = 2.0;
    double norm = 1.0;           // c with Phi(0) = 1
    double contour_sigma = 2.0;  // vertical-line abscissa for V
    double contour_height = 60.0;// baseline truncation height T (grown adaptively)
    int panels_base = 48;        // minimum composite-GL panel count for Phi

    double bump(double u) const
    {
        if (u <= support_lo || u >= support_hi) return 0.0;
        return norm * detail::bump_raw(std::log(u) / log2_const);
    }
};

namespace detail {

// int_{-1}^{1} bump_raw(v) * f(v) dv by composite GL12 with `panels` panels.
template <typename F>
inline auto bump_integral(F&& f, int panels) -> decltype(f(0.0))
{
    using R = decltype(f(0.0));
    R acc{};
    const double h = 2.0 / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double mid = -1.0 + (pnl + 0.5) * h;
        R panel_acc{};
        for (int i = 0; i < 6; ++i) {
            double dv = 0.5 * h * gl12_x[i];
            panel_acc += gl12_w[i] * (bump_raw(mid + dv) * f(mid + dv) +
                                      bump_raw(mid - dv) * f(mid - dv));
        }
        acc += panel_acc * (0.5 * h);
    }
    return acc;
}

} // namespace detail

inline SmoothingKernel make_default_kernel()
{
    SmoothingKernel ker;
    // Same rule mellin_phi uses at t = 0, so Phi(0) = 1 holds exactly.
    double i0 = detail::bump_integral([](double) { return 1.0; }, ker.panels_base);
    ker.norm = 1.0 / (i0 * log2_const);
    return ker;
}

// Phi(t) = int_0^inf Psi(y) y^t dy/y = c log2 int_{-1}^{1} bump_raw(v) 2^{v t} dv.
// Entire in t.  Panel count scales with |Im t| so the oscillation stays
// resolved; absolute accuracy ~1e-15 * scale(Re t) (relative 1e-12 or better
// until oscillatory cancellation reaches the double-precision floor).
inline cdouble mellin_phi(cdouble t, const SmoothingKernel& ker)
{
    const double omega = std::abs(t.imag()) * log2_const;
    const int panels = std::max(ker.panels_base, static_cast<int>(omega / 3.0) + 8);
    const cdouble tl2 = t * log2_const;
    cdouble val = detail::bump_integral(
        [&](double v) { return std::exp(v * tl2); }, panels);
    return val * (ker.norm * log2_const);
}

// ---------------------------------------------------------------------------
// Contour machinery for V_{j,s}
// ---------------------------------------------------------------------------

struct VResult {
    cdouble value{0.0, 0.0};
    double tail_estimate = 0.0;
};

struct CutoffOptions {
    double abscissa = 2.0;     // Re t of the right contour
    double max_log_x = 22.0;   // node density resolves x^{-i tau} up to this |log x|
    bool small_x_shift = true; // route x < 1 through Re t = -1/2 plus residue
};

// Precomputed x-independent integrand data along vertical lines:
//   V(x) = res + (1/2pi) sum_i coef[i] * x^{-t_i}        (full line), or
//   V(x) = res + (1/pi) Re sum_i coef[i] * x^{-t_i}      (half line, real s)
// where coef bundles the GL weight, Phi((-1)^(j-1) t), gamma_factor(s+t) and
// 1/t.  Two lines are kept: the right one (Re t = abscissa) for x >= 1 and,
// when Re s > 0.6, a left one at Re t = -1/2 for x < 1 together with the
// residue Phi(0) gamma_factor(s) crossed at t = 0.  Evaluating x << 1 on the
// right line alone would cancel catastrophically (terms carry x^{-abscissa}
// while the value stays near gamma_factor(s)).
class ContourCache {
public:
    ContourCache(int j, cdouble s, const SmoothingKernel& ker,
                 const GammaFactorSpec& spec, const CutoffOptions& opt = {})
        : j_(j), s_(s), half_line_(s.imag() == 0.0)
    {
        if (j != 1 && j != 2) throw std::invalid_argument("cutoff_V: j must be 1 or 2");
        spec.validate();
        if (opt.abscissa <= 0.0)
            throw std::invalid_argument("cutoff_V: contour abscissa must be positive");
        build_side(plus_, opt.abscissa, j, ker, spec, opt.max_log_x);
        if (opt.small_x_shift && s.real() > 0.6) {
            build_side(minus_, -0.5, j, ker, spec, opt.max_log_x);
            residue_ = mellin_phi(cdouble(0.0, 0.0), ker) * gamma_factor(s, spec);
            has_minus_ = true;
        }
    }

    VResult evaluate(double x) const
    {
        if (!(x > 0.0)) throw std::invalid_argument("cutoff_V: x must be positive");
        const bool use_minus = has_minus_ && x < 1.0;
        const Side& side = use_minus ? minus_ : plus_;
        const double xi = std::log(x);
        const double damp = std::exp(-side.sigma * xi);
        if (!std::isfinite(damp)) throw std::domain_error("cutoff_V: x^-sigma overflow");
        VResult r;
        if (half_line_) {
            double acc = 0.0;
            for (std::size_t i = 0; i < side.taus.size(); ++i) {
                double ph = side.taus[i] * xi;
                acc += side.coefs[i].real() * std::cos(ph) +
                       side.coefs[i].imag() * std::sin(ph);
            }
            r.value = cdouble(acc * damp / pi_const, 0.0);
        } else {
            cdouble acc{0.0, 0.0};
            for (std::size_t i = 0; i < side.taus.size(); ++i) {
                double ph = -side.taus[i] * xi;
                acc += side.coefs[i] * cdouble(std::cos(ph), std::sin(ph));
            }
            r.value = acc * damp / two_pi;
        }
        if (use_minus) r.value += residue_;
        r.tail_estimate = (side.tail_abs + 1e-15 * side.abs_sum) * damp;
        return r;
    }

    cdouble s() const { return s_; }
    int j() const { return j_; }
    std::size_t node_count() const { return plus_.taus.size() + minus_.taus.size(); }

private:
    struct Side {
        double sigma = 0.0;
        std::vector<double> taus;
        std::vector<cdouble> coefs;
        double abs_sum = 0.0;
        double tail_abs = 0.0;
    };

    void build_side(Side& side, double sigma, int j, const SmoothingKernel& ker,
                    const GammaFactorSpec& spec, double max_log_x)
    {
        side.sigma = sigma;
        const double phase_sign = (j == 1) ? 1.0 : -1.0;
        // GL12 panels resolve e^{i omega tau} comfortably for omega * h <= 6.
        const double h = std::min(0.5, 6.0 / std::max(1.0, max_log_x));
        const double t_cap = 200.0;
        auto add_panel = [&](double lo) -> double {
            double mid = lo + 0.5 * h;
            double amax = 0.0;
            for (int i = 0; i < 6; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    double tau = mid + sgn * 0.5 * h * detail::gl12_x[i];
                    cdouble t(sigma, tau);
                    cdouble f = mellin_phi(phase_sign * t, ker) *
                                gamma_factor(s_ + t, spec) / t;
                    side.taus.push_back(tau);
                    side.coefs.push_back(f * (detail::gl12_w[i] * 0.5 * h));
                    amax = std::max(amax, std::abs(f));
                }
            }
            return amax;
        };
        // Panels over [0, T]; T grows until the integrand drops to 1e-17 of
        // its peak (Phi and Gamma both decay super-polynomially in tau).
        double peak = 0.0, last_amax = 0.0;
        double t_end = ker.contour_height;
        for (double lo = 0.0; lo < t_end; lo += h) {
            last_amax = add_panel(lo);
            peak = std::max(peak, last_amax);
            if (lo + h >= t_end && last_amax > 1e-17 * peak && t_end < t_cap)
                t_end = std::min(t_cap, t_end + 10.0);
        }
        if (!half_line_) {
            for (double lo = -h; lo > -t_end - 0.5 * h; lo -= h) {
                double amax = add_panel(lo);
                peak = std::max(peak, amax);
                last_amax = std::max(last_amax, amax);
            }
        }
        side.abs_sum = 0.0;
        for (const cdouble& c : side.coefs) side.abs_sum += std::abs(c);
        side.tail_abs = last_amax * h * 2.0; // endpoint panel mass as tail proxy
    }

    int j_;
    cdouble s_;
    bool half_line_;
    bool has_minus_ = false;
    cdouble residue_{0.0, 0.0};
    Side plus_, minus_;
};

// Direct contour quadrature of V_{j,s}(x); the oracle path.  Callers compare
// the attached tail estimate against their tolerance and flag, never swallow.
inline VResult cutoff_V(int j, cdouble s, double x, const SmoothingKernel& ker,
                        const GammaFactorSpec& spec, const CutoffOptions& opt = {})
{
    ContourCache cache(j, s, ker, spec, opt);
    return cache.evaluate(x);
}

// ---------------------------------------------------------------------------
// CutoffGrid: log-log tabulation of V for real s
// ---------------------------------------------------------------------------

class CutoffGrid {
public:
    CutoffGrid(int j, double s, const SmoothingKernel& ker, const GammaFactorSpec& spec,
               double x_lo = 1e-9, double x_hi = 60.0, double step = 0.002)
        : j_(j), s_(s), xi_lo_(std::log(x_lo)), step_(step)
    {
        CutoffOptions opt;
        opt.abscissa = ker.contour_sigma;
        opt.max_log_x = std::max(std::abs(std::log(x_lo)), std::abs(std::log(x_hi))) + 1.0;
        ContourCache cache(j, cdouble(s, 0.0), ker, spec, opt);
        const double xi_hi = std::log(x_hi);
        const std::size_t count = static_cast<std::size_t>((xi_hi - xi_lo_) / step_) + 4;
        logv_.reserve(count);
        ref_ = std::abs(gamma_factor(cdouble(s, 0.0), spec));
        tail_hint_ = 0.0;
        bool dead = false;
        for (std::size_t i = 0; i < count; ++i) {
            if (dead) { logv_.push_back(-std::numeric_limits<double>::infinity()); continue; }
            double x = std::exp(xi_lo_ + i * step_);
            VResult r = cache.evaluate(x);
            double v = r.value.real();
            tail_hint_ = std::max(tail_hint_, r.tail_estimate / std::max(std::abs(v), ref_));
            // below ~1e-17 of the small-x plateau the contour value is noise
            if (!(v > 1e-17 * ref_)) {
                dead = true;
                logv_.push_back(-std::numeric_limits<double>::infinity());
            } else {
                logv_.push_back(std::log(v));
            }
        }
        cache_nodes_ = cache.node_count();
    }

    // 4-point Lagrange in (log x, log V); exact 0 past the underflow cutoff.
    double value(double x) const
    {
        const double xi = std::log(x);
        double u = (xi - xi_lo_) / step_;
        if (u < 1.0) return out_of_range_low(x);
        std::size_t i1 = static_cast<std::size_t>(u);
        if (i1 + 2 >= logv_.size()) return 0.0;
        double f = u - i1;
        double y0 = logv_[i1 - 1], y1 = logv_[i1], y2 = logv_[i1 + 1], y3 = logv_[i1 + 2];
        if (!std::isfinite(y1) || !std::isfinite(y2)) return 0.0;
        if (!std::isfinite(y3) || !std::isfinite(y0)) {
            return std::exp(y1 + f * (y2 - y1)); // linear at the cutoff edge
        }
        // nodes at local positions -1, 0, 1, 2
        double l = y0 * (-f * (f - 1.0) * (f - 2.0) / 6.0) +
                   y1 * ((f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0) +
                   y2 * (-(f + 1.0) * f * (f - 2.0) / 2.0) +
                   y3 * ((f + 1.0) * f * (f - 1.0) / 6.0);
        return std::exp(l);
    }

    double tail_hint() const { return tail_hint_; }
    std::size_t size() const { return logv_.size(); }
    std::size_t contour_nodes() const { return cache_nodes_; }
    int j() const { return j_; }
    double s() const { return s_; }

private:
    double out_of_range_low(double) const
    {
        // x below the grid: V is already on its small-x plateau; clamp.
        return std::exp(logv_[1]);
    }

    int j_;
    double s_;
    double xi_lo_;
    double step_;
    double ref_ = 1.0;
    double tail_hint_ = 0.0;
    std::size_t cache_nodes_ = 0;
    std::vector<double> logv_;
};

} // namespace heckelab

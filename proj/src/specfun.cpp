#include "tatrec/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tatrec {
namespace specfun {

namespace {

constexpr double kOverflowGuard = 1e280;
constexpr long double kPiLong = 3.141592653589793238462643383279502884L;
constexpr long double kEulerGamma = 0.5772156649015328606L;

// J_0, J_1, Y_0, Y_1 to ~1e-14 absolute: long-double power series below the
// crossover, Hankel asymptotic expansion above. The series' worst-case
// cancellation at x = 17 is ~5e5, harmless at long-double precision.
constexpr double kSeriesMax = 17.0;

struct Bessel01 {
    double j0, j1, y0, y1;
};

Bessel01 bessel01_series(double xd) {
    const long double x = xd;
    const long double q = x * x / 4.0L;
    const long double logterm = std::log(x / 2.0L) + kEulerGamma;

    // J_0 and the companion sum with harmonic numbers for Y_0.
    long double term = 1.0L, j0 = 1.0L, h = 0.0L, y0sum = 0.0L;
    for (int m = 1; m <= 60; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        h += 1.0L / m;
        j0 += term;
        y0sum += -term * h;  // (-1)^{m+1} H_m q^m / (m!)^2
        if (std::abs(term) < 1e-22L * std::abs(j0) && m > 8) break;
    }
    const long double y0 = (2.0L / kPiLong) * (logterm * j0 + y0sum);

    // J_1 and Y_1.
    term = 1.0L;
    long double j1sum = 1.0L;        // sum (-1)^m q^m / (m! (m+1)!)
    long double hsum = 1.0L;         // H_m + H_{m+1} at m=0 is 1
    long double y1sum = hsum * 1.0L; // sum (-1)^m (H_m+H_{m+1}) q^m/(m!(m+1)!)
    long double hm = 0.0L, hm1 = 1.0L;
    for (int m = 1; m <= 60; ++m) {
        term *= -q / (static_cast<long double>(m) * (m + 1));
        hm += 1.0L / m;
        hm1 += 1.0L / (m + 1);
        j1sum += term;
        y1sum += term * (hm + hm1);
        if (std::abs(term) < 1e-22L * std::abs(j1sum) && m > 8) break;
    }
    const long double j1 = (x / 2.0L) * j1sum;
    const long double y1 =
        (2.0L / kPiLong) * (logterm * j1 - 1.0L / x - (x / 4.0L) * y1sum);

    return {static_cast<double>(j0), static_cast<double>(j1),
            static_cast<double>(y0), static_cast<double>(y1)};
}

// Hankel asymptotic P/Q expansion, valid to ~1e-15 for x >= 17.
void hankel_pq(int nu, double xd, long double& p, long double& q) {
    const long double x = xd;
    const long double mu = 4.0L * nu * nu;
    long double term = 1.0L;
    p = 1.0L;
    q = 0.0L;
    long double prev = 1e30L;
    for (int k = 1; k <= 30; ++k) {
        const long double f = (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) /
                              (8.0L * k * x);
        term *= f;
        if (std::abs(term) > prev) break;  // asymptotic tail started growing
        prev = std::abs(term);
        if (k % 2 == 1) {
            q += (k % 4 == 1) ? term : -term;
        } else {
            p += (k % 4 == 2) ? -term : term;
        }
        if (std::abs(term) < 1e-22L) break;
    }
}

Bessel01 bessel01_asymptotic(double xd) {
    const long double x = xd;
    const long double amp = std::sqrt(2.0L / (kPiLong * x));
    Bessel01 out{};
    {
        long double p, q;
        hankel_pq(0, xd, p, q);
        const long double chi = x - kPiLong / 4.0L;
        out.j0 = static_cast<double>(amp * (p * std::cos(chi) - q * std::sin(chi)));
        out.y0 = static_cast<double>(amp * (p * std::sin(chi) + q * std::cos(chi)));
    }
    {
        long double p, q;
        hankel_pq(1, xd, p, q);
        const long double chi = x - 3.0L * kPiLong / 4.0L;
        out.j1 = static_cast<double>(amp * (p * std::cos(chi) - q * std::sin(chi)));
        out.y1 = static_cast<double>(amp * (p * std::sin(chi) + q * std::cos(chi)));
    }
    return out;
}

Bessel01 bessel01(double x) {
    return (x < kSeriesMax) ? bessel01_series(x) : bessel01_asymptotic(x);
}

// Miller's downward recurrence: fills out[0..kmax] with J_k(x), normalized
// by J_0 + 2 sum J_{2m} = 1. Stable for all orders and arguments.
void miller_j(int kmax, double x, std::vector<double>& out) {
    out.assign(kmax + 1, 0.0);
    if (x <= 0.0) {
        out[0] = 1.0;
        return;
    }
    if (x < 1e-6) {
        // Leading-order series; higher orders underflow to zero.
        out[0] = 1.0 - x * x / 4.0;
        double v = 1.0;
        for (int k = 1; k <= kmax; ++k) {
            v *= x / (2.0 * k);
            out[k] = v;
            if (v < 1e-320) break;
        }
        return;
    }
    const int base = std::max(kmax, static_cast<int>(std::ceil(x)));
    const int start = base + 50 + static_cast<int>(1.5 * std::sqrt(static_cast<double>(base)));
    double jkp1 = 0.0;   // trial J_{k+1}
    double jk = 1e-30;   // trial J_k, starting at k = start
    double sum = 0.0;    // trial J_0 + 2 sum_{even k >= 2} trial J_k
    for (int k = start; k >= 1; --k) {
        if (k <= kmax) out[k] = jk;
        if (k % 2 == 0) sum += 2.0 * jk;
        const double jkm1 = (2.0 * k / x) * jk - jkp1;
        jkp1 = jk;
        jk = jkm1;
        if (std::abs(jk) > kOverflowGuard) {
            jk *= 1e-280;
            jkp1 *= 1e-280;
            sum *= 1e-280;
            for (auto& v : out) v *= 1e-280;
        }
    }
    out[0] = jk;
    sum += jk;
    const double scale = 1.0 / sum;
    for (auto& v : out) v *= scale;
}

}  // namespace

double bessel_j(int order, double x) {
    if (order < 0) throw std::domain_error("bessel_j: negative order");
    if (x < 0.0) throw std::domain_error("bessel_j: negative argument");
    std::vector<double> tmp;
    miller_j(order, x, tmp);
    return tmp[order];
}

void bessel_j_array(int kmax, double x, std::vector<double>& out) {
    if (kmax < 0) throw std::domain_error("bessel_j_array: negative order");
    if (x < 0.0) throw std::domain_error("bessel_j_array: negative argument");
    miller_j(kmax, x, out);
}

void hankel1_array(int kmax, double x, std::vector<cdouble>& values,
                   std::vector<std::uint8_t>& overflow) {
    if (x <= 0.0) throw std::domain_error("hankel1: argument must be positive");
    std::vector<double> j;
    miller_j(kmax, x, j);
    values.assign(kmax + 1, cdouble{0.0, 0.0});
    overflow.assign(kmax + 1, 0);

    const Bessel01 b = bessel01(x);
    double ym = b.y0, yc = b.y1;
    values[0] = {j[0], ym};
    if (kmax >= 1) values[1] = {j[1], yc};
    bool saturated = false;
    for (int k = 2; k <= kmax; ++k) {
        if (!saturated) {
            const double yn = (2.0 * (k - 1) / x) * yc - ym;
            ym = yc;
            yc = yn;
            if (std::abs(yc) > kOverflowGuard) saturated = true;
        }
        if (saturated) {
            overflow[k] = 1;
            values[k] = {j[k], (yc < 0.0) ? -kOverflowGuard : kOverflowGuard};
        } else {
            values[k] = {j[k], yc};
        }
    }
}

Hankel1 hankel1(int order, double x) {
    if (order < 0) throw std::domain_error("hankel1: negative order");
    std::vector<cdouble> v;
    std::vector<std::uint8_t> o;
    hankel1_array(order, x, v, o);
    return {v[order], o[order] != 0};
}

namespace {

// Downward recurrence for spherical j, normalized by sum (2k+1) j_k^2 = 1;
// the overall sign is fixed against the closed forms of j_0 / j_1.
void miller_spherical_j(int smax, double x, std::vector<double>& out) {
    out.assign(smax + 1, 0.0);
    if (x <= 0.0) {
        out[0] = 1.0;
        return;
    }
    if (x < 1e-6) {
        out[0] = 1.0 - x * x / 6.0;
        double v = 1.0;
        for (int k = 1; k <= smax; ++k) {
            v *= x / (2.0 * k + 1.0);
            out[k] = v;
            if (v < 1e-320) break;
        }
        return;
    }
    const int base = std::max(smax, static_cast<int>(std::ceil(x)));
    const int start = base + 50 + static_cast<int>(1.5 * std::sqrt(static_cast<double>(base)));
    double jkp1 = 0.0, jk = 1e-30;
    double j0trial = 0.0, j1trial = 0.0;
    double sumsq = 0.0;
    for (int k = start; k >= 1; --k) {
        if (k <= smax) out[k] = jk;
        if (k == 1) j1trial = jk;
        sumsq += (2.0 * k + 1.0) * jk * jk;
        const double jkm1 = ((2.0 * k + 1.0) / x) * jk - jkp1;
        jkp1 = jk;
        jk = jkm1;
        if (std::abs(jk) > kOverflowGuard) {
            jk *= 1e-280;
            jkp1 *= 1e-280;
            j1trial *= 1e-280;
            sumsq *= 1e-560;
            for (auto& v : out) v *= 1e-280;
        }
    }
    out[0] = jk;
    j0trial = jk;
    sumsq += jk * jk;

    double s = 1.0 / std::sqrt(sumsq);
    const double ref0 = std::sin(x) / x;
    const double ref1 = std::sin(x) / (x * x) - std::cos(x) / x;
    const bool use1 = std::abs(ref0) < std::abs(ref1);
    const double trial = use1 ? j1trial : j0trial;
    const double ref = use1 ? ref1 : ref0;
    if (trial * ref < 0.0) s = -s;
    for (auto& v : out) v *= s;
}

}  // namespace

double spherical_j(int order, double x) {
    if (order < 0) throw std::domain_error("spherical_j: negative order");
    if (x < 0.0) throw std::domain_error("spherical_j: negative argument");
    std::vector<double> tmp;
    miller_spherical_j(order, x, tmp);
    return tmp[order];
}

void spherical_j_array(int smax, double x, std::vector<double>& out) {
    if (smax < 0) throw std::domain_error("spherical_j_array: negative order");
    if (x < 0.0) throw std::domain_error("spherical_j_array: negative argument");
    miller_spherical_j(smax, x, out);
}

void spherical_h1_array(int smax, double x, std::vector<cdouble>& values,
                        std::vector<std::uint8_t>& overflow) {
    if (x <= 0.0) throw std::domain_error("spherical_h1: argument must be positive");
    values.assign(smax + 1, cdouble{0.0, 0.0});
    overflow.assign(smax + 1, 0);
    // h_0 = -i e^{ix}/x; upward recurrence is stable (y-part dominates).
    const cdouble eix{std::cos(x), std::sin(x)};
    cdouble hm = cdouble{0.0, -1.0} * eix / x;
    values[0] = hm;
    if (smax == 0) return;
    cdouble hc = hm * (1.0 / x - cdouble{0.0, 1.0});
    values[1] = hc;
    bool saturated = false;
    for (int s = 2; s <= smax; ++s) {
        if (!saturated) {
            const cdouble hn = ((2.0 * s - 1.0) / x) * hc - hm;
            hm = hc;
            hc = hn;
            if (std::abs(hc.imag()) > kOverflowGuard) saturated = true;
        }
        if (saturated) {
            overflow[s] = 1;
            values[s] = {0.0, (hc.imag() < 0.0) ? -kOverflowGuard : kOverflowGuard};
        } else {
            values[s] = hc;
        }
    }
}

Hankel1 spherical_h1(int order, double x) {
    if (order < 0) throw std::domain_error("spherical_h1: negative order");
    std::vector<cdouble> v;
    std::vector<std::uint8_t> o;
    spherical_h1_array(order, x, v, o);
    return {v[order], o[order] != 0};
}

void legendre_column(int max_degree, double mu, std::vector<double>& out) {
    const int S = max_degree;
    out.assign(static_cast<std::size_t>(S + 1) * (S + 2) / 2, 0.0);
    auto idx = [](int s, int p) {
        return static_cast<std::size_t>(s) * (s + 1) / 2 + p;
    };
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    out[idx(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
    for (int p = 1; p <= S; ++p)
        out[idx(p, p)] = -std::sqrt((2.0 * p + 1.0) / (2.0 * p)) * sin_theta *
                         out[idx(p - 1, p - 1)];
    for (int p = 0; p < S; ++p)
        out[idx(p + 1, p)] = std::sqrt(2.0 * p + 3.0) * mu * out[idx(p, p)];
    for (int p = 0; p <= S; ++p) {
        for (int s = p + 2; s <= S; ++s) {
            const double a = std::sqrt((4.0 * s * s - 1.0) /
                                       (static_cast<double>(s - p) * (s + p)));
            const double b = std::sqrt(
                (2.0 * s + 1.0) * (s - 1.0 + p) * (s - 1.0 - p) /
                ((2.0 * s - 3.0) * static_cast<double>(s - p) * (s + p)));
            out[idx(s, p)] = a * mu * out[idx(s - 1, p)] - b * out[idx(s - 2, p)];
        }
    }
}

LegendreTable::LegendreTable(int max_degree, std::vector<double> mu_nodes)
    : max_degree_(max_degree), nodes_(std::move(mu_nodes)) {
    const std::size_t n_rows =
        static_cast<std::size_t>(max_degree + 1) * (max_degree + 2) / 2;
    values_ = Array2<double>(n_rows, nodes_.size());
    std::vector<double> col;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        legendre_column(max_degree, nodes_[j], col);
        for (std::size_t r = 0; r < n_rows; ++r) values_(r, j) = col[r];
    }
}

cdouble sph_harm(int degree, int order, double theta, double phi) {
    if (degree < 0 || std::abs(order) > degree)
        throw std::out_of_range("sph_harm: |order| must not exceed degree");
    std::vector<double> col;
    legendre_column(degree, std::cos(theta), col);
    const int p = std::abs(order);
    double pbar = col[static_cast<std::size_t>(degree) * (degree + 1) / 2 + p];
    if (order < 0 && (p % 2 == 1)) pbar = -pbar;
    return pbar * std::polar(1.0, order * phi);
}

double bessel_i0_scaled(double x) {
    if (x < 0.0) throw std::domain_error("bessel_i0_scaled: negative argument");
    if (x < 15.0) {
        long double term = 1.0L, sum = 1.0L;
        const long double q = static_cast<long double>(x) * x / 4.0L;
        for (int m = 1; m <= 80; ++m) {
            term *= q / (static_cast<long double>(m) * m);
            sum += term;
            if (term < 1e-20L * sum) break;
        }
        return static_cast<double>(sum * std::exp(-static_cast<long double>(x)));
    }
    // Asymptotic: I_0(x) ~ e^x/sqrt(2 pi x) (1 + 1/(8x) + 9/(128x^2) + ...)
    long double term = 1.0L, sum = 1.0L;
    long double prev = 1e30L;
    for (int k = 1; k <= 20; ++k) {
        const long double num = (2.0L * k - 1.0L) * (2.0L * k - 1.0L);
        term *= num / (8.0L * k * x);
        if (term > prev) break;
        prev = term;
        sum += term;
        if (term < 1e-18L) break;
    }
    return static_cast<double>(sum / std::sqrt(2.0L * kPiLong * x));
}

double bessel_i1_scaled(double x) {
    if (x < 0.0) throw std::domain_error("bessel_i1_scaled: negative argument");
    if (x < 15.0) {
        long double term = 1.0L, sum = 1.0L;
        const long double q = static_cast<long double>(x) * x / 4.0L;
        for (int m = 1; m <= 80; ++m) {
            term *= q / (static_cast<long double>(m) * (m + 1));
            sum += term;
            if (term < 1e-20L * sum) break;
        }
        return static_cast<double>((x / 2.0L) * sum *
                                   std::exp(-static_cast<long double>(x)));
    }
    // I_1(x) ~ e^x/sqrt(2 pi x) (1 - 3/(8x) - 15/(128x^2) - ...)
    long double term = 1.0L, sum = 1.0L;
    long double prev = 1e30L;
    for (int k = 1; k <= 20; ++k) {
        const long double num = 4.0L - (2.0L * k - 1.0L) * (2.0L * k - 1.0L);
        term *= -num / (8.0L * k * x);
        if (std::abs(term) > prev) break;
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-18L) break;
    }
    return static_cast<double>(sum / std::sqrt(2.0L * kPiLong * x));
}

}  // namespace specfun
}  // namespace tatrec

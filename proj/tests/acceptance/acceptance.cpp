// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dustmie/channel.hpp"
#include "dustmie/charged_mie.hpp"
#include "dustmie/cli/commands.hpp"
#include "dustmie/constants.hpp"
#include "dustmie/dust_field.hpp"
#include "dustmie/error.hpp"
#include "dustmie/specfun.hpp"
#include "grid.hpp"
#include "oracle/mp_oracle.hpp"

using namespace dustmie;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

const mie::ComplexValue kDefaultM{2.0, -0.025};

dust::DustLayerModel layer_with(double n0) {
    dust::DustLayerModel layer;
    layer.n0_per_m3 = n0;
    return layer;
}

mie::ParticleState template_with(std::uint64_t electrons) {
    mie::ParticleState p;
    p.electrons = electrons;
    p.refractive_index = kDefaultM;
    return p;
}

Outcome collision_frequency() {
    const double gamma = mie::collision_frequency(300.0);
    return {rel(gamma, 2.467e14) <= 0.01, fmt("gamma_s(300 K) = %.6e Hz vs 2.467e14 (tol 1%%)", gamma)};
}

Outcome altitude_fits() {
    struct Quoted {
        double h, mu, sigma;
    };
    const Quoted quoted[] = {{100.0, -2.417, 0.520}, {150.0, -2.617, 0.660}, {200.0, -2.834, 0.838}};
    bool ok = true;
    std::string detail;
    for (const auto& q : quoted) {
        const auto p = dust::lognormal_params(q.h);
        ok = ok && std::abs(p.mu - q.mu) <= 0.01 && std::abs(p.sigma - q.sigma) <= 0.01;
        detail += fmt("h=%.0f: (%.4f, %.4f)  ", q.h, p.mu, p.sigma);
    }
    return {ok, detail + "(tol 0.01)"};
}

Outcome neutral_oracle() {
    const double xs[] = {0.02, 0.1, 0.5, 1.0, 2.0, 10.0, 50.0};
    const mie::ComplexValue ms[] = {{1.33, 0.0}, {1.5, -0.1}, {2.0, -0.025}};
    double worst = 0.0;
    for (auto m : ms) {
        for (double x : xs) {
            const double got = mie::extinction_efficiency(x, m, {0.0, 0.0}, 1e-5).q_ext;
            worst = std::max(worst, rel(got, oracle::neutral_qext(x, m)));
        }
    }
    return {worst <= 1e-8, fmt("21 (x, m) pairs, max relative error %.3e (tol 1e-8)", worst)};
}

Outcome special_functions() {
    // 1000 points, n in [0, 120], |z| log-uniform in [1e-2, 100] at any phase
    // in the closed upper half-plane, plus the mirrored lower half-plane
    // points. Below the real axis psi and xi both grow like e^{|Im z|} and
    // the Wronskian is a difference of two terms of that squared size, so it
    // is checked relative to them there. The extended-range sequences cover
    // every point; the double API is checked wherever it is representable.
    const auto grid = testgrid::bessel_grid(1000, 120, 1e-2, 100.0, 100.0, 0xacce97);
    const specfun::ExtComplex I(0.0L, 1.0L);
    long double worst_upper = 0.0L, worst_lower = 0.0L, worst_r = 0.0L;
    double worst_double = 0.0;
    int double_points = 0;
    for (const auto& [n, z_raw] : grid) {
        for (const double side : {1.0, -1.0}) {
            const std::complex<double> z(z_raw.real(), side * std::abs(z_raw.imag()));
            const specfun::ExtComplex zl(z.real(), z.imag());
            const auto psi = specfun::riccati_psi_sequence(n, zl);
            const auto xi = specfun::riccati_xi_sequence(n, zl);
            const auto t1 = psi[n].value * xi[n].derivative;
            const auto t2 = psi[n].derivative * xi[n].value;
            const long double err = std::abs(t1 - t2 - I);
            if (side > 0) {
                worst_upper = std::max(worst_upper, err);
            } else {
                worst_lower = std::max(worst_lower, err / (1.0L + std::abs(t1) + std::abs(t2)));
            }

            const int m = std::max(n, 1);
            const auto j = specfun::sph_bessel_j_sequence(m + 1, zl);
            const auto rhs = static_cast<long double>(2 * m + 1) / zl * j[m];
            const long double scale = std::abs(j[m - 1]) + std::abs(j[m + 1]) + std::abs(rhs);
            if (scale > 0.0L) worst_r = std::max(worst_r, std::abs(j[m - 1] + j[m + 1] - rhs) / scale);

            if (side < 0) continue;
            try {
                const auto xd = specfun::riccati_xi(n, z);
                const auto pd = specfun::riccati_psi(n, z);
                if (std::abs(pd.value) < 1e-250) continue;
                const auto wd = pd.value * xd.derivative - pd.derivative * xd.value;
                worst_double = std::max(worst_double, std::abs(wd - std::complex<double>(0.0, 1.0)));
                ++double_points;
            } catch (const OverflowError&) {
            }
        }
    }
    const bool ok = worst_upper <= 1e-9L && worst_lower <= 1e-9L && worst_r <= 1e-9L && worst_double <= 1e-9;
    return {ok, fmt("Wronskian |W - i| max %.3e (Im z >= 0, 1000 pts), ", static_cast<double>(worst_upper)) +
                    fmt("%.3e via double API (%.0f representable pts), ", worst_double, double_points) +
                    fmt("scaled max %.3e (Im z < 0, 1000 pts); recurrence residual max %.3e (tol 1e-9)",
                        static_cast<double>(worst_lower), static_cast<double>(worst_r))};
}

Outcome charge_trends() {
    const auto wave = mie::WaveSpec::from_wavelength(1e-3);
    const double x = 0.02;
    mie::ParticleState p = template_with(0);
    p.radius_m = x * wave.wavelength() / (2.0 * kPi);
    std::vector<double> q;
    for (std::uint64_t ne : {0ull, 10ull, 100ull, 1000ull}) {
        p.electrons = ne;
        q.push_back(mie::extinction_efficiency(p, wave, mie::ChargeMode::full).q_ext);
    }
    bool ok = q[0] < q[1] && q[1] < q[2] && q[2] < q[3];
    std::string detail = fmt("Q_ext(x=0.02, Ne=0/10/100/1000) = %.12e %.12e %.12e %.12e; ", q[0], q[1], q[2], q[3]);

    const auto f03 = mie::WaveSpec::from_frequency(0.3e12);
    for (double n0 : {1.0, 1e5}) {
        for (double h : {0.0, 100.0, 200.0}) {
            const double k0 = channel::dust_attenuation_coefficient(h, f03, layer_with(n0), template_with(0));
            const double k6 = channel::dust_attenuation_coefficient(h, f03, layer_with(n0), template_with(1000000));
            ok = ok && k6 > k0;
            if (n0 == 1e5 && h == 100.0) detail += fmt("k_dust(0.3 THz, 100 m, N0=1e5): Ne=0 %.9e, Ne=1e6 %.9e dB/km", k0, k6);
        }
    }
    return {ok, detail};
}

Outcome frequency_altitude_trends() {
    const auto f03 = mie::WaveSpec::from_frequency(0.3e12);
    const auto f1 = mie::WaveSpec::from_frequency(1e12);
    const auto layer = layer_with(1e5);
    const auto neutral = template_with(0);

    bool freq_ok = true;
    std::vector<channel::LinkGeometry> geometries(3);
    geometries[0].h0_m = 100.0;
    geometries[1].h0_m = 0.0, geometries[1].theta_rad = 0.2;
    geometries[2].h0_m = 0.0, geometries[2].theta_rad = 0.5 * kPi, geometries[2].d_m = 200.0;
    std::string detail = "slant loss 1 THz vs 0.3 THz:";
    for (const auto& g : geometries) {
        const double lo = channel::slant_dust_loss(g, f03, layer, neutral);
        const double hi = channel::slant_dust_loss(g, f1, layer, neutral);
        freq_ok = freq_ok && hi >= lo;
        detail += fmt(" %.4g>=%.4g", hi, lo);
    }

    bool alt_ok = true;
    detail += "; k_dust(100 m) vs k_dust(200 m):";
    for (const auto* w : {&f03, &f1}) {
        const double k100 = channel::dust_attenuation_coefficient(100.0, *w, layer, neutral);
        const double k200 = channel::dust_attenuation_coefficient(200.0, *w, layer, neutral);
        const bool ok = k100 >= k200;
        alt_ok = alt_ok && ok;
        detail += fmt(" %.1f THz %.4f vs %.4f dB/km", w->frequency() / 1e12, k100, k200) + (ok ? " ok;" : " VIOLATED;");
    }
    detail += freq_ok ? " frequency clause holds," : " frequency clause fails,";
    detail += alt_ok ? " altitude clause holds" : " altitude clause fails (N0 is altitude-independent here)";
    return {freq_ok && alt_ok, detail};
}

// Fixed-grid trapezoid in linear r built from the kernel primitives.
double trapezoid_k_dust(double h, const mie::WaveSpec& wave, double n0, std::uint64_t electrons, int points) {
    const auto support = dust::integration_support(h);
    const double step = (support.upper_mm - support.lower_mm) / (points - 1);
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const double r = support.lower_mm + i * step;
        mie::ParticleState p = template_with(electrons);
        p.radius_m = std::min(r * 1e-3, mie::kMaxRadius);
        const double c_ext = mie::extinction_efficiency(p, wave, mie::ChargeMode::full).c_ext;
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        sum += w * n0 * dust::size_pdf(r, h) * c_ext;
    }
    return channel::kDustPrefactor * sum * step;
}

// Midpoint slabs along the path. Each slab's k_dust is a trapezoid in ln r
// over a shared table of C_ext, which does not depend on altitude.
double slab_slant_loss(const channel::LinkGeometry& g, const mie::WaveSpec& wave, double n0,
                       std::uint64_t electrons, const channel::AbsorptionProfile& kabs, int slabs) {
    const double top = g.h0_m + g.d_m * std::sin(g.theta_rad);
    const auto s_lo = dust::integration_support(std::min(g.h0_m, top));
    const auto s_hi = dust::integration_support(std::max(g.h0_m, top));
    const double t0 = std::log(std::min(s_lo.lower_mm, s_hi.lower_mm));
    const double t1 = std::log(std::max(s_lo.upper_mm, s_hi.upper_mm));
    const int nodes = 6001;
    const double dt = (t1 - t0) / (nodes - 1);
    std::vector<double> t(nodes), weight(nodes);
    for (int i = 0; i < nodes; ++i) {
        t[i] = t0 + i * dt;
        const double r_mm = std::exp(t[i]);
        mie::ParticleState p = template_with(electrons);
        p.radius_m = std::clamp(r_mm * 1e-3, mie::kMinRadius, mie::kMaxRadius);
        const double c_ext = mie::extinction_efficiency(p, wave, mie::ChargeMode::full).c_ext;
        weight[i] = c_ext * ((i == 0 || i == nodes - 1) ? 0.5 : 1.0) * dt;
    }
    const double width = g.d_m / slabs;
    double total = 0.0;
    for (int k = 0; k < slabs; ++k) {
        const double h = g.h0_m + (k + 0.5) * width * std::sin(g.theta_rad);
        const auto lp = dust::lognormal_params(h);
        // p(r) r dr = N(t; mu, sigma) dt
        const double norm = 1.0 / (lp.sigma * std::sqrt(2.0 * kPi));
        double k_dust = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double u = (t[i] - lp.mu) / lp.sigma;
            if (std::abs(u) > 8.0) continue;
            k_dust += weight[i] * norm * std::exp(-0.5 * u * u);
        }
        total += (kabs.at(h) + channel::kDustPrefactor * n0 * k_dust) * width / 1000.0;
    }
    return total;
}

Outcome quadrature_oracles() {
    struct KCase {
        double h, f;
        std::uint64_t ne;
    };
    const KCase kcases[] = {{100.0, 1e12, 0}, {200.0, 0.3e12, 1000000}, {0.0, 3e12, 10}};
    double worst_k = 0.0;
    std::string detail = "k_dust rel err:";
    for (const auto& c : kcases) {
        const auto wave = mie::WaveSpec::from_frequency(c.f);
        const double adaptive = channel::dust_attenuation_coefficient(c.h, wave, layer_with(1e5), template_with(c.ne));
        const double brute = trapezoid_k_dust(c.h, wave, 1e5, c.ne, 100000);
        worst_k = std::max(worst_k, rel(adaptive, brute));
        detail += fmt(" %.2e", rel(adaptive, brute));
    }

    struct SCase {
        channel::LinkGeometry g;
        double f;
        std::uint64_t ne;
        channel::AbsorptionProfile kabs;
    };
    std::vector<SCase> scases(3);
    scases[0].g.h0_m = 0.0, scases[0].g.theta_rad = 0.5 * kPi, scases[0].g.d_m = 200.0;
    scases[0].f = 1e12, scases[0].ne = 0;
    scases[0].kabs = channel::AbsorptionProfile({{0.0, 3.0}, {40.0, 1.0}, {150.0, 0.0}});
    scases[1].g.h0_m = 50.0, scases[1].g.theta_rad = 0.3, scases[1].g.d_m = 500.0;
    scases[1].f = 0.3e12, scases[1].ne = 1000000;
    scases[2].g.h0_m = 100.0, scases[2].g.theta_rad = 0.05, scases[2].g.d_m = 1000.0;
    scases[2].f = 3e12, scases[2].ne = 10;
    double worst_s = 0.0;
    detail += "; slant rel err:";
    for (const auto& c : scases) {
        const auto wave = mie::WaveSpec::from_frequency(c.f);
        const double adaptive = channel::slant_dust_loss(c.g, wave, layer_with(1e5), template_with(c.ne), c.kabs);
        const double brute = slab_slant_loss(c.g, wave, 1e5, c.ne, c.kabs, 100000);
        worst_s = std::max(worst_s, rel(adaptive, brute));
        detail += fmt(" %.2e", rel(adaptive, brute));
    }
    return {worst_k <= 1e-4 && worst_s <= 1e-4, detail + " (tol 1e-4)"};
}

Outcome normalization() {
    double worst = 0.0;
    std::string detail;
    for (double h : {0.0, 100.0, 150.0, 200.0}) {
        // Trapezoid in t = ln r over +-12 sigma, 1e5 nodes: p(r) r dt.
        const auto lp = dust::lognormal_params(h);
        const int nodes = 100000;
        const double t0 = lp.mu - 12.0 * lp.sigma, t1 = lp.mu + 12.0 * lp.sigma;
        const double dt = (t1 - t0) / (nodes - 1);
        double sum = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double r = std::exp(t0 + i * dt);
            sum += ((i == 0 || i == nodes - 1) ? 0.5 : 1.0) * dust::size_pdf(r, h) * r * dt;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
        detail += fmt("h=%.0f: %.12f  ", h, sum);
    }
    return {worst <= 1e-6, detail + "(tol 1e-6)"};
}

std::string run_pathloss_to(const std::filesystem::path& out) {
    const std::string path = out.string();
    const char* argv[] = {"dustmie", "pathloss", "--seed", "4242", "--set", "link.path_loss_exponent=2.2",
                          "--set", "link.shadow_sigma_db=3", "--set", "dust.n0_per_m3=1e5", "--set",
                          "link.tx_altitude_m=100", "--set", "link.elevation_rad=0.1", "--out", path.c_str()};
    std::ostringstream sink_out, sink_err;
    if (cli::run_cli(static_cast<int>(std::size(argv)), argv, sink_out, sink_err) != 0) return {};
    std::ifstream in(out, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "dustmie_acceptance";
    std::filesystem::create_directories(dir);
    const std::string a = run_pathloss_to(dir / "a.csv");
    const std::string b = run_pathloss_to(dir / "b.csv");
    const bool same = !a.empty() && a == b;

    double worst = 0.0;
    std::string where;
    const double gamma = mie::collision_frequency(300.0);
    for (int i = 0; i <= 20; ++i) {
        const double f = 1e11 * std::pow(100.0, i / 20.0);  // 0.1 .. 10 THz
        const auto wave = mie::WaveSpec::from_frequency(f);
        for (double r : {1e-6, 2e-5, 1e-4, 1e-3}) {
            for (std::uint64_t ne : {10ull, 1000ull, 1000000ull}) {
                const double x = mie::scale_parameter(r, wave.wavelength());
                const double ws = mie::surface_plasma_frequency(ne, r);
                const double w = wave.angular_frequency();
                const auto full = mie::charged_coefficient(x, w, ws, gamma, mie::ChargeMode::full);
                const auto approx = mie::charged_coefficient(x, w, ws, gamma, mie::ChargeMode::approx);
                const double qf = mie::extinction_efficiency(x, kDefaultM, full, r).q_ext;
                const double qa = mie::extinction_efficiency(x, kDefaultM, approx, r).q_ext;
                if (rel(qa, qf) > worst) {
                    worst = rel(qa, qf);
                    where = fmt(" at f=%.3g Hz, r=%.3g m, Ne=%.0f", f, r, static_cast<double>(ne));
                }
            }
        }
    }
    return {same && worst < 0.01,
            std::string(same ? "pathloss files byte-identical" : "pathloss files DIFFER") +
                fmt("; approx vs full Q_ext max relative difference %.3e", worst) + where +
                " over f in [0.1, 10] THz, r in {1e-6, 2e-5, 1e-4, 1e-3} m, Ne in {10, 1e3, 1e6} (tol 1e-2)"};
}

Outcome limits() {
    bool zero = true;
    for (double x : {0.02, 0.5, 2.0, 10.0, 50.0}) {
        zero = zero && mie::extinction_efficiency(x, {1.0, 0.0}, {0.0, 0.0}, 1e-5).q_ext == 0.0;
    }
    double worst = 0.0;
    std::string detail = zero ? "Q_ext(m=1) == 0 exactly; " : "Q_ext(m=1) NOT zero; ";
    for (mie::ComplexValue m : {mie::ComplexValue{1.33, 0.0}, mie::ComplexValue{1.5, -0.1}, kDefaultM}) {
        const double q = oracle::neutral_qext(50.0, m);
        const double ours = mie::extinction_efficiency(50.0, m, {0.0, 0.0}, 1e-5).q_ext;
        worst = std::max({worst, rel(q, 2.0), rel(ours, 2.0)});
        detail += fmt("x=50 oracle %.6f ours %.6f; ", q, ours);
    }
    return {zero && worst <= 0.1, detail + fmt("max |Q/2 - 1| = %.4f (tol 0.1)", worst)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "collision frequency", collision_frequency},
        {2, "altitude fits", altitude_fits},
        {3, "neutral-limit oracle", neutral_oracle},
        {4, "special-function suite", special_functions},
        {5, "charge trends", charge_trends},
        {6, "frequency/altitude trends", frequency_altitude_trends},
        {7, "quadrature oracles", quadrature_oracles},
        {8, "size pdf normalization", normalization},
        {9, "determinism and g_e approximation", determinism},
        {10, "limits", limits},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("criterion %2d %s: %s [%.1f s] %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}

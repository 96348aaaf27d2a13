#include "dustmie/quadrature.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dustmie/error.hpp"

namespace dustmie::quad {
namespace {

struct Panel {
    double a, m, b;
    double fa, fm, fb;
    double whole;
};

class Integrator {
public:
    Integrator(const std::function<double(double)>& f, const SimpsonOptions& options) : f_(f), opt_(options) {}

    double eval(double x) {
        if (++evaluations_ > opt_.max_evaluations) {
            throw QuadratureError("adaptive Simpson exceeded " + std::to_string(opt_.max_evaluations) +
                                  " integrand evaluations");
        }
        const double y = f_(x);
        if (!std::isfinite(y)) {
            throw QuadratureError("integrand is not finite at " + std::to_string(x));
        }
        return y;
    }

    double refine(const Panel& p, double eps, int depth) {
        const double lm = 0.5 * (p.a + p.m);
        const double rm = 0.5 * (p.m + p.b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        const double delta = left + right - p.whole;
        if (std::abs(delta) <= 15.0 * eps) {
            return left + right + delta / 15.0;
        }
        if (depth >= opt_.max_depth) {
            throw QuadratureError("adaptive Simpson reached maximum depth " + std::to_string(opt_.max_depth) +
                                  " on [" + std::to_string(p.a) + ", " + std::to_string(p.b) + "]");
        }
        return refine({p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * eps, depth + 1) +
               refine({p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * eps, depth + 1);
    }

    long evaluations() const { return evaluations_; }

private:
    const std::function<double(double)>& f_;
    SimpsonOptions opt_;
    long evaluations_ = 0;
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const SimpsonOptions& options) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("integration bounds must be finite");
    }
    if (a == b) {
        return {};
    }
    if (options.initial_panels < 1 || !(options.rel_tol > 0.0)) {
        throw DomainError("invalid quadrature options");
    }
    Integrator integrator(f, options);
    const int panels = options.initial_panels;
    const double width = (b - a) / panels;

    std::vector<Panel> coarse;
    coarse.reserve(static_cast<std::size_t>(panels));
    double fa = integrator.eval(a);
    double magnitude = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * width;
        const double pb = i + 1 == panels ? b : a + (i + 1) * width;
        const double pm = 0.5 * (pa + pb);
        const double fm = integrator.eval(pm);
        const double fb = integrator.eval(pb);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        coarse.push_back({pa, pm, pb, fa, fm, fb, whole});
        magnitude += std::abs(whole);
        fa = fb;
    }

    QuadratureResult result;
    if (magnitude == 0.0) {
        // Every coarse node vanished; probe the quarter points before
        // declaring the integral zero.
        for (const auto& p : coarse) {
            magnitude += (std::abs(integrator.eval(0.5 * (p.a + p.m))) +
                          std::abs(integrator.eval(0.5 * (p.m + p.b)))) * (p.b - p.a);
        }
        if (magnitude == 0.0) {
            result.evaluations = integrator.evaluations();
            return result;
        }
    }
    const double eps = options.rel_tol * magnitude / panels;
    double total = 0.0;
    for (const auto& p : coarse) {
        total += integrator.refine(p, eps, 0);
    }
    result.value = total;
    result.evaluations = integrator.evaluations();
    return result;
}

}  // namespace dustmie::quad

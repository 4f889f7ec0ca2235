#include "xscreen/power.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xscreen/sensbound.hpp"

namespace xscreen {

namespace {

using quad = boost::math::quadrature::gauss_kronrod<double, 15>;

void check_alpha(double alpha) {
    if (!(alpha > 0) || !(alpha < 1))
        throw input_error("alpha must lie in (0, 1)");
}

}  // namespace

double bonferroni_power(const AsymptoticParams& params) {
    check_alpha(params.alpha);
    if (params.k < 1)
        throw input_error("hypothesis count must be >= 1");
    if (!std::isfinite(params.ncp))
        throw input_error("noncentrality must be finite");
    const double z = norm_quantile(params.alpha / (2.0 * static_cast<double>(params.k)));
    return 1 - norm_cdf(-std::sqrt(2.0) * params.ncp - z);
}

double cross_screen_power(double ncp, double alpha) {
    check_alpha(alpha);
    if (!std::isfinite(ncp))
        throw input_error("noncentrality must be finite");
    const double lambda1 = norm_quantile(1 - alpha / 2) - ncp;
    const double lambda2 = norm_quantile(1 - alpha) - ncp;
    const double phi_l2 = norm_cdf(lambda2);
    auto integrand = [&](double y) {
        return norm_pdf(y) * std::max(0.0, norm_cdf(y) - phi_l2);
    };
    const double a = std::max(lambda1, -10.0);
    const double b = std::max(10.0, lambda1 + 10.0);
    return 2.0 * quad::integrate(integrand, a, b, 12, 1e-9);
}

std::size_t ttest_pairs_required(double tau, std::size_t k, double power, double alpha) {
    check_alpha(alpha);
    if (!(tau > 0))
        throw input_error("effect size tau must be positive");
    if (k < 1)
        throw input_error("hypothesis count must be >= 1");
    if (!(power > 0) || !(power < 1))
        throw input_error("target power must lie in (0, 1)");

    const double level = alpha / static_cast<double>(k);
    auto power_at = [&](std::size_t i_pairs) {
        const double df = static_cast<double>(i_pairs) - 1;
        const boost::math::students_t_distribution<double> t_null(df);
        const double crit = boost::math::quantile(t_null, 1 - level / 2);
        const boost::math::non_central_t_distribution<double> t_alt(
            df, tau * std::sqrt(static_cast<double>(i_pairs)));
        return boost::math::cdf(boost::math::complement(t_alt, crit)) +
               boost::math::cdf(t_alt, -crit);
    };

    // normal-theory starting point, then walk to the boundary
    const double z = norm_quantile(1 - level / 2) + norm_quantile(power);
    std::size_t i = std::max<std::size_t>(2, static_cast<std::size_t>((z / tau) * (z / tau)));
    if (power_at(i) >= power) {
        while (i > 2 && power_at(i - 1) >= power)
            --i;
    } else {
        while (power_at(i) < power) {
            if (i > 100000000)
                throw input_error("required sample size exceeds search limit");
            ++i;
        }
    }
    return i;
}

double naive_selection_prob(double tau, std::size_t k, std::size_t i_pairs) {
    if (k < 1 || i_pairs < 1)
        throw input_error("counts must be >= 1");
    if (!std::isfinite(tau))
        throw input_error("tau must be finite");
    if (k == 1)
        return 1.0;
    const double shift = tau * std::sqrt(static_cast<double>(i_pairs));
    const double km1 = static_cast<double>(k - 1);
    auto integrand = [&](double u) {
        return std::pow(norm_cdf(u), km1) * norm_pdf(u - shift);
    };
    return quad::integrate(integrand, shift - 10.0, shift + 10.0, 12, 1e-9);
}

}  // namespace xscreen

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "codep/copula.hpp"
#include "codep/garch.hpp"
#include "codep/ingest.hpp"
#include "codep/rng.hpp"

namespace codep {

/// Two-regime synthetic market: GARCH-t marginals coupled by a high-
/// dependence t copula in period 1 and a weak Clayton copula in period 2,
/// with announcement intensity dropping at the regime change. Every pairwise
/// rank correlation and tail-dependence coefficient is strictly lower in
/// period 2 by construction.
struct SyntheticSpec {
    int n_assets = 4;
    int period1_days = 1250;  // business days
    int period2_days = 1250;
    Date start{2001, 1, 1};
    double t_copula_nu = 4.0;
    double clayton_theta = 0.25;
    double announce_rate_1 = 5.0;  // expected announcements per quarter
    double announce_rate_2 = 1.0;
    std::uint64_t seed = 20240101;
};

struct SyntheticData {
    std::vector<PriceSeries> prices;
    AnnouncementSeries announcements;
    Date change_date;
    Eigen::MatrixXd period1_corr;
    std::vector<GarchSpec> marginal_specs;
    std::vector<GarchParams> marginal_params;
};

namespace synth_detail {
inline std::vector<Date> business_days(Date start, int count) {
    std::vector<Date> out;
    Date d = start;
    while (static_cast<int>(out.size()) < count) {
        if (!d.is_weekend()) out.push_back(d);
        d = d.next();
    }
    return out;
}
}  // namespace synth_detail

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    const int d = spec.n_assets;
    if (d < 2) throw std::invalid_argument("synthetic: need >= 2 assets");
    const Rng master(spec.seed);

    // One-factor correlation structure keeps period 1 comfortably PD with
    // every pair strongly dependent.
    Eigen::VectorXd loadings(d);
    for (int j = 0; j < d; ++j) loadings[j] = 0.95 - 0.07 * j;
    Eigen::MatrixXd R1 = loadings * loadings.transpose();
    for (int j = 0; j < d; ++j) R1(j, j) = 1.0;

    CopulaParams cop1;
    cop1.corr = R1;
    cop1.nu = spec.t_copula_nu;
    cop1.delta = Eigen::VectorXd::Zero(d);
    const CopulaParams cop2 = CopulaParams::archimedean(spec.clayton_theta);

    // Heterogeneous GARCH-t / skew-t marginals at daily-return scale.
    std::vector<GarchSpec> mspecs;
    std::vector<GarchParams> mparams;
    for (int j = 0; j < d; ++j) {
        GarchSpec gs{1, 1, InnovationSpec{}};
        GarchParams gp;
        gp.alpha = {0.05 + 0.01 * (j % 2)};
        gp.beta = {0.92 - 0.01 * (j % 3)};
        const double uncond_sd = 0.018 + 0.004 * j;
        gp.alpha0 = uncond_sd * uncond_sd * (1.0 - gp.alpha[0] - gp.beta[0]);
        switch (j % 4) {
            case 0:
                gs.innovation = {InnovationFamily::StudentT, 6.0, 1.0};
                gp.nu = 6.0;
                break;
            case 1:
                gs.innovation = {InnovationFamily::StudentT, 8.0, 1.0};
                gp.nu = 8.0;
                break;
            case 2:
                gs.innovation = {InnovationFamily::SkewT, 6.0, 0.85};
                gp.nu = 6.0;
                gp.lambda = 0.85;
                break;
            default:
                gs.innovation = {InnovationFamily::SkewT, 10.0, 1.15};
                gp.nu = 10.0;
                gp.lambda = 1.15;
                break;
        }
        mspecs.push_back(gs);
        mparams.push_back(gp);
    }

    const int total_days = spec.period1_days + spec.period2_days;
    const auto days = synth_detail::business_days(spec.start, total_days + 1);
    const Date change_date = days[spec.period1_days + 1];

    // Copula draws per period, then push through each marginal's innovation
    // quantile and volatility recursion.
    Rng cop_rng = master.derive("copula");
    const Eigen::MatrixXd u1 =
        sample_copula(CopulaFamily::StudentT, cop1, d, spec.period1_days, cop_rng);
    const Eigen::MatrixXd u2 =
        sample_copula(CopulaFamily::Clayton, cop2, d, spec.period2_days, cop_rng);

    SyntheticData out;
    out.change_date = change_date;
    out.period1_corr = R1;
    out.marginal_specs = mspecs;
    out.marginal_params = mparams;

    for (int j = 0; j < d; ++j) {
        InnovationSpec inn = mspecs[j].innovation;
        inn.nu = mparams[j].nu;
        inn.lambda = mparams[j].lambda;
        const InnovationDist dist(inn);
        const double uncond = mparams[j].unconditional_variance();
        double prev_y2 = uncond, prev_sig2 = uncond;
        std::vector<double> returns(total_days);
        for (int t = 0; t < total_days; ++t) {
            const double sig2 =
                mparams[j].alpha0 + mparams[j].alpha[0] * prev_y2 + mparams[j].beta[0] * prev_sig2;
            const double u = t < spec.period1_days ? u1(t, j) : u2(t - spec.period1_days, j);
            const double y = std::sqrt(sig2) * dist.quantile(u);
            returns[t] = y;
            prev_y2 = y * y;
            prev_sig2 = sig2;
        }
        PriceSeries ps;
        ps.asset_id = std::string("A") + std::to_string(j + 1);
        ps.dates = days;
        ps.prices.resize(total_days + 1);
        ps.prices[0] = 40.0 + 15.0 * j;
        for (int t = 0; t < total_days; ++t) ps.prices[t + 1] = ps.prices[t] * std::exp(returns[t]);
        out.prices.push_back(std::move(ps));
    }

    // Bernoulli announcements; intensity drops at the change date.
    Rng ann_rng = master.derive("announce");
    const double q_days = 252.0 / 4.0;
    out.announcements.dates = days;
    out.announcements.indicator.resize(days.size());
    for (std::size_t i = 0; i < days.size(); ++i) {
        const double rate =
            days[i] < change_date ? spec.announce_rate_1 : spec.announce_rate_2;
        out.announcements.indicator[i] = ann_rng.uniform() < rate / q_days ? 1 : 0;
    }
    return out;
}

/// Writes the synthetic dataset as the CSV formats the loader accepts.
inline void write_synthetic(const SyntheticData& data, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        csv::Writer w(dir + "/prices.csv");
        w.field(std::string("date"));
        for (const auto& s : data.prices) w.field(s.asset_id);
        w.endrow();
        const auto& dates = data.prices[0].dates;
        for (std::size_t t = 0; t < dates.size(); ++t) {
            w.field(dates[t].to_string());
            for (const auto& s : data.prices) w.field(s.prices[t]);
            w.endrow();
        }
        w.commit();
    }
    {
        csv::Writer w(dir + "/announcements.csv");
        w.field(std::string("date")).field(std::string("indicator")).endrow();
        for (std::size_t i = 0; i < data.announcements.dates.size(); ++i) {
            w.field(data.announcements.dates[i].to_string());
            w.field(data.announcements.indicator[i]);
            w.endrow();
        }
        w.commit();
    }
}

}  // namespace codep

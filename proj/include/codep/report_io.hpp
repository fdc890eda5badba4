#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "codep/pipeline.hpp"

namespace codep {

namespace report_detail {

inline std::string nan_empty(double v) { return std::isfinite(v) ? csv::format_double(v) : ""; }

inline void emit_marginal_tables(const AnalysisReport& r, const std::string& dir) {
    csv::Writer bic(dir + "/marginal_bic.csv");
    bic.raw("period,asset,family,p,q,bic,loglik,selected\n");
    csv::Writer par(dir + "/marginal_params.csv");
    par.raw("period,asset,model,param,estimate,std_error\n");
    for (const auto& pr : r.periods) {
        if (!pr.parametric) continue;
        const auto& panel_assets = r.panel->asset_ids;
        for (std::size_t j = 0; j < pr.parametric->marginals.size(); ++j) {
            const GarchSelection& sel = pr.parametric->marginals[j];
            for (const auto& cell : sel.table) {
                bic.field(pr.period).field(panel_assets[j]);
                bic.field(std::string(to_string(cell.spec.innovation.family)));
                bic.field(cell.spec.p).field(cell.spec.q);
                if (cell.ok) {
                    bic.field(cell.bic).field(cell.loglik);
                    const bool is_best = cell.spec.p == sel.best.spec.p &&
                                         cell.spec.q == sel.best.spec.q &&
                                         cell.spec.innovation.family ==
                                             sel.best.spec.innovation.family;
                    bic.field(is_best ? 1 : 0);
                } else {
                    bic.field(std::string("")).field(std::string("")).field(0);
                }
                bic.endrow();
            }
            for (std::size_t k = 0; k < sel.best.param_names.size(); ++k) {
                par.field(pr.period).field(panel_assets[j]).field(sel.best.spec.label());
                par.field(sel.best.param_names[k]).field(sel.best.param_values[k]);
                par.field(nan_empty(sel.best.std_errors[k]));
                par.endrow();
            }
        }
    }
    bic.commit();
    par.commit();
}

inline void emit_copula_tables(const AnalysisReport& r, const std::string& dir) {
    csv::Writer par(dir + "/copula_params.csv");
    par.raw("period,mode,scope,family,param,estimate,std_error\n");
    for (const auto& pr : r.periods) {
        csv::Writer bic(dir + "/copula_bic_p" + std::to_string(pr.period) + ".csv");
        bic.raw("mode,scope,family,bic,loglik,selected\n");
        auto emit_mode = [&](const TwoStepFit& ts) {
            const std::string mode =
                ts.mode == PseudoSource::ParametricPit ? "parametric" : "semiparametric";
            auto emit_sel = [&](const std::string& scope, const CopulaSelection& sel) {
                for (const auto& cell : sel.table) {
                    bic.field(mode).field(scope).field(std::string(to_string(cell.family)));
                    if (cell.ok) {
                        bic.field(cell.bic).field(cell.loglik);
                        bic.field(cell.family == sel.best.family ? 1 : 0);
                    } else {
                        bic.field(std::string("")).field(std::string("")).field(0);
                    }
                    bic.endrow();
                }
                for (std::size_t k = 0; k < sel.best.param_names.size(); ++k) {
                    par.field(pr.period).field(mode).field(scope);
                    par.field(std::string(to_string(sel.best.family)));
                    par.field(sel.best.param_names[k]).field(sel.best.param_values[k]);
                    par.field(k < sel.best.std_errors.size() ? nan_empty(sel.best.std_errors[k])
                                                             : std::string(""));
                    par.endrow();
                }
            };
            emit_sel("joint", ts.joint);
            for (const auto& pf : ts.pairs)
                emit_sel(r.panel->asset_ids[pf.i] + "-" + r.panel->asset_ids[pf.j], pf.selection);
        };
        if (pr.parametric) emit_mode(*pr.parametric);
        if (pr.semiparametric) emit_mode(*pr.semiparametric);
        bic.commit();
    }
    par.commit();
}

inline void write_matrix_block(std::ostream& os, const Eigen::MatrixXd& m,
                               const std::vector<std::string>& names, const char* title) {
    os << title << "\n";
    for (std::size_t i = 1; i < names.size(); ++i) {
        os << "  " << names[i] << ":";
        for (std::size_t j = 0; j < i; ++j)
            os << " " << names[j] << "=" << csv::format_double(m(i, j));
        os << "\n";
    }
}

}  // namespace report_detail

/// Writes the canonical table set. Tables whose stage was skipped are left
/// absent and listed in report.txt. All writes are atomic (write + rename).
inline void emit_report(const AnalysisReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    if (!r.diagnostics.empty()) {
        csv::Writer w(dir + "/descriptives.csv");
        w.raw("asset,mean,sd,max,min,skewness,kurtosis\n");
        for (const auto& ad : r.diagnostics) {
            w.field(ad.asset).field(ad.stats.mean).field(ad.stats.sd).field(ad.stats.max);
            w.field(ad.stats.min).field(ad.stats.skewness).field(ad.stats.kurtosis);
            w.endrow();
        }
        w.commit();
    }

    if (r.changepoint) {
        csv::Writer w(dir + "/changepoint.csv");
        w.raw("boundary_date,t_stat,p_value\n");
        for (const auto& row : r.changepoint->table) {
            w.field(row.boundary.to_string()).field(row.t_stat).field(row.p_value);
            w.endrow();
        }
        w.commit();
    }

    const bool have_marginals =
        !r.periods.empty() &&
        std::any_of(r.periods.begin(), r.periods.end(),
                    [](const PeriodResults& p) { return p.parametric.has_value(); });
    if (have_marginals) report_detail::emit_marginal_tables(r, dir);

    const bool have_copulas =
        !r.periods.empty() &&
        std::any_of(r.periods.begin(), r.periods.end(), [](const PeriodResults& p) {
            return (p.parametric && !p.parametric->pairs.empty()) ||
                   (p.semiparametric && !p.semiparametric->pairs.empty());
        });
    if (have_copulas) report_detail::emit_copula_tables(r, dir);

    if (!r.functionals.empty()) {
        csv::Writer w(dir + "/functionals.csv");
        w.raw(
            "period,pair,mode,family,rho_s,rho_s_se,tau,tau_se,lambda_l,lambda_l_se,"
            "lambda_u,lambda_u_se,delta2,delta2_se,h2,h2_se,s_rho,boot_replicates,"
            "boot_failures\n");
        for (const auto& f : r.functionals) {
            w.field(f.period).field(f.pair);
            w.field(std::string(f.source == PseudoSource::ParametricPit ? "parametric"
                                                                        : "semiparametric"));
            w.field(std::string(to_string(f.family)));
            auto se = [&](double v) {
                return f.bootstrapped ? csv::format_double(v) : std::string("");
            };
            w.field(f.fs.rho_s.value).field(se(f.se_rho_s));
            w.field(f.fs.tau.value).field(se(f.se_tau));
            w.field(f.fs.tails.lambda_l).field(se(f.se_lambda_l));
            w.field(f.fs.tails.lambda_u).field(se(f.se_lambda_u));
            w.field(f.fs.delta2.value).field(se(f.se_delta2));
            w.field(f.fs.h2.value).field(se(f.se_h2));
            w.field(f.fs.s_rho.value);
            w.field(f.boot_used).field(f.boot_failures);
            w.endrow();
        }
        w.commit();
    }

    if (!r.independence.empty()) {
        csv::Writer w(dir + "/independence.csv");
        w.raw("left,right,distance_correlation,p_value,permutations\n");
        for (const auto& row : r.independence) {
            w.field(row.left).field(row.right).field(row.test.v2).field(row.test.p_value);
            w.field(row.test.n_permutations);
            w.endrow();
        }
        w.commit();
    }

    // Master text report (no timestamps: outputs must be byte-stable).
    {
        csv::Writer w(dir + "/report.txt");
        std::ostringstream os;
        os << "copula dependence analysis report\n";
        os << "version " << r.version << "  config-hash " << r.cfg_hash << "  seed "
           << r.config.seed << "\n\n";
        if (r.panel) {
            os << "panel: T=" << r.panel->T() << " assets=" << r.panel->dim() << " [";
            for (std::size_t j = 0; j < r.panel->asset_ids.size(); ++j)
                os << (j ? "," : "") << r.panel->asset_ids[j];
            os << "] " << r.panel->dates.front().to_string() << " .. "
               << r.panel->dates.back().to_string() << "\n";
        }
        if (r.split) {
            os << "changepoint: " << r.split->change_date.to_string()
               << (r.changepoint_overridden ? " (override)" : " (detected)") << "\n";
            os << "period1 rows=" << r.period_panels[0].T()
               << " period2 rows=" << r.period_panels[1].T() << "\n";
        }
        if (r.sample_tau.size() > 0) {
            os << "\n";
            report_detail::write_matrix_block(os, r.sample_tau, r.panel->asset_ids,
                                              "sample kendall tau (full sample)");
            report_detail::write_matrix_block(os, r.sample_rho, r.panel->asset_ids,
                                              "sample spearman rho (full sample)");
        }
        for (const auto& pr : r.periods) {
            os << "\nperiod " << pr.period << ":\n";
            auto describe = [&](const TwoStepFit& ts) {
                const char* mode =
                    ts.mode == PseudoSource::ParametricPit ? "parametric" : "semiparametric";
                os << "  [" << mode << "] joint copula: " << to_string(ts.joint.best.family)
                   << " bic=" << csv::format_double(ts.joint.best.bic) << "\n";
                for (const auto& pf : ts.pairs)
                    os << "    " << r.panel->asset_ids[pf.i] << "-" << r.panel->asset_ids[pf.j]
                       << ": " << to_string(pf.selection.best.family)
                       << " bic=" << csv::format_double(pf.selection.best.bic) << "\n";
                if (ts.mode == PseudoSource::ParametricPit)
                    for (std::size_t j = 0; j < ts.marginals.size(); ++j)
                        os << "    marginal " << r.panel->asset_ids[j] << ": "
                           << ts.marginals[j].best.spec.label()
                           << " bic=" << csv::format_double(ts.marginals[j].best.bic) << "\n";
            };
            if (pr.parametric) describe(*pr.parametric);
            if (pr.semiparametric) describe(*pr.semiparametric);
        }
        if (!r.skipped.empty()) {
            os << "\nskipped stages:\n";
            for (const auto& [stage, reason] : r.skipped)
                os << "  " << stage << ": " << reason << "\n";
        }
        os << "\nconfig:\n" << config_to_json(r.config).dump(2) << "\n";
        w.raw(os.str());
        w.commit();
    }
}

/// Per-asset diagnostics CSVs (test grid, Hill curve, qq points, acf).
inline void emit_diagnostics(const AnalysisReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& ad : r.diagnostics) {
        {
            csv::Writer w(dir + "/diagnostics_" + ad.asset + ".csv");
            w.raw("test,lag,statistic,p_value\n");
            for (const auto& t : ad.ljung_box) {
                w.field(t.test_name).field(t.lag_or_df).field(t.statistic).field(t.p_value);
                w.endrow();
            }
            for (const auto& t : ad.arch_lm) {
                w.field(t.test_name).field(t.lag_or_df).field(t.statistic).field(t.p_value);
                w.endrow();
            }
            w.commit();
        }
        {
            csv::Writer w(dir + "/hill_" + ad.asset + ".csv");
            w.raw("k,alpha_hat\n");
            for (const auto& [k, a] : ad.hill) {
                w.field(k).field(a);
                w.endrow();
            }
            w.commit();
        }
        {
            csv::Writer w(dir + "/qq_" + ad.asset + ".csv");
            w.raw("theoretical,sample\n");
            for (const auto& [tq, sq] : ad.qq) {
                w.field(tq).field(sq);
                w.endrow();
            }
            w.commit();
        }
        {
            csv::Writer w(dir + "/acf_" + ad.asset + ".csv");
            w.raw("lag,acf\n");
            for (std::size_t k = 0; k < ad.acf.size(); ++k) {
                w.field(static_cast<int>(k + 1)).field(ad.acf[k]);
                w.endrow();
            }
            w.commit();
        }
    }
}

/// Pairwise scatter overlays: observed pseudo-observations plus the same
/// number of draws simulated from the selected pairwise copula, per period.
inline void emit_plot_data(const AnalysisReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const Rng master(r.config.seed);
    for (const auto& pr : r.periods) {
        if (!pr.parametric && !pr.semiparametric) continue;
        const TwoStepFit& src = pr.functional_source();
        for (const auto& pf : src.pairs) {
            const std::string pair = r.panel->asset_ids[pf.i] + "-" + r.panel->asset_ids[pf.j];
            csv::Writer w(dir + "/scatter_" + pair + "_p" + std::to_string(pr.period) + ".csv");
            w.raw("u1,u2,tag\n");
            const Eigen::MatrixXd& U = src.pseudo.values;
            for (int t = 0; t < U.rows(); ++t) {
                w.field(U(t, pf.i)).field(U(t, pf.j)).field(std::string("obs"));
                w.endrow();
            }
            Rng rng = master.derive("plotsim", pr.period * 1000 + pf.i * 10 + pf.j);
            const Eigen::MatrixXd S = sample_copula(pf.selection.best.family,
                                                    pf.selection.best.params, 2,
                                                    static_cast<int>(U.rows()), rng);
            for (int t = 0; t < S.rows(); ++t) {
                w.field(S(t, 0)).field(S(t, 1)).field(std::string("sim"));
                w.endrow();
            }
            w.commit();
        }
    }
}

}  // namespace codep

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "codep/bootstrap.hpp"
#include "codep/copula_fit.hpp"
#include "codep/dependence.hpp"
#include "codep/diagnostics.hpp"
#include "codep/ingest.hpp"
#include "codep/synthetic.hpp"
#include "codep/version.hpp"

namespace codep {

enum class PseudoMode { Parametric, Semiparametric, Both };

inline const char* to_string(PseudoMode m) {
    switch (m) {
        case PseudoMode::Parametric: return "parametric";
        case PseudoMode::Semiparametric: return "semiparametric";
        case PseudoMode::Both: return "both";
    }
    return "?";
}

inline PseudoMode pseudo_mode_from_string(const std::string& s) {
    if (s == "parametric") return PseudoMode::Parametric;
    if (s == "semiparametric") return PseudoMode::Semiparametric;
    if (s == "both") return PseudoMode::Both;
    throw std::invalid_argument("unknown pseudo-observation mode: " + s);
}

/// Every knob the analysis exposes, loadable from a single JSON file. The
/// defaults are the documented choices; anything underdetermined by theory
/// (windows, bounds, node counts, bootstrap plan) is surfaced here.
struct PipelineConfig {
    std::string prices_path;
    PriceLayout layout = PriceLayout::Wide;
    std::string announcements_path;

    int cp_window = 4;
    double cp_alpha = 0.05;
    std::optional<Date> cp_override;

    std::vector<int> p_grid{1, 2};
    std::vector<int> q_grid{0, 1, 2};
    std::vector<InnovationFamily> marginal_families{
        InnovationFamily::Gaussian, InnovationFamily::StudentT, InnovationFamily::SkewGaussian,
        InnovationFamily::SkewT};
    VarianceSeed variance_seed = VarianceSeed::Unconditional;
    int garch_restarts = 3;
    int min_series_warn = 250;

    std::vector<CopulaFamily> copula_families{CopulaFamily::Gaussian, CopulaFamily::StudentT,
                                              CopulaFamily::SkewT,    CopulaFamily::Clayton,
                                              CopulaFamily::Frank,    CopulaFamily::Gumbel};
    PseudoMode mode = PseudoMode::Both;
    int skewt_margin_cells = 200;
    int copula_nm_evals_cap = 600;

    int diag_max_lag = 200;
    int hill_k_max = 1000;

    int quad_nodes_per_panel = 8;

    BootstrapPlan bootstrap;
    bool bootstrap_enabled = true;

    int dcov_permutations = 999;

    std::uint64_t seed = 20240101;
    std::string out_dir = "out";

    void validate() const {
        if (prices_path.empty()) throw std::invalid_argument("config: prices path is empty");
        if (p_grid.empty() || q_grid.empty() || marginal_families.empty())
            throw std::invalid_argument("config: marginal grids must be nonempty");
        if (copula_families.size() < 2)
            throw std::invalid_argument("config: need at least two copula families");
        if (!(cp_alpha > 0.0 && cp_alpha < 1.0))
            throw std::invalid_argument("config: changepoint alpha must be in (0,1)");
        if (cp_window < 2) throw std::invalid_argument("config: changepoint window must be >= 2");
        if (dcov_permutations < 99)
            throw std::invalid_argument("config: need >= 99 permutations");
    }
};

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["prices"] = c.prices_path;
    j["layout"] = c.layout == PriceLayout::Wide ? "wide" : "long";
    j["announcements"] = c.announcements_path;
    j["changepoint"] = {{"window", c.cp_window}, {"alpha", c.cp_alpha}};
    if (c.cp_override) j["changepoint"]["override"] = c.cp_override->to_string();
    std::vector<std::string> fam;
    for (auto f : c.marginal_families) fam.push_back(to_string(f));
    j["marginals"] = {{"p_grid", c.p_grid},
                      {"q_grid", c.q_grid},
                      {"families", fam},
                      {"variance_seed",
                       c.variance_seed == VarianceSeed::Unconditional ? "unconditional"
                                                                      : "sample_variance"},
                      {"restarts", c.garch_restarts},
                      {"min_length_warn", c.min_series_warn}};
    std::vector<std::string> cfam;
    for (auto f : c.copula_families) cfam.push_back(to_string(f));
    j["copulas"] = {{"families", cfam},
                    {"mode", to_string(c.mode)},
                    {"skewt_margin_cells", c.skewt_margin_cells},
                    {"nm_evals_cap", c.copula_nm_evals_cap}};
    j["diagnostics"] = {{"max_lag", c.diag_max_lag}, {"hill_k_max", c.hill_k_max}};
    j["quadrature"] = {{"nodes_per_panel", c.quad_nodes_per_panel}};
    j["bootstrap"] = {{"enabled", c.bootstrap_enabled},
                      {"scheme", to_string(c.bootstrap.scheme)},
                      {"block_length", c.bootstrap.block_length},
                      {"replicates", c.bootstrap.replicates}};
    j["independence"] = {{"permutations", c.dcov_permutations}};
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.prices_path = j.value("prices", c.prices_path);
    if (j.contains("layout"))
        c.layout = j["layout"] == "long" ? PriceLayout::Long : PriceLayout::Wide;
    c.announcements_path = j.value("announcements", c.announcements_path);
    if (j.contains("changepoint")) {
        const auto& cp = j["changepoint"];
        c.cp_window = cp.value("window", c.cp_window);
        c.cp_alpha = cp.value("alpha", c.cp_alpha);
        if (cp.contains("override") && !cp["override"].is_null())
            c.cp_override = parse_date(cp["override"].get<std::string>());
    }
    if (j.contains("marginals")) {
        const auto& m = j["marginals"];
        if (m.contains("p_grid")) c.p_grid = m["p_grid"].get<std::vector<int>>();
        if (m.contains("q_grid")) c.q_grid = m["q_grid"].get<std::vector<int>>();
        if (m.contains("families")) {
            c.marginal_families.clear();
            for (const auto& s : m["families"])
                c.marginal_families.push_back(innovation_family_from_string(s.get<std::string>()));
        }
        if (m.contains("variance_seed"))
            c.variance_seed = m["variance_seed"] == "sample_variance"
                                  ? VarianceSeed::SampleVariance
                                  : VarianceSeed::Unconditional;
        c.garch_restarts = m.value("restarts", c.garch_restarts);
        c.min_series_warn = m.value("min_length_warn", c.min_series_warn);
    }
    if (j.contains("copulas")) {
        const auto& cc = j["copulas"];
        if (cc.contains("families")) {
            c.copula_families.clear();
            for (const auto& s : cc["families"])
                c.copula_families.push_back(copula_family_from_string(s.get<std::string>()));
        }
        if (cc.contains("mode")) c.mode = pseudo_mode_from_string(cc["mode"].get<std::string>());
        c.skewt_margin_cells = cc.value("skewt_margin_cells", c.skewt_margin_cells);
        c.copula_nm_evals_cap = cc.value("nm_evals_cap", c.copula_nm_evals_cap);
    }
    if (j.contains("diagnostics")) {
        c.diag_max_lag = j["diagnostics"].value("max_lag", c.diag_max_lag);
        c.hill_k_max = j["diagnostics"].value("hill_k_max", c.hill_k_max);
    }
    if (j.contains("quadrature"))
        c.quad_nodes_per_panel = j["quadrature"].value("nodes_per_panel", c.quad_nodes_per_panel);
    if (j.contains("bootstrap")) {
        const auto& b = j["bootstrap"];
        c.bootstrap_enabled = b.value("enabled", c.bootstrap_enabled);
        if (b.contains("scheme"))
            c.bootstrap.scheme = b["scheme"] == "iid" ? BootstrapScheme::Iid
                                                      : BootstrapScheme::MovingBlock;
        c.bootstrap.block_length = b.value("block_length", c.bootstrap.block_length);
        c.bootstrap.replicates = b.value("replicates", c.bootstrap.replicates);
    }
    if (j.contains("independence"))
        c.dcov_permutations = j["independence"].value("permutations", c.dcov_permutations);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out", c.out_dir);
    return c;
}

inline PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

inline std::string config_hash(const PipelineConfig& c) {
    const std::string s = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Report structures
// ---------------------------------------------------------------------------

struct AssetDiagnostics {
    std::string asset;
    DescriptiveStats stats;
    std::vector<TestResult> ljung_box;  // one row per lag
    std::vector<TestResult> arch_lm;
    std::vector<std::pair<int, double>> hill;
    std::vector<std::pair<double, double>> qq;
    std::vector<double> acf;
};

struct FunctionalRow {
    int period = 1;
    std::string pair;
    PseudoSource source = PseudoSource::Ecdf;
    CopulaFamily family = CopulaFamily::Gaussian;
    FunctionalSet fs;
    double se_rho_s = 0.0, se_tau = 0.0, se_lambda_l = 0.0, se_lambda_u = 0.0, se_delta2 = 0.0,
           se_h2 = 0.0;
    int boot_used = 0, boot_failures = 0;
    bool bootstrapped = false;
};

struct IndependenceRow {
    std::string left, right;
    IndependenceTest test;
};

struct PeriodResults {
    int period = 1;
    std::optional<TwoStepFit> parametric;
    std::optional<TwoStepFit> semiparametric;

    const TwoStepFit& functional_source() const {
        if (semiparametric) return *semiparametric;
        if (parametric) return *parametric;
        throw std::logic_error("period has no fits");
    }
};

struct AnalysisReport {
    std::string version = kVersion;
    std::string cfg_hash;
    PipelineConfig config;

    std::optional<ReturnPanel> panel;
    std::vector<AssetDiagnostics> diagnostics;
    Eigen::MatrixXd sample_tau, sample_rho;

    std::optional<ChangepointResult> changepoint;
    bool changepoint_overridden = false;
    std::optional<PeriodSplit> split;
    std::vector<ReturnPanel> period_panels;

    std::vector<PeriodResults> periods;
    std::vector<FunctionalRow> functionals;
    std::vector<IndependenceRow> independence;

    std::map<std::string, std::string> skipped;  // stage -> reason
};

// ---------------------------------------------------------------------------
// Stage selection
// ---------------------------------------------------------------------------

enum Stage : unsigned {
    StageIngest = 1u << 0,
    StageDiagnostics = 1u << 1,
    StageChangepoint = 1u << 2,
    StageMarginals = 1u << 3,
    StageCopulas = 1u << 4,
    StageFunctionals = 1u << 5,
    StageIndependence = 1u << 6,
    StageAll = (1u << 7) - 1,
};

inline unsigned stage_closure(unsigned stages) {
    if (stages & StageFunctionals) stages |= StageCopulas;
    if (stages & StageCopulas) stages |= StageMarginals;
    if (stages & (StageMarginals | StageIndependence)) stages |= StageChangepoint;
    if (stages & (StageChangepoint | StageDiagnostics)) stages |= StageIngest;
    return stages | StageIngest;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace pipeline_detail {

inline TwoStepOptions two_step_options(const PipelineConfig& c) {
    TwoStepOptions o;
    o.p_grid = c.p_grid;
    o.q_grid = c.q_grid;
    o.marginal_families = c.marginal_families;
    o.garch.seed_mode = c.variance_seed;
    o.garch.restarts = c.garch_restarts;
    o.garch.warn_below_length = c.min_series_warn;
    o.copula.skewt_margin_cells = c.skewt_margin_cells;
    o.copula.nm_evals_cap = c.copula_nm_evals_cap;
    o.copula_families = c.copula_families;
    return o;
}

/// Bootstrap SEs for all functionals of one selected pairwise copula: each
/// replicate resamples pseudo-observation rows, refits the same family
/// (warm-started), and re-evaluates the functionals with the light settings.
inline void bootstrap_functionals(FunctionalRow& row, const PseudoSample& pair_sample,
                                  const CopulaFit& fit, const BootstrapPlan& plan,
                                  const Rng& master, const std::string& tag) {
    const int T = pair_sample.T();
    plan.validate(T);
    const FunctionalEvalOptions light = light_functional_options();
    CopulaFitOptions refit_opts;
    refit_opts.compute_se = false;
    refit_opts.warm_start = &fit;
    refit_opts.skewt_margin_cells = 150;

    std::vector<std::array<double, 6>> reps;
    reps.reserve(plan.replicates);
    for (int b = 0; b < plan.replicates; ++b) {
        Rng stream = master.derive(tag, static_cast<std::uint64_t>(b));
        const auto idx = resample_indices(T, plan, stream);
        try {
            PseudoSample rs;
            rs.source = pair_sample.source;
            rs.values.resize(T, 2);
            for (int t = 0; t < T; ++t) rs.values.row(t) = pair_sample.values.row(idx[t]);
            const CopulaFit refit = fit_copula(fit.family, rs, refit_opts);
            FunctionalEvalOptions lo = light;
            lo.mc_seed = stream.seed();
            const auto rho = copula_spearman_rho(refit, lo).value;
            const auto tau = copula_kendall_tau(refit, lo.mc_seed, lo.mc_n).value;
            const auto tails = tail_dependence(refit, 200);
            const auto d2 = mutual_information_delta2(refit, lo).value;
            const auto h2 = hellinger_correlation(refit, lo).value;
            reps.push_back({rho, tau, tails.lambda_l, tails.lambda_u, d2, h2});
        } catch (const std::exception&) {
            // dropped replicate; counted below
        }
    }
    row.boot_used = static_cast<int>(reps.size());
    row.boot_failures = plan.replicates - row.boot_used;
    if (row.boot_failures > plan.replicates / 5)
        throw std::runtime_error("bootstrap: more than 20% of replicates failed for " + row.pair);
    auto sd_of = [&](int k) {
        double m = 0.0;
        for (const auto& r : reps) m += r[k];
        m /= reps.size();
        double s = 0.0;
        for (const auto& r : reps) s += (r[k] - m) * (r[k] - m);
        return std::sqrt(s / (reps.size() - 1.0));
    };
    row.se_rho_s = sd_of(0);
    row.se_tau = sd_of(1);
    row.se_lambda_l = sd_of(2);
    row.se_lambda_u = sd_of(3);
    row.se_delta2 = sd_of(4);
    row.se_h2 = sd_of(5);
    row.bootstrapped = true;
}

/// Splits {0..d-1} into (S, complement) for every nonempty S with |S| <=
/// d/2, deduplicated; d = 4 gives the 4 three-vs-one and 3 two-vs-two splits.
inline std::vector<std::pair<std::vector<int>, std::vector<int>>> group_splits(int d) {
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    for (unsigned mask = 1; mask < (1u << d) - 1; ++mask) {
        const int pop = __builtin_popcount(mask);
        if (pop > d / 2) continue;
        if (pop == d - pop && !(mask & 1u)) continue;  // canonical half: keep asset 0 left
        std::vector<int> left, right;
        for (int j = 0; j < d; ++j) (mask >> j & 1u ? left : right).push_back(j);
        out.push_back({left, right});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });
    return out;
}

}  // namespace pipeline_detail

/// Runs the requested stages (plus their prerequisites) into `report`.
/// On failure the exception names the stage and the partial report keeps
/// everything completed so far.
inline void run_pipeline(const PipelineConfig& config, AnalysisReport& report,
                         unsigned stages = StageAll) {
    config.validate();
    stages = stage_closure(stages);
    report.config = config;
    report.cfg_hash = config_hash(config);
    const Rng master(config.seed);

    auto stage_guard = [](const char* stage, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("stage ") + stage + ": " + e.what());
        }
    };

    // --- ingest ---
    stage_guard("ingest", [&] {
        const auto series = load_price_table(config.prices_path, config.layout);
        report.panel = align_and_log_returns(series);
    });
    const ReturnPanel& panel = *report.panel;
    const int d = panel.dim();

    // --- diagnostics (descriptives, tests, tail data) ---
    if (stages & StageDiagnostics) {
        stage_guard("diagnostics", [&] {
            report.diagnostics.clear();
            for (int j = 0; j < d; ++j) {
                AssetDiagnostics ad;
                ad.asset = panel.asset_ids[j];
                const auto x = panel.column(j);
                ad.stats = descriptive_stats(x);
                const int max_lag = std::min(config.diag_max_lag, panel.T() / 2 - 1);
                ad.acf = acf(x, max_lag);
                for (int m = 1; m <= max_lag; ++m) {
                    ad.ljung_box.push_back(ljung_box(x, m));
                    ad.arch_lm.push_back(arch_lm_test(x, m));
                }
                std::vector<double> absx(x.size());
                for (std::size_t t = 0; t < x.size(); ++t) absx[t] = std::abs(x[t]);
                const int kmax = std::min(config.hill_k_max, panel.T() - 1);
                for (int k = 2; k <= kmax; ++k)
                    ad.hill.emplace_back(k, hill_estimator(absx, k));
                ad.qq = qq_points(x);
                report.diagnostics.push_back(std::move(ad));
            }
            report.sample_tau.resize(d, d);
            report.sample_rho.resize(d, d);
            for (int i = 0; i < d; ++i) {
                report.sample_tau(i, i) = report.sample_rho(i, i) = 1.0;
                for (int j = 0; j < i; ++j) {
                    const double t = sample_kendall_tau(panel.column(i), panel.column(j));
                    const double r = sample_spearman_rho(panel.column(i), panel.column(j));
                    report.sample_tau(i, j) = report.sample_tau(j, i) = t;
                    report.sample_rho(i, j) = report.sample_rho(j, i) = r;
                }
            }
        });
    } else {
        report.skipped["diagnostics"] = "stage not requested";
    }

    // --- changepoint ---
    if (stages & StageChangepoint) {
        stage_guard("changepoint", [&] {
            Date change;
            if (config.cp_override) {
                change = *config.cp_override;
                report.changepoint_overridden = true;
                report.skipped["changepoint_detection"] = "override date supplied";
            } else {
                if (config.announcements_path.empty())
                    throw std::runtime_error(
                        "no announcements file and no changepoint override configured");
                const csv::Table t = csv::read_file(config.announcements_path);
                AnnouncementSeries ann;
                for (const auto& row : t.rows) {
                    if (row.size() < 2) continue;
                    ann.dates.push_back(parse_date(row[0]));
                    ann.indicator.push_back(std::stoi(row[1]));
                }
                const auto counts = quarterly_counts(ann);
                report.changepoint = detect_changepoint(counts, config.cp_window, config.cp_alpha);
                if (!report.changepoint->found)
                    throw std::runtime_error(
                        "no significant changepoint; supply changepoint.override to proceed");
                change = report.changepoint->split.change_date;
            }
            report.split = make_period_split(panel, change);
            auto [p1, p2] = split_panel(panel, *report.split);
            report.period_panels = {std::move(p1), std::move(p2)};
        });
    } else {
        report.skipped["changepoint"] = "stage not requested";
    }

    // --- marginals + copulas (two-step per period per mode) ---
    if (stages & StageCopulas) {
        stage_guard("copulas", [&] {
            const TwoStepOptions opts = pipeline_detail::two_step_options(config);
            report.periods.clear();
            for (int p = 0; p < 2; ++p) {
                PeriodResults pr;
                pr.period = p + 1;
                const ReturnPanel& pp = report.period_panels[p];
                if (config.mode != PseudoMode::Semiparametric)
                    pr.parametric = two_step_fit(pp, PseudoSource::ParametricPit, opts);
                if (config.mode != PseudoMode::Parametric)
                    pr.semiparametric = two_step_fit(pp, PseudoSource::Ecdf, opts);
                report.periods.push_back(std::move(pr));
            }
        });
    } else if (stages & StageMarginals) {
        // marginal tables without the copula stage (fit-marginals subcommand)
        stage_guard("marginals", [&] {
            const TwoStepOptions opts = pipeline_detail::two_step_options(config);
            report.periods.clear();
            for (int p = 0; p < 2; ++p) {
                PeriodResults pr;
                pr.period = p + 1;
                TwoStepFit ts;
                ts.mode = PseudoSource::ParametricPit;
                const ReturnPanel& pp = report.period_panels[p];
                std::vector<GarchFit> fits;
                for (int j = 0; j < pp.dim(); ++j) {
                    ts.marginals.push_back(select_garch(pp.column(j), opts.p_grid, opts.q_grid,
                                                        opts.marginal_families, opts.garch));
                    fits.push_back(ts.marginals.back().best);
                }
                ts.pseudo = pit_pseudo_obs(pp, fits);
                pr.parametric = std::move(ts);
                report.periods.push_back(std::move(pr));
            }
            report.skipped["copulas"] = "stage not requested";
        });
    } else {
        report.skipped["marginals"] = "stage not requested";
        report.skipped["copulas"] = "stage not requested";
    }

    // --- functionals with bootstrap ---
    if (stages & StageFunctionals) {
        stage_guard("functionals", [&] {
            report.functionals.clear();
            FunctionalEvalOptions fopts;
            fopts.nodes_per_panel = config.quad_nodes_per_panel;
            fopts.skewt_margin_cells = std::max(400, config.skewt_margin_cells);
            for (const auto& pr : report.periods) {
                const TwoStepFit& src = pr.functional_source();
                for (const auto& pf : src.pairs) {
                    FunctionalRow row;
                    row.period = pr.period;
                    row.pair = panel.asset_ids[pf.i] + "-" + panel.asset_ids[pf.j];
                    row.source = src.mode;
                    row.family = pf.selection.best.family;
                    FunctionalEvalOptions fo = fopts;
                    fo.mc_seed = master.derive("tau_mc", pr.period * 100 + pf.i * 10 + pf.j).seed();
                    row.fs = functional_set(pf.selection.best, fo);
                    if (config.bootstrap_enabled) {
                        const PseudoSample pair = pseudo_pair(src.pseudo, pf.i, pf.j);
                        const std::string tag = "boot_p" + std::to_string(pr.period) + "_" +
                                                row.pair;
                        BootstrapPlan plan = config.bootstrap;
                        plan.seed = master.derive(tag).seed();
                        pipeline_detail::bootstrap_functionals(row, pair, pf.selection.best, plan,
                                                               master, tag);
                    }
                    report.functionals.push_back(std::move(row));
                }
            }
            if (!config.bootstrap_enabled)
                report.skipped["bootstrap"] = "disabled in config";
        });
    } else {
        report.skipped["functionals"] = "stage not requested";
    }

    // --- independence tests (distance covariance on the full panel) ---
    if (stages & StageIndependence) {
        stage_guard("independence", [&] {
            report.independence.clear();
            const auto splits = pipeline_detail::group_splits(d);
            int k = 0;
            for (const auto& [left, right] : splits) {
                Eigen::MatrixXd X(panel.T(), left.size()), Y(panel.T(), right.size());
                std::string lname, rname;
                for (std::size_t a = 0; a < left.size(); ++a) {
                    X.col(a) = panel.returns.col(left[a]);
                    lname += (a ? "," : "") + panel.asset_ids[left[a]];
                }
                for (std::size_t b = 0; b < right.size(); ++b) {
                    Y.col(b) = panel.returns.col(right[b]);
                    rname += (b ? "," : "") + panel.asset_ids[right[b]];
                }
                IndependenceRow row;
                row.left = lname;
                row.right = rname;
                row.test = distance_covariance_test(X, Y, config.dcov_permutations,
                                                    master.derive("dcov", k++));
                report.independence.push_back(std::move(row));
            }
        });
    } else {
        report.skipped["independence"] = "stage not requested";
    }
}

inline AnalysisReport run_pipeline(const PipelineConfig& config, unsigned stages = StageAll) {
    AnalysisReport report;
    run_pipeline(config, report, stages);
    return report;
}

}  // namespace codep

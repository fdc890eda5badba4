#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "codep/csv.hpp"
#include "codep/date.hpp"
#include "codep/special.hpp"

namespace codep {

struct PriceSeries {
    std::string asset_id;
    std::vector<Date> dates;    // strictly increasing
    std::vector<double> prices; // strictly positive, same length

    void validate() const {
        if (dates.size() != prices.size())
            throw std::invalid_argument("price series '" + asset_id + "': length mismatch");
        for (std::size_t i = 0; i < prices.size(); ++i) {
            if (!(prices[i] > 0.0))
                throw std::invalid_argument("price series '" + asset_id + "': nonpositive price");
            if (i > 0 && !(dates[i - 1] < dates[i]))
                throw std::invalid_argument("price series '" + asset_id +
                                            "': dates not strictly increasing");
        }
    }
};

/// Date-aligned log-return panel. returns(t, j) is the day-t log return of
/// asset j; T = dates.size() = returns.rows().
struct ReturnPanel {
    std::vector<std::string> asset_ids;
    std::vector<Date> dates;
    Eigen::MatrixXd returns;

    int T() const { return static_cast<int>(returns.rows()); }
    int dim() const { return static_cast<int>(returns.cols()); }

    std::vector<double> column(int j) const {
        std::vector<double> v(returns.rows());
        Eigen::VectorXd::Map(v.data(), returns.rows()) = returns.col(j);
        return v;
    }
};

struct AnnouncementSeries {
    std::vector<Date> dates;
    std::vector<int> indicator;  // 1 = production-change announcement

    void validate() const {
        if (dates.size() != indicator.size())
            throw std::invalid_argument("announcement series: length mismatch");
        for (int v : indicator)
            if (v != 0 && v != 1)
                throw std::invalid_argument("announcement indicator must be 0 or 1");
    }
};

struct PeriodSplit {
    Date change_date;  // first date of period 2
    Date period1_begin, period1_end;  // [begin, end)
    Date period2_begin, period2_end;
};

struct QuarterCount {
    std::string label;
    Date start;
    int count = 0;
};

struct BoundaryTest {
    Date boundary;      // first date of the right window
    double t_stat = 0.0;
    double p_value = 1.0;
};

struct ChangepointResult {
    bool found = false;
    PeriodSplit split;   // valid only when found
    std::vector<BoundaryTest> table;
};

enum class PriceLayout { Wide, Long };

namespace detail {
inline bool parse_price(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && std::isfinite(out);
}
}  // namespace detail

/// Loads a CSV of prices. Wide layout: `date,<asset>,...`; long layout:
/// `date,asset,price`. Rows whose price does not parse are dropped; the count
/// of dropped rows is returned through dropped_rows when non-null.
inline std::vector<PriceSeries> load_price_table(const std::string& path, PriceLayout layout,
                                                 std::size_t* dropped_rows = nullptr) {
    const csv::Table t = csv::read_file(path);
    if (t.header.empty()) throw std::runtime_error(path + ": missing header row");
    std::size_t dropped = 0;
    // (asset -> date -> price); map keys double as the duplicate detector.
    std::vector<std::string> order;
    std::map<std::string, std::map<Date, double>> table;

    auto insert = [&](const std::string& asset, const Date& d, double price) {
        auto& m = table[asset];
        if (std::find(order.begin(), order.end(), asset) == order.end()) order.push_back(asset);
        if (!m.emplace(d, price).second)
            throw std::runtime_error(path + ": duplicate key (" + d.to_string() + "," + asset + ")");
    };

    if (layout == PriceLayout::Wide) {
        if (t.header.size() < 2) throw std::runtime_error(path + ": wide layout needs >=2 columns");
        for (const auto& row : t.rows) {
            if (row.empty()) continue;
            const Date d = parse_date(row[0]);
            for (std::size_t j = 1; j < t.header.size(); ++j) {
                double price;
                if (j < row.size() && detail::parse_price(row[j], price))
                    insert(t.header[j], d, price);
                else
                    ++dropped;
            }
        }
    } else {
        if (t.header.size() < 3 || t.header[0] != "date" || t.header[1] != "asset" ||
            t.header[2] != "price")
            throw std::runtime_error(path + ": long layout needs header date,asset,price");
        for (const auto& row : t.rows) {
            if (row.size() < 3) { ++dropped; continue; }
            const Date d = parse_date(row[0]);
            double price;
            if (detail::parse_price(row[2], price))
                insert(row[1], d, price);
            else
                ++dropped;
        }
    }
    if (dropped_rows) *dropped_rows = dropped;

    std::vector<PriceSeries> out;
    for (const auto& asset : order) {
        PriceSeries s;
        s.asset_id = asset;
        for (const auto& [d, p] : table[asset]) {
            s.dates.push_back(d);
            s.prices.push_back(p);
        }
        if (!s.dates.empty()) out.push_back(std::move(s));
    }
    if (out.empty()) throw std::runtime_error(path + ": zero parseable rows");
    for (const auto& s : out) s.validate();
    return out;
}

/// Restricts all series to their common dates and differences the logs:
/// returns(t, j) = ln p_{t+1,j} - ln p_{t,j}. T = #common dates - 1.
inline ReturnPanel align_and_log_returns(const std::vector<PriceSeries>& series) {
    if (series.size() < 2) throw std::invalid_argument("need at least 2 price series");
    for (const auto& s : series) s.validate();

    std::set<Date> common(series[0].dates.begin(), series[0].dates.end());
    for (std::size_t j = 1; j < series.size(); ++j) {
        std::set<Date> next;
        std::set<Date> cur(series[j].dates.begin(), series[j].dates.end());
        std::set_intersection(common.begin(), common.end(), cur.begin(), cur.end(),
                              std::inserter(next, next.begin()));
        common.swap(next);
    }
    if (common.empty()) throw std::runtime_error("empty intersection of date sets");
    if (common.size() < 3) throw std::runtime_error("fewer than 3 common dates");

    const std::vector<Date> dates(common.begin(), common.end());
    const int T = static_cast<int>(dates.size()) - 1;
    const int d = static_cast<int>(series.size());

    ReturnPanel panel;
    panel.returns.resize(T, d);
    for (int j = 0; j < d; ++j) {
        panel.asset_ids.push_back(series[j].asset_id);
        std::map<Date, double> px;
        for (std::size_t i = 0; i < series[j].dates.size(); ++i)
            px[series[j].dates[i]] = series[j].prices[i];
        for (int t = 0; t < T; ++t) {
            const double p0 = px.at(dates[t]), p1 = px.at(dates[t + 1]);
            if (!(p0 > 0.0) || !(p1 > 0.0)) throw std::runtime_error("nonpositive price");
            panel.returns(t, j) = std::log(p1 / p0);
        }
    }
    panel.dates.assign(dates.begin() + 1, dates.end());  // return t is dated by its end point
    return panel;
}

/// One entry per calendar quarter covering the series range, zero counts
/// included.
inline std::vector<QuarterCount> quarterly_counts(const AnnouncementSeries& a) {
    a.validate();
    if (a.dates.empty()) throw std::invalid_argument("empty announcement series");
    Date lo = a.dates[0], hi = a.dates[0];
    for (const auto& d : a.dates) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    std::vector<QuarterCount> out;
    for (Date q = lo.quarter_start(); q <= hi; q = q.next_quarter_start())
        out.push_back({q.quarter_label(), q, 0});
    auto index_of = [&](const Date& d) {
        const Date q = d.quarter_start();
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out[i].start == q) return i;
        throw std::logic_error("quarter index out of range");
    };
    for (std::size_t i = 0; i < a.dates.size(); ++i)
        if (a.indicator[i]) out[index_of(a.dates[i])].count++;
    return out;
}

namespace detail {
/// Welch two-sample t statistic and two-sided p-value. Zero-variance windows:
/// p = 1 when both variances vanish and means agree, p = 0 when they differ.
inline BoundaryTest welch_t_test(const std::vector<double>& x, const std::vector<double>& y) {
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
    double m1 = 0.0, m2 = 0.0;
    for (double v : x) m1 += v;
    for (double v : y) m2 += v;
    m1 /= n1;
    m2 /= n2;
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) s1 += (v - m1) * (v - m1);
    for (double v : y) s2 += (v - m2) * (v - m2);
    s1 /= (n1 - 1.0);
    s2 /= (n2 - 1.0);

    BoundaryTest r;
    if (s1 == 0.0 && s2 == 0.0) {
        r.t_stat = (m1 == m2) ? 0.0 : std::numeric_limits<double>::infinity();
        r.p_value = (m1 == m2) ? 1.0 : 0.0;
        return r;
    }
    const double se = std::sqrt(s1 / n1 + s2 / n2);
    r.t_stat = (m1 - m2) / se;
    const double df = std::pow(s1 / n1 + s2 / n2, 2) /
                      (std::pow(s1 / n1, 2) / (n1 - 1.0) + std::pow(s2 / n2, 2) / (n2 - 1.0));
    r.p_value = 2.0 * t_cdf(-std::abs(r.t_stat), df);
    return r;
}
}  // namespace detail

/// Welch t-test of the mean announcement count over `window` quarters before
/// vs after each interior boundary. Picks the boundary with the smallest
/// p-value among those below alpha; found=false when none qualify.
inline ChangepointResult detect_changepoint(const std::vector<QuarterCount>& counts, int window,
                                            double alpha) {
    if (window < 2) throw std::invalid_argument("changepoint window must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    const int q = static_cast<int>(counts.size());
    if (q < 2 * window) throw std::invalid_argument("too few quarters for the requested window");

    ChangepointResult res;
    int best = -1;
    for (int b = window; b + window <= q; ++b) {
        std::vector<double> left, right;
        for (int i = b - window; i < b; ++i) left.push_back(counts[i].count);
        for (int i = b; i < b + window; ++i) right.push_back(counts[i].count);
        BoundaryTest t = detail::welch_t_test(left, right);
        t.boundary = counts[b].start;
        res.table.push_back(t);
        if (t.p_value < alpha &&
            (best < 0 || t.p_value < res.table[best].p_value))
            best = static_cast<int>(res.table.size()) - 1;
    }
    if (best >= 0) {
        res.found = true;
        res.split.change_date = res.table[best].boundary;
    }
    return res;
}

/// Completes a PeriodSplit against a panel's date range.
inline PeriodSplit make_period_split(const ReturnPanel& panel, const Date& change_date) {
    if (panel.dates.empty()) throw std::invalid_argument("empty panel");
    if (!(change_date > panel.dates.front() && change_date <= panel.dates.back()))
        throw std::invalid_argument("change date outside the panel's date range");
    PeriodSplit s;
    s.change_date = change_date;
    s.period1_begin = panel.dates.front();
    s.period1_end = change_date;
    s.period2_begin = change_date;
    s.period2_end = panel.dates.back().next();
    return s;
}

/// Partitions the panel rows at the change date: period 1 holds dates
/// strictly before it, period 2 the rest. No row is lost or duplicated.
inline std::pair<ReturnPanel, ReturnPanel> split_panel(const ReturnPanel& panel,
                                                       const PeriodSplit& split) {
    const int T = panel.T();
    int cut = 0;
    while (cut < T && panel.dates[cut] < split.change_date) ++cut;
    if (cut == 0 || cut == T)
        throw std::invalid_argument("change date does not split the panel");

    ReturnPanel p1, p2;
    p1.asset_ids = p2.asset_ids = panel.asset_ids;
    p1.dates.assign(panel.dates.begin(), panel.dates.begin() + cut);
    p2.dates.assign(panel.dates.begin() + cut, panel.dates.end());
    p1.returns = panel.returns.topRows(cut);
    p2.returns = panel.returns.bottomRows(T - cut);
    return {std::move(p1), std::move(p2)};
}

}  // namespace codep

#include "hvi/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hvi {

namespace {
    std::string trim(std::string_view s)
    {
        auto const b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) {
            return {};
        }
        auto const e = s.find_last_not_of(" \t\r");
        return std::string(s.substr(b, e - b + 1));
    }

    std::vector<std::string> split(std::string_view s, char sep)
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            auto const pos = s.find(sep, start);
            out.push_back(trim(s.substr(start, pos - start)));
            if (pos == std::string_view::npos) {
                break;
            }
            start = pos + 1;
        }
        return out;
    }

    double parse_double(std::string const& s, std::size_t line)
    {
        double v = 0.0;
        auto const* first = s.data();
        auto const* last = s.data() + s.size();
        if (!s.empty() && *first == '+') {
            ++first;
        }
        auto const [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || s.empty()) {
            throw ParseError("not a number: '" + s + "'", line);
        }
        return v;
    }

    std::uint64_t parse_u64(std::string const& s, std::size_t line)
    {
        std::uint64_t v = 0;
        auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw ParseError("not a non-negative integer: '" + s + "'", line);
        }
        return v;
    }

    Point2 parse_pair(std::string const& s, std::size_t line)
    {
        auto const f = split(s, ',');
        if (f.size() != 2) {
            throw ParseError("expected two comma-separated values", line);
        }
        return {parse_double(f[0], line), parse_double(f[1], line)};
    }

    // "# key: value" comment; returns false for other lines
    bool comment_field(std::string const& line, std::string& key, std::string& value)
    {
        if (line.empty() || line[0] != '#') {
            return false;
        }
        auto const colon = line.find(':');
        if (colon == std::string::npos) {
            return false;
        }
        key = trim(std::string_view(line).substr(1, colon - 1));
        value = trim(std::string_view(line).substr(colon + 1));
        return true;
    }
} // namespace

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_front(std::ostream& os, ParetoFront2D const& front)
{
    os << "# ref: " << format_double(front.ref().y1) << ',' << format_double(front.ref().y2) << '\n';
    for (auto const& p : front.points()) {
        os << format_double(p.y1) << ',' << format_double(p.y2) << '\n';
    }
}

ParetoFront2D read_front(std::istream& is)
{
    std::string raw;
    std::size_t line = 0;
    bool have_ref = false;
    Point2 ref{};
    std::vector<Point2> pts;
    while (std::getline(is, raw)) {
        ++line;
        auto const s = trim(raw);
        if (s.empty()) {
            continue;
        }
        std::string key;
        std::string value;
        if (comment_field(s, key, value)) {
            if (key == "ref") {
                ref = parse_pair(value, line);
                have_ref = true;
            }
            continue;
        }
        if (s[0] == '#') {
            continue;
        }
        pts.push_back(parse_pair(s, line));
    }
    if (!have_ref) {
        throw ParseError("missing '# ref: r1,r2' header", 0);
    }
    if (pts.empty()) {
        throw ParseError("front file has no points", 0);
    }
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.y1 < b.y1; });
    try {
        return ParetoFront2D(std::move(pts), ref);
    } catch (std::invalid_argument const& e) {
        throw ParseError(e.what(), 0);
    }
}

void write_run(std::ostream& os, RunRecord const& rec)
{
    os << "# problem: " << rec.problem << '\n';
    os << "# acquisition: " << rec.acquisition << '\n';
    os << "# seed: " << rec.seed << '\n';
    os << "# ref: " << format_double(rec.ref.y1) << ',' << format_double(rec.ref.y2) << '\n';
    std::size_t const d = rec.rows.empty() ? 0 : rec.rows.front().x.size();
    os << 't';
    for (std::size_t k = 1; k <= d; ++k) {
        os << ",x" << k;
    }
    os << ",f1,f2,hv_best\n";
    for (auto const& r : rec.rows) {
        os << r.t;
        for (double v : r.x) {
            os << ',' << format_double(v);
        }
        os << ',' << format_double(r.y.y1) << ',' << format_double(r.y.y2) << ',' << format_double(r.hv_best) << '\n';
    }
}

RunRecord read_run(std::istream& is)
{
    RunRecord rec;
    std::string raw;
    std::size_t line = 0;
    std::size_t columns = 0;
    bool have_ref = false;
    while (std::getline(is, raw)) {
        ++line;
        auto const s = trim(raw);
        if (s.empty()) {
            continue;
        }
        std::string key;
        std::string value;
        if (comment_field(s, key, value)) {
            if (key == "problem") {
                rec.problem = value;
            } else if (key == "acquisition") {
                rec.acquisition = value;
            } else if (key == "seed") {
                rec.seed = parse_u64(value, line);
            } else if (key == "ref") {
                rec.ref = parse_pair(value, line);
                have_ref = true;
            }
            continue;
        }
        if (s[0] == '#') {
            continue;
        }
        auto const f = split(s, ',');
        if (columns == 0) {
            if (f.size() < 4 || f.front() != "t" || f[f.size() - 3] != "f1" || f[f.size() - 2] != "f2"
                || f.back() != "hv_best") {
                throw ParseError("expected header t,x1..xd,f1,f2,hv_best", line);
            }
            columns = f.size();
            continue;
        }
        if (f.size() != columns) {
            throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(f.size()), line);
        }
        RunRow row;
        row.t = parse_u64(f[0], line);
        for (std::size_t k = 1; k + 3 < columns; ++k) {
            row.x.push_back(parse_double(f[k], line));
        }
        row.y = {parse_double(f[columns - 3], line), parse_double(f[columns - 2], line)};
        row.hv_best = parse_double(f[columns - 1], line);
        rec.rows.push_back(std::move(row));
    }
    if (columns == 0) {
        throw ParseError("run file has no header row", 0);
    }
    if (!have_ref) {
        throw ParseError("missing '# ref: r1,r2' header", 0);
    }
    return rec;
}

std::vector<GridRow> distribution_grid(HviDistribution const& d, std::size_t points)
{
    std::vector<GridRow> rows(points);
    std::vector<double> deltas(points);
    double const lo = d.support_lo();
    double const hi = d.support_hi();
    for (std::size_t k = 0; k < points; ++k) {
        deltas[k] = points == 1 ? 0.5 * (lo + hi)
                                : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    auto const g = evaluate_grid(d, deltas);
    for (std::size_t k = 0; k < points; ++k) {
        rows[k] = {deltas[k], g.pdf[k], g.cdf[k]};
    }
    return rows;
}

void write_grid(std::ostream& os, std::span<GridRow const> rows, std::span<double const> mc_samples)
{
    std::vector<double> sorted(mc_samples.begin(), mc_samples.end());
    std::sort(sorted.begin(), sorted.end());
    os << "delta,pdf,cdf" << (sorted.empty() ? "" : ",mc_cdf") << '\n';
    for (auto const& r : rows) {
        os << format_double(r.delta) << ',' << format_double(r.pdf) << ',' << format_double(r.cdf);
        if (!sorted.empty()) {
            auto const hits = std::upper_bound(sorted.begin(), sorted.end(), r.delta) - sorted.begin();
            os << ',' << format_double(static_cast<double>(hits) / static_cast<double>(sorted.size()));
        }
        os << '\n';
    }
}

void write_timing(std::ostream& os, std::span<TimingRow const> rows)
{
    os << "n,t_exact_s,t_mc_s,ratio\n";
    for (auto const& r : rows) {
        os << r.n << ',' << format_double(r.t_exact_s) << ',' << format_double(r.t_mc_s) << ','
           << format_double(r.t_mc_s / r.t_exact_s) << '\n';
    }
}

std::vector<SummaryRow> summarize(std::span<RunRecord const> runs)
{
    if (runs.empty()) {
        return {};
    }
    std::size_t horizon = runs.front().rows.size();
    for (auto const& r : runs) {
        horizon = std::min(horizon, r.rows.size());
    }
    std::vector<SummaryRow> out;
    double const n = static_cast<double>(runs.size());
    for (std::size_t k = 0; k < horizon; ++k) {
        double mean = 0.0;
        for (auto const& r : runs) {
            mean += r.rows[k].hv_best;
        }
        mean /= n;
        double var = 0.0;
        for (auto const& r : runs) {
            var += (r.rows[k].hv_best - mean) * (r.rows[k].hv_best - mean);
        }
        double const half = runs.size() > 1 ? 1.96 * std::sqrt(var / (n - 1.0)) / std::sqrt(n) : 0.0;
        out.push_back({runs.front().rows[k].t, mean, half, runs.size()});
    }
    return out;
}

void write_summary(std::ostream& os, std::span<SummaryRow const> rows)
{
    os << "t,mean_hv,ci95_half_width,runs\n";
    for (auto const& r : rows) {
        os << r.t << ',' << format_double(r.mean_hv) << ',' << format_double(r.ci95_half_width) << ',' << r.runs
           << '\n';
    }
}

EcdfReport runtime_ecdf(std::span<RunRecord const> runs, std::size_t n_targets)
{
    if (runs.empty()) {
        throw std::invalid_argument("runtime_ecdf: no runs");
    }
    if (n_targets == 0) {
        throw std::invalid_argument("runtime_ecdf: need at least one target");
    }
    EcdfReport rep;
    rep.problem = runs.front().problem;
    double lo = kInf;
    double hi = -kInf;
    for (auto const& r : runs) {
        if (r.problem != rep.problem) {
            throw std::invalid_argument("runtime_ecdf: runs mix problems '" + rep.problem + "' and '" + r.problem + "'");
        }
        for (auto const& row : r.rows) {
            lo = std::min(lo, row.hv_best);
            hi = std::max(hi, row.hv_best);
            rep.horizon = std::max(rep.horizon, row.t);
        }
    }
    if (!(lo <= hi)) {
        throw std::invalid_argument("runtime_ecdf: runs have no rows");
    }
    rep.shift = lo <= 0.0 ? 1.0 - lo : 0.0;
    if (hi == lo || n_targets == 1) {
        rep.targets = {hi};
    } else {
        double const a = std::log(lo + rep.shift);
        double const b = std::log(hi + rep.shift);
        for (std::size_t k = 0; k < n_targets; ++k) {
            double const u = static_cast<double>(k) / static_cast<double>(n_targets - 1);
            rep.targets.push_back(std::exp(a + (b - a) * u) - rep.shift);
        }
        // pin the ends so the extreme targets are exactly attainable
        rep.targets.front() = lo;
        rep.targets.back() = hi;
    }

    std::vector<std::string> order;
    std::map<std::string, std::vector<RunRecord const*>> groups;
    for (auto const& r : runs) {
        if (!groups.contains(r.acquisition)) {
            order.push_back(r.acquisition);
        }
        groups[r.acquisition].push_back(&r);
    }
    for (auto const& name : order) {
        auto const& g = groups[name];
        EcdfCurve c;
        c.acquisition = name;
        c.runs = g.size();
        c.hitting.assign(rep.targets.size(), std::vector<std::size_t>(g.size(), kNeverHit));
        for (std::size_t v = 0; v < rep.targets.size(); ++v) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                for (auto const& row : g[i]->rows) {
                    if (row.hv_best >= rep.targets[v]) {
                        c.hitting[v][i] = row.t;
                        break;
                    }
                }
            }
        }
        double const denom = static_cast<double>(g.size() * rep.targets.size());
        c.ecdf.resize(rep.horizon);
        for (std::size_t t = 1; t <= rep.horizon; ++t) {
            std::size_t hits = 0;
            for (auto const& per_target : c.hitting) {
                hits += static_cast<std::size_t>(
                    std::count_if(per_target.begin(), per_target.end(), [t](std::size_t h) { return h <= t; }));
            }
            c.ecdf[t - 1] = static_cast<double>(hits) / denom;
        }
        rep.curves.push_back(std::move(c));
    }
    return rep;
}

void write_ecdf(std::ostream& os, EcdfReport const& report)
{
    os << "# problem: " << report.problem << '\n';
    os << "# shift: " << format_double(report.shift) << '\n';
    os << "# targets: ";
    for (std::size_t k = 0; k < report.targets.size(); ++k) {
        os << (k ? "," : "") << format_double(report.targets[k]);
    }
    os << '\n';
    os << "acquisition,t,ecdf\n";
    for (auto const& c : report.curves) {
        for (std::size_t t = 1; t <= c.ecdf.size(); ++t) {
            os << c.acquisition << ',' << t << ',' << format_double(c.ecdf[t - 1]) << '\n';
        }
    }
}

namespace {
    namespace pt = boost::property_tree;

    std::map<std::string, std::set<std::string>> const kConfigSchema{
        {"experiment", {"problem", "dim", "acquisition", "doe", "budget", "ref", "repetitions", "seed"}},
        {"schedule", {"kind", "a", "b"}},
        {"maximizer", {"screen_per_dim", "refine_starts", "refine_evals", "initial_step"}},
        {"gp", {"full_refit_every", "starts", "max_iterations"}},
        {"quadrature", {"abs_tol", "max_subintervals", "prune_sigmas", "clip_sigmas"}},
    };

    ScheduleKind parse_schedule_kind(std::string const& s)
    {
        if (s == "constant") {
            return ScheduleKind::Constant;
        }
        if (s == "exponential-decay") {
            return ScheduleKind::ExponentialDecay;
        }
        if (s == "naive-ucb-omega") {
            return ScheduleKind::NaiveUcbOmega;
        }
        if (s == "ucb-omega") {
            return ScheduleKind::UcbOmega;
        }
        throw ParseError("unknown schedule kind '" + s + "'", 0);
    }

    std::string_view schedule_kind_name(ScheduleKind k)
    {
        switch (k) {
        case ScheduleKind::Constant:
            return "constant";
        case ScheduleKind::ExponentialDecay:
            return "exponential-decay";
        case ScheduleKind::NaiveUcbOmega:
            return "naive-ucb-omega";
        case ScheduleKind::UcbOmega:
            return "ucb-omega";
        }
        return "?";
    }

    template<class T>
    T get(pt::ptree const& tree, std::string const& path, T fallback)
    {
        auto const node = tree.get_optional<std::string>(path);
        if (!node) {
            return fallback;
        }
        std::string const s = trim(*node);
        if constexpr (std::is_same_v<T, double>) {
            return parse_double(s, 0);
        } else if constexpr (std::is_same_v<T, std::string>) {
            return s;
        } else {
            auto const v = parse_u64(s, 0);
            if (v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
                throw ParseError(path + " out of range", 0);
            }
            return static_cast<T>(v);
        }
    }
} // namespace

ExperimentConfig read_config(std::istream& is)
{
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (pt::ini_parser_error const& e) {
        throw ParseError(e.message(), e.line());
    }
    for (auto const& [section, body] : tree) {
        auto const it = kConfigSchema.find(section);
        if (it == kConfigSchema.end() || body.data().size() > 0) {
            throw ParseError("unknown section '" + section + "'", 0);
        }
        for (auto const& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw ParseError("unknown key '" + section + "." + key + "'", 0);
            }
        }
    }

    ExperimentConfig cfg;
    try {
        cfg.problem = get<std::string>(tree, "experiment.problem", cfg.problem);
        cfg.dim = get<std::size_t>(tree, "experiment.dim", cfg.dim);
        if (auto const a = tree.get_optional<std::string>("experiment.acquisition")) {
            cfg.acquisition = Acquisition::make(parse_acquisition(trim(*a)));
        }
        cfg.doe = get<std::size_t>(tree, "experiment.doe", cfg.doe);
        cfg.budget = get<std::size_t>(tree, "experiment.budget", cfg.budget);
        if (auto const r = tree.get_optional<std::string>("experiment.ref")) {
            cfg.ref = parse_pair(trim(*r), 0);
        }
        cfg.repetitions = get<std::size_t>(tree, "experiment.repetitions", cfg.repetitions);
        cfg.seed = get<std::uint64_t>(tree, "experiment.seed", cfg.seed);

        if (auto const k = tree.get_optional<std::string>("schedule.kind")) {
            cfg.acquisition.schedule.kind = parse_schedule_kind(trim(*k));
        }
        cfg.acquisition.schedule.a = get<double>(tree, "schedule.a", cfg.acquisition.schedule.a);
        cfg.acquisition.schedule.b = get<double>(tree, "schedule.b", cfg.acquisition.schedule.b);

        cfg.maximizer.screen_per_dim = get<std::size_t>(tree, "maximizer.screen_per_dim", cfg.maximizer.screen_per_dim);
        cfg.maximizer.refine_starts = get<std::size_t>(tree, "maximizer.refine_starts", cfg.maximizer.refine_starts);
        cfg.maximizer.refine_evals = get<std::size_t>(tree, "maximizer.refine_evals", cfg.maximizer.refine_evals);
        cfg.maximizer.initial_step = get<double>(tree, "maximizer.initial_step", cfg.maximizer.initial_step);

        cfg.gp.full_refit_every = get<int>(tree, "gp.full_refit_every", cfg.gp.full_refit_every);
        cfg.gp.starts = get<int>(tree, "gp.starts", cfg.gp.starts);
        cfg.gp.max_iterations = get<int>(tree, "gp.max_iterations", cfg.gp.max_iterations);

        auto& dc = cfg.acquisition.dist;
        dc.quad.abs_tol = get<double>(tree, "quadrature.abs_tol", dc.quad.abs_tol);
        dc.quad.max_subintervals = get<int>(tree, "quadrature.max_subintervals", dc.quad.max_subintervals);
        dc.prune_sigmas = get<double>(tree, "quadrature.prune_sigmas", dc.prune_sigmas);
        dc.clip_sigmas = get<double>(tree, "quadrature.clip_sigmas", dc.clip_sigmas);
        cfg.validate();
    } catch (ParseError const&) {
        throw;
    } catch (std::invalid_argument const& e) {
        throw ParseError(e.what(), 0);
    }
    return cfg;
}

void write_config(std::ostream& os, ExperimentConfig const& cfg)
{
    auto const& s = cfg.acquisition.schedule;
    auto const& dc = cfg.acquisition.dist;
    os << "[experiment]\n"
       << "problem = " << cfg.problem << '\n'
       << "dim = " << cfg.dim << '\n'
       << "acquisition = " << to_string(cfg.acquisition.kind) << '\n'
       << "doe = " << cfg.doe << '\n'
       << "budget = " << cfg.budget << '\n'
       << "ref = " << format_double(cfg.ref.y1) << ',' << format_double(cfg.ref.y2) << '\n'
       << "repetitions = " << cfg.repetitions << '\n'
       << "seed = " << cfg.seed << "\n\n"
       << "[schedule]\n"
       << "kind = " << schedule_kind_name(s.kind) << '\n'
       << "a = " << format_double(s.a) << '\n'
       << "b = " << format_double(s.b) << "\n\n"
       << "[maximizer]\n"
       << "screen_per_dim = " << cfg.maximizer.screen_per_dim << '\n'
       << "refine_starts = " << cfg.maximizer.refine_starts << '\n'
       << "refine_evals = " << cfg.maximizer.refine_evals << '\n'
       << "initial_step = " << format_double(cfg.maximizer.initial_step) << "\n\n"
       << "[gp]\n"
       << "full_refit_every = " << cfg.gp.full_refit_every << '\n'
       << "starts = " << cfg.gp.starts << '\n'
       << "max_iterations = " << cfg.gp.max_iterations << "\n\n"
       << "[quadrature]\n"
       << "abs_tol = " << format_double(dc.quad.abs_tol) << '\n'
       << "max_subintervals = " << dc.quad.max_subintervals << '\n'
       << "prune_sigmas = " << format_double(dc.prune_sigmas) << '\n'
       << "clip_sigmas = " << format_double(dc.clip_sigmas) << '\n';
}

} // namespace hvi

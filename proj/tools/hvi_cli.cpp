#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hvi/bo.hpp"
#include "hvi/distribution.hpp"
#include "hvi/mc_oracle.hpp"
#include "hvi/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<double> quad_tol;
    std::string out;
};

// Writes to --out when given, stdout otherwise.
template<class F>
void emit(std::string const& out, F&& write)
{
    if (out.empty() || out == "-") {
        write(std::cout);
        return;
    }
    std::ofstream os(out, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open '" + out + "' for writing");
    }
    write(os);
}

std::ifstream open_input(std::string const& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return is;
}

int cmd_dist(Globals const& g, std::string const& front_path, std::vector<double> const& pred, std::size_t points,
             std::size_t mc)
{
    auto is = open_input(front_path);
    hvi::ParetoFront2D front;
    try {
        front = hvi::read_front(is);
    } catch (hvi::ParseError const& e) {
        throw std::runtime_error(front_path + ": " + e.what());
    }
    hvi::BiGaussian const law{pred[0], pred[1], pred[2], pred[3]};
    hvi::DistributionConfig cfg;
    if (g.quad_tol) {
        cfg.quad.abs_tol = *g.quad_tol;
    }
    auto const d = hvi::HviDistribution::build(front, law, cfg);
    auto const rows = hvi::distribution_grid(d, points);
    std::vector<double> samples;
    if (mc > 0) {
        samples = hvi::sample_hvi(front, law, {mc, g.seed.value_or(0)});
    }
    emit(g.out, [&](std::ostream& os) { hvi::write_grid(os, rows, samples); });
    return 0;
}

int cmd_bench(Globals const& g, std::vector<std::size_t> const& sizes, std::size_t mc, int reps, std::size_t grid)
{
    std::vector<hvi::ParetoFront2D> fronts;
    for (std::size_t n : sizes) {
        fronts.push_back(hvi::segment_front(n, {1.0, 1.0}, g.seed.value_or(0)));
    }
    hvi::QuadratureConfig quad;
    if (g.quad_tol) {
        quad.abs_tol = *g.quad_tol;
    }
    auto const rows = hvi::timing_comparison(fronts, {0.4, 0.4, 0.1, 0.1}, {mc, g.seed.value_or(0)}, quad,
                                             {reps, grid});
    emit(g.out, [&](std::ostream& os) { hvi::write_timing(os, rows); });
    return 0;
}

struct OptimizeOverrides {
    std::string problem;
    std::string acquisition;
    std::size_t repetitions{0};
    std::size_t budget{0};
};

int cmd_optimize(Globals const& g, std::string const& config_path, OptimizeOverrides const& ov)
{
    hvi::ExperimentConfig cfg;
    if (!config_path.empty()) {
        auto is = open_input(config_path);
        try {
            cfg = hvi::read_config(is);
        } catch (hvi::ParseError const& e) {
            throw std::runtime_error(config_path + ": " + e.what());
        }
    }
    if (!ov.problem.empty()) {
        cfg.problem = ov.problem;
        cfg.dim = 0;
    }
    if (!ov.acquisition.empty()) {
        auto const dist = cfg.acquisition.dist;
        cfg.acquisition = hvi::Acquisition::make(hvi::parse_acquisition(ov.acquisition));
        cfg.acquisition.dist = dist;
    }
    if (ov.repetitions > 0) {
        cfg.repetitions = ov.repetitions;
    }
    if (ov.budget > 0) {
        cfg.budget = ov.budget;
    }
    if (g.seed) {
        cfg.seed = *g.seed;
    }
    if (g.quad_tol) {
        cfg.acquisition.dist.quad.abs_tol = *g.quad_tol;
    }
    cfg.validate();

    fs::path const dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
    fs::create_directories(dir);
    auto const outcomes = hvi::run_repetitions(cfg);
    std::vector<hvi::RunRecord> done;
    std::string const stem = cfg.make_problem().name() + "_" + std::string(hvi::to_string(cfg.acquisition.kind));
    for (auto const& o : outcomes) {
        if (!o.record) {
            std::cerr << "run " << o.repetition << " (seed " << o.seed << ") aborted: " << o.error << '\n';
            continue;
        }
        emit((dir / (stem + "_run" + std::to_string(o.repetition) + ".csv")).string(),
             [&](std::ostream& os) { hvi::write_run(os, *o.record); });
        done.push_back(*o.record);
    }
    if (done.empty()) {
        std::cerr << "all runs aborted\n";
        return 1;
    }
    auto const summary = hvi::summarize(done);
    emit((dir / (stem + "_summary.csv")).string(), [&](std::ostream& os) {
        os << "# problem: " << done.front().problem << '\n';
        os << "# acquisition: " << done.front().acquisition << '\n';
        os << "# seed: " << cfg.seed << '\n';
        os << "# completed: " << done.size() << '/' << outcomes.size() << '\n';
        hvi::write_summary(os, summary);
    });
    emit((dir / (stem + "_config.ini")).string(), [&](std::ostream& os) { hvi::write_config(os, cfg); });
    std::cerr << "completed " << done.size() << '/' << outcomes.size() << " runs; final mean hv "
              << hvi::format_double(summary.back().mean_hv) << '\n';
    return 0;
}

int cmd_ecdf(Globals const& g, std::vector<std::string> const& files, std::size_t targets)
{
    std::vector<hvi::RunRecord> runs;
    for (auto const& f : files) {
        auto is = open_input(f);
        try {
            runs.push_back(hvi::read_run(is));
        } catch (hvi::ParseError const& e) {
            throw std::runtime_error(f + ": " + e.what());
        }
    }
    auto const rep = hvi::runtime_ecdf(runs, targets);
    emit(g.out, [&](std::ostream& os) { hvi::write_ecdf(os, rep); });
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact hypervolume-improvement distribution and bi-objective Bayesian optimization"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
    app.add_option("--quad-tol", g.quad_tol, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output file (dist, bench, ecdf) or directory (optimize)");

    auto* dist = app.add_subcommand("dist", "Evaluate the HVI pdf/cdf on a grid");
    dist->fallthrough();
    std::string front_path;
    std::vector<double> pred;
    std::size_t points = 512;
    std::size_t mc = 0;
    dist->add_option("front", front_path, "Front file ('# ref: r1,r2' then y1,y2 lines)")->required();
    dist->add_option("--pred", pred, "Predictive law mu1,mu2,sigma1,sigma2")
        ->required()
        ->delimiter(',')
        ->expected(4);
    dist->add_option("--points", points, "Grid points")->check(CLI::PositiveNumber);
    dist->add_option("--mc", mc, "Append an empirical cdf from this many samples");

    auto* bench = app.add_subcommand("bench", "Exact versus Monte-Carlo timing table");
    bench->fallthrough();
    std::vector<std::size_t> sizes{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::size_t mc_samples = 10000;
    int reps = 5;
    std::size_t grid = 32;
    bench->add_option("--n", sizes, "Front sizes")->delimiter(',')->check(CLI::PositiveNumber);
    bench->add_option("--mc-samples", mc_samples, "Monte-Carlo samples");
    bench->add_option("--reps", reps, "Timed repetitions (median reported)")->check(CLI::PositiveNumber);
    bench->add_option("--grid", grid, "Cdf evaluation points")->check(CLI::PositiveNumber);

    auto* opt = app.add_subcommand("optimize", "Run Bayesian-optimization repetitions from a config file");
    opt->fallthrough();
    std::string config_path;
    OptimizeOverrides ov;
    opt->add_option("config", config_path, "INI experiment file");
    opt->add_option("--problem", ov.problem, "Override the problem");
    opt->add_option("--acquisition", ov.acquisition, "Override the acquisition (default schedule)");
    opt->add_option("--reps", ov.repetitions, "Override the repetition count");
    opt->add_option("--budget", ov.budget, "Override the evaluation budget");

    auto* ecdf = app.add_subcommand("ecdf", "Runtime ECDF over log-spaced hypervolume targets");
    ecdf->fallthrough();
    std::vector<std::string> files;
    std::size_t targets = 10;
    ecdf->add_option("runs", files, "Run CSV files")->required()->check(CLI::ExistingFile);
    ecdf->add_option("--targets", targets, "Number of targets")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist->parsed()) {
            return cmd_dist(g, front_path, pred, points, mc);
        }
        if (bench->parsed()) {
            return cmd_bench(g, sizes, mc_samples, reps, grid);
        }
        if (opt->parsed()) {
            return cmd_optimize(g, config_path, ov);
        }
        if (ecdf->parsed()) {
            return cmd_ecdf(g, files, targets);
        }
    } catch (std::exception const& e) {
        std::cerr << "hvi: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

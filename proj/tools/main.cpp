// Command-line front end: density fits, location estimates, simulations,
// tuning searches and reference-family information.
//
// Exit status: 0 success, 1 data or solver error, 2 usage error.

#include "loclace/comparators.hpp"
#include "loclace/data_io.hpp"
#include "loclace/error.hpp"
#include "loclace/json_io.hpp"
#include "loclace/onestep.hpp"
#include "loclace/profile_mle.hpp"
#include "loclace/refdists.hpp"
#include "loclace/simharness.hpp"
#include "loclace/symlc.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace loclace;

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> load_sample(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("input file '" + path + "' does not exist");
    return read_sample_csv(fs::path(path));
}

void emit(const Json& j, bool human) {
    if (!human) {
        std::cout << dump_json(j) << '\n';
        return;
    }
    for (const auto& [key, value] : j.items()) {
        std::cout << key << ": ";
        if (value.is_number_float()) {
            std::cout << format_double(value.get<double>());
        } else if (value.is_string()) {
            std::cout << value.get<std::string>();
        } else {
            std::cout << dump_json(value, -1);
        }
        std::cout << '\n';
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << text;
}

unsigned default_workers() {
    if (const char* env = std::getenv("LOCLACE_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw UsageError("LOCLACE_WORKERS must be a positive integer");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Location estimation under symmetric log-concavity"};
    app.require_subcommand(1);
    app.fallthrough();
    bool human = false;
    app.add_flag("--human", human, "Human-readable output instead of JSON");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Log-concave MLE of the data (or symmetric MLE about --center)");
    std::string fit_input;
    std::optional<double> fit_center;
    fit_cmd->add_option("input", fit_input, "Single-column CSV")->required();
    fit_cmd->add_option("--center", fit_center, "Fit the symmetric MLE about this centre");

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "Location estimate with a Wald interval");
    std::string est_input;
    std::string method = "onestep";
    std::string score = "sym-smoothed";
    double eta = 0.0;
    std::string info_variant = "empirical";
    std::string prelim = "mean";
    double level = 0.95;
    std::uint64_t seed = 1;
    std::string tuning_family = "gaussian";
    std::string regime = "optimal";
    std::optional<double> stone_d;
    std::optional<double> stone_t;
    std::optional<int> beran_b;
    std::optional<double> beran_rho;
    est_cmd->add_option("input", est_input, "Single-column CSV")->required();
    est_cmd->add_option("--method", method, "onestep | stone | beran")
        ->check(CLI::IsMember({"onestep", "stone", "beran"}));
    est_cmd->add_option("--score", score, "partial-mle | geo-sym | sym-smoothed")
        ->check(CLI::IsMember({"partial-mle", "geo-sym", "sym-smoothed"}));
    est_cmd->add_option("--eta", eta, "Truncation level in [0, 0.5); 0 is untruncated");
    est_cmd->add_option("--info-variant", info_variant, "empirical | smoothed")
        ->check(CLI::IsMember({"empirical", "smoothed"}));
    est_cmd->add_option("--preliminary", prelim, "mean | median | trimmed:<fraction>");
    est_cmd->add_option("--level", level, "Confidence level");
    est_cmd->add_option("--seed", seed, "Accepted for interface uniformity; estimates are deterministic");
    est_cmd->add_option("--tuning-family", tuning_family, "Family whose tabulated tuning Stone/Beran use");
    est_cmd->add_option("--regime", regime, "optimal | non_optimal")
        ->check(CLI::IsMember({"optimal", "non_optimal", "non-optimal"}));
    est_cmd->add_option("--d", stone_d, "Stone truncation multiplier");
    est_cmd->add_option("--t", stone_t, "Stone bandwidth multiplier");
    est_cmd->add_option("--basis-count", beran_b, "Beran basis size");
    est_cmd->add_option("--rho", beran_rho, "Beran difference-quotient scale");

    // mle
    auto* mle_cmd = app.add_subcommand("mle", "Joint MLE of the centre and the symmetric log-concave density");
    std::string mle_input;
    GridConfig grid;
    bool with_trace = false;
    mle_cmd->add_option("input", mle_input, "Single-column CSV")->required();
    mle_cmd->add_option("--coarse-points", grid.coarse_points, "Coarse grid size");
    mle_cmd->add_option("--refine-rounds", grid.refine_rounds, "Refinement rounds");
    mle_cmd->add_option("--refine-shrink", grid.refine_shrink, "Refinement shrink factor");
    mle_cmd->add_flag("--trace", with_trace, "Include the grid trace");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiment from a JSON configuration");
    std::string sim_config;
    std::string out_dir;
    std::optional<unsigned> workers;
    bool paper_scale = false;
    sim_cmd->add_option("config", sim_config, "Experiment configuration (JSON)")->required();
    sim_cmd->add_option("-o,--output", out_dir, "Output directory")->required();
    sim_cmd->add_option("--workers", workers, "Worker threads (default: LOCLACE_WORKERS or the config)");
    sim_cmd->add_flag("--paper-scale", paper_scale, "Run the full published design (3000 replications)");

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "Grid search for Stone or Beran tuning parameters");
    std::string tune_family;
    std::size_t tune_n = 0;
    std::string tune_method = "stone";
    std::size_t tune_reps = 100;
    std::uint64_t tune_seed = 1;
    tune_cmd->add_option("--family", tune_family, "Reference family")->required();
    tune_cmd->add_option("--n", tune_n, "Sample size")->required();
    tune_cmd->add_option("--method", tune_method, "stone | beran")->check(CLI::IsMember({"stone", "beran"}));
    tune_cmd->add_option("--reps", tune_reps, "Inner Monte Carlo replications");
    tune_cmd->add_option("--seed", tune_seed, "Seed");

    // info
    auto* info_cmd = app.add_subcommand("info", "Fisher information of a reference family");
    std::string info_family;
    info_cmd->add_option("--family", info_family, "gaussian | laplace | logistic | symbeta:<r>")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*fit_cmd) {
            const auto sample = load_sample(fit_input);
            const LogConcaveFit fit = fit_center ? fit_symmetric_logconcave(sample, *fit_center)
                                                 : fit_weighted_logconcave(empirical_sample(sample));
            Json j = to_json(fit);
            j["criterion"] = fit.criterion_value();
            j["normalization_residual"] = fit.normalization_residual();
            emit(j, human);
        } else if (*est_cmd) {
            const auto sample = load_sample(est_input);
            LocationEstimate est;
            Json extra;
            if (method == "onestep") {
                OneStepConfig cfg;
                cfg.score_kind = parse_score_kind(score);
                cfg.eta = eta;
                cfg.info_variant = parse_info_variant(info_variant);
                cfg.preliminary = parse_preliminary(prelim);
                try {
                    cfg.validate();
                } catch (const Error& e) {
                    throw UsageError(e.what());
                }
                est = onestep_estimate(sample, cfg, level);
                extra["score"] = score;
            } else if (method == "stone") {
                StoneConfig c;
                if (stone_d || stone_t) {
                    if (!(stone_d && stone_t)) throw UsageError("--d and --t must be given together");
                    c = {*stone_d, *stone_t};
                } else {
                    const auto& table = TuningTable::builtin();
                    const int n = nearest_tabulated_n(table, tuning_family, static_cast<int>(sample.size()));
                    c = tuning_lookup_stone(table, tuning_family, n, parse_regime(regime));
                }
                est = stone_estimate(sample, c, level);
                extra["tuning"] = to_json(c);
            } else {
                BeranConfig c;
                if (beran_b || beran_rho) {
                    if (!(beran_b && beran_rho)) throw UsageError("--basis-count and --rho must be given together");
                    c = {*beran_b, *beran_rho};
                } else {
                    const auto& table = TuningTable::builtin();
                    const int n = nearest_tabulated_n(table, tuning_family, static_cast<int>(sample.size()));
                    c = tuning_lookup_beran(table, tuning_family, n, parse_regime(regime));
                }
                est = beran_estimate(sample, c, level);
                extra["tuning"] = to_json(c);
            }
            Json j;
            j["method"] = method;
            for (const auto& [k, v] : extra.items()) j[k] = v;
            const Json body = to_json(est);
            for (const auto& [k, v] : body.items()) j[k] = v;
            emit(j, human);
        } else if (*mle_cmd) {
            const auto sample = load_sample(mle_input);
            try {
                grid.validate();
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            const MleEstimate mle = fit_full_mle(sample, grid);
            Json j = to_json(mle);
            if (!with_trace) j.erase("grid_trace");
            emit(j, human);
        } else if (*sim_cmd) {
            if (!fs::exists(sim_config)) throw UsageError("config file '" + sim_config + "' does not exist");
            std::ifstream in(sim_config);
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            ExperimentConfig cfg = experiment_config_from_json(parse_json(text));
            if (paper_scale) cfg = paper_scale_config(cfg);
            if (workers) {
                if (*workers == 0) throw UsageError("--workers must be positive");
                cfg.parallel_workers = *workers;
            } else if (const unsigned env = default_workers(); env > 0) {
                cfg.parallel_workers = env;
            }
            const SimulationReport report = run_experiment(cfg);
            fs::create_directories(out_dir);
            write_file(fs::path(out_dir) / "report.csv", report_csv(report));
            write_file(fs::path(out_dir) / "report.json", dump_json(to_json(report)) + "\n");
            Json files = Json::array({"report.csv", "report.json"});
            for (const auto& [name, body] : plot_csvs(report)) {
                write_file(fs::path(out_dir) / name, body);
                files.push_back(name);
            }
            Json j;
            j["output_dir"] = out_dir;
            j["rows"] = report.rows.size();
            j["files"] = files;
            emit(j, human);
        } else if (*tune_cmd) {
            const ReferenceDistribution dist = ReferenceDistribution::parse(tune_family);
            if (tune_n < 2) throw UsageError("--n must be at least 2");
            Json j;
            j["family"] = dist.name();
            j["n"] = tune_n;
            j["method"] = tune_method;
            j["inner_replications"] = tune_reps;
            if (tune_method == "stone") {
                j["best"] = to_json(tune_grid_search(dist, tune_n, default_stone_grid(), tune_reps, tune_seed));
            } else {
                j["best"] = to_json(tune_grid_search(dist, tune_n, default_beran_grid(), tune_reps, tune_seed));
            }
            emit(j, human);
        } else if (*info_cmd) {
            ReferenceDistribution dist;
            try {
                dist = ReferenceDistribution::parse(info_family);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            Json j;
            j["family"] = dist.name();
            j["fisher_info"] = ref_fisher_info(dist);
            emit(j, human);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}

#include "loclace/json_io.hpp"

#include "loclace/error.hpp"

#include <cmath>
#include <cstdio>

namespace loclace {

namespace {

void write(const Json& v, int indent, int depth, std::string& out) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
        case Json::value_t::number_float: {
            const double d = v.get<double>();
            if (std::isfinite(d)) {
                out += format_double(d);
            } else {
                out += '"' + format_double(d) + '"';
            }
            break;
        }
        case Json::value_t::string: out += Json(v.get<std::string>()).dump(); break;
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                break;
            }
            out += '[';
            bool first = true;
            for (const auto& e : v) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                write(e, indent, depth + 1, out);
            }
            newline(depth);
            out += ']';
            break;
        }
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                break;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, e] : v.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += indent < 0 ? ":" : ": ";
                write(e, indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            break;
        }
        default: throw Error(ErrorKind::InvalidArgument, "unsupported JSON value");
    }
}

std::vector<double> real_vector(const Json& j) {
    std::vector<double> out;
    for (const auto& e : j) out.push_back(json_real(e));
    return out;
}

Json real_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
    std::string out;
    write(value, indent, 0, out);
    return out;
}

Json parse_json(const std::string& text) {
    return guarded([&] { return Json::parse(text); });
}

double json_real(const Json& value) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
        const auto s = value.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw Error(ErrorKind::InvalidArgument, "expected a real number in JSON");
}

Json to_json(const LogConcaveFit& fit) {
    Json j;
    j["knots"] = real_array(fit.knots());
    j["logvals"] = real_array(fit.logvals());
    return j;
}

LogConcaveFit fit_from_json(const Json& j) {
    return guarded([&] { return LogConcaveFit(real_vector(j.at("knots")), real_vector(j.at("logvals"))); });
}

Json to_json(const ScoreEstimate& estimate) {
    Json j;
    j["kind"] = std::string(to_string(estimate.kind()));
    j["center"] = estimate.center();
    if (const auto* f = estimate.fit()) {
        j["fit"] = to_json(*f);
        j["support"] = Json::array({f->lower(), f->upper()});
    } else {
        const auto& sm = estimate.smoothed()->smooth();
        j["base_fit"] = to_json(sm.base());
        j["bandwidth"] = sm.bandwidth();
        j["support"] = Json::array({-kInf, kInf});
    }
    return j;
}

ScoreEstimate score_estimate_from_json(const Json& j) {
    return guarded([&] {
        const ScoreKind kind = parse_score_kind(j.at("kind").get<std::string>());
        const double center = json_real(j.at("center"));
        if (kind == ScoreKind::SymSmoothed) {
            SmoothedFit sm(fit_from_json(j.at("base_fit")), json_real(j.at("bandwidth")));
            return ScoreEstimate(center, SymmetrizedSmooth(std::move(sm), center));
        }
        return ScoreEstimate(kind, center, fit_from_json(j.at("fit")));
    });
}

Json to_json(const LocationEstimate& e) {
    Json j;
    j["theta"] = e.theta;
    j["preliminary_theta"] = e.preliminary_theta;
    j["fisher_info"] = e.fisher_info;
    j["eta"] = e.eta;
    j["xi"] = e.xi;
    j["n"] = e.n;
    j["ci_low"] = e.ci_low;
    j["ci_high"] = e.ci_high;
    j["level"] = e.level;
    return j;
}

LocationEstimate location_estimate_from_json(const Json& j) {
    return guarded([&] {
        LocationEstimate e;
        e.theta = json_real(j.at("theta"));
        e.preliminary_theta = json_real(j.at("preliminary_theta"));
        e.fisher_info = json_real(j.at("fisher_info"));
        e.eta = json_real(j.at("eta"));
        e.xi = json_real(j.at("xi"));
        e.n = j.at("n").get<std::size_t>();
        e.ci_low = json_real(j.at("ci_low"));
        e.ci_high = json_real(j.at("ci_high"));
        e.level = json_real(j.at("level"));
        if (!(e.fisher_info > 0.0)) throw Error(ErrorKind::InvalidArgument, "fisher_info must be positive");
        if (!(e.ci_low <= e.theta && e.theta <= e.ci_high)) {
            throw Error(ErrorKind::InvalidArgument, "interval does not contain the estimate");
        }
        return e;
    });
}

Json to_json(const MleEstimate& e) {
    Json j;
    j["theta"] = e.theta;
    j["criterion"] = e.criterion;
    j["fit"] = to_json(e.fit);
    Json trace = Json::array();
    for (const auto& [t, c] : e.grid_trace) trace.push_back(Json::array({t, c}));
    j["grid_trace"] = std::move(trace);
    return j;
}

MleEstimate mle_estimate_from_json(const Json& j) {
    return guarded([&] {
        std::vector<std::pair<double, double>> trace;
        for (const auto& p : j.at("grid_trace")) trace.emplace_back(json_real(p.at(0)), json_real(p.at(1)));
        return MleEstimate{json_real(j.at("theta")), fit_from_json(j.at("fit")), json_real(j.at("criterion")),
                           std::move(trace)};
    });
}

Json to_json(const StoneConfig& c) {
    Json j;
    j["d"] = c.d;
    j["t"] = c.t;
    return j;
}

Json to_json(const BeranConfig& c) {
    Json j;
    j["basis_count"] = c.basis_count;
    j["rho"] = c.rho;
    return j;
}

Json to_json(const EstimatorSpec& spec) {
    Json j;
    j["type"] = std::string(to_string(spec.type));
    if (!spec.label.empty()) j["label"] = spec.label;
    switch (spec.type) {
        case EstimatorSpec::Type::OneStep:
            j["score"] = std::string(to_string(spec.onestep.score_kind));
            j["eta"] = spec.onestep.eta;
            j["info_variant"] = std::string(to_string(spec.onestep.info_variant));
            j["preliminary"] = to_string(spec.onestep.preliminary);
            break;
        case EstimatorSpec::Type::Mle:
            j["coarse_points"] = spec.grid.coarse_points;
            j["refine_rounds"] = spec.grid.refine_rounds;
            j["refine_shrink"] = spec.grid.refine_shrink;
            break;
        case EstimatorSpec::Type::Stone:
            if (spec.stone) {
                j["d"] = spec.stone->d;
                j["t"] = spec.stone->t;
            } else {
                j["regime"] = std::string(to_string(spec.regime));
            }
            break;
        case EstimatorSpec::Type::Beran:
            if (spec.beran) {
                j["basis_count"] = spec.beran->basis_count;
                j["rho"] = spec.beran->rho;
            } else {
                j["regime"] = std::string(to_string(spec.regime));
            }
            break;
        case EstimatorSpec::Type::OracleMean: break;
    }
    return j;
}

EstimatorSpec estimator_spec_from_json(const Json& j) {
    return guarded([&] {
        EstimatorSpec spec;
        spec.type = parse_estimator_type(j.at("type").get<std::string>());
        spec.label = j.value("label", std::string());
        if (j.contains("score")) spec.onestep.score_kind = parse_score_kind(j.at("score").get<std::string>());
        if (j.contains("eta")) spec.onestep.eta = json_real(j.at("eta"));
        if (j.contains("info_variant")) spec.onestep.info_variant = parse_info_variant(j.at("info_variant").get<std::string>());
        if (j.contains("preliminary")) spec.onestep.preliminary = parse_preliminary(j.at("preliminary").get<std::string>());
        if (j.contains("coarse_points")) spec.grid.coarse_points = j.at("coarse_points").get<int>();
        if (j.contains("refine_rounds")) spec.grid.refine_rounds = j.at("refine_rounds").get<int>();
        if (j.contains("refine_shrink")) spec.grid.refine_shrink = json_real(j.at("refine_shrink"));
        if (j.contains("regime")) spec.regime = parse_regime(j.at("regime").get<std::string>());
        if (spec.type == EstimatorSpec::Type::Stone && j.contains("d")) {
            spec.stone = StoneConfig{json_real(j.at("d")), json_real(j.at("t"))};
            spec.stone->validate();
        }
        if (spec.type == EstimatorSpec::Type::Beran && j.contains("basis_count")) {
            spec.beran = BeranConfig{j.at("basis_count").get<int>(), json_real(j.at("rho"))};
            spec.beran->validate();
        }
        spec.onestep.validate();
        spec.grid.validate();
        return spec;
    });
}

Json to_json(const ExperimentConfig& cfg) {
    Json j;
    j["families"] = cfg.families;
    j["sample_sizes"] = cfg.sample_sizes;
    j["replications"] = cfg.replications;
    Json est = Json::array();
    for (const auto& e : cfg.estimators) est.push_back(to_json(e));
    j["estimators"] = std::move(est);
    j["seed"] = cfg.seed;
    j["level"] = cfg.level;
    j["parallel_workers"] = cfg.parallel_workers;
    return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    return guarded([&] {
        ExperimentConfig cfg;
        cfg.families = j.at("families").get<std::vector<std::string>>();
        cfg.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
        cfg.replications = j.value("replications", cfg.replications);
        for (const auto& e : j.at("estimators")) cfg.estimators.push_back(estimator_spec_from_json(e));
        cfg.seed = j.value("seed", std::uint64_t{1});
        cfg.level = j.contains("level") ? json_real(j.at("level")) : 0.95;
        cfg.parallel_workers = j.value("parallel_workers", 1u);
        cfg.validate();
        return cfg;
    });
}

Json to_json(const SimulationReport& report) {
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        Json j;
        j["family"] = r.family;
        j["n"] = r.n;
        j["estimator"] = r.estimator;
        j["fisher_info"] = r.fisher_info;
        j["efficiency"] = r.efficiency;
        j["efficiency_se"] = r.efficiency_se;
        if (r.has_interval) {
            j["coverage"] = r.coverage;
            j["coverage_se"] = r.coverage_se;
            j["mean_ci_length"] = r.mean_ci_length;
            j["mean_ci_length_se"] = r.mean_ci_length_se;
        }
        j["mse"] = r.mse;
        j["mse_se"] = r.mse_se;
        j["successes"] = r.successes;
        j["failures"] = r.failures;
        rows.push_back(std::move(j));
    }
    Json out;
    out["rows"] = std::move(rows);
    return out;
}

}  // namespace loclace

// rocp: rolling-origin conformal prediction toolkit.
//
// Subcommands: scores, predict, evaluate, select, experiment, bound.
// Exit codes: 0 success, 2 input/validation error, 3 runtime/numeric error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rocp/calibration.hpp"
#include "rocp/csv_io.hpp"
#include "rocp/errors.hpp"
#include "rocp/eval.hpp"
#include "rocp/experiment.hpp"
#include "rocp/json_config.hpp"
#include "rocp/metrics.hpp"
#include "rocp/models.hpp"
#include "rocp/rolling.hpp"
#include "rocp/series.hpp"
#include "rocp/window.hpp"

namespace {

using rocp::Err;
using rocp::Error;
using rocp::json;

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path)
        rocp::write_file_atomic(*out_path, content);
    else
        std::cout << content;
}

rocp::TimeSeries load_single_series(const std::string& path) {
    auto series = rocp::read_series_csv(path);
    if (series.size() != 1)
        throw Error(Err::BadConfig, "expected exactly one series in " + path + ", found " +
                                        std::to_string(series.size()));
    return std::move(series.front());
}

std::uint64_t seed_or_env(std::optional<std::uint64_t> seed_flag) {
    if (seed_flag) return *seed_flag;
    if (const char* env = std::getenv("ROCP_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw Error(Err::BadConfig, std::string("invalid ROCP_SEED value: ") + env);
        }
    }
    return 1;
}

struct SchemeArg {
    enum class Kind { Full, RollingFixed, RollingAuto, VsAuto } kind = Kind::RollingAuto;
    std::size_t m = 0;
};

SchemeArg parse_scheme(const std::string& text) {
    if (text == "full") return {SchemeArg::Kind::Full, 0};
    if (text == "rolling:auto") return {SchemeArg::Kind::RollingAuto, 0};
    if (text == "vs:auto") return {SchemeArg::Kind::VsAuto, 0};
    if (text.rfind("rolling:", 0) == 0) {
        try {
            const long long m = std::stoll(text.substr(8));
            if (m >= 1) return {SchemeArg::Kind::RollingFixed, static_cast<std::size_t>(m)};
        } catch (...) {
        }
    }
    throw Error(Err::BadConfig,
                "unknown scheme: " + text + " (expected full|rolling:M|rolling:auto|vs:auto)");
}

struct RollingArgs {
    std::string input;
    std::string model_text = "ar:12";
    int horizon = 1;
    std::optional<std::size_t> min_train;
    std::size_t refit_stride = 1;
};

rocp::RollingConfig make_rolling_config(const RollingArgs& args, const rocp::ModelSpec& spec,
                                        bool scale_scores) {
    rocp::RollingConfig cfg;
    cfg.horizon = args.horizon;
    cfg.min_train = args.min_train ? *args.min_train : rocp::RollingConfig::default_min_train(spec);
    cfg.refit_stride = args.refit_stride;
    cfg.scale_scores = scale_scores;
    return cfg;
}

rocp::RollingLog stderr_log() {
    return [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
}

int cmd_scores(const RollingArgs& args, bool scale, const std::optional<std::string>& out) {
    const auto spec = rocp::model_spec_from_string(args.model_text);
    const auto series = load_single_series(args.input);
    const auto cfg = make_rolling_config(args, spec, scale || spec.provides_volatility());
    const auto scores = rolling_scores(series, spec, cfg, stderr_log());
    emit(out, rocp::scores_to_csv(scores));
    return 0;
}

int cmd_predict(const RollingArgs& args, const std::string& scheme_text, double alpha,
                std::size_t grid_points, double grid_lo, double grid_hi, double beta,
                double val_fraction, const std::optional<std::string>& out,
                const std::optional<std::string>& scores_out) {
    const auto spec = rocp::model_spec_from_string(args.model_text);
    const auto series = load_single_series(args.input);
    SchemeArg scheme = parse_scheme(scheme_text);

    bool fallback = false;
    if (scheme.kind == SchemeArg::Kind::VsAuto && !spec.provides_volatility()) {
        std::cerr << "warning: model `" << args.model_text
                  << "` provides no volatility forecast; falling back to the rolling scheme\n";
        scheme.kind = SchemeArg::Kind::RollingAuto;
        fallback = true;
    }

    const bool scaled = scheme.kind == SchemeArg::Kind::VsAuto;
    const auto cfg = make_rolling_config(args, spec, scaled || spec.provides_volatility());
    const auto scores = rolling_scores(series, spec, cfg, stderr_log());
    if (scores_out) rocp::write_file_atomic(*scores_out, rocp::scores_to_csv(scores));
    if (scores.empty()) throw Error(Err::InsufficientScores, "no scores available");

    std::size_t m_used = 0;
    rocp::Boundary boundary = rocp::Boundary::No;
    std::string scheme_name;
    switch (scheme.kind) {
        case SchemeArg::Kind::Full:
            m_used = scores.size();
            scheme_name = "full";
            break;
        case SchemeArg::Kind::RollingFixed:
            m_used = scheme.m;
            scheme_name = "rolling:" + std::to_string(scheme.m);
            break;
        case SchemeArg::Kind::RollingAuto:
        case SchemeArg::Kind::VsAuto: {
            const auto grid = rocp::make_grid(series.size(), beta, grid_points, grid_lo, grid_hi);
            rocp::SelectOptions sopts;
            sopts.val_fraction = val_fraction;
            sopts.scaled = scaled;
            const auto sel = rocp::select_window(scores, grid, alpha, sopts);
            m_used = sel.m_hat;
            boundary = sel.at_boundary;
            scheme_name = scaled ? "vs:auto" : "rolling:auto";
            break;
        }
    }

    // final forecast from the full sample
    const auto model = rocp::fit_model(spec, series.values);
    const double center = rocp::point_forecast(model, series.values, args.horizon);

    rocp::PredictionInterval interval;
    if (scaled) {
        const auto cal = rocp::scale_window(scores, m_used);
        const auto sigma_now = rocp::volatility_forecast(model, series.values, args.horizon);
        if (!sigma_now) throw Error(Err::MissingSigma, "model produced no volatility forecast");
        interval = rocp::vs_rocp_interval(center, cal, *sigma_now, alpha);
    } else {
        const auto cal = rocp::take_window(scores, m_used);
        interval = rocp::rocp_interval(center, cal, alpha);
    }

    json j;
    j["center"] = interval.center;
    j["lower"] = interval.lower;
    j["upper"] = interval.upper;
    j["level"] = interval.level;
    j["m_used"] = m_used;
    j["scheme"] = scheme_name;
    j["boundary_flag"] = rocp::boundary_name(boundary);
    if (fallback) j["fallback_from_vs"] = true;
    emit(out, j.dump(2) + "\n");
    return 0;
}

int cmd_evaluate(const std::string& input, const std::string& scheme_text, double alpha,
                 std::size_t window, const std::optional<std::string>& out) {
    // predictions mode: a CSV with y,lower,upper columns
    {
        std::ifstream probe(input);
        if (!probe) throw Error(Err::IoError, "cannot open input file: " + input);
        std::string header;
        std::getline(probe, header);
        if (header.find("y") != std::string::npos && header.find("lower") != std::string::npos &&
            header.find("upper") != std::string::npos && header.find("score") == std::string::npos) {
            std::vector<std::pair<double, rocp::PredictionInterval>> pairs;
            std::string line;
            const auto cols = rocp::detail::split_csv_line(header);
            int ci_y = -1, ci_lo = -1, ci_hi = -1;
            for (std::size_t i = 0; i < cols.size(); ++i) {
                const auto name = rocp::detail::trim(cols[i]);
                if (name == "y") ci_y = static_cast<int>(i);
                if (name == "lower") ci_lo = static_cast<int>(i);
                if (name == "upper") ci_hi = static_cast<int>(i);
            }
            while (std::getline(probe, line)) {
                if (rocp::detail::trim(line).empty()) continue;
                const auto f = rocp::detail::split_csv_line(line);
                const auto y = rocp::detail::parse_double(f[static_cast<std::size_t>(ci_y)]);
                const auto lo = rocp::detail::parse_double(f[static_cast<std::size_t>(ci_lo)]);
                const auto hi = rocp::detail::parse_double(f[static_cast<std::size_t>(ci_hi)]);
                if (!y || !lo || !hi) throw Error(Err::BadConfig, "bad prediction row in " + input);
                const double center = 0.5 * (*lo + *hi);
                pairs.emplace_back(*y, rocp::PredictionInterval{center, *lo, *hi, 1.0 - alpha});
            }
            const auto report = rocp::evaluate_predictions(pairs, alpha, window);
            emit(out, rocp::eval_report_csv(report, "predictions", 0, 0, alpha));
            return 0;
        }
    }

    const auto scores = rocp::read_scores_csv(input);
    const SchemeArg scheme = parse_scheme(scheme_text == "full" ? "full" : scheme_text);
    rocp::SchemeSpec spec;
    switch (scheme.kind) {
        case SchemeArg::Kind::Full:
            spec = rocp::SchemeSpec::full();
            break;
        case SchemeArg::Kind::RollingFixed:
            spec = rocp::SchemeSpec::rolling(scheme.m);
            break;
        default:
            throw Error(Err::BadConfig, "evaluate needs scheme full or rolling:M");
    }
    const int h = scores.empty() ? 1 : scores.front().horizon;
    const auto report = rocp::evaluate_scheme(scores, spec, alpha, window);
    emit(out, rocp::eval_report_csv(report, rocp::scheme_name(spec.kind), spec.m, h, alpha));
    return 0;
}

int cmd_select(const std::string& input, double alpha, std::optional<std::size_t> T_flag,
               std::size_t grid_points, double grid_lo, double grid_hi, double beta,
               double val_fraction, bool scaled, const std::string& boundary_policy,
               const std::optional<std::string>& out) {
    const auto scores = rocp::read_scores_csv(input);
    if (scores.empty()) throw Error(Err::EmptyInput, "no score rows in " + input);

    std::size_t T = 0;
    if (T_flag) {
        T = *T_flag;
    } else {
        for (const auto& r : scores)
            T = std::max(T, r.origin + static_cast<std::size_t>(std::max(r.horizon, 1)));
    }

    const auto grid = rocp::make_grid(T, beta, grid_points, grid_lo, grid_hi);
    rocp::SelectOptions sopts;
    sopts.val_fraction = val_fraction;
    sopts.scaled = scaled;
    const auto sel = rocp::select_window(scores, grid, alpha, sopts);

    if (boundary_policy == "error" && sel.at_boundary != rocp::Boundary::No)
        throw Error(Err::DegenerateGrid, std::string("selected window sits at the grid's ") +
                                             rocp::boundary_name(sel.at_boundary) + " boundary");

    std::string csv = "m,mean_winkler\n";
    for (const auto& c : sel.per_candidate) {
        csv += std::to_string(c.m);
        csv += ',';
        csv += rocp::detail::fmt_double(c.mean_winkler);
        csv += '\n';
    }
    const bool report_boundary = boundary_policy != "accept";
    csv += "# m_hat=" + std::to_string(sel.m_hat) + ",boundary=" +
           (report_boundary ? rocp::boundary_name(sel.at_boundary) : "none") + "\n";
    emit(out, csv);
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<unsigned> jobs_flag, std::optional<std::uint64_t> seed_flag) {
    std::ifstream in(config_path);
    if (!in) throw Error(Err::IoError, "cannot open config file: " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Err::BadConfig, std::string("invalid config JSON: ") + e.what());
    }
    auto cfg = rocp::experiment_config_from_json(j);
    if (jobs_flag) cfg.jobs = *jobs_flag;  // flags override config fields
    if (seed_flag || !j.contains("seed")) cfg.seed = seed_or_env(seed_flag);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    // effective merged config, echoed for provenance
    rocp::write_file_atomic(dir / "config.json",
                            rocp::experiment_config_to_json(cfg).dump(2) + "\n");

    const auto result = rocp::run_scaling_experiment(cfg);
    rocp::write_file_atomic(dir / "rows.csv", rocp::scaling_rows_to_csv(result.rows));

    if (!result.failures.empty()) {
        std::string log;
        for (const auto& f : result.failures) log += f + "\n";
        rocp::write_file_atomic(dir / "failures.log", log);
        for (const auto& f : result.failures) std::cerr << "warning: replicate dropped: " << f << "\n";
    }

    // scatter plot data: every row, with its exclusion status
    std::string scatter = "series_id,freq,T,m_star,log_T,log_m_star,boundary,excluded\n";
    for (const auto& r : result.rows) {
        const bool excluded = cfg.exclude_boundary && r.at_boundary;
        scatter += r.series_id + "," + r.freq_tag + "," + std::to_string(r.length) + "," +
                   std::to_string(r.m_star) + "," +
                   rocp::detail::fmt_double(std::log(static_cast<double>(r.length))) + "," +
                   rocp::detail::fmt_double(std::log(static_cast<double>(r.m_star))) + "," +
                   (r.at_boundary ? "1" : "0") + "," + (excluded ? "1" : "0") + "\n";
    }
    rocp::write_file_atomic(dir / "scatter.csv", scatter);

    const auto regression =
        rocp::scaling_regression(result.rows, cfg.fixed_effects, cfg.exclude_boundary);
    rocp::write_file_atomic(dir / "regression.json",
                            rocp::regression_result_to_json(regression, cfg.fixed_effects).dump(2) +
                                "\n");

    // fitted lines over the T grid, one per intercept group
    std::string lines = "group,T,log_T,fit_log_m\n";
    for (const auto& [group, intercept] : regression.intercepts) {
        for (const auto T : cfg.T_grid) {
            const double lt = std::log(static_cast<double>(T));
            lines += group + "," + std::to_string(T) + "," + rocp::detail::fmt_double(lt) + "," +
                     rocp::detail::fmt_double(intercept + regression.slope * lt) + "\n";
        }
    }
    rocp::write_file_atomic(dir / "fit_lines.csv", lines);

    std::cout << "rows: " << result.rows.size() << " (" << result.failures.size()
              << " dropped), slope " << regression.slope << ", 95% CI [" << regression.ci95_lo
              << ", " << regression.ci95_hi << "]\n";
    return 0;
}

int cmd_bound(std::size_t T, double beta, double gamma, double l_drift,
              const rocp::BoundParams& params, std::size_t points,
              const std::optional<std::string>& out) {
    if (T < 4) throw Error(Err::InvalidSpec, "need T >= 4");
    std::string csv = "m,tradeoff,coverage_bound\n";
    // log-spaced m grid over [2, T]
    const double lo = std::log(2.0), hi = std::log(static_cast<double>(T));
    std::size_t last_m = 0;
    for (std::size_t i = 0; i < points; ++i) {
        const double frac = (points == 1) ? 0.0
                                          : static_cast<double>(i) / static_cast<double>(points - 1);
        const auto m = static_cast<std::size_t>(std::llround(std::exp(lo + (hi - lo) * frac)));
        if (m == last_m) continue;
        last_m = m;
        csv += std::to_string(m);
        csv += ',';
        csv += rocp::detail::fmt_double(rocp::tradeoff_curve(m, T, beta, gamma, l_drift));
        csv += ',';
        csv += rocp::detail::fmt_double(rocp::coverage_bound(m, T, beta, params));
        csv += '\n';
    }
    csv += "# tradeoff_minimizer=" +
           rocp::detail::fmt_double(rocp::tradeoff_minimizer(T, beta, gamma, l_drift)) +
           ",bound_minimizer=" + std::to_string(rocp::minimize_coverage_bound(T, beta, params)) +
           "\n";
    emit(out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rolling-origin conformal prediction toolkit"};
    app.require_subcommand(1);
    // --h is the horizon flag, so help lives on --help alone
    app.set_help_flag("--help", "print help");

    RollingArgs rolling;
    std::optional<std::string> out_path, scores_out;
    std::optional<std::uint64_t> seed_flag;
    std::optional<unsigned> jobs_flag;
    double alpha = 0.1;
    std::string scheme_text = "rolling:auto";
    std::size_t grid_points = 30;
    double grid_lo = 0.1, grid_hi = 4.0, beta = 1.0, val_fraction = 0.3;
    std::size_t window = 50;
    bool scale_flag = false, scaled_select = false;
    std::optional<std::size_t> T_flag;
    std::string boundary_policy = "flag";
    std::string config_path, out_dir = "rocp-out";
    double gamma = 1.0, l_drift = 1.0;
    rocp::BoundParams bound_params;
    std::size_t bound_points = 40;
    std::size_t bound_T = 1000;

    auto add_rolling_flags = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--input", rolling.input, "input series CSV")->required();
        cmd->add_option("--model", rolling.model_text, "naive|ar[:max_lag]|arma_garch");
        cmd->add_option("--h", rolling.horizon, "forecast horizon");
        cmd->add_option("--min-train", rolling.min_train, "first forecast origin");
        cmd->add_option("--refit-stride", rolling.refit_stride, "origins between refits");
    };
    auto add_grid_flags = [&](CLI::App* cmd) {
        cmd->add_option("--grid-points", grid_points, "candidate grid size");
        cmd->add_option("--grid-lo", grid_lo, "lowest grid ratio");
        cmd->add_option("--grid-hi", grid_hi, "highest grid ratio");
        cmd->add_option("--beta", beta, "drift smoothness exponent");
        cmd->add_option("--val-fraction", val_fraction, "validation fold fraction");
    };

    auto* scores_cmd = app.add_subcommand("scores", "rolling-origin score generation");
    add_rolling_flags(scores_cmd);
    scores_cmd->add_flag("--scale", scale_flag, "record volatility forecasts alongside scores");
    scores_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* predict_cmd = app.add_subcommand("predict", "conformal interval for Y_{T+h}");
    add_rolling_flags(predict_cmd);
    predict_cmd->add_option("--alpha", alpha, "miscoverage level");
    predict_cmd->add_option("--scheme", scheme_text, "full|rolling:M|rolling:auto|vs:auto");
    predict_cmd->add_option("--m", T_flag, "window for the rolling scheme (same as rolling:M)");
    add_grid_flags(predict_cmd);
    predict_cmd->add_option("--out", out_path, "output JSON path (default stdout)");
    predict_cmd->add_option("--scores-out", scores_out, "also dump the score CSV here");

    auto* eval_cmd = app.add_subcommand("evaluate", "interval metrics from scores or predictions");
    eval_cmd->set_help_flag("--help", "print help");
    eval_cmd->add_option("--input", config_path, "score CSV or predictions CSV")->required();
    eval_cmd->add_option("--alpha", alpha, "miscoverage level");
    eval_cmd->add_option("--scheme", scheme_text, "full|rolling:M");
    eval_cmd->add_option("--window", window, "local-coverage window");
    eval_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* select_cmd = app.add_subcommand("select", "Winkler cross-validation window selection");
    select_cmd->set_help_flag("--help", "print help");
    select_cmd->add_option("--input", config_path, "score CSV")->required();
    select_cmd->add_option("--alpha", alpha, "miscoverage level");
    select_cmd->add_option("--T", T_flag, "series length anchoring the grid");
    add_grid_flags(select_cmd);
    select_cmd->add_flag("--scaled", scaled_select, "select on volatility-scaled scores");
    select_cmd->add_option("--boundary-policy", boundary_policy, "flag|error|accept")
        ->check(CLI::IsMember({"flag", "error", "accept"}));
    select_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* exp_cmd = app.add_subcommand("experiment", "synthetic scaling experiment");
    exp_cmd->set_help_flag("--help", "print help");
    exp_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    exp_cmd->add_option("--out-dir", out_dir, "output directory");
    exp_cmd->add_option("--jobs", jobs_flag, "worker threads");
    exp_cmd->add_option("--seed", seed_flag, "root seed (overrides config)");

    auto* bound_cmd = app.add_subcommand("bound", "tabulate the tradeoff curve and coverage bound");
    bound_cmd->set_help_flag("--help", "print help");
    bound_cmd->add_option("--T", bound_T, "series length");
    bound_cmd->add_option("--beta", beta, "drift smoothness exponent");
    bound_cmd->add_option("--gamma", gamma, "quantile-noise constant");
    bound_cmd->add_option("--L", l_drift, "drift rate");
    bound_cmd->add_option("--f-bar", bound_params.f_bar, "density upper bound");
    bound_cmd->add_option("--f-under", bound_params.f_under, "density lower bound");
    bound_cmd->add_option("--a-inf", bound_params.a_inf, "cumulative mixing");
    bound_cmd->add_option("--c-star", bound_params.c_star, "remainder constant");
    bound_cmd->add_option("--r-T", bound_params.r_t, "forecast-estimation radius");
    bound_cmd->add_option("--eta-T", bound_params.eta_t, "forecast-estimation failure probability");
    bound_cmd->add_option("--points", bound_points, "rows in the tabulation");
    bound_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (scores_cmd->parsed()) return cmd_scores(rolling, scale_flag, out_path);
        if (predict_cmd->parsed()) {
            if (T_flag && scheme_text == "rolling:auto")
                scheme_text = "rolling:" + std::to_string(*T_flag);
            return cmd_predict(rolling, scheme_text, alpha, grid_points, grid_lo, grid_hi, beta,
                               val_fraction, out_path, scores_out);
        }
        if (eval_cmd->parsed())
            return cmd_evaluate(config_path,
                                scheme_text == "rolling:auto" ? "full" : scheme_text, alpha,
                                window, out_path);
        if (select_cmd->parsed())
            return cmd_select(config_path, alpha, T_flag, grid_points, grid_lo, grid_hi, beta,
                              val_fraction, scaled_select, boundary_policy, out_path);
        if (exp_cmd->parsed()) return cmd_experiment(config_path, out_dir, jobs_flag, seed_flag);
        if (bound_cmd->parsed()) {
            bound_params.l_drift = l_drift;
            return cmd_bound(bound_T, beta, gamma, l_drift, bound_params, bound_points, out_path);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << rocp::err_name(e.code()) << "): " << e.what() << "\n";
        return rocp::is_input_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

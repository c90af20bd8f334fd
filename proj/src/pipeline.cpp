#include "coxred/pipeline.hpp"

#include "coxred/comparators.hpp"
#include "coxred/confset.hpp"
#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"
#include "coxred/report.hpp"
#include "coxred/rng.hpp"

#include <cmath>

namespace coxred::pipeline {

using nlohmann::json;

void RunConfig::validate() const {
    reduction.validate();
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
    if (s_max < 0) throw ConfigError("smax must be nonnegative");
    if (budget < 1) throw ConfigError("budget must be positive");
    if (!(interval_level > 0.0 && interval_level < 1.0)) throw ConfigError("interval level must lie in (0, 1)");
    if (method != "cox" && method != "marginal" && method != "lasso")
        throw ConfigError("unknown method '" + method + "' (expected marginal, lasso or cox)");
}

json RunConfig::resolved() const {
    const auto& r = reduction;
    json j;
    j["reduction"] = {{"dims_round1", r.dims_round1},
                      {"dims_round2", r.dims_round2},
                      {"side_round1", r.side_round1},
                      {"side_round2", r.side_round2},
                      {"alpha", r.alpha},
                      {"sigma", r.sigma.describe()},
                      {"pair_threshold", r.pair_threshold},
                      {"subsample_fraction", r.subsample_fraction},
                      {"rerandomisations", r.rerandomisations},
                      {"vote_fraction", r.vote_fraction},
                      {"seed", r.seed},
                      {"top_m", r.top_m},
                      {"fibre_votes_round1", r.fibre_votes_round1},
                      {"max_rounds", r.max_rounds}};
    j["theta"] = theta;
    j["s_max"] = s_max;
    j["budget"] = budget;
    j["interval_level"] = interval_level;
    j["model"] = model;
    j["method"] = method;
    j["s_hat"] = s_hat;
    return j;
}

namespace {

struct Context {
    report::TextWriter text;
    json sidecar;
};

Context start(const std::string& command, const io::DataSet& data, const RunConfig& config) {
    config.validate();
    Context c;
    c.text.heading("run");
    c.text.field("command", command);
    c.text.field("version", report::version());
    c.text.field("response", data.response_name);
    c.text.field("n", std::to_string(data.n()));
    c.text.field("p", std::to_string(data.p()));
    c.text.field("constant_columns", report::set_text(data.constant_columns, data.covariate_names));
    c.text.heading("config");
    const json resolved = config.resolved();
    for (const auto& [k, v] : resolved["reduction"].items()) c.text.field("reduction." + k, v.dump());
    for (const auto& [k, v] : resolved.items())
        if (k != "reduction") c.text.field(k, v.dump());
    c.text.heading("rules");
    c.text.field("round1", reduction::round1_rule_name(config.reduction));
    c.text.field("round2", reduction::round2_rule_name(config.reduction));
    c.text.field("confidence_set", "accept S_m when w(S_m) <= chi2_df(1 - theta), |S_m| <= smax");

    c.sidecar["version"] = report::version();
    c.sidecar["command"] = command;
    c.sidecar["data"] = {{"response", data.response_name},
                         {"n", data.n()},
                         {"p", data.p()},
                         {"constant_columns", report::set_json(data.constant_columns, data.covariate_names)}};
    c.sidecar["config"] = resolved;
    c.sidecar["seeds"] = {{"seed", config.reduction.seed},
                          {"split", derive_seed(config.reduction.seed, 0, "split")}};
    c.sidecar["rules"] = {reduction::round1_rule_name(config.reduction),
                          reduction::round2_rule_name(config.reduction)};
    return c;
}

Report finish(Context& c, std::string table = {}) { return {c.text.str(), c.sidecar, std::move(table)}; }

reduction::ReductionOutcome reduce(const io::DataSet& data, const RunConfig& config) {
    auto rc = config.reduction;
    rc.threads = config.threads;
    return reduction::cox_reduce(data.y, data.x, rc);
}

confset::ModelConfidenceSet confidence_set(const Vector& y, const Matrix& x, const IndexSet& model,
                                           const RunConfig& config) {
    return confset::build_confidence_set(y, x, model, config.theta, config.s_max, config.reduction.sigma,
                                         {config.budget, config.threads});
}

struct Subsample {
    Vector y;
    Matrix x;
    double y_mean = 0.0;  // mean of the centred response over I
    Vector x_means;
};

Subsample on_first(const io::DataSet& data, const IndexSet& rows) {
    const auto cy = linalg::centre(select_rows(data.y, rows));
    const auto cx = linalg::centre(select_rows(data.x, rows));
    return {cy.values, cx.values, cy.mean, cx.means};
}

std::string joined(const IndexSet& set, const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ";" : "") + names[static_cast<std::size_t>(set[i])];
    return s;
}

}  // namespace

Report run_reduce(const io::DataSet& data, const RunConfig& config) {
    Context c = start("reduce", data, config);
    const auto out = reduce(data, config);
    report::write(c.text, out, data.covariate_names);
    c.sidecar["seeds"]["split"] = out.split_seed;
    c.sidecar["reduction"] = report::to_json(out, data.covariate_names);
    return finish(c);
}

Report run_confset(const io::DataSet& data, const RunConfig& config) {
    Context c = start("confset", data, config);
    std::vector<int> idx;
    for (const auto& name : config.model) {
        const int j = io::covariate_index(data, name);
        if (j < 0) throw ConfigError("model column '" + name + "' not found");
        idx.push_back(j);
    }
    const IndexSet model = make_index_set(idx);
    const auto mcs = confidence_set(data.y, data.x, model, config);
    report::write(c.text, mcs, data.covariate_names);
    c.sidecar["confidence_set"] = report::to_json(mcs, data.covariate_names);
    return finish(c);
}

Report run_pipeline(const io::DataSet& data, const RunConfig& config, const std::optional<Matrix>& predict) {
    Context c = start("pipeline", data, config);
    const auto out = reduce(data, config);
    report::write(c.text, out, data.covariate_names);
    c.sidecar["seeds"]["split"] = out.split_seed;
    c.sidecar["reduction"] = report::to_json(out, data.covariate_names);

    const Subsample sub = on_first(data, out.split.first);
    const auto mcs = confidence_set(sub.y, sub.x, out.comprehensive, config);
    c.text.field("assessment_rows", "I (" + std::to_string(out.split.first.size()) + ")");
    report::write(c.text, mcs, data.covariate_names);
    c.sidecar["confidence_set"] = report::to_json(mcs, data.covariate_names);

    if (!predict) return finish(c);
    if (static_cast<std::size_t>(predict->cols()) != data.p())
        throw DataError("prediction rows need " + std::to_string(data.p()) + " covariates");
    std::string csv = "row,model,available,prediction,lower,upper,reason\n";
    json rows = json::array();
    c.text.heading("prediction intervals");
    c.text.field("level", report::num(config.interval_level));
    std::vector<std::vector<std::string>> table;
    const double offset = data.y_mean + sub.y_mean;
    for (Eigen::Index r = 0; r < predict->rows(); ++r) {
        const Vector x_new = predict->row(r).transpose() - data.x_means - sub.x_means;
        const auto intervals =
            confset::prediction_intervals(sub.y, sub.x, mcs, x_new, config.interval_level, config.reduction.sigma);
        for (const auto& pi : intervals) {
            const std::string model = joined(pi.members, data.covariate_names);
            const double centre = offset + pi.centre;
            if (pi.available) {
                const double lo = centre - pi.half_width, hi = centre + pi.half_width;
                csv += std::to_string(r) + "," + model + ",1," + report::num(centre, 17) + "," + report::num(lo, 17) +
                       "," + report::num(hi, 17) + ",\n";
                table.push_back({std::to_string(r), "{" + model + "}", report::num(centre), report::num(lo),
                                 report::num(hi)});
                rows.push_back({{"row", r}, {"model", report::set_json(pi.members, data.covariate_names)},
                                {"prediction", centre}, {"lower", lo}, {"upper", hi}});
            } else {
                csv += std::to_string(r) + "," + model + ",0,,,," + pi.reason + "\n";
                table.push_back({std::to_string(r), "{" + model + "}", "-", "-", "-"});
                rows.push_back({{"row", r}, {"model", report::set_json(pi.members, data.covariate_names)},
                                {"omitted", pi.reason}});
            }
        }
    }
    c.text.table({"row", "model", "prediction", "lower", "upper"}, table);
    c.sidecar["prediction_intervals"] = {{"level", config.interval_level}, {"rows", rows}};
    return finish(c, csv);
}

Report run_compare(const io::DataSet& data, const RunConfig& config) {
    Context c = start("compare", data, config);
    const auto split =
        reduction::split_sample(data.n(), config.reduction.subsample_fraction, derive_seed(config.reduction.seed, 0, "split"));
    c.text.heading("comparator");
    c.text.field("method", config.method);

    IndexSet model;
    std::size_t size = config.s_hat;
    if (config.method == "cox" || size == 0) {
        const auto out = reduce(data, config);
        if (config.method == "cox") {
            model = out.comprehensive;
            c.sidecar["reduction"] = report::to_json(out, data.covariate_names);
        }
        if (size == 0) size = out.comprehensive.size();
        c.text.field("cox_model_size", std::to_string(out.comprehensive.size()));
    }
    json details;
    if (config.method == "marginal" && size > 0) {
        const auto scr = comparators::marginal_screen(data.y, data.x, size);
        model = scr.kept;
        std::vector<std::vector<std::string>> rows;
        json ranked = json::array();
        for (std::size_t i = 0; i < size && i < scr.ranked.size(); ++i) {
            const int j = scr.ranked[i];
            const double r = scr.abs_corr[static_cast<std::size_t>(j)];
            rows.push_back({std::to_string(i + 1), data.covariate_names[static_cast<std::size_t>(j)], report::num(r)});
            ranked.push_back({{"variable", data.covariate_names[static_cast<std::size_t>(j)]}, {"abs_corr", r}});
        }
        c.text.table({"rank", "variable", "abs_corr"}, rows);
        details["ranked"] = ranked;
    } else if (config.method == "lasso" && size > 0) {
        const auto fit = comparators::lasso_undertuned_support(data.y, data.x, size);
        model = fit.support;
        c.text.field("lasso_lambda", report::num(fit.lambda));
        c.text.field("grid_exhausted", fit.grid_exhausted ? "yes" : "no");
        details = {{"lambda", fit.lambda}, {"grid_exhausted", fit.grid_exhausted}};
    }
    c.text.field("target_size", std::to_string(size));
    c.text.field("comprehensive_model", report::set_text(model, data.covariate_names));
    c.sidecar["comparator"] = {{"method", config.method},
                               {"target_size", size},
                               {"comprehensive", report::set_json(model, data.covariate_names)},
                               {"details", details}};

    const Subsample sub = on_first(data, split.first);
    const auto mcs = confidence_set(sub.y, sub.x, model, config);
    c.text.field("assessment_rows", "I (" + std::to_string(split.first.size()) + ")");
    report::write(c.text, mcs, data.covariate_names);
    c.sidecar["confidence_set"] = report::to_json(mcs, data.covariate_names);
    return finish(c);
}

void write_outputs(const Report& report, const std::string& path) {
    io::write_text(path, report.text);
    io::write_text(path + ".json", report.sidecar.dump(2) + "\n");
    if (!report.table_csv.empty()) io::write_text(path + ".csv", report.table_csv);
}

}  // namespace coxred::pipeline

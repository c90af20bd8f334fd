#include "coxred/errors.hpp"
#include "coxred/io.hpp"
#include "coxred/pipeline.hpp"
#include "coxred/report.hpp"
#include "coxred/simulation.hpp"
#include "coxred/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace coxred;

struct Args {
    std::string input;
    std::string response;
    std::string output;
    std::string sigma = "estimate";
    std::string predict;
    pipeline::RunConfig run;

    std::string experiment = "coverage";
    std::size_t replicates = 0;
    int marked = 0;
    int side = 0;
    int dims = 0;

    std::vector<int> only;
    CLI::App* simulate = nullptr;
};

enum ExitCode { kOk = 0, kFailed = 1, kConfig = 2, kData = 3, kNumerical = 4, kBudget = 5 };

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config: return kConfig;
        case ErrorKind::Data: return kData;
        case ErrorKind::Numerical: return kNumerical;
        case ErrorKind::Budget: return kBudget;
    }
    return kFailed;
}

SigmaMode parse_sigma(const std::string& text) {
    if (text == "estimate") return SigmaMode::estimate();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v > 0.0)) throw ConfigError("--sigma expects a positive value or 'estimate'");
    return SigmaMode::known_value(v);
}

void add_run_options(CLI::App* sub, Args& a) {
    auto& r = a.run.reduction;
    sub->add_option("--seed", r.seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", a.run.threads, "Worker threads (reports do not depend on it)")->capture_default_str();
    sub->add_option("--k1", r.side_round1, "Round-1 side; 0 picks the smallest that fits")->capture_default_str();
    sub->add_option("--k2", r.side_round2, "Round-2 side; 0 picks the smallest that fits")->capture_default_str();
    sub->add_option("--dims1", r.dims_round1, "Round-1 dimensions")->capture_default_str();
    sub->add_option("--dims2", r.dims_round2, "Round-2 dimensions")->capture_default_str();
    sub->add_option("--alpha", r.alpha, "Round-2 significance level")->capture_default_str();
    sub->add_option("--pair-threshold", r.pair_threshold, "Pairing threshold on |corr|")->capture_default_str();
    sub->add_option("--subsample", r.subsample_fraction, "Share of rows in subsample I")->capture_default_str();
    sub->add_option("--rerand", r.rerandomisations, "Rerandomisations B")->capture_default_str();
    sub->add_option("--vote", r.vote_fraction, "Vote fraction over the B runs")->capture_default_str();
    sub->add_option("--max-rounds", r.max_rounds, "Cap on reduction rounds")->capture_default_str();
    sub->add_flag("--keep-wald", r.keep_wald, "Keep per-fibre Wald vectors in the sidecar");
    sub->add_option("--sigma", a.sigma, "Known noise sd, or 'estimate'")->capture_default_str();
    sub->add_option("--theta", a.run.theta, "Confidence-set level theta")->capture_default_str();
    sub->add_option("--smax", a.run.s_max, "Largest submodel size")->capture_default_str();
    sub->add_option("--budget", a.run.budget, "Most submodels to fit")->capture_default_str();
}

void add_data_options(CLI::App* sub, Args& a) {
    sub->add_option("--input", a.input, "CSV file with a header row")->required();
    sub->add_option("--response", a.response, "Response column (default: first column)");
    sub->add_option("--output", a.output, "Report path; the sidecar goes to <output>.json");
}

void emit(const pipeline::Report& rep, const std::string& output) {
    if (output.empty()) {
        std::cout << rep.text;
        return;
    }
    pipeline::write_outputs(rep, output);
    std::cout << "wrote " << output << " and " << output << ".json" << (rep.table_csv.empty() ? "" : " and " + output + ".csv")
              << "\n";
}

// Experiments keep their own reduction defaults unless a flag was given.
void overlay(const Args& a, reduction::ReductionConfig& rc) {
    const auto given = [&](const char* name) { return a.simulate->get_option(name)->count() > 0; };
    const auto& r = a.run.reduction;
    if (given("--alpha")) rc.alpha = r.alpha;
    if (given("--rerand")) rc.rerandomisations = r.rerandomisations;
    if (given("--vote")) rc.vote_fraction = r.vote_fraction;
    if (given("--subsample")) rc.subsample_fraction = r.subsample_fraction;
    if (given("--pair-threshold")) rc.pair_threshold = r.pair_threshold;
    if (given("--sigma")) rc.sigma = r.sigma;
}

int run_simulate(const Args& a) {
    const auto seed = a.run.reduction.seed;
    const auto threads = a.run.threads;
    simulation::ExperimentReport rep;
    if (a.experiment == "coverage") {
        simulation::CoverageConfig c;
        c.seed = seed;
        c.threads = threads;
        c.theta = a.run.theta;
        c.s_max = a.run.s_max;
        overlay(a, c.reduction);
        if (a.replicates) c.replicates = a.replicates;
        rep = simulation::coverage_experiment(c);
    } else if (a.experiment == "contrast") {
        simulation::ContrastConfig c;
        c.seed = seed;
        c.threads = threads;
        c.theta = a.run.theta;
        c.s_max = a.run.s_max;
        overlay(a, c.reduction);
        if (a.replicates) c.replicates = a.replicates;
        rep = simulation::comparator_contrast_experiment(c);
    } else if (a.experiment == "spurious") {
        simulation::SpuriousConfig c;
        c.seed = seed;
        c.threads = threads;
        if (a.side) c.side = a.side;
        if (a.replicates) c.replicates = a.replicates;
        rep = simulation::spurious_correlation_experiment(c);
    } else if (a.experiment == "retention") {
        simulation::RetentionConfig c;
        c.seed = seed;
        c.threads = threads;
        if (a.marked) c.marked = a.marked;
        if (a.side) c.side = a.side;
        if (a.replicates) c.arrangements = a.replicates;
        c.full_replicates = 500;
        rep = simulation::retention_probability_experiment(c);
    } else if (a.experiment == "companion") {
        simulation::CompanionConfig c;
        c.seed = seed;
        if (a.marked) c.marked = a.marked;
        if (a.side) c.side = a.side;
        if (a.dims) c.dims = a.dims;
        if (a.replicates) c.arrangements = a.replicates;
        rep = simulation::companion_experiment(c);
    } else if (a.experiment == "noncentral") {
        simulation::NoncentralConfig c;
        c.seed = seed;
        c.gamma0 = (Vector(6) << 0.3, 0.2, -0.1, 0.25, -0.2, 0.0).finished();
        c.sub = {0, 1, 2};
        if (a.replicates) c.replicates = a.replicates;
        rep = simulation::noncentral_moment_experiment(c);
    } else {
        throw ConfigError("unknown experiment '" + a.experiment + "'");
    }
    report::TextWriter w;
    w.heading("run");
    w.field("command", "simulate");
    w.field("version", report::version());
    report::write(w, rep);
    pipeline::Report out{w.str(), report::to_json(rep), report::table_csv(rep)};
    out.sidecar["version"] = report::version();
    if (rep.table.empty()) out.table_csv.clear();
    emit(out, a.output);
    return rep.pass ? kOk : kFailed;
}

int run_verify(const Args& a) {
    verify::VerifyOptions o;
    o.threads = a.run.threads;
    if (a.run.reduction.seed != 0) o.seed = a.run.reduction.seed;
    bool all = true;
    std::cout << "coxred " << report::version() << " verification suite, seed " << o.seed << "\n";
    std::vector<int> ids = a.only;
    if (ids.empty())
        for (int i = 1; i <= verify::kCriteria; ++i) ids.push_back(i);
    for (int id : ids) {
        const auto r = verify::run_criterion(id, o);
        std::cout << verify::format_line(r) << std::endl;
        all = all && r.pass;
    }
    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
    return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cox reduction and likelihood-ratio confidence sets of models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", report::version());
    Args a;

    auto* reduce = app.add_subcommand("reduce", "Cox reduction to a comprehensive model");
    add_data_options(reduce, a);
    add_run_options(reduce, a);

    auto* confset = app.add_subcommand("confset", "Confidence set of models for a given comprehensive model");
    add_data_options(confset, a);
    add_run_options(confset, a);
    confset->add_option("--model", a.run.model, "Comprehensive model columns")->delimiter(',')->required();

    auto* pipe = app.add_subcommand("pipeline", "Reduce, then the confidence set and optional intervals");
    add_data_options(pipe, a);
    add_run_options(pipe, a);
    pipe->add_option("--predict", a.predict, "CSV of covariate rows to predict (same columns, no response)");
    pipe->add_option("--level", a.run.interval_level, "Prediction interval level")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Comprehensive model from a comparator and its confidence set");
    add_data_options(compare, a);
    add_run_options(compare, a);
    compare->add_option("--method", a.run.method, "marginal | lasso | cox")->capture_default_str();
    compare->add_option("--shat", a.run.s_hat, "Target model size; 0 uses the Cox model size")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo experiment");
    a.simulate = simulate;
    add_run_options(simulate, a);
    simulate->add_option("--experiment", a.experiment,
                         "coverage | contrast | spurious | retention | companion | noncentral")
        ->capture_default_str();
    simulate->add_option("--replicates", a.replicates, "Replicate count (experiment default when 0)");
    simulate->add_option("--marked", a.marked, "Marked indices (retention, companion)");
    simulate->add_option("--side", a.side, "Array side (retention, companion, spurious)");
    simulate->add_option("--dims", a.dims, "Array dimensions (companion)");
    simulate->add_option("--output", a.output, "Report path; sidecar and table beside it");

    auto* verify_cmd = app.add_subcommand("verify", "Run the oracle suite and print a pass/fail table");
    verify_cmd->add_option("--seed", a.run.reduction.seed, "Suite seed (0 keeps the built-in one)");
    verify_cmd->add_option("--threads", a.run.threads, "Worker threads")->capture_default_str();
    verify_cmd->add_option("--only", a.only, "Criterion numbers to run")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (verify_cmd->parsed()) return run_verify(a);
        a.run.reduction.sigma = parse_sigma(a.sigma);
        a.run.validate();
        if (simulate->parsed()) return run_simulate(a);

        const auto data = io::ingest(a.input, a.response);
        if (reduce->parsed()) {
            emit(pipeline::run_reduce(data, a.run), a.output);
        } else if (confset->parsed()) {
            emit(pipeline::run_confset(data, a.run), a.output);
        } else if (pipe->parsed()) {
            std::optional<Matrix> predict;
            if (!a.predict.empty()) predict = io::read_csv(a.predict).values;
            emit(pipeline::run_pipeline(data, a.run, predict), a.output);
        } else if (compare->parsed()) {
            emit(pipeline::run_compare(data, a.run), a.output);
        }
        return kOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
}

#include "coxred/comparators.hpp"
#include "coxred/confset.hpp"
#include "coxred/distributions.hpp"
#include "coxred/errors.hpp"
#include "coxred/reduction.hpp"
#include "coxred/regression_stats.hpp"
#include "coxred/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace coxred;

namespace {

// None means "estimate", a float is a known sigma.
SigmaMode to_sigma(const std::optional<double>& sigma) {
    return sigma ? SigmaMode::known_value(*sigma) : SigmaMode::estimate();
}

py::dict round_dict(const reduction::RoundTrace& r) {
    py::dict d;
    d["round"] = r.round;
    d["rule"] = r.rule;
    d["subsample"] = r.subsample;
    d["dims"] = r.dims;
    d["side"] = r.side;
    d["input"] = r.input;
    d["retained"] = r.retained;
    d["fibres"] = r.fibres;
    d["skipped_fibres"] = r.skipped_fibres;
    return d;
}

}  // namespace

PYBIND11_MODULE(_coxred, m) {
    m.doc() = "Cox reduction, likelihood-ratio confidence sets of models and comparators";

    static py::exception<Error> base(m, "CoxredError");
    static py::exception<Error> config(m, "ConfigError", base.ptr());
    static py::exception<Error> data(m, "DataError", base.ptr());
    static py::exception<Error> numerical(m, "NumericalError", base.ptr());
    static py::exception<Error> budget(m, "BudgetExceeded", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::Config: py::set_error(config, e.what()); return;
                case ErrorKind::Data: py::set_error(data, e.what()); return;
                case ErrorKind::Numerical: py::set_error(numerical, e.what()); return;
                case ErrorKind::Budget: py::set_error(budget, e.what()); return;
            }
            py::set_error(base, e.what());
        }
    });

    m.def("chisq_quantile", &stats::chisq_quantile, py::arg("df"), py::arg("prob"));
    m.def("chisq_cdf", &stats::chisq_cdf, py::arg("df"), py::arg("q"));

    m.def(
        "generate",
        [](std::size_t n, std::size_t p, std::size_t s, double signal, double sigma, double rho, std::size_t block_size,
           std::uint64_t seed) {
            simulation::CovariateLaw law;
            if (block_size > 0)
                law = simulation::CovariateLaw::block(rho, block_size);
            else if (rho != 0.0)
                law = simulation::CovariateLaw::equicorrelated(rho);
            const auto g = simulation::generate(simulation::GenSpec::sparse(n, p, s, signal, sigma, law, seed));
            return py::make_tuple(g.y, g.x, g.theta0);
        },
        py::arg("n"), py::arg("p"), py::arg("s"), py::arg("signal") = 1.0, py::arg("sigma") = 1.0,
        py::arg("rho") = 0.0, py::arg("block_size") = 0, py::arg("seed") = 0,
        "Centred (y, x, theta0) from the sparse linear model; rho with block_size 0 is equicorrelated.");

    m.def(
        "wald",
        [](const Vector& y, const Matrix& x, std::optional<double> sigma) {
            const auto w = stats::wald(y, x, to_sigma(sigma));
            std::vector<double> p;
            for (Eigen::Index i = 0; i < w.values.size(); ++i) p.push_back(w.pvalue(i));
            return py::make_tuple(Vector(w.values), p, w.sigma_used);
        },
        py::arg("y"), py::arg("x"), py::arg("sigma") = py::none(), "(statistics, p-values, sigma used)");

    m.def(
        "lrt",
        [](const Vector& y, const Matrix& x_comp, const Matrix& x_sub, std::optional<double> sigma) {
            const auto r = stats::lrt_statistic(y, x_comp, x_sub, to_sigma(sigma));
            return py::make_tuple(r.w, r.df);
        },
        py::arg("y"), py::arg("x_comp"), py::arg("x_sub"), py::arg("sigma") = py::none(), "(w, df)");

    m.def(
        "cox_reduce",
        [](const Vector& y, const Matrix& x, std::uint64_t seed, double alpha, int rerandomisations,
           double subsample_fraction, std::optional<double> sigma, unsigned threads) {
            reduction::ReductionConfig c;
            c.seed = seed;
            c.alpha = alpha;
            c.rerandomisations = rerandomisations;
            c.subsample_fraction = subsample_fraction;
            c.sigma = to_sigma(sigma);
            c.threads = threads;
            const auto out = reduction::cox_reduce(y, x, c);
            py::dict d;
            d["comprehensive"] = out.comprehensive;
            d["excluded"] = out.excluded;
            d["vote_threshold"] = out.vote_threshold;
            d["subsample"] = out.split.first;
            py::list runs;
            for (const auto& r : out.runs) {
                py::dict rd;
                rd["retained"] = r.retained;
                py::list rounds;
                for (const auto& t : r.rounds) rounds.append(round_dict(t));
                rd["rounds"] = rounds;
                runs.append(rd);
            }
            d["runs"] = runs;
            d["mean_jaccard"] = out.stability.mean_jaccard;
            return d;
        },
        py::arg("y"), py::arg("x"), py::arg("seed") = 0, py::arg("alpha") = 0.01, py::arg("rerandomisations") = 1,
        py::arg("subsample_fraction") = 0.35, py::arg("sigma") = py::none(), py::arg("threads") = 1u);

    m.def(
        "build_confidence_set",
        [](const Vector& y, const Matrix& x, const IndexSet& comprehensive, double theta, int s_max,
           std::optional<double> sigma, std::size_t budget, unsigned threads) {
            const auto mcs = confset::build_confidence_set(y, x, make_index_set(comprehensive), theta, s_max,
                                                           to_sigma(sigma), {budget, threads});
            py::list models;
            for (const auto& r : mcs.records) {
                py::dict d;
                d["members"] = r.members;
                d["w"] = r.w;
                d["df"] = r.df;
                d["threshold"] = r.threshold;
                d["accepted"] = r.accepted;
                models.append(d);
            }
            py::dict d;
            d["comprehensive"] = mcs.comprehensive;
            d["tested"] = mcs.tested;
            d["accepted_count"] = mcs.accepted_count;
            d["models"] = models;
            return d;
        },
        py::arg("y"), py::arg("x"), py::arg("comprehensive"), py::arg("theta") = 0.05, py::arg("s_max") = 4,
        py::arg("sigma") = py::none(), py::arg("budget") = std::size_t{1'000'000}, py::arg("threads") = 1u);

    m.def(
        "marginal_screen",
        [](const Vector& y, const Matrix& x, std::size_t s_hat) { return comparators::marginal_screen(y, x, s_hat).kept; },
        py::arg("y"), py::arg("x"), py::arg("s_hat"));

    m.def(
        "lasso",
        [](const Vector& y, const Matrix& x, double lambda) {
            const auto f = comparators::lasso_fit(y, x, lambda);
            return py::make_tuple(Vector(f.coefficients), f.kkt_gap);
        },
        py::arg("y"), py::arg("x"), py::arg("lam"), "(coefficients, KKT gap)");
    m.def("lambda_max", &comparators::lambda_max, py::arg("y"), py::arg("x"));
    m.def(
        "lasso_undertuned_support",
        [](const Vector& y, const Matrix& x, std::size_t target) {
            const auto u = comparators::lasso_undertuned_support(y, x, target);
            return py::make_tuple(u.support, u.lambda, u.grid_exhausted);
        },
        py::arg("y"), py::arg("x"), py::arg("target_size"));
}

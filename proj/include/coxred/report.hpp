#pragma once

#include "coxred/confset.hpp"
#include "coxred/reduction.hpp"
#include "coxred/simulation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace coxred::report {

std::string version();

/// Fixed-format number text; identical across platforms for identical doubles.
std::string num(double v, int precision = 6);

/// Builds the human-readable report: headings, key = value lines and
/// space-aligned tables.
class TextWriter {
public:
    void heading(const std::string& title);
    void field(const std::string& key, const std::string& value);
    void line(const std::string& text);
    void table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);
    const std::string& str() const { return out_; }

private:
    std::string out_;
};

/// "{a, b, c}" using names when given, indices otherwise.
std::string set_text(const IndexSet& set, const std::vector<std::string>& names = {});
nlohmann::json set_json(const IndexSet& set, const std::vector<std::string>& names = {});

nlohmann::json to_json(const reduction::ReductionOutcome& outcome, const std::vector<std::string>& names);
void write(TextWriter& w, const reduction::ReductionOutcome& outcome, const std::vector<std::string>& names);

nlohmann::json to_json(const confset::ModelConfidenceSet& mcs, const std::vector<std::string>& names);
/// Lists accepted models; `all_records` adds the rejected ones.
void write(TextWriter& w, const confset::ModelConfidenceSet& mcs, const std::vector<std::string>& names,
           bool all_records = false);

nlohmann::json to_json(const simulation::ExperimentReport& rep);
void write(TextWriter& w, const simulation::ExperimentReport& rep);
/// Per-replicate rows as comma-separated values.
std::string table_csv(const simulation::ExperimentReport& rep);

}  // namespace coxred::report

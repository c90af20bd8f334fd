#include "coxred/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace coxred::report {

using nlohmann::json;

std::string version() { return COXRED_VERSION; }

std::string num(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

void TextWriter::heading(const std::string& title) {
    if (!out_.empty()) out_ += '\n';
    out_ += "[" + title + "]\n";
}

void TextWriter::field(const std::string& key, const std::string& value) { out_ += key + " = " + value + "\n"; }

void TextWriter::line(const std::string& text) { out_ += text + "\n"; }

void TextWriter::table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    auto emit = [&](const std::vector<std::string>& cells) {
        std::string row;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) row += "  ";
            row += cells[c];
            if (c + 1 < cells.size()) row += std::string(width[c] - cells[c].size(), ' ');
        }
        out_ += row + "\n";
    };
    emit(header);
    for (const auto& r : rows) emit(r);
}

std::string set_text(const IndexSet& set, const std::vector<std::string>& names) {
    std::string s = "{";
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i) s += ", ";
        const auto j = static_cast<std::size_t>(set[i]);
        s += j < names.size() ? names[j] : std::to_string(set[i]);
    }
    return s + "}";
}

json set_json(const IndexSet& set, const std::vector<std::string>& names) {
    json arr = json::array();
    for (int j : set) {
        const auto u = static_cast<std::size_t>(j);
        arr.push_back(u < names.size() ? json(names[u]) : json(j));
    }
    return arr;
}

json to_json(const reduction::ReductionOutcome& o, const std::vector<std::string>& names) {
    json j;
    j["comprehensive"] = set_json(o.comprehensive, names);
    j["comprehensive_indices"] = o.comprehensive;
    j["excluded_constant"] = set_json(o.excluded, names);
    j["split_seed"] = o.split_seed;
    j["subsample_sizes"] = {{"I", o.split.first.size()}, {"Ic", o.split.second.size()}};
    j["vote_threshold"] = o.vote_threshold;
    json groups = json::array();
    for (const auto& g : o.pairing.groups)
        if (g.size() > 1) groups.push_back(set_json(g, names));
    j["pairing"] = {{"threshold", o.pairing.threshold}, {"groups", groups}};
    json runs = json::array();
    for (const auto& r : o.runs) {
        json rounds = json::array();
        for (const auto& rt : r.rounds) {
            json jr = {{"round", rt.round},     {"rule", rt.rule},       {"subsample", rt.subsample},
                       {"dims", rt.dims},       {"side", rt.side},       {"seed", rt.seed},
                       {"input_size", rt.input.size()}, {"retained", set_json(rt.retained, names)},
                       {"fibres", rt.fibres},   {"skipped_fibres", rt.skipped_fibres}};
            if (!rt.diagnostics.empty()) {
                json diags = json::array();
                for (const auto& d : rt.diagnostics)
                    diags.push_back({{"axis", d.axis}, {"members", d.members}, {"wald", d.wald}, {"skipped", d.skipped}});
                jr["fibre_wald"] = diags;
            }
            rounds.push_back(jr);
        }
        runs.push_back({{"run", r.run}, {"rounds", rounds}, {"retained", set_json(r.retained, names)}});
    }
    j["runs"] = runs;
    const auto& s = o.stability;
    json freq = json::array();
    for (const auto& [idx, f] : s.retention_frequency)
        freq.push_back({{"variable", set_json({idx}, names)[0]}, {"frequency", f}});
    j["stability"] = {{"applicable", s.applicable},
                      {"mean_jaccard", s.mean_jaccard},
                      {"fragile", s.fragile},
                      {"retention_frequency", freq}};
    return j;
}

void write(TextWriter& w, const reduction::ReductionOutcome& o, const std::vector<std::string>& names) {
    w.heading("reduction");
    w.field("comprehensive_model", set_text(o.comprehensive, names));
    w.field("comprehensive_size", std::to_string(o.comprehensive.size()));
    w.field("excluded_constant", set_text(o.excluded, names));
    w.field("split_seed", std::to_string(o.split_seed));
    w.field("subsample_I", std::to_string(o.split.first.size()));
    w.field("subsample_Ic", std::to_string(o.split.second.size()));
    w.field("vote_threshold", std::to_string(o.vote_threshold) + " of " + std::to_string(o.runs.size()));
    for (const auto& g : o.pairing.groups)
        if (g.size() > 1) w.field("paired_group", set_text(g, names));

    w.heading("reduction trace");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : o.runs)
        for (const auto& rt : r.rounds)
            rows.push_back({std::to_string(r.run), std::to_string(rt.round), rt.subsample,
                            std::to_string(rt.dims) + "x" + std::to_string(rt.side), std::to_string(rt.seed),
                            std::to_string(rt.input.size()), std::to_string(rt.retained.size()),
                            std::to_string(rt.fibres), std::to_string(rt.skipped_fibres)});
    w.table({"run", "round", "subsample", "shape", "seed", "input", "retained", "fibres", "skipped"}, rows);
    for (const auto& r : o.runs) w.field("run_" + std::to_string(r.run) + "_retained", set_text(r.retained, names));

    w.heading("stability");
    const auto& s = o.stability;
    if (!s.applicable) {
        w.field("applicable", "no (single run)");
        return;
    }
    w.field("mean_jaccard", num(s.mean_jaccard));
    w.field("fragile", s.fragile ? "yes" : "no");
    std::vector<std::vector<std::string>> freq;
    for (const auto& [idx, f] : s.retention_frequency) freq.push_back({set_text({idx}, names), num(f, 4)});
    w.table({"variable", "retention_frequency"}, freq);
}

json to_json(const confset::ModelConfidenceSet& mcs, const std::vector<std::string>& names) {
    json j;
    j["comprehensive"] = set_json(mcs.comprehensive, names);
    j["theta"] = mcs.theta;
    j["size_cap"] = mcs.size_cap;
    j["sigma"] = mcs.sigma.describe();
    j["comprehensive_rank"] = mcs.comprehensive_rank;
    j["tested"] = mcs.tested;
    j["accepted_count"] = mcs.accepted_count;
    json models = json::array();
    for (const auto& r : mcs.records)
        models.push_back({{"members", set_json(r.members, names)},
                          {"w", r.w},
                          {"df", r.df},
                          {"threshold", r.threshold},
                          {"accepted", r.accepted}});
    j["models"] = models;
    return j;
}

void write(TextWriter& w, const confset::ModelConfidenceSet& mcs, const std::vector<std::string>& names,
           bool all_records) {
    w.heading("confidence set");
    w.field("comprehensive_model", set_text(mcs.comprehensive, names));
    w.field("theta", num(mcs.theta));
    w.field("size_cap", std::to_string(mcs.size_cap));
    w.field("sigma", mcs.sigma.describe());
    w.field("comprehensive_rank", std::to_string(mcs.comprehensive_rank));
    w.field("tested", std::to_string(mcs.tested));
    w.field("accepted", std::to_string(mcs.accepted_count));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : mcs.records) {
        if (!r.accepted && !all_records) continue;
        rows.push_back({set_text(r.members, names), std::to_string(r.df), num(r.w), num(r.threshold),
                        r.accepted ? "yes" : "no"});
    }
    w.table({"model", "df", "w", "threshold", "accepted"}, rows);
}

json to_json(const simulation::ExperimentReport& rep) {
    json j;
    j["experiment"] = rep.name;
    j["replicates"] = rep.replicates;
    j["seed"] = rep.seed;
    json params = json::object();
    for (const auto& [k, v] : rep.parameters) params[k] = v;
    j["parameters"] = params;
    json est = json::array();
    for (const auto& e : rep.estimates)
        est.push_back({{"name", e.name},
                       {"value", e.value},
                       {"se", e.se},
                       {"target", std::isnan(e.target) ? json(nullptr) : json(e.target)},
                       {"rule", e.rule},
                       {"pass", e.pass}});
    j["estimates"] = est;
    j["notes"] = rep.notes;
    j["pass"] = rep.pass;
    return j;
}

void write(TextWriter& w, const simulation::ExperimentReport& rep) {
    w.heading("experiment " + rep.name);
    w.field("replicates", std::to_string(rep.replicates));
    w.field("seed", std::to_string(rep.seed));
    for (const auto& [k, v] : rep.parameters) w.field(k, num(v));
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : rep.estimates) {
        std::string band = "-";
        if (!std::isnan(e.target) && e.rule.find("3*SE") != std::string::npos)
            band = "[" + num(e.value - 3 * e.se) + ", " + num(e.value + 3 * e.se) + "]";
        rows.push_back({e.name, num(e.value), num(e.se), num(e.target), band, e.rule, e.pass ? "PASS" : "FAIL"});
    }
    w.table({"estimate", "value", "se", "target", "3se_band", "rule", "result"}, rows);
    for (const auto& n : rep.notes) w.field("note", n);
    w.field("result", rep.pass ? "PASS" : "FAIL");
}

std::string table_csv(const simulation::ExperimentReport& rep) {
    std::string out;
    for (std::size_t c = 0; c < rep.table_header.size(); ++c) out += (c ? "," : "") + rep.table_header[c];
    out += '\n';
    for (const auto& row : rep.table) {
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + num(row[c], 17);
        out += '\n';
    }
    return out;
}

}  // namespace coxred::report

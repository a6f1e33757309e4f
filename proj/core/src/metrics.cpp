#include "llmslice/metrics.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "llmslice/errors.hpp"

namespace llmslice {

namespace {

using nlohmann::json;

MetricBlock block_from(const std::vector<const DeliveryRecord*>& records,
                       std::int64_t used_prbs, std::int64_t total_prbs) {
    MetricBlock block;
    double completion_sum = 0.0;
    double first_byte_sum = 0.0;
    std::int64_t first_byte_count = 0;
    for (const DeliveryRecord* record : records) {
        block.requests += 1;
        if (record->t_started) block.streams += 1;
        if (record->aborted) {
            block.aborts += 1;
            continue;  // no latency contribution from aborted streams
        }
        if (record->t_first_byte) {
            first_byte_sum += us_to_ms(*record->t_first_byte - record->t_arrival);
            first_byte_count += 1;
        }
        if (record->t_complete) {
            block.completions += 1;
            completion_sum += us_to_ms(*record->t_complete - record->t_arrival);
        }
    }
    if (block.completions > 0) {
        block.mean_completion_latency_ms = completion_sum / static_cast<double>(block.completions);
    }
    if (first_byte_count > 0) {
        block.mean_first_byte_latency_ms = first_byte_sum / static_cast<double>(first_byte_count);
    }
    block.utilization =
        total_prbs > 0 ? static_cast<double>(used_prbs) / static_cast<double>(total_prbs) : 0.0;
    block.stability =
        block.streams > 0
            ? 1.0 - static_cast<double>(block.aborts) / static_cast<double>(block.streams)
            : 1.0;
    return block;
}

json block_to_json(const MetricBlock& block) {
    json j;
    j["mean_completion_latency_ms"] =
        block.mean_completion_latency_ms ? json(*block.mean_completion_latency_ms) : json();
    j["mean_first_byte_latency_ms"] =
        block.mean_first_byte_latency_ms ? json(*block.mean_first_byte_latency_ms) : json();
    j["utilization"] = block.utilization;
    j["stability"] = block.stability;
    j["counts"] = {{"requests", block.requests},
                   {"streams", block.streams},
                   {"completions", block.completions},
                   {"aborts", block.aborts}};
    return j;
}

json summary_to_json_obj(const RunSummary& summary) {
    json j = block_to_json(summary.overall);
    j["mode"] = summary.mode;
    json per_slice = json::object();
    for (const auto& [slice_id, block] : summary.per_slice) {
        per_slice[slice_id] = block_to_json(block);
    }
    j["per_slice"] = per_slice;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw_error(ErrorCode::IoError, "short write to " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw_error(ErrorCode::IoError, "cannot create output directory " + dir.string());
    }
}

double require_positive(std::optional<double> value, const std::string& what) {
    if (!value || *value <= 0.0) {
        throw_error(ErrorCode::DivisionByZeroMetric, "baseline " + what + " is zero or undefined");
    }
    return *value;
}

}  // namespace

RunSummary summarize(const std::vector<DeliveryRecord>& records, const AllocationTotals& alloc,
                     const std::string& mode, bool allow_empty) {
    if (records.empty() && !allow_empty) {
        throw_error(ErrorCode::EmptyRun, "no LLM request started; summary undefined");
    }
    std::int64_t total_prbs = alloc.n_ttis * alloc.n_prb;

    RunSummary summary;
    summary.mode = mode;

    std::vector<const DeliveryRecord*> all;
    std::map<SliceId, std::vector<const DeliveryRecord*>> by_slice;
    for (const DeliveryRecord& record : records) {
        all.push_back(&record);
        by_slice[record.slice_id].push_back(&record);
    }
    summary.overall = block_from(all, alloc.used_prbs, total_prbs);

    // Every slice that carried payload or streams gets a row.
    for (const auto& [slice_id, used] : alloc.per_slice_used) {
        by_slice.try_emplace(slice_id);
    }
    for (const auto& [slice_id, slice_records] : by_slice) {
        auto used_it = alloc.per_slice_used.find(slice_id);
        std::int64_t used = used_it == alloc.per_slice_used.end() ? 0 : used_it->second;
        summary.per_slice[slice_id] = block_from(slice_records, used, total_prbs);
    }
    return summary;
}

RunSummary average_summaries(const std::vector<RunSummary>& summaries) {
    if (summaries.empty()) {
        throw_error(ErrorCode::EmptyRun, "no summaries to average");
    }
    auto average_blocks = [](const std::vector<const MetricBlock*>& blocks) {
        MetricBlock mean;
        double completion_sum = 0.0, first_byte_sum = 0.0, util_sum = 0.0, stab_sum = 0.0;
        std::int64_t completion_n = 0, first_byte_n = 0;
        for (const MetricBlock* block : blocks) {
            if (block->mean_completion_latency_ms) {
                completion_sum += *block->mean_completion_latency_ms;
                completion_n += 1;
            }
            if (block->mean_first_byte_latency_ms) {
                first_byte_sum += *block->mean_first_byte_latency_ms;
                first_byte_n += 1;
            }
            util_sum += block->utilization;
            stab_sum += block->stability;
            mean.requests += block->requests;
            mean.streams += block->streams;
            mean.completions += block->completions;
            mean.aborts += block->aborts;
        }
        double n = static_cast<double>(blocks.size());
        if (completion_n > 0) mean.mean_completion_latency_ms = completion_sum / completion_n;
        if (first_byte_n > 0) mean.mean_first_byte_latency_ms = first_byte_sum / first_byte_n;
        mean.utilization = util_sum / n;
        mean.stability = stab_sum / n;
        return mean;
    };

    RunSummary result;
    result.mode = summaries.front().mode;
    std::vector<const MetricBlock*> overall;
    std::map<SliceId, std::vector<const MetricBlock*>> per_slice;
    for (const RunSummary& summary : summaries) {
        overall.push_back(&summary.overall);
        for (const auto& [slice_id, block] : summary.per_slice) {
            per_slice[slice_id].push_back(&block);
        }
    }
    result.overall = average_blocks(overall);
    for (const auto& [slice_id, blocks] : per_slice) {
        result.per_slice[slice_id] = average_blocks(blocks);
    }
    return result;
}

ComparisonReport compare(const RunSummary& baseline, const RunSummary& treatment) {
    ComparisonReport report;
    report.baseline = baseline;
    report.treatment = treatment;

    double base_latency = require_positive(baseline.overall.mean_completion_latency_ms,
                                           "mean completion latency");
    double treat_latency = require_positive(treatment.overall.mean_completion_latency_ms,
                                            "treatment mean completion latency");
    if (baseline.overall.utilization <= 0.0) {
        throw_error(ErrorCode::DivisionByZeroMetric, "baseline utilization is zero");
    }
    if (baseline.overall.stability <= 0.0) {
        throw_error(ErrorCode::DivisionByZeroMetric, "baseline stability is zero");
    }

    report.latency_improvement = (base_latency - treat_latency) / base_latency;
    report.utilization_improvement =
        (treatment.overall.utilization - baseline.overall.utilization) /
        baseline.overall.utilization;
    report.stability_improvement =
        (treatment.overall.stability - baseline.overall.stability) / baseline.overall.stability;
    return report;
}

std::string render_comparison_table(const ComparisonReport& report) {
    auto pct = [](double fraction) {
        std::ostringstream oss;
        oss << std::fixed << std::setprecision(1) << fraction * 100.0 << '%';
        return oss.str();
    };
    auto ms = [](std::optional<double> value) {
        std::ostringstream oss;
        if (value) {
            oss << std::fixed << std::setprecision(1) << *value << " ms";
        } else {
            oss << "n/a";
        }
        return oss.str();
    };

    struct Row {
        std::string metric, base, treat, improv;
    };
    std::vector<Row> rows = {
        {"Metric", "Baseline", "LLM-Slice", "Improv."},
        {"Avg. Latency", ms(report.baseline.overall.mean_completion_latency_ms),
         ms(report.treatment.overall.mean_completion_latency_ms), pct(report.latency_improvement)},
        {"Resource Utilization", pct(report.baseline.overall.utilization),
         pct(report.treatment.overall.utilization), pct(report.utilization_improvement)},
        {"Downlink Stability", pct(report.baseline.overall.stability),
         pct(report.treatment.overall.stability), pct(report.stability_improvement)},
    };

    std::size_t w0 = 0, w1 = 0, w2 = 0, w3 = 0;
    for (const Row& row : rows) {
        w0 = std::max(w0, row.metric.size());
        w1 = std::max(w1, row.base.size());
        w2 = std::max(w2, row.treat.size());
        w3 = std::max(w3, row.improv.size());
    }
    std::ostringstream oss;
    auto emit = [&](const Row& row) {
        oss << std::left << std::setw(static_cast<int>(w0)) << row.metric << " | " << std::right
            << std::setw(static_cast<int>(w1)) << row.base << " | "
            << std::setw(static_cast<int>(w2)) << row.treat << " | "
            << std::setw(static_cast<int>(w3)) << row.improv << '\n';
    };
    emit(rows[0]);
    oss << std::string(w0, '-') << "-+-" << std::string(w1, '-') << "-+-" << std::string(w2, '-')
        << "-+-" << std::string(w3, '-') << '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) emit(rows[i]);
    return oss.str();
}

std::string summary_to_json(const RunSummary& summary) {
    return summary_to_json_obj(summary).dump(2) + "\n";
}

std::string comparison_to_json(const ComparisonReport& report) {
    json j;
    j["baseline"] = summary_to_json_obj(report.baseline);
    j["treatment"] = summary_to_json_obj(report.treatment);
    j["latency_improvement"] = report.latency_improvement;
    j["utilization_improvement"] = report.utilization_improvement;
    j["stability_improvement"] = report.stability_improvement;
    return j.dump(2) + "\n";
}

std::string deliveries_to_csv(const std::vector<DeliveryRecord>& records) {
    std::ostringstream oss;
    oss << "request_id,slice_id,t_arrival_us,t_first_byte_us,t_complete_us,total_bytes,aborted\n";
    for (const DeliveryRecord& record : records) {
        oss << record.request_id << ',' << record.slice_id << ',' << record.t_arrival << ',';
        if (record.t_first_byte) oss << *record.t_first_byte;
        oss << ',';
        if (record.t_complete) oss << *record.t_complete;
        oss << ',' << record.total_bytes << ',' << (record.aborted ? "true" : "false") << '\n';
    }
    return oss.str();
}

void write_run_outputs(const RunSummary& summary, const std::vector<DeliveryRecord>& records,
                       const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    write_file(out_dir / "summary.json", summary_to_json(summary));
    write_file(out_dir / "deliveries.csv", deliveries_to_csv(records));
}

void write_comparison_outputs(const ComparisonReport& report,
                              const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    write_file(out_dir / "comparison.json", comparison_to_json(report));
    write_file(out_dir / "comparison.txt", render_comparison_table(report));
}

}  // namespace llmslice

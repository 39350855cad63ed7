#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "pipeline.hpp"

namespace fpcf {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// Per-probe table only; rates and timings go to the JSON summary so the
// CSV is byte-stable across reruns.
inline void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write report: " + path);
    out << "truth,predicted,distance\n";
    for (const ProbeResult& p : report.per_probe)
        out << p.truth << "," << p.predicted << "," << detail::fmt_double(p.distance) << "\n";
    if (!out) throw io_error("failed writing report: " + path);
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    return nlohmann::json{
        {"divisions", c.divisions},
        {"levels", c.levels},
        {"use_wavelet", c.use_wavelet},
        {"fusion", to_string(c.fusion)},
        {"mode", to_string(c.mode)},
        {"ridge", c.ridge},
        {"pca_keep", c.pca_keep},
        {"cca_max_pairs", c.cca_max_pairs},
        {"open_set", c.open_set},
        {"canonical_rows", c.canonical_rows},
        {"canonical_cols", c.canonical_cols},
        {"strip_rows", c.strip_rows},
        {"strip_row_start", c.strip_row_start},
    };
}

// Applies the keys present in j on top of base; unknown keys are rejected
// so config typos fail loudly.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {}) {
    static const std::vector<std::string> known = {
        "divisions", "levels", "use_wavelet", "fusion", "mode", "ridge", "pca_keep",
        "cca_max_pairs", "open_set", "canonical_rows", "canonical_cols", "strip_rows",
        "strip_row_start", "synth",
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) ok = ok || k == it.key();
        if (!ok) throw validation_error("config: unknown key '" + it.key() + "'");
    }

    PipelineConfig c = base;
    if (j.contains("divisions")) c.divisions = j.at("divisions").get<int>();
    if (j.contains("levels")) c.levels = j.at("levels").get<int>();
    if (j.contains("use_wavelet")) c.use_wavelet = j.at("use_wavelet").get<bool>();
    if (j.contains("fusion")) {
        const std::string f = j.at("fusion").get<std::string>();
        if (f == "ffo1") c.fusion = FusionMode::FFO1;
        else if (f == "ffo2") c.fusion = FusionMode::FFO2;
        else throw validation_error("config: fusion must be ffo1 or ffo2, got '" + f + "'");
    }
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "face") c.mode = PipelineMode::Face;
        else if (m == "periocular") c.mode = PipelineMode::Periocular;
        else if (m == "fused") c.mode = PipelineMode::Fused;
        else throw validation_error("config: mode must be face, periocular or fused, got '" + m + "'");
    }
    if (j.contains("ridge")) c.ridge = j.at("ridge").get<double>();
    if (j.contains("pca_keep")) c.pca_keep = j.at("pca_keep").get<int>();
    if (j.contains("cca_max_pairs")) c.cca_max_pairs = j.at("cca_max_pairs").get<int>();
    if (j.contains("open_set")) c.open_set = j.at("open_set").get<bool>();
    if (j.contains("canonical_rows")) c.canonical_rows = j.at("canonical_rows").get<int>();
    if (j.contains("canonical_cols")) c.canonical_cols = j.at("canonical_cols").get<int>();
    if (j.contains("strip_rows")) c.strip_rows = j.at("strip_rows").get<int>();
    if (j.contains("strip_row_start")) c.strip_row_start = j.at("strip_row_start").get<int>();
    return c;
}

inline void write_summary_json(const EvalReport& report, const std::string& path) {
    nlohmann::json j{
        {"recognition_rate", report.recognition_rate()},
        {"correct", report.correct},
        {"total", report.total},
        {"accepted", report.accepted},
        {"open_set", report.open_set},
        {"timing",
         {{"extract_ms_per_image", report.extract_ms_per_image},
          {"classify_ms_per_image", report.classify_ms_per_image}}},
        {"config", config_to_json(report.config)},
    };
    std::ofstream out(path);
    if (!out) throw io_error("cannot write summary: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw io_error("failed writing summary: " + path);
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write sweep report: " + path);
    out << "variant,d,rate,extract_ms,classify_ms\n";
    for (const SweepRow& r : rows) {
        out << r.variant << "," << r.d << ",";
        if (r.ok)
            out << detail::fmt_double(r.rate) << "," << detail::fmt_double(r.extract_ms) << ","
                << detail::fmt_double(r.classify_ms);
        else
            out << ",,";
        out << "\n";
    }
    if (!out) throw io_error("failed writing sweep report: " + path);
}

inline void write_sweep_summary_json(const std::vector<SweepRow>& rows, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SweepRow& r : rows) {
        nlohmann::json row{{"variant", r.variant}, {"d", r.d}, {"ok", r.ok}};
        if (r.ok) {
            row["rate"] = r.rate;
            row["extract_ms"] = r.extract_ms;
            row["classify_ms"] = r.classify_ms;
        } else {
            row["note"] = r.note;
        }
        arr.push_back(std::move(row));
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot write sweep summary: " + path);
    out << nlohmann::json{{"rows", arr}}.dump(2) << "\n";
    if (!out) throw io_error("failed writing sweep summary: " + path);
}

} // namespace fpcf

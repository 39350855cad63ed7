#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cca.hpp"
#include "classify.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "lbp.hpp"
#include "manifest.hpp"
#include "pca.hpp"

namespace fpcf {

enum class PipelineMode : int { Face = 0, Periocular = 1, Fused = 2 };

inline const char* to_string(PipelineMode m) {
    switch (m) {
        case PipelineMode::Face: return "face";
        case PipelineMode::Periocular: return "periocular";
        default: return "fused";
    }
}

struct PipelineConfig {
    int divisions = 9;        // blocks per axis for both branches
    int levels = 2;           // wavelet decomposition depth
    bool use_wavelet = true;  // false = plain LBP baseline
    FusionMode fusion = FusionMode::FFO2;
    PipelineMode mode = PipelineMode::Fused;
    double ridge = 1e-8;
    int pca_keep = -1;        // -1 = all components above the eigenvalue floor
    int cca_max_pairs = -1;   // -1 = all pairs with rho above the floor
    bool open_set = false;
    int canonical_rows = 150;
    int canonical_cols = 130;
    int strip_rows = 50;
    int strip_row_start = -1; // -1 = round(0.20 * canonical_rows)

    int default_row_start() const {
        return strip_row_start >= 0 ? strip_row_start
                                    : static_cast<int>(std::lround(0.20 * canonical_rows));
    }
};

struct PipelineModel {
    PipelineConfig config;
    DescriptorConfig face_desc;
    DescriptorConfig perioc_desc;
    PcaModel pca_face;
    PcaModel pca_perioc;
    CcaModel cca;
    Gallery gallery;
    int format_version = 1;
};

struct ProbeResult {
    std::string truth;
    std::string predicted; // empty = open-set rejection
    double distance = 0.0;
};

struct EvalReport {
    int correct = 0;
    int total = 0;
    int accepted = 0; // probes not rejected (equals total in closed-set mode)
    bool open_set = false;
    std::vector<ProbeResult> per_probe;
    double extract_ms_per_image = 0.0;
    double classify_ms_per_image = 0.0;
    PipelineConfig config;

    double recognition_rate() const { return total > 0 ? 100.0 * correct / total : 0.0; }
};

struct SweepRow {
    std::string variant;
    int d = 0;
    bool ok = false;
    double rate = 0.0;
    double extract_ms = 0.0;
    double classify_ms = 0.0;
    std::string note; // failure reason for skipped rows
};

namespace detail {

template <typename Fn>
auto annotate_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const io_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

// Eye corners live in the stored image's pixel grid; map the minimum corner
// row into the canonical frame with the same corner-aligned factor the
// resize uses, then back off 10 rows and clamp.
inline int strip_row_start_for(const ManifestRecord& rec, const GrayImage& raw,
                               const PipelineConfig& cfg) {
    if (!rec.eye_corners) return cfg.default_row_start();
    int min_row = (*rec.eye_corners)[0][0];
    for (const auto& corner : *rec.eye_corners) min_row = std::min(min_row, corner[0]);
    double scaled = min_row;
    if (raw.rows > 1 && raw.rows != cfg.canonical_rows)
        scaled = double(min_row) * (cfg.canonical_rows - 1) / (raw.rows - 1);
    const int start = static_cast<int>(std::lround(scaled)) - 10;
    const int max_start = cfg.canonical_rows - cfg.strip_rows;
    return std::clamp(start, 0, max_start);
}

struct BranchFeatures {
    FeatureVector face;
    FeatureVector periocular;
};

struct LoadedImage {
    GrayImage image; // already at the canonical size
    int strip_row_start = 0;
};

inline LoadedImage load_record_image(const ManifestRecord& rec, const PipelineConfig& cfg) {
    return annotate_path(rec.image_path, [&] {
        LoadedImage out;
        out.image = load_pgm(rec.image_path);
        out.strip_row_start = strip_row_start_for(rec, out.image, cfg);
        if (out.image.rows != cfg.canonical_rows || out.image.cols != cfg.canonical_cols)
            out.image = resize_bilinear(out.image, cfg.canonical_rows, cfg.canonical_cols);
        return out;
    });
}

inline BranchFeatures features_from_image(const LoadedImage& loaded, const PipelineConfig& cfg,
                                          const DescriptorConfig& face_desc,
                                          const DescriptorConfig& perioc_desc) {
    BranchFeatures out;
    if (cfg.mode != PipelineMode::Periocular) out.face = wd_lbp(loaded.image, face_desc);
    if (cfg.mode != PipelineMode::Face) {
        const GrayImage strip =
            crop_strip(loaded.image, StripSpec{loaded.strip_row_start, cfg.strip_rows, 0});
        out.periocular = wd_lbp(strip, perioc_desc);
    }
    return out;
}

inline BranchFeatures extract_features(const ManifestRecord& rec, const PipelineConfig& cfg,
                                       const DescriptorConfig& face_desc,
                                       const DescriptorConfig& perioc_desc) {
    const LoadedImage loaded = load_record_image(rec, cfg);
    return annotate_path(rec.image_path,
                         [&] { return features_from_image(loaded, cfg, face_desc, perioc_desc); });
}

inline Matrix rows_to_matrix(const std::vector<FeatureVector>& rows) {
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

// The per-probe representation the gallery stores, after PCA and fusion.
inline std::vector<double> embed(const PipelineModel& model, const BranchFeatures& f) {
    switch (model.config.mode) {
        case PipelineMode::Face:
            return pca_project(model.pca_face, f.face);
        case PipelineMode::Periocular:
            return pca_project(model.pca_perioc, f.periocular);
        default: {
            const std::vector<double> px = pca_project(model.pca_face, f.face);
            const std::vector<double> py = pca_project(model.pca_perioc, f.periocular);
            return fuse(model.cca, model.config.fusion, px, py).values;
        }
    }
}

inline double ms_between(std::chrono::steady_clock::time_point a,
                         std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

} // namespace detail

// Fits the full pipeline on the manifest's train split: per-image WD-LBP
// features for both regions, a PCA model per branch, CCA across the two
// projected sets, and a gallery of fused training vectors with the
// rejection threshold (0 when no same-label pair exists).
inline PipelineModel train(const DatasetManifest& manifest, const PipelineConfig& config) {
    const auto records = manifest.split_records(Split::Train);
    if (records.size() < 3)
        throw validation_error("train: need at least 3 training images, got " +
                               std::to_string(records.size()));
    {
        std::set<std::string> subjects;
        for (const auto* r : records) subjects.insert(r->subject_id);
        if (subjects.size() < 2)
            throw validation_error("train: need at least 2 subjects, got " +
                                   std::to_string(subjects.size()));
    }

    PipelineModel model;
    model.config = config;
    model.face_desc = DescriptorConfig{config.divisions, WaveletConfig{config.levels}, config.use_wavelet};
    model.perioc_desc = model.face_desc;

    std::vector<FeatureVector> face_feats, perioc_feats;
    for (const auto* rec : records) {
        detail::BranchFeatures f =
            detail::extract_features(*rec, config, model.face_desc, model.perioc_desc);
        if (config.mode != PipelineMode::Periocular) face_feats.push_back(std::move(f.face));
        if (config.mode != PipelineMode::Face) perioc_feats.push_back(std::move(f.periocular));
    }

    if (config.mode != PipelineMode::Periocular)
        model.pca_face = pca_fit(detail::rows_to_matrix(face_feats), config.pca_keep);
    if (config.mode != PipelineMode::Face)
        model.pca_perioc = pca_fit(detail::rows_to_matrix(perioc_feats), config.pca_keep);

    std::vector<std::vector<double>> proj_face, proj_perioc;
    for (size_t i = 0; i < records.size(); ++i) {
        if (config.mode != PipelineMode::Periocular)
            proj_face.push_back(pca_project(model.pca_face, face_feats[i]));
        if (config.mode != PipelineMode::Face)
            proj_perioc.push_back(pca_project(model.pca_perioc, perioc_feats[i]));
    }

    if (config.mode == PipelineMode::Fused) {
        model.cca = cca_fit(detail::rows_to_matrix(proj_face), detail::rows_to_matrix(proj_perioc),
                            config.ridge, config.cca_max_pairs);
    }

    model.gallery.mode = config.fusion;
    for (size_t i = 0; i < records.size(); ++i) {
        GalleryEntry entry;
        entry.label = records[i]->subject_id;
        switch (config.mode) {
            case PipelineMode::Face: entry.z = proj_face[i]; break;
            case PipelineMode::Periocular: entry.z = proj_perioc[i]; break;
            default:
                entry.z = fuse(model.cca, config.fusion, proj_face[i], proj_perioc[i]).values;
        }
        model.gallery.entries.push_back(std::move(entry));
    }

    bool has_intra_pair = false;
    for (size_t p = 0; p < model.gallery.entries.size() && !has_intra_pair; ++p)
        for (size_t q = p + 1; q < model.gallery.entries.size(); ++q)
            if (model.gallery.entries[p].label == model.gallery.entries[q].label) {
                has_intra_pair = true;
                break;
            }
    model.gallery.threshold = has_intra_pair ? compute_threshold(model.gallery.entries) : 0.0;
    return model;
}

// Runs the manifest's test split through the model's extraction chain and
// reports rank-1 recognition (closed-set) or thresholded identification
// (open-set), with per-image stage timings.
inline EvalReport evaluate(const PipelineModel& model, const DatasetManifest& manifest) {
    const auto records = manifest.split_records(Split::Test);
    if (records.empty()) throw validation_error("evaluate: manifest has no test records");
    if (model.gallery.entries.empty()) throw validation_error("evaluate: model gallery is empty");
    if (manifest.canonical_rows != model.config.canonical_rows ||
        manifest.canonical_cols != model.config.canonical_cols)
        throw validation_error("evaluate: manifest canonical size does not match the model");

    EvalReport report;
    report.config = model.config;
    report.open_set = model.config.open_set;

    double extract_ms = 0.0;
    double classify_ms = 0.0;
    using clock = std::chrono::steady_clock;

    for (const auto* rec : records) {
        // File I/O stays outside the timed window: extract_ms measures the
        // descriptor pipeline (resize, wavelet, LBP, projection, fusion).
        const detail::LoadedImage loaded = detail::load_record_image(*rec, model.config);

        const auto t0 = clock::now();
        const detail::BranchFeatures f = detail::annotate_path(rec->image_path, [&] {
            return detail::features_from_image(loaded, model.config, model.face_desc,
                                               model.perioc_desc);
        });
        const std::vector<double> z = detail::embed(model, f);
        const auto t1 = clock::now();

        ProbeResult probe;
        probe.truth = rec->subject_id;
        if (model.config.open_set) {
            const std::optional<MatchResult> match = identify(model.gallery, z);
            if (match) {
                probe.predicted = match->label;
                probe.distance = match->distance;
                ++report.accepted;
            } else {
                probe.distance = nearest(model.gallery, z).distance;
            }
        } else {
            const MatchResult match = nearest(model.gallery, z);
            probe.predicted = match.label;
            probe.distance = match.distance;
            ++report.accepted;
        }
        const auto t2 = clock::now();

        extract_ms += detail::ms_between(t0, t1);
        classify_ms += detail::ms_between(t1, t2);
        if (probe.predicted == probe.truth) ++report.correct;
        ++report.total;
        report.per_probe.push_back(std::move(probe));
    }

    report.extract_ms_per_image = extract_ms / report.total;
    report.classify_ms_per_image = classify_ms / report.total;
    return report;
}

inline const std::vector<std::string>& sweep_variant_names() {
    static const std::vector<std::string> names = {
        "lbp:face", "lbp:periocular", "lbp:fused",
        "wdlbp:face", "wdlbp:periocular", "wdlbp:fused",
    };
    return names;
}

namespace detail {

inline PipelineConfig variant_config(const PipelineConfig& base, const std::string& variant, int d) {
    PipelineConfig cfg = base;
    cfg.divisions = d;
    cfg.use_wavelet = variant.rfind("wdlbp:", 0) == 0;
    const std::string mode = variant.substr(variant.find(':') + 1);
    cfg.mode = mode == "face" ? PipelineMode::Face
             : mode == "periocular" ? PipelineMode::Periocular
                                    : PipelineMode::Fused;
    return cfg;
}

} // namespace detail

// One train+evaluate run per (division count, variant). Division counts
// that are invalid for a variant's code-map size produce a skipped row
// with the reason instead of aborting the sweep.
inline std::vector<SweepRow> sweep_divisions(const DatasetManifest& manifest, int d_min, int d_max,
                                             const std::vector<std::string>& variants,
                                             const PipelineConfig& base) {
    if (d_min < 1 || d_max < d_min)
        throw std::invalid_argument("sweep_divisions: bad division range [" + std::to_string(d_min) +
                                    ", " + std::to_string(d_max) + "]");
    for (const auto& v : variants) {
        const auto& known = sweep_variant_names();
        bool ok = false;
        for (const auto& k : known) ok = ok || k == v;
        if (!ok) throw std::invalid_argument("sweep_divisions: unknown variant '" + v + "'");
    }

    std::vector<SweepRow> rows;
    for (const std::string& variant : variants) {
        for (int d = d_min; d <= d_max; ++d) {
            SweepRow row;
            row.variant = variant;
            row.d = d;
            try {
                const PipelineConfig cfg = detail::variant_config(base, variant, d);
                const PipelineModel model = train(manifest, cfg);
                const EvalReport report = evaluate(model, manifest);
                row.ok = true;
                row.rate = report.recognition_rate();
                row.extract_ms = report.extract_ms_per_image;
                row.classify_ms = report.classify_ms_per_image;
            } catch (const std::invalid_argument& e) {
                row.ok = false;
                row.note = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace fpcf

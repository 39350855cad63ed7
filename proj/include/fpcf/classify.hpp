#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cca.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace fpcf {

struct GalleryEntry {
    std::string label;
    std::vector<double> z;
};

// Labeled fused training vectors plus the open-set rejection threshold.
struct Gallery {
    std::vector<GalleryEntry> entries;
    double threshold = 0.0; // half the maximum intra-class distance
    FusionMode mode = FusionMode::FFO2;
};

struct MatchResult {
    std::string label;
    double distance = 0.0;
    int index = -1;
};

// Euclidean nearest gallery entry; ties break to the lowest entry index.
inline MatchResult nearest(const Gallery& gallery, const std::vector<double>& probe) {
    if (gallery.entries.empty()) throw std::logic_error("nearest: gallery is empty");
    MatchResult best;
    for (int i = 0; i < static_cast<int>(gallery.entries.size()); ++i) {
        const double d = euclidean_distance(gallery.entries[i].z, probe);
        if (best.index < 0 || d < best.distance) {
            best.label = gallery.entries[i].label;
            best.distance = d;
            best.index = i;
        }
    }
    return best;
}

// Theta = 1/2 max ||z_p - z_q|| over all same-label pairs.
inline double compute_threshold(const std::vector<GalleryEntry>& entries) {
    double max_intra = -1.0;
    for (size_t p = 0; p < entries.size(); ++p)
        for (size_t q = p + 1; q < entries.size(); ++q)
            if (entries[p].label == entries[q].label)
                max_intra = std::max(max_intra, euclidean_distance(entries[p].z, entries[q].z));
    if (max_intra < 0.0)
        throw validation_error("compute_threshold: no same-label pair in the gallery");
    return 0.5 * max_intra;
}

// Open-set identification: nearest label if its distance is strictly below
// the threshold, otherwise rejection (nullopt).
inline std::optional<MatchResult> identify(const Gallery& gallery, const std::vector<double>& probe) {
    MatchResult m = nearest(gallery, probe);
    if (m.distance < gallery.threshold) return m;
    return std::nullopt;
}

} // namespace fpcf

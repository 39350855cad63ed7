#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "image.hpp"

namespace fpcf {

enum class Split { Train, Test };

struct ManifestRecord {
    std::string subject_id;
    std::string image_path; // resolved against the manifest directory
    Split split = Split::Train;
    // Four (row, col) eye-corner points in the stored image's pixel grid.
    std::optional<std::array<std::array<int, 2>, 4>> eye_corners;
};

struct DatasetManifest {
    std::vector<ManifestRecord> records;
    int canonical_rows = 150;
    int canonical_cols = 130;
    StripSpec strip{30, 50, 0};

    std::vector<const ManifestRecord*> split_records(Split s) const {
        std::vector<const ManifestRecord*> out;
        for (const auto& r : records)
            if (r.split == s) out.push_back(&r);
        return out;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string dirname_of(const std::string& path) {
    const size_t pos = path.find_last_of("/\\");
    if (pos == std::string::npos) return ".";
    return path.substr(0, pos);
}

} // namespace detail

// Line-oriented CSV manifest:
//   subject_id,path,split[,r1,c1,r2,c2,r3,c3,r4,c4]
// with '#' comment lines. Paths are relative to the manifest location.
// All problems are collected and reported together with line numbers;
// the closed-set protocol requires every test subject to appear in train.
inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest: " + path);

    DatasetManifest manifest;
    const std::string base = detail::dirname_of(path);
    std::vector<std::string> problems;
    std::set<std::string> train_subjects;
    std::vector<std::pair<int, std::string>> test_subject_lines;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;

        std::vector<std::string> fields;
        std::stringstream ss(trimmed);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(detail::trim(field));

        if (fields.size() != 3 && fields.size() != 11) {
            problems.push_back("line " + std::to_string(line_no) + ": expected 3 or 11 fields, got " +
                               std::to_string(fields.size()));
            continue;
        }

        ManifestRecord rec;
        rec.subject_id = fields[0];
        if (rec.subject_id.empty()) {
            problems.push_back("line " + std::to_string(line_no) + ": empty subject id");
            continue;
        }
        if (fields[1].empty()) {
            problems.push_back("line " + std::to_string(line_no) + ": empty image path");
            continue;
        }
        const bool absolute = fields[1].front() == '/';
        rec.image_path = absolute ? fields[1] : base + "/" + fields[1];

        if (fields[2] == "train") {
            rec.split = Split::Train;
        } else if (fields[2] == "test") {
            rec.split = Split::Test;
        } else {
            problems.push_back("line " + std::to_string(line_no) + ": bad split token '" +
                               fields[2] + "' (expected train or test)");
            continue;
        }

        if (fields.size() == 11) {
            std::array<std::array<int, 2>, 4> corners{};
            bool ok = true;
            for (int i = 0; i < 8; ++i) {
                try {
                    size_t used = 0;
                    const int v = std::stoi(fields[3 + i], &used);
                    if (used != fields[3 + i].size()) throw std::invalid_argument("trailing junk");
                    corners[i / 2][i % 2] = v;
                } catch (const std::exception&) {
                    problems.push_back("line " + std::to_string(line_no) +
                                       ": bad eye-corner coordinate '" + fields[3 + i] + "'");
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            rec.eye_corners = corners;
        }

        std::ifstream probe(rec.image_path, std::ios::binary);
        if (!probe) {
            problems.push_back("line " + std::to_string(line_no) + ": unreadable image path '" +
                               rec.image_path + "'");
            continue;
        }

        if (rec.split == Split::Train) train_subjects.insert(rec.subject_id);
        else test_subject_lines.emplace_back(line_no, rec.subject_id);
        manifest.records.push_back(std::move(rec));
    }

    for (const auto& [ln, subject] : test_subject_lines) {
        if (!train_subjects.count(subject))
            problems.push_back("line " + std::to_string(ln) + ": subject '" + subject +
                               "' appears in test but not in train (closed-set protocol)");
    }
    if (manifest.records.empty() && problems.empty())
        problems.push_back("manifest has no records");

    if (!problems.empty()) {
        std::string msg = path + ": " + std::to_string(problems.size()) + " problem(s):";
        for (const auto& p : problems) msg += "\n  " + p;
        throw validation_error(msg);
    }
    return manifest;
}

} // namespace fpcf

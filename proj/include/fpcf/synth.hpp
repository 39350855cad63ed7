#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "image.hpp"

namespace fpcf {

// splitmix64: tiny deterministic generator, stable across platforms.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; } // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SynthParams {
    int subjects = 10;
    int images_per_subject = 10;
    int train_per_subject = 5;
    int rows = 150;
    int cols = 130;
    double noise = 12.0;        // white-noise sigma, gray levels
    double jitter = 1.5;        // max |translation| in pixels
    uint64_t seed = 1;
};

namespace detail {

struct Wave {
    double amp, fr, fc, phase;
};

// Subject appearance = population field shared by every subject plus a
// weaker subject-specific deviation, with extra deviation energy in the
// eye band so the periocular strip is discriminative on its own. The
// shared field keeps subjects confusable; recognition difficulty is then
// governed by the per-image noise and jitter.
struct SubjectPrototype {
    std::vector<Wave> population;
    std::vector<Wave> identity;
    std::vector<Wave> band;
    double band_center, band_width;
    int rows, cols;

    double operator()(double r, double c) const {
        const double tau = 6.283185307179586476925286766559;
        double v = 128.0;
        for (const Wave& w : population)
            v += w.amp * std::cos(tau * (w.fr * r / rows + w.fc * c / cols) + w.phase);
        for (const Wave& w : identity)
            v += w.amp * std::cos(tau * (w.fr * r / rows + w.fc * c / cols) + w.phase);
        const double t = (r - band_center) / band_width;
        const double g = std::exp(-t * t);
        for (const Wave& w : band)
            v += g * w.amp * std::cos(tau * (w.fr * r / rows + w.fc * c / cols) + w.phase);
        return v;
    }
};

inline std::vector<Wave> make_waves(Rng& rng, int count, double amp_lo, double amp_hi,
                                    double freq_lo, double freq_hi) {
    std::vector<Wave> waves;
    waves.reserve(count);
    for (int k = 0; k < count; ++k)
        waves.push_back({rng.uniform(amp_lo, amp_hi), rng.uniform(freq_lo, freq_hi),
                         rng.uniform(freq_lo, freq_hi), rng.uniform(0.0, 6.283185307179586)});
    return waves;
}

inline SubjectPrototype make_prototype(Rng& population_rng, Rng& subject_rng, int rows, int cols) {
    SubjectPrototype p;
    p.rows = rows;
    p.cols = cols;
    p.band_center = 0.37 * rows; // middle of the default strip band
    p.band_width = 0.12 * rows;
    p.population = make_waves(population_rng, 8, 10.0, 26.0, 0.5, 4.0);
    p.identity = make_waves(subject_rng, 8, 1.0, 3.0, 1.0, 6.0);
    p.band = make_waves(subject_rng, 6, 6.0, 14.0, 2.0, 8.0);
    return p;
}

} // namespace detail

// Renders one image of a subject: the prototype sampled at a jittered
// position, with a per-image gain and illumination offset plus pixel noise.
inline GrayImage synth_image(const detail::SubjectPrototype& proto, Rng& rng,
                             const SynthParams& params) {
    const double dr = rng.uniform(-params.jitter, params.jitter);
    const double dc = rng.uniform(-params.jitter, params.jitter);
    const double gain = rng.uniform(0.92, 1.08);
    const double offset = rng.uniform(-15.0, 15.0);

    GrayImage img(params.rows, params.cols);
    for (int r = 0; r < params.rows; ++r)
        for (int c = 0; c < params.cols; ++c) {
            const double v = gain * proto(r + dr, c + dc) + offset + params.noise * rng.normal();
            img.at(r, c) = std::clamp(v, 0.0, 255.0);
        }
    return img;
}

// Writes <out_dir>/imgs/sNNN_MM.pgm for every subject/image plus
// <out_dir>/manifest.csv; the first train_per_subject images of each
// subject are the train split. Fully deterministic in the seed: each
// image draws from its own stream keyed by (seed, subject, image).
inline std::string generate_synth_dataset(const SynthParams& params, const std::string& out_dir) {
    namespace fs = std::filesystem;
    if (params.subjects < 1 || params.images_per_subject < 1)
        throw std::invalid_argument("generate_synth_dataset: need at least one subject and image");
    if (params.train_per_subject < 1 || params.train_per_subject > params.images_per_subject)
        throw std::invalid_argument("generate_synth_dataset: train_per_subject must lie in [1, images_per_subject]");

    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "imgs", ec);
    if (ec) throw io_error("cannot create dataset directory: " + out_dir + ": " + ec.message());

    const std::string manifest_path = out_dir + "/manifest.csv";
    std::ofstream manifest(manifest_path);
    if (!manifest) throw io_error("cannot write manifest: " + manifest_path);
    manifest << "# synthetic dataset: subjects=" << params.subjects
             << " images_per_subject=" << params.images_per_subject
             << " train_per_subject=" << params.train_per_subject
             << " rows=" << params.rows << " cols=" << params.cols
             << " noise=" << params.noise << " jitter=" << params.jitter
             << " seed=" << params.seed << "\n";

    for (int s = 0; s < params.subjects; ++s) {
        Rng population_rng(params.seed * 0x100000001b3ull + 0xA5A5ull);
        Rng subject_rng(params.seed * 0x100000001b3ull + 0x9E37ull * (s + 1));
        const detail::SubjectPrototype proto =
            detail::make_prototype(population_rng, subject_rng, params.rows, params.cols);
        for (int i = 0; i < params.images_per_subject; ++i) {
            Rng img_rng(params.seed * 0x100000001b3ull + 1000003ull * (s + 1) + 7919ull * (i + 1));
            const GrayImage img = synth_image(proto, img_rng, params);

            std::ostringstream name;
            name << "s" << std::setw(3) << std::setfill('0') << s + 1 << "_" << std::setw(2)
                 << std::setfill('0') << i + 1 << ".pgm";
            save_pgm(img, out_dir + "/imgs/" + name.str());

            std::ostringstream sid;
            sid << "s" << std::setw(3) << std::setfill('0') << s + 1;
            manifest << sid.str() << ",imgs/" << name.str() << ","
                     << (i < params.train_per_subject ? "train" : "test") << "\n";
        }
    }
    if (!manifest) throw io_error("failed writing manifest: " + manifest_path);
    return manifest_path;
}

} // namespace fpcf

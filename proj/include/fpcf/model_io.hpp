#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "pipeline.hpp"

namespace fpcf {

namespace detail {

inline const std::array<uint32_t, 256>& crc32_table() {
    static const std::array<uint32_t, 256> table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return table;
}

inline uint32_t crc32(const uint8_t* data, size_t len) {
    uint32_t c = 0xFFFFFFFFu;
    for (size_t i = 0; i < len; ++i) c = crc32_table()[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

// Little-endian serialization of the model payload.
struct ByteWriter {
    std::vector<uint8_t> bytes;

    void u8(uint8_t v) { bytes.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<uint8_t>(bits >> (8 * i)));
    }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        bytes.insert(bytes.end(), s.begin(), s.end());
    }
    void vec(const std::vector<double>& v) {
        u32(static_cast<uint32_t>(v.size()));
        for (double d : v) f64(d);
    }
    void mat(const Matrix& m) {
        u32(static_cast<uint32_t>(m.rows));
        u32(static_cast<uint32_t>(m.cols));
        for (double d : m.data) f64(d);
    }
};

struct ByteReader {
    const std::vector<uint8_t>& bytes;
    size_t pos = 0;
    std::string path;

    ByteReader(const std::vector<uint8_t>& b, std::string p) : bytes(b), path(std::move(p)) {}

    void need(size_t n) {
        if (pos + n > bytes.size())
            throw format_error(path + ": truncated model file at byte offset " +
                               std::to_string(pos) + " (need " + std::to_string(n) + " more)");
    }
    uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= uint64_t(bytes[pos + i]) << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s(bytes.begin() + pos, bytes.begin() + pos + n);
        pos += n;
        return s;
    }
    std::vector<double> vec() {
        const uint32_t n = u32();
        std::vector<double> v(n);
        for (uint32_t i = 0; i < n; ++i) v[i] = f64();
        return v;
    }
    Matrix mat() {
        const uint32_t r = u32();
        const uint32_t c = u32();
        Matrix m(static_cast<int>(r), static_cast<int>(c));
        for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = f64();
        return m;
    }
};

inline void write_pca(ByteWriter& w, const PcaModel& m) {
    w.vec(m.mean);
    w.mat(m.basis);
    w.vec(m.eigenvalues);
}

inline PcaModel read_pca(ByteReader& r) {
    PcaModel m;
    m.mean = r.vec();
    m.basis = r.mat();
    m.eigenvalues = r.vec();
    return m;
}

} // namespace detail

inline constexpr char kModelMagic[4] = {'F', 'P', 'C', 'F'};
inline constexpr uint8_t kModelVersion = 1;

// Binary model file: magic "FPCF", version byte, little-endian payload,
// trailing CRC32 over everything before it. Doubles round-trip bit-exactly.
inline void save_model(const PipelineModel& model, const std::string& path) {
    detail::ByteWriter w;
    w.bytes.insert(w.bytes.end(), kModelMagic, kModelMagic + 4);
    w.u8(kModelVersion);

    const PipelineConfig& c = model.config;
    w.i32(c.divisions);
    w.i32(c.levels);
    w.u8(c.use_wavelet ? 1 : 0);
    w.u8(static_cast<uint8_t>(c.fusion));
    w.u8(static_cast<uint8_t>(c.mode));
    w.f64(c.ridge);
    w.i32(c.pca_keep);
    w.i32(c.cca_max_pairs);
    w.u8(c.open_set ? 1 : 0);
    w.i32(c.canonical_rows);
    w.i32(c.canonical_cols);
    w.i32(c.strip_rows);
    w.i32(c.strip_row_start);

    w.i32(model.face_desc.divisions);
    w.i32(model.face_desc.wavelet.levels);
    w.u8(model.face_desc.use_wavelet ? 1 : 0);
    w.i32(model.perioc_desc.divisions);
    w.i32(model.perioc_desc.wavelet.levels);
    w.u8(model.perioc_desc.use_wavelet ? 1 : 0);

    detail::write_pca(w, model.pca_face);
    detail::write_pca(w, model.pca_perioc);

    w.vec(model.cca.mean_x);
    w.vec(model.cca.mean_y);
    w.mat(model.cca.basis_a);
    w.mat(model.cca.basis_b);
    w.vec(model.cca.correlations);
    w.f64(model.cca.ridge);

    w.u8(static_cast<uint8_t>(model.gallery.mode));
    w.f64(model.gallery.threshold);
    w.u32(static_cast<uint32_t>(model.gallery.entries.size()));
    for (const GalleryEntry& e : model.gallery.entries) {
        w.str(e.label);
        w.vec(e.z);
    }

    const uint32_t crc = detail::crc32(w.bytes.data(), w.bytes.size());
    w.u32(crc);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open model file for writing: " + path);
    out.write(reinterpret_cast<const char*>(w.bytes.data()),
              static_cast<std::streamsize>(w.bytes.size()));
    if (!out) throw io_error("failed writing model file: " + path);
}

inline PipelineModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open model file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 9) throw format_error(path + ": file too short to be a model");
    if (std::memcmp(bytes.data(), kModelMagic, 4) != 0)
        throw format_error(path + ": bad magic, not a model file");

    const uint32_t stored_crc = uint32_t(bytes[bytes.size() - 4]) |
                                uint32_t(bytes[bytes.size() - 3]) << 8 |
                                uint32_t(bytes[bytes.size() - 2]) << 16 |
                                uint32_t(bytes[bytes.size() - 1]) << 24;
    const uint32_t actual_crc = detail::crc32(bytes.data(), bytes.size() - 4);
    if (stored_crc != actual_crc)
        throw format_error(path + ": checksum mismatch, file is corrupt or truncated");

    detail::ByteReader r(bytes, path);
    r.pos = 4;
    const uint8_t version = r.u8();
    if (version != kModelVersion)
        throw format_error(path + ": unsupported model version " + std::to_string(version) +
                           ", expected " + std::to_string(kModelVersion));

    PipelineModel model;
    model.format_version = version;
    PipelineConfig& c = model.config;
    c.divisions = r.i32();
    c.levels = r.i32();
    c.use_wavelet = r.u8() != 0;
    c.fusion = static_cast<FusionMode>(r.u8());
    c.mode = static_cast<PipelineMode>(r.u8());
    c.ridge = r.f64();
    c.pca_keep = r.i32();
    c.cca_max_pairs = r.i32();
    c.open_set = r.u8() != 0;
    c.canonical_rows = r.i32();
    c.canonical_cols = r.i32();
    c.strip_rows = r.i32();
    c.strip_row_start = r.i32();

    model.face_desc.divisions = r.i32();
    model.face_desc.wavelet.levels = r.i32();
    model.face_desc.use_wavelet = r.u8() != 0;
    model.perioc_desc.divisions = r.i32();
    model.perioc_desc.wavelet.levels = r.i32();
    model.perioc_desc.use_wavelet = r.u8() != 0;

    model.pca_face = detail::read_pca(r);
    model.pca_perioc = detail::read_pca(r);

    model.cca.mean_x = r.vec();
    model.cca.mean_y = r.vec();
    model.cca.basis_a = r.mat();
    model.cca.basis_b = r.mat();
    model.cca.correlations = r.vec();
    model.cca.ridge = r.f64();

    model.gallery.mode = static_cast<FusionMode>(r.u8());
    model.gallery.threshold = r.f64();
    const uint32_t entries = r.u32();
    size_t expected_len = 0;
    for (uint32_t i = 0; i < entries; ++i) {
        GalleryEntry e;
        e.label = r.str();
        e.z = r.vec();
        if (i == 0) expected_len = e.z.size();
        else if (e.z.size() != expected_len)
            throw format_error(path + ": gallery entry " + std::to_string(i) +
                               " has inconsistent vector length");
        model.gallery.entries.push_back(std::move(e));
    }

    if (r.pos != bytes.size() - 4)
        throw format_error(path + ": trailing bytes after payload at offset " +
                           std::to_string(r.pos));

    // Gallery vectors must match the dimensionality this model's own
    // chain produces.
    size_t expected_dim = 0;
    switch (model.config.mode) {
        case PipelineMode::Face: expected_dim = model.pca_face.components(); break;
        case PipelineMode::Periocular: expected_dim = model.pca_perioc.components(); break;
        default:
            expected_dim = model.config.fusion == FusionMode::FFO1
                               ? 2 * static_cast<size_t>(model.cca.pairs())
                               : static_cast<size_t>(model.cca.pairs());
    }
    for (const GalleryEntry& e : model.gallery.entries)
        if (e.z.size() != expected_dim)
            throw format_error(path + ": gallery vector length " + std::to_string(e.z.size()) +
                               " does not match the model's fusion dimension " +
                               std::to_string(expected_dim));
    return model;
}

} // namespace fpcf

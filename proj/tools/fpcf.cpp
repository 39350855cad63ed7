// fpcf command-line harness: synthetic data generation, feature
// extraction, training, evaluation and division sweeps.
//
// Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fpcf/fpcf.hpp>

namespace {

using namespace fpcf;

struct ConfigCli {
    std::string config_path;
    int divisions = -1;
    int levels = -1;
    std::string fusion;
    std::string mode;
    double ridge = -1.0;
    int pca_keep = -2; // -1 means "all", so the unset sentinel is -2
    bool open_set = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--divisions", divisions, "blocks per axis (d)");
        cmd->add_option("--levels", levels, "wavelet decomposition levels");
        cmd->add_option("--fusion", fusion, "fusion output: ffo1 or ffo2")
            ->check(CLI::IsMember({"ffo1", "ffo2"}));
        cmd->add_option("--mode", mode, "pipeline mode: face, periocular or fused")
            ->check(CLI::IsMember({"face", "periocular", "fused"}));
        cmd->add_option("--ridge", ridge, "CCA covariance ridge (relative)");
        cmd->add_option("--pca-keep", pca_keep, "PCA components to keep (-1 = all)");
        cmd->add_flag("--open-set", open_set, "apply the rejection threshold");
    }

    nlohmann::json load_json() const {
        if (config_path.empty()) return nlohmann::json::object();
        std::ifstream in(config_path);
        if (!in) throw io_error("cannot open config file: " + config_path);
        try {
            return nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw validation_error("config " + config_path + ": " + e.what());
        }
    }

    PipelineConfig resolve() const {
        const nlohmann::json j = load_json();
        PipelineConfig cfg = config_from_json(j);

        bool divisions_given = divisions >= 0 || j.contains("divisions");
        if (divisions >= 0) cfg.divisions = divisions;
        if (levels >= 0) cfg.levels = levels;
        if (fusion == "ffo1") cfg.fusion = FusionMode::FFO1;
        if (fusion == "ffo2") cfg.fusion = FusionMode::FFO2;
        if (mode == "face") cfg.mode = PipelineMode::Face;
        if (mode == "periocular") cfg.mode = PipelineMode::Periocular;
        if (mode == "fused") cfg.mode = PipelineMode::Fused;
        if (ridge >= 0.0) cfg.ridge = ridge;
        if (pca_keep >= -1) cfg.pca_keep = pca_keep;
        if (open_set) cfg.open_set = true;

        // The plain-LBP baseline defaults to d=12 unless d was given.
        if (!divisions_given && !cfg.use_wavelet) cfg.divisions = 12;
        return cfg;
    }
};

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw io_error("cannot create output directory " + out + ": " + ec.message());
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_gen_synth(const std::string& out, const ConfigCli& cli, SynthParams params,
                  bool subjects_set, bool images_set, bool train_set, bool noise_set,
                  bool jitter_set, bool seed_set, bool rows_set, bool cols_set) {
    const nlohmann::json j = cli.load_json();
    if (j.contains("synth")) {
        const nlohmann::json& s = j.at("synth");
        SynthParams from_cfg = params;
        if (s.contains("subjects")) from_cfg.subjects = s.at("subjects").get<int>();
        if (s.contains("images_per_subject"))
            from_cfg.images_per_subject = s.at("images_per_subject").get<int>();
        if (s.contains("train_per_subject"))
            from_cfg.train_per_subject = s.at("train_per_subject").get<int>();
        if (s.contains("noise")) from_cfg.noise = s.at("noise").get<double>();
        if (s.contains("jitter")) from_cfg.jitter = s.at("jitter").get<double>();
        if (s.contains("seed")) from_cfg.seed = s.at("seed").get<uint64_t>();
        if (s.contains("rows")) from_cfg.rows = s.at("rows").get<int>();
        if (s.contains("cols")) from_cfg.cols = s.at("cols").get<int>();
        // Explicit flags still win over the config file.
        if (!subjects_set) params.subjects = from_cfg.subjects;
        if (!images_set) params.images_per_subject = from_cfg.images_per_subject;
        if (!train_set) params.train_per_subject = from_cfg.train_per_subject;
        if (!noise_set) params.noise = from_cfg.noise;
        if (!jitter_set) params.jitter = from_cfg.jitter;
        if (!seed_set) params.seed = from_cfg.seed;
        if (!rows_set) params.rows = from_cfg.rows;
        if (!cols_set) params.cols = from_cfg.cols;
    }
    const std::string manifest = generate_synth_dataset(params, out);
    std::cout << "wrote " << manifest << " (" << params.subjects << " subjects, "
              << params.subjects * params.images_per_subject << " images)\n";
    return 0;
}

int cmd_extract(const std::string& manifest_path, const std::string& out, const ConfigCli& cli) {
    const PipelineConfig cfg = cli.resolve();
    const DatasetManifest manifest = load_manifest(manifest_path);
    ensure_out_dir(out);

    const DescriptorConfig desc{cfg.divisions, WaveletConfig{cfg.levels}, cfg.use_wavelet};
    std::ofstream csv(out + "/features.csv", std::ios::binary);
    if (!csv) throw io_error("cannot write " + out + "/features.csv");
    csv << "subject_id,path,split,branch,dim,values...\n";

    for (const ManifestRecord& rec : manifest.records) {
        GrayImage img = load_pgm(rec.image_path);
        const int row_start = detail::strip_row_start_for(rec, img, cfg);
        if (img.rows != cfg.canonical_rows || img.cols != cfg.canonical_cols)
            img = resize_bilinear(img, cfg.canonical_rows, cfg.canonical_cols);

        auto emit = [&](const char* branch, const FeatureVector& f) {
            csv << rec.subject_id << "," << rec.image_path << ","
                << (rec.split == Split::Train ? "train" : "test") << "," << branch << ","
                << f.size();
            for (double v : f) csv << "," << fmt17(v);
            csv << "\n";
        };
        if (cfg.mode != PipelineMode::Periocular) emit("face", wd_lbp(img, desc));
        if (cfg.mode != PipelineMode::Face) {
            const GrayImage strip = crop_strip(img, StripSpec{row_start, cfg.strip_rows, 0});
            emit("periocular", wd_lbp(strip, desc));
        }
    }
    if (!csv) throw io_error("failed writing " + out + "/features.csv");
    std::cout << "wrote " << out << "/features.csv\n";
    return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& out, std::string model_path,
              const ConfigCli& cli) {
    const PipelineConfig cfg = cli.resolve();
    const DatasetManifest manifest = load_manifest(manifest_path);
    ensure_out_dir(out);
    if (model_path.empty()) model_path = out + "/model.fpcf";

    const auto t0 = std::chrono::steady_clock::now();
    const PipelineModel model = train(manifest, cfg);
    const double train_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    save_model(model, model_path);

    nlohmann::json summary{
        {"model", model_path},
        {"train_images", model.gallery.entries.size()},
        {"face_pca_components", model.pca_face.components()},
        {"periocular_pca_components", model.pca_perioc.components()},
        {"cca_pairs", model.cca.pairs()},
        {"gallery_threshold", model.gallery.threshold},
        {"train_ms", train_ms},
        {"config", config_to_json(cfg)},
    };
    if (model.cca.pairs() > 0) summary["top_correlation"] = model.cca.correlations.front();
    std::ofstream js(out + "/summary.json");
    if (!js) throw io_error("cannot write " + out + "/summary.json");
    js << summary.dump(2) << "\n";

    std::cout << "wrote " << model_path << " (" << model.gallery.entries.size()
              << " gallery entries, theta = " << model.gallery.threshold << ")\n";
    return 0;
}

int cmd_eval(const std::string& manifest_path, const std::string& model_path,
             const std::string& out, const ConfigCli& cli) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    PipelineModel model = load_model(model_path);
    if (cli.open_set) model.config.open_set = true;
    ensure_out_dir(out);

    const EvalReport report = evaluate(model, manifest);
    write_report_csv(report, out + "/report.csv");
    write_summary_json(report, out + "/summary.json");
    std::cout << "recognition rate " << report.recognition_rate() << "% (" << report.correct
              << "/" << report.total << "), reports in " << out << "\n";
    return 0;
}

int cmd_sweep(const std::string& manifest_path, const std::string& out, int d_min, int d_max,
              std::vector<std::string> variants, const ConfigCli& cli) {
    const PipelineConfig cfg = cli.resolve();
    const DatasetManifest manifest = load_manifest(manifest_path);
    ensure_out_dir(out);
    if (variants.empty()) variants = sweep_variant_names();

    const std::vector<SweepRow> rows = sweep_divisions(manifest, d_min, d_max, variants, cfg);
    for (const SweepRow& r : rows)
        if (!r.ok) std::cerr << "warning: skipped " << r.variant << " d=" << r.d << ": " << r.note
                             << "\n";
    write_sweep_csv(rows, out + "/report.csv");
    write_sweep_summary_json(rows, out + "/summary.json");
    std::cout << "wrote " << rows.size() << " sweep rows to " << out << "/report.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"face + periocular fusion pipeline (WD-LBP, PCA, CCA)"};
    app.require_subcommand(1);

    // gen-synth
    auto* gen = app.add_subcommand("gen-synth", "generate a deterministic synthetic dataset");
    std::string gen_out;
    SynthParams params;
    gen->add_option("--out", gen_out, "dataset directory")->required();
    auto* opt_subjects = gen->add_option("--subjects", params.subjects, "number of subjects");
    auto* opt_images =
        gen->add_option("--images-per-subject", params.images_per_subject, "images per subject");
    auto* opt_train =
        gen->add_option("--train-per-subject", params.train_per_subject, "train images per subject");
    auto* opt_noise = gen->add_option("--noise", params.noise, "pixel noise sigma");
    auto* opt_jitter = gen->add_option("--jitter", params.jitter, "max translation jitter (px)");
    auto* opt_seed = gen->add_option("--seed", params.seed, "random seed");
    auto* opt_rows = gen->add_option("--rows", params.rows, "image rows");
    auto* opt_cols = gen->add_option("--cols", params.cols, "image cols");
    ConfigCli gen_cli;
    gen->add_option("--config", gen_cli.config_path, "JSON config file (synth section)");

    // extract
    auto* extract = app.add_subcommand("extract", "dump WD-LBP features for every manifest image");
    std::string ex_manifest, ex_out;
    extract->add_option("--manifest", ex_manifest, "dataset manifest")->required();
    extract->add_option("--out", ex_out, "output directory")->required();
    ConfigCli ex_cli;
    ex_cli.attach(extract);

    // train
    auto* train_cmd = app.add_subcommand("train", "fit the pipeline on the manifest's train split");
    std::string tr_manifest, tr_out, tr_model;
    train_cmd->add_option("--manifest", tr_manifest, "dataset manifest")->required();
    train_cmd->add_option("--out", tr_out, "output directory")->required();
    train_cmd->add_option("--model", tr_model, "model file path (default <out>/model.fpcf)");
    ConfigCli tr_cli;
    tr_cli.attach(train_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained model on the test split");
    std::string ev_manifest, ev_model, ev_out;
    eval_cmd->add_option("--manifest", ev_manifest, "dataset manifest")->required();
    eval_cmd->add_option("--model", ev_model, "model file")->required();
    eval_cmd->add_option("--out", ev_out, "output directory")->required();
    ConfigCli ev_cli;
    ev_cli.attach(eval_cmd);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "train+evaluate across division counts");
    std::string sw_manifest, sw_out;
    int d_min = 3, d_max = 12;
    std::vector<std::string> sw_variants;
    sweep_cmd->add_option("--manifest", sw_manifest, "dataset manifest")->required();
    sweep_cmd->add_option("--out", sw_out, "output directory")->required();
    sweep_cmd->add_option("--d-min", d_min, "smallest division count");
    sweep_cmd->add_option("--d-max", d_max, "largest division count");
    sweep_cmd->add_option("--variants", sw_variants,
                          "variants to run (default: all of lbp/wdlbp x face/periocular/fused)");
    ConfigCli sw_cli;
    sw_cli.attach(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen)
            return cmd_gen_synth(gen_out, gen_cli, params, opt_subjects->count() > 0,
                                 opt_images->count() > 0, opt_train->count() > 0,
                                 opt_noise->count() > 0, opt_jitter->count() > 0,
                                 opt_seed->count() > 0, opt_rows->count() > 0,
                                 opt_cols->count() > 0);
        if (*extract) return cmd_extract(ex_manifest, ex_out, ex_cli);
        if (*train_cmd) return cmd_train(tr_manifest, tr_out, tr_model, tr_cli);
        if (*eval_cmd) return cmd_eval(ev_manifest, ev_model, ev_out, ev_cli);
        if (*sweep_cmd) return cmd_sweep(sw_manifest, sw_out, d_min, d_max, sw_variants, sw_cli);
    } catch (const fpcf::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

#pragma once

#include <gsc/analyzer.hpp>
#include <gsc/config.hpp>
#include <gsc/degrade.hpp>
#include <gsc/error.hpp>
#include <gsc/io.hpp>
#include <gsc/pgm.hpp>
#include <gsc/restorer.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gsc::cli {

inline constexpr const char *kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Solver flag resolution: preset < JSON config file < command-line flag.

struct SolverFlags {
    std::string preset;
    std::string config_path;
    std::optional<int> iters, patch, k, window, stride, workers;
    std::optional<double> rho, p, sigma, eps_w, eps_l;
    std::optional<std::uint64_t> seed;

    void add_to(CLI::App &app) {
        app.add_option("--preset", preset, "Built-in parameter preset");
        app.add_option("--config", config_path, "JSON config overriding the preset")
            ->check(CLI::ExistingFile);
        app.add_option("--iters", iters, "ADMM iterations");
        app.add_option("--patch", patch, "Patch side d");
        app.add_option("--k", k, "Patches per group");
        app.add_option("--window", window, "Search window side");
        app.add_option("--stride", stride, "Reference patch stride");
        app.add_option("--workers", workers, "Worker threads for the group loop");
        app.add_option("--rho", rho, "ADMM penalty");
        app.add_option("--p", p, "Schatten exponent in (0, 1]");
        app.add_option("--sigma", sigma, "Noise parameter of the lambda rule");
        app.add_option("--eps-w", eps_w, "Offset of the weight rule");
        app.add_option("--eps-l", eps_l, "Offset of the lambda rule");
        app.add_option("--seed", seed, "Random seed");
    }

    SolverConfig resolve(const std::string &fallback_preset) const {
        SolverConfig cfg = gsc::preset(preset.empty() ? fallback_preset : preset);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            detail::require(static_cast<bool>(in), Errc::FileNotFound,
                            "cannot open config '" + config_path + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception &e) {
                throw Error(Errc::MalformedData, std::string("config: ") + e.what());
            }
            cfg = merge_json(cfg, j);
        }
        if (iters) cfg.iters = *iters;
        if (patch) cfg.patch = *patch;
        if (k) cfg.k = *k;
        if (window) cfg.window = *window;
        if (stride) cfg.stride = *stride;
        if (workers) cfg.workers = *workers;
        if (rho) cfg.rho = *rho;
        if (p) cfg.p = *p;
        if (sigma) cfg.sigma = *sigma;
        if (eps_w) cfg.eps_w = *eps_w;
        if (eps_l) cfg.eps_l = *eps_l;
        if (seed) cfg.seed = *seed;
        cfg.validate();
        return cfg;
    }
};

/// Preset whose missing fraction is closest to the mask's.
inline std::string inpaint_preset_for(const MaskOp &mask) {
    const double missing =
        1.0 - static_cast<double>(mask.observed_count()) / static_cast<double>(mask.observed.size());
    const std::pair<double, const char *> table[] = {
        {0.8, "inpaint-80"}, {0.7, "inpaint-70"}, {0.6, "inpaint-60"}, {0.5, "inpaint-50"}};
    const char *best = table[0].second;
    double best_gap = 2.0;
    for (const auto &[frac, name] : table)
        if (std::abs(frac - missing) < best_gap) {
            best_gap = std::abs(frac - missing);
            best = name;
        }
    return best;
}

inline std::string cs_preset_for(double ratio) {
    if (ratio <= 0.15)
        return "cs-10";
    if (ratio <= 0.25)
        return "cs-20";
    return "cs-30";
}

// ---------------------------------------------------------------------------
// Command options. Each is fully resolved before execution and serialized
// into the run manifest, which `replay` executes verbatim.

struct DegradeOptions {
    std::string mode = "mask"; // mask | text | cs
    std::string input;
    std::string out;
    std::string mask_out = "mask.pgm";
    std::string text_mask;
    double fraction = 0.8;
    double threshold = 128.0;
    double ratio = 0.1;
    int block = 32;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

struct RestoreOptions {
    std::string mode = "inpaint"; // inpaint | cs
    std::string input;
    std::string mask;
    std::string out = "restored.pgm";
    std::string reference;
    std::string log;
    SolverConfig config;
};

struct AnalyzeOptions {
    std::string clean;
    std::string degraded;
    std::vector<PatchCoord> positions;
    NormThresholds taus;
    std::string out = "spectra.csv";
    SolverConfig config;
};

inline nlohmann::json to_json(const DegradeOptions &o) {
    return {{"mode", o.mode},           {"input", o.input},       {"out", o.out},
            {"mask_out", o.mask_out},   {"text_mask", o.text_mask}, {"fraction", o.fraction},
            {"threshold", o.threshold}, {"ratio", o.ratio},       {"block", o.block},
            {"noise_sigma", o.noise_sigma}, {"seed", o.seed}};
}

inline DegradeOptions degrade_from_json(const nlohmann::json &j) {
    DegradeOptions o;
    o.mode = j.at("mode").get<std::string>();
    o.input = j.at("input").get<std::string>();
    o.out = j.at("out").get<std::string>();
    o.mask_out = j.at("mask_out").get<std::string>();
    o.text_mask = j.at("text_mask").get<std::string>();
    o.fraction = j.at("fraction").get<double>();
    o.threshold = j.at("threshold").get<double>();
    o.ratio = j.at("ratio").get<double>();
    o.block = j.at("block").get<int>();
    o.noise_sigma = j.at("noise_sigma").get<double>();
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
}

inline nlohmann::json to_json(const RestoreOptions &o) {
    return {{"mode", o.mode},   {"input", o.input},         {"mask", o.mask},
            {"out", o.out},     {"reference", o.reference}, {"log", o.log},
            {"config", gsc::to_json(o.config)}};
}

inline RestoreOptions restore_from_json(const nlohmann::json &j) {
    RestoreOptions o;
    o.mode = j.at("mode").get<std::string>();
    o.input = j.at("input").get<std::string>();
    o.mask = j.at("mask").get<std::string>();
    o.out = j.at("out").get<std::string>();
    o.reference = j.at("reference").get<std::string>();
    o.log = j.at("log").get<std::string>();
    o.config = merge_json(SolverConfig{}, j.at("config"));
    return o;
}

inline nlohmann::json to_json(const AnalyzeOptions &o) {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto &c : o.positions)
        pos.push_back({c.row, c.col});
    return {{"clean", o.clean},
            {"degraded", o.degraded},
            {"positions", pos},
            {"taus",
             {{"nnm", o.taus.nnm}, {"wnnm", o.taus.wnnm}, {"snm", o.taus.snm}, {"wsnm", o.taus.wsnm}}},
            {"out", o.out},
            {"config", gsc::to_json(o.config)}};
}

inline AnalyzeOptions analyze_from_json(const nlohmann::json &j) {
    AnalyzeOptions o;
    o.clean = j.at("clean").get<std::string>();
    o.degraded = j.at("degraded").get<std::string>();
    for (const auto &p : j.at("positions"))
        o.positions.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    const auto &t = j.at("taus");
    o.taus = {t.at("nnm").get<double>(), t.at("wnnm").get<double>(), t.at("snm").get<double>(),
              t.at("wsnm").get<double>()};
    o.out = j.at("out").get<std::string>();
    o.config = merge_json(SolverConfig{}, j.at("config"));
    return o;
}

inline void write_manifest(const std::string &path, const std::string &command,
                           const nlohmann::json &options) {
    if (path.empty())
        return;
    const nlohmann::json manifest{
        {"tool", "gsc"}, {"version", kVersion}, {"command", command}, {"options", options}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    detail::require(static_cast<bool>(out), Errc::Unwritable, "cannot write '" + path + "'");
    out << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Command implementations

inline void run_degrade(const DegradeOptions &o, std::ostream &log) {
    Image clean = load_pgm(o.input);
    if (o.noise_sigma > 0.0)
        clean = add_gaussian_noise(std::move(clean), o.noise_sigma, o.seed);
    if (o.mode == "cs") {
        const auto op = make_cs_op(o.block, o.ratio, o.seed);
        save_measurements(cs_measure(op, clean), op, o.out);
        log << "wrote " << o.out << " and " << sidecar_path(o.out).string() << " ("
            << op.rows_per_block() << " measurements per " << o.block << "x" << o.block
            << " block)\n";
        return;
    }
    MaskOp mask;
    if (o.mode == "mask") {
        mask = make_random_mask(clean.width(), clean.height(), o.fraction, o.seed);
    } else if (o.mode == "text") {
        detail::require(!o.text_mask.empty(), Errc::InvalidArgument,
                        "--text-mask is required for mode text");
        const Image overlay = load_pgm(o.text_mask);
        require_same_dims(overlay, clean, "text mask");
        mask = mask_from_image(overlay, o.threshold);
    } else {
        throw Error(Errc::InvalidArgument, "unknown degrade mode '" + o.mode + "'");
    }
    save_pgm(apply_mask(mask, clean), o.out);
    save_pgm(mask_to_image(mask), o.mask_out);
    log << "wrote " << o.out << " and " << o.mask_out << " (" << mask.observed_count() << " of "
        << mask.observed.size() << " pixels observed)\n";
}

inline void run_restore(const RestoreOptions &o, std::ostream &log) {
    std::optional<Image> reference;
    if (!o.reference.empty())
        reference = load_pgm(o.reference);
    RestoreResult result;
    if (o.mode == "inpaint") {
        detail::require(!o.mask.empty(), Errc::InvalidArgument,
                        "--mask is required for mode inpaint");
        const Image obs = load_pgm(o.input);
        const MaskOp mask = mask_from_mask_image(load_pgm(o.mask));
        result = restore(obs, mask, o.config, reference);
    } else if (o.mode == "cs") {
        const auto loaded = load_measurements(o.input);
        result = restore(loaded.meas, loaded.op, o.config, reference);
    } else {
        throw Error(Errc::InvalidArgument, "unknown restore mode '" + o.mode + "'");
    }
    save_pgm(result.image, o.out);
    if (!o.log.empty())
        save_iter_log(result.log, o.log);
    log << "wrote " << o.out << " after " << result.log.records.size() << " iterations";
    if (reference)
        log << " (PSNR " << std::fixed << std::setprecision(2) << psnr(result.image, *reference)
            << " dB)";
    log << '\n';
}

inline void run_analyze(const AnalyzeOptions &o, std::ostream &log) {
    const Image clean = load_pgm(o.clean);
    const Image degraded = load_pgm(o.degraded);
    std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
    detail::require(static_cast<bool>(out), Errc::Unwritable, "cannot write '" + o.out + "'");
    for (const auto &pos : o.positions) {
        auto spectra = spectra_at(clean, degraded, pos, o.config, o.taus);
        if (o.positions.size() > 1)
            for (auto &s : spectra)
                s.label = std::to_string(pos.row) + ":" + std::to_string(pos.col) + "/" + s.label;
        write_spectra(spectra, out);
        log << "position " << pos.row << "," << pos.col << ":";
        for (std::size_t i = 2; i < spectra.size(); ++i)
            log << ' ' << spectra[i].label << " err=" << spectrum_error(spectra[i], spectra[0]);
        log << '\n';
    }
}

inline int replay(const std::string &manifest_path, std::ostream &log) {
    std::ifstream in(manifest_path);
    detail::require(static_cast<bool>(in), Errc::FileNotFound,
                    "cannot open manifest '" + manifest_path + "'");
    nlohmann::json m;
    try {
        in >> m;
        const auto command = m.at("command").get<std::string>();
        const auto &options = m.at("options");
        if (command == "degrade")
            run_degrade(degrade_from_json(options), log);
        else if (command == "restore")
            run_restore(restore_from_json(options), log);
        else if (command == "analyze")
            run_analyze(analyze_from_json(options), log);
        else
            throw Error(Errc::MalformedData, "manifest command '" + command + "' not replayable");
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::MalformedData, std::string("manifest: ") + e.what());
    }
    return 0;
}

inline PatchCoord parse_position(const std::string &text) {
    const auto comma = text.find(',');
    detail::require(comma != std::string::npos, Errc::InvalidArgument,
                    "position must be ROW,COL: '" + text + "'");
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception &) {
        throw Error(Errc::InvalidArgument, "position must be ROW,COL: '" + text + "'");
    }
}

// ---------------------------------------------------------------------------

/// Entry point. Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
    CLI::App app{"Group sparse coding restoration via weighted Schatten p-norm minimization",
                 "gsc"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // degrade
    DegradeOptions dg;
    std::string dg_manifest;
    auto *degrade = app.add_subcommand("degrade", "Produce a degraded observation");
    degrade->add_option("--mode", dg.mode, "mask | text | cs")
        ->check(CLI::IsMember({"mask", "text", "cs"}));
    degrade->add_option("input", dg.input, "Clean PGM image")->required()->check(CLI::ExistingFile);
    degrade->add_option("--out", dg.out, "Observation output (default obs.pgm / meas.csv)");
    degrade->add_option("--mask-out", dg.mask_out, "Mask output for mask/text modes");
    degrade->add_option("--text-mask", dg.text_mask, "Overlay PGM for mode text");
    degrade->add_option("--threshold", dg.threshold, "Overlay level at or above which a pixel is text");
    degrade->add_option("--fraction", dg.fraction, "Missing pixel fraction for mode mask");
    degrade->add_option("--ratio", dg.ratio, "CS subrate in (0, 1]");
    degrade->add_option("--block", dg.block, "CS block side");
    degrade->add_option("--noise-sigma", dg.noise_sigma, "Additive white Gaussian noise level");
    degrade->add_option("--seed", dg.seed, "Random seed");
    degrade->add_option("--manifest-out", dg_manifest, "Run manifest path");

    // restore
    RestoreOptions rs;
    SolverFlags rs_flags;
    std::string rs_manifest;
    auto *restore_cmd = app.add_subcommand("restore", "Restore an observation by ADMM");
    restore_cmd->add_option("--mode", rs.mode, "inpaint | cs")
        ->check(CLI::IsMember({"inpaint", "cs"}));
    restore_cmd->add_option("input", rs.input, "Observed PGM (inpaint) or measurement CSV (cs)")
        ->required()
        ->check(CLI::ExistingFile);
    restore_cmd->add_option("--mask", rs.mask, "Mask PGM (255 observed, 0 missing)");
    restore_cmd->add_option("--out", rs.out, "Restored image output");
    restore_cmd->add_option("--reference", rs.reference, "Clean image for per-iteration PSNR");
    restore_cmd->add_option("--log", rs.log, "Iteration log CSV");
    restore_cmd->add_option("--manifest-out", rs_manifest, "Run manifest path");
    rs_flags.add_to(*restore_cmd);

    // analyze
    AnalyzeOptions an;
    SolverFlags an_flags;
    std::vector<std::string> an_positions;
    std::optional<double> tau, tau_nnm, tau_wnnm, tau_snm, tau_wsnm;
    std::optional<int> calibrate_rank;
    std::string an_manifest;
    auto *analyze = app.add_subcommand("analyze", "Compare singular spectra of the four norms");
    analyze->add_option("--clean", an.clean, "Clean PGM")->required()->check(CLI::ExistingFile);
    analyze->add_option("--degraded", an.degraded, "Degraded PGM")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--pos", an_positions, "Reference patch ROW,COL (repeatable)")->required();
    analyze->add_option("--tau", tau, "Threshold shared by all norms");
    analyze->add_option("--tau-nnm", tau_nnm);
    analyze->add_option("--tau-wnnm", tau_wnnm);
    analyze->add_option("--tau-snm", tau_snm);
    analyze->add_option("--tau-wsnm", tau_wsnm);
    analyze->add_option("--calibrate-rank", calibrate_rank,
                        "Derive a shared threshold from the first position: half-energy NNM "
                        "threshold raised to truncate at this rank");
    analyze->add_option("--out", an.out, "Spectra CSV output");
    analyze->add_option("--manifest-out", an_manifest, "Run manifest path");
    an_flags.add_to(*analyze);

    // psnr
    std::string psnr_a, psnr_b;
    auto *psnr_cmd = app.add_subcommand("psnr", "PSNR between two PGM images");
    psnr_cmd->add_option("a", psnr_a)->required()->check(CLI::ExistingFile);
    psnr_cmd->add_option("b", psnr_b)->required()->check(CLI::ExistingFile);

    // replay
    std::string manifest_in;
    auto *replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay_cmd->add_option("manifest", manifest_in)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion &) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (degrade->parsed()) {
            if (dg.out.empty())
                dg.out = dg.mode == "cs" ? "meas.csv" : "obs.pgm";
            run_degrade(dg, out);
            write_manifest(dg_manifest.empty() ? dg.out + ".manifest.json" : dg_manifest,
                           "degrade", to_json(dg));
        } else if (restore_cmd->parsed()) {
            std::string fallback;
            if (rs.mode == "inpaint") {
                detail::require(!rs.mask.empty(), Errc::InvalidArgument,
                                "--mask is required for mode inpaint");
                fallback = inpaint_preset_for(mask_from_mask_image(load_pgm(rs.mask)));
            } else {
                fallback = cs_preset_for(load_measurements(rs.input).op.ratio());
            }
            rs.config = rs_flags.resolve(fallback);
            run_restore(rs, out);
            write_manifest(rs_manifest.empty() ? rs.out + ".manifest.json" : rs_manifest,
                           "restore", to_json(rs));
        } else if (analyze->parsed()) {
            an.config = an_flags.resolve("inpaint-80");
            for (const auto &p : an_positions)
                an.positions.push_back(parse_position(p));
            double shared = 0.0;
            if (calibrate_rank) {
                const Image clean = load_pgm(an.clean);
                const Image degraded = load_pgm(an.degraded);
                const auto gi = match_group(clean, an.positions.front(), an.config.patch,
                                            an.config.k, an.config.window);
                const auto sigma = svd(gather(degraded, gi, an.config.patch).matrix).s;
                shared = calibrate_nnm_threshold(sigma, 0.5, *calibrate_rank);
            } else if (tau) {
                shared = *tau;
            } else if (!(tau_nnm && tau_wnnm && tau_snm && tau_wsnm)) {
                err << "error: give --tau, --calibrate-rank, or all four per-norm thresholds\n";
                return 2;
            }
            an.taus = {tau_nnm.value_or(shared), tau_wnnm.value_or(shared),
                       tau_snm.value_or(shared), tau_wsnm.value_or(shared)};
            run_analyze(an, out);
            write_manifest(an_manifest.empty() ? an.out + ".manifest.json" : an_manifest,
                           "analyze", to_json(an));
        } else if (psnr_cmd->parsed()) {
            const double value = psnr(load_pgm(psnr_a), load_pgm(psnr_b));
            if (std::isinf(value))
                out << "inf\n";
            else
                out << std::fixed << std::setprecision(4) << value << '\n';
        } else if (replay_cmd->parsed()) {
            return replay(manifest_in, out);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace gsc::cli

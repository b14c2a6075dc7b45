#pragma once

#include <gsc/analyzer.hpp>
#include <gsc/degrade.hpp>
#include <gsc/error.hpp>
#include <gsc/restorer.hpp>

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gsc {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {
inline std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), Errc::Unwritable, "cannot write '" + path.string() + "'");
    return out;
}
inline std::ifstream open_in(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::FileNotFound, "cannot open '" + path.string() + "'");
    return in;
}
inline double parse_double(const std::string &s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), Errc::MalformedData,
            "bad number '" + s + "'");
    return v;
}
} // namespace detail

// ---------------------------------------------------------------------------
// Measurements: CSV (one block per line) plus a JSON sidecar describing the
// operator, so the projection matrices are regenerated rather than stored.

inline std::filesystem::path sidecar_path(const std::filesystem::path &csv) {
    auto p = csv;
    p.replace_extension(".json");
    return p;
}

inline nlohmann::json cs_sidecar(const CsOp &op, int width, int height) {
    return nlohmann::json{{"block", op.block()},   {"ratio", op.ratio()},
                          {"seed", op.seed()},     {"width", width},
                          {"height", height}};
}

inline void save_measurements(const Measurements &meas, const CsOp &op,
                              const std::filesystem::path &csv) {
    require_consistent(op, meas);
    {
        auto out = detail::open_out(csv);
        for (const auto &b : meas.blocks) {
            for (Eigen::Index i = 0; i < b.size(); ++i) {
                if (i)
                    out << ',';
                out << format_double(b[i]);
            }
            out << '\n';
        }
    }
    auto side = detail::open_out(sidecar_path(csv));
    side << cs_sidecar(op, meas.width, meas.height).dump(2) << '\n';
}

struct LoadedMeasurements {
    Measurements meas;
    CsOp op;
};

inline LoadedMeasurements load_measurements(const std::filesystem::path &csv) {
    nlohmann::json side;
    {
        auto in = detail::open_in(sidecar_path(csv));
        try {
            in >> side;
        } catch (const nlohmann::json::exception &e) {
            throw Error(Errc::MalformedData, std::string("measurement sidecar: ") + e.what());
        }
    }
    int block = 0, width = 0, height = 0;
    double ratio = 0.0;
    std::uint64_t seed = 0;
    try {
        block = side.at("block").get<int>();
        ratio = side.at("ratio").get<double>();
        seed = side.at("seed").get<std::uint64_t>();
        width = side.at("width").get<int>();
        height = side.at("height").get<int>();
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::MalformedData, std::string("measurement sidecar: ") + e.what());
    }
    CsOp op(block, ratio, seed);
    Measurements meas{width, height, block, {}};
    auto in = detail::open_in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> values;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            values.push_back(detail::parse_double(field));
        meas.blocks.push_back(Eigen::Map<const Eigen::VectorXd>(
            values.data(), static_cast<Eigen::Index>(values.size())));
    }
    require_consistent(op, meas);
    return {std::move(meas), std::move(op)};
}

// ---------------------------------------------------------------------------

/// CSV: iter,fidelity,psnr,seconds (psnr empty when no reference was given).
inline void write_iter_log(const IterLog &log, std::ostream &out, bool with_timing = true) {
    out << "iter,fidelity,psnr,seconds\n";
    for (const auto &r : log.records) {
        out << r.iter << ',' << format_double(r.fidelity) << ',';
        if (r.psnr)
            out << format_double(*r.psnr);
        out << ',';
        if (with_timing)
            out << format_double(r.seconds);
        out << '\n';
    }
}

inline void save_iter_log(const IterLog &log, const std::filesystem::path &path) {
    auto out = detail::open_out(path);
    write_iter_log(log, out);
}

/// One row per spectrum: label, then values.
inline void write_spectra(const std::vector<SingularSpectrum> &spectra, std::ostream &out) {
    for (const auto &s : spectra) {
        out << s.label;
        for (double v : s.values)
            out << ',' << format_double(v);
        out << '\n';
    }
}

} // namespace gsc

#include "ctmark/watermark.hpp"

#include <cmath>
#include <stdexcept>

#include "ctmark/rng.hpp"
#include "json.hpp"

namespace ctmark {

namespace {
constexpr int kEmbedIterations = 4;
}

Grid2D prs_generate(uint64_t key, int rows, int cols) {
    Grid2D s(rows, cols);
    KeyedRng rng(key);
    for (size_t k = 0; k < s.size(); ++k) s.data()[k] = static_cast<double>(rng.next_sign());
    return s;
}

std::pair<int, int> select_subband(const ContourletDecomp& d) {
    if (d.scales.empty() || d.scales.back().empty())
        throw std::invalid_argument("select_subband: empty decomposition");
    const auto& finest = d.scales.back();
    int best = 0;
    double best_e = subband_energy(finest[0]);
    for (size_t i = 1; i < finest.size(); ++i) {
        double e = subband_energy(finest[i]);
        if (e > best_e) {
            best_e = e;
            best = static_cast<int>(i);
        }
    }
    return {static_cast<int>(d.scales.size()) - 1, best};
}

double mean_power(const Grid2D& g) {
    return subband_energy(g) / static_cast<double>(g.size());
}

double gamma_for_wdr(const Grid2D& subband, double wdr_db) {
    double pf = mean_power(subband);
    if (!(pf > 0.0))
        throw std::invalid_argument("gamma_for_wdr: zero-energy subband");
    return std::sqrt(pf * std::pow(10.0, wdr_db / 10.0));
}

std::pair<Grid2D, EmbedRecord> embed_grid(const Grid2D& img, uint64_t key, double wdr_db,
                                          const std::vector<int>& dir_levels) {
    ContourletDecomp d = contourlet_analyze(img, dir_levels);
    auto [si, bi] = select_subband(d);
    const Grid2D& f = d.scales[si][bi];

    EmbedRecord rec;
    rec.key = key;
    rec.wdr_db = wdr_db;
    rec.scale_index = si;
    rec.subband_index = bi;
    rec.rows = f.rows();
    rec.cols = f.cols();

    if (wdr_db <= kWdrZeroCutoffDb) {
        rec.gamma = 0.0;
        return {img, rec};
    }
    rec.gamma = gamma_for_wdr(f, wdr_db);

    Grid2D target = f;
    {
        Grid2D s = prs_generate(key, f.rows(), f.cols());
        for (size_t k = 0; k < target.size(); ++k)
            target.data()[k] += rec.gamma * s.data()[k];
    }

    d.scales[si][bi] = target;
    Grid2D y = contourlet_synthesize(d);
    for (int it = 0; it < kEmbedIterations; ++it) {
        ContourletDecomp d2 = contourlet_analyze(y, dir_levels);
        d2.scales[si][bi] = target;
        y = contourlet_synthesize(d2);
    }
    return {std::move(y), rec};
}

std::pair<ImageU8, EmbedRecord> embed(const ImageU8& img, uint64_t key, double wdr_db,
                                      const std::vector<int>& dir_levels) {
    auto [y, rec] = embed_grid(to_grid(img), key, wdr_db, dir_levels);
    if (rec.gamma == 0.0) return {img, rec};  // bit-exact identity
    return {to_image_u8(y), rec};
}

std::pair<Grid2D, EmbedRecord> wt_embed_grid(const Grid2D& img, uint64_t key, double wdr_db,
                                             int levels) {
    WaveletDecomp d = dwt2_analyze(img, levels);
    auto& lvl = d.details.back();
    Grid2D* bands[3] = {&lvl.horizontal, &lvl.vertical, &lvl.diagonal};
    int best = 0;
    double best_e = subband_energy(*bands[0]);
    for (int i = 1; i < 3; ++i) {
        double e = subband_energy(*bands[i]);
        if (e > best_e) {
            best_e = e;
            best = i;
        }
    }
    Grid2D& f = *bands[best];

    EmbedRecord rec;
    rec.key = key;
    rec.wdr_db = wdr_db;
    rec.scale_index = levels;
    rec.subband_index = best;
    rec.rows = f.rows();
    rec.cols = f.cols();

    if (wdr_db <= kWdrZeroCutoffDb) {
        rec.gamma = 0.0;
        return {img, rec};
    }
    rec.gamma = gamma_for_wdr(f, wdr_db);

    Grid2D s = prs_generate(key, f.rows(), f.cols());
    for (size_t k = 0; k < f.size(); ++k) f.data()[k] += rec.gamma * s.data()[k];
    return {dwt2_synthesize(d), rec};
}

std::string embed_record_to_json_string(const EmbedRecord& rec) {
    nlohmann::ordered_json j;
    j["key"] = rec.key;
    j["wdr_db"] = rec.wdr_db;
    j["gamma"] = rec.gamma;
    j["scale_index"] = rec.scale_index;
    j["subband_index"] = rec.subband_index;
    j["rows"] = rec.rows;
    j["cols"] = rec.cols;
    return j.dump();
}

EmbedRecord embed_record_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    EmbedRecord rec;
    rec.key = j.at("key").get<uint64_t>();
    rec.wdr_db = j.at("wdr_db").get<double>();
    rec.gamma = j.at("gamma").get<double>();
    rec.scale_index = j.at("scale_index").get<int>();
    rec.subband_index = j.at("subband_index").get<int>();
    rec.rows = j.at("rows").get<int>();
    rec.cols = j.at("cols").get<int>();
    return rec;
}

}  // namespace ctmark

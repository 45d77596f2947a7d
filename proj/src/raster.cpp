#include "ewnoise/raster.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ewnoise/error.hpp"

namespace ewnoise {

namespace {

static_assert(sizeof(float) == 4);

uint32_t to_le(uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return __builtin_bswap32(v);
}

} // namespace

void SceneRaster::mask_below(float threshold) {
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i] <= threshold) valid[i] = 0;
}

SceneRaster load_raster(const std::string& path, float mask_threshold) {
    std::ifstream sidecar(path + ".json");
    if (!sidecar)
        throw Error(ErrorKind::Io, "cannot open sidecar " + path + ".json");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(sidecar);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, path + ".json: " + e.what());
    }
    if (!meta.is_object() || !meta.contains("rows") || !meta.contains("cols"))
        throw Error(ErrorKind::SchemaViolation, path + ".json: missing rows/cols");
    if (meta.value("dtype", "f32le") != "f32le")
        throw Error(ErrorKind::SchemaViolation, path + ".json: unsupported dtype");
    long long rows = meta["rows"].is_number_integer() ? meta["rows"].get<long long>() : -1;
    long long cols = meta["cols"].is_number_integer() ? meta["cols"].get<long long>() : -1;
    if (rows < 1 || cols < 1 || rows * cols > (1LL << 31))
        throw Error(ErrorKind::SchemaViolation, path + ".json: bad dimensions");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open raster " + path);
    SceneRaster raster(static_cast<int>(rows), static_cast<int>(cols));
    std::vector<uint32_t> bits(raster.values.size());
    in.read(reinterpret_cast<char*>(bits.data()),
            static_cast<std::streamsize>(bits.size() * 4));
    if (in.gcount() != static_cast<std::streamsize>(bits.size() * 4))
        throw Error(ErrorKind::Io, path + ": truncated raster (" +
                                       std::to_string(in.gcount()) + " bytes read)");
    for (size_t i = 0; i < bits.size(); ++i) {
        uint32_t v = to_le(bits[i]);
        std::memcpy(&raster.values[i], &v, 4);
    }
    raster.mask_below(mask_threshold);
    return raster;
}

void save_raster(const SceneRaster& raster, const std::string& path,
                 const std::string& units) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write raster " + path);
    std::vector<uint32_t> bits(raster.values.size());
    for (size_t i = 0; i < bits.size(); ++i) {
        uint32_t v;
        std::memcpy(&v, &raster.values[i], 4);
        bits[i] = to_le(v);
    }
    out.write(reinterpret_cast<const char*>(bits.data()),
              static_cast<std::streamsize>(bits.size() * 4));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);

    nlohmann::json meta{{"rows", raster.rows},
                        {"cols", raster.cols},
                        {"dtype", "f32le"},
                        {"units", units}};
    std::ofstream sidecar(path + ".json");
    if (!sidecar) throw Error(ErrorKind::Io, "cannot write sidecar " + path + ".json");
    sidecar << meta.dump(2) << "\n";
}

} // namespace ewnoise

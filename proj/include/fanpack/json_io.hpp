#pragma once
// JSON and CSV serialization for pieces, streams and packing snapshots.

#include "fanpack/errors.hpp"
#include "fanpack/geometry.hpp"
#include "fanpack/rat.hpp"
#include "fanpack/strip.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fanpack {

using json = nlohmann::json;

inline Rat ratFromJson(const json& j) {
    if (j.is_string()) return Rat::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<int64_t>());
    if (j.is_number()) return Rat::parse(j.dump());  // shortest round-trip decimal
    throw InputError("expected a number or rational string, got " + j.dump());
}

inline json pieceToJson(const ConvexPiece& p) {
    json vs = json::array();
    for (auto& v : p.vertices()) vs.push_back({v.x.str(), v.y.str()});
    return {{"vertices", vs}};
}

inline ConvexPiece pieceFromJson(const json& j) {
    const json& vs = j.is_object() ? j.at("vertices") : j;
    if (!vs.is_array()) throw InputError("piece vertices must be an array");
    std::vector<Point> pts;
    for (auto& v : vs) {
        if (!v.is_array() || v.size() != 2) throw InputError("vertex must be a pair [x, y]");
        pts.push_back({ratFromJson(v[0]), ratFromJson(v[1])});
    }
    return ConvexPiece(std::move(pts));
}

// Accepts a bare array of pieces or {"pieces": [...]}.
inline std::vector<ConvexPiece> piecesFromJson(const json& j) {
    const json& arr = j.is_object() ? j.at("pieces") : j;
    if (!arr.is_array()) throw InputError("pieces must be an array");
    std::vector<ConvexPiece> out;
    out.reserve(arr.size());
    for (auto& p : arr) out.push_back(pieceFromJson(p));
    return out;
}

inline json piecesToJson(const std::vector<ConvexPiece>& ps) {
    json arr = json::array();
    for (auto& p : ps) arr.push_back(pieceToJson(p));
    return {{"pieces", arr}};
}

inline std::vector<Rat> streamFromJson(const json& j) {
    const json& arr = j.is_object() ? j.at("values") : j;
    if (!arr.is_array()) throw InputError("stream must be an array");
    std::vector<Rat> out;
    out.reserve(arr.size());
    for (auto& v : arr) {
        Rat x = ratFromJson(v);
        if (x.sign() < 0 || Rat(1) < x) throw InputError("stream value outside [0,1]: " + x.str());
        out.push_back(x);
    }
    return out;
}

inline json streamToJson(const std::vector<Rat>& xs) {
    json arr = json::array();
    for (auto& x : xs) arr.push_back(x.str());
    return arr;
}

inline json readJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline void writeTextFile(const std::string& path, const std::string& text) {
    std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline json placementsToJson(const std::vector<Placement>& ps) {
    json arr = json::array();
    for (auto& p : ps) {
        json e = pieceToJson(p.piece);
        e["dx"] = p.dx.str();
        e["dy"] = p.dy.str();
        arr.push_back(e);
    }
    return arr;
}

inline std::vector<Placement> placementsFromJson(const json& arr) {
    std::vector<Placement> out;
    for (auto& e : arr) out.push_back({pieceFromJson(e), ratFromJson(e.at("dx")), ratFromJson(e.at("dy"))});
    return out;
}

// Packing snapshot: pieces with offsets and, for the box packer, the box tree.
inline json packingSnapshot(const StripPacker& pk) {
    json j;
    j["algorithm"] = pk.name();
    j["width"] = pk.occupiedWidth().str();
    j["placements"] = placementsToJson(pk.placements());
    if (auto* op = dynamic_cast<const OnlinePacker*>(&pk)) {
        json boxes = json::array();
        for (size_t b = 0; b < op->boxes().size(); ++b) {
            const OnlineBox& x = op->boxes()[b];
            HorizontalParallelogram g = op->boxGeometry(static_cast<long>(b));
            boxes.push_back({{"id", b},
                             {"parent", x.parent},
                             {"type", tritString(x.type)},
                             {"width_class", x.wclass},
                             {"height_class", x.hclass},
                             {"x", g.anchor.x.str()},
                             {"y", g.anchor.y.str()},
                             {"base", g.base.str()},
                             {"shear", g.shear.str()},
                             {"height", g.height.str()},
                             {"piece", x.piece}});
        }
        j["boxes"] = boxes;
    }
    return j;
}

// Minimal CSV field quoting.
inline std::string csvField(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

// Fixed-precision decimal for report columns; deterministic across runs.
inline std::string decimal(const Rat& r, int digits = 6) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << r.toDouble();
    return os.str();
}

}  // namespace fanpack

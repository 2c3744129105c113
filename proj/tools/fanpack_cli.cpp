// fanpack command line: duels, packing benchmarks, reductions, offline
// packers, sweeps and rendering.

#include "fanpack/fanpack.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace fanpack;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::string outDir;
    unsigned threads = 0;
    json cfg = json::object();
};

// Output directory: --out-dir, then the config file, then FANPACK_OUT_DIR,
// then the working directory.
fs::path outDir(const Globals& g) {
    std::string d = g.outDir;
    if (d.empty() && g.cfg.contains("out_dir")) d = g.cfg.at("out_dir").get<std::string>();
    if (d.empty())
        if (const char* e = std::getenv("FANPACK_OUT_DIR")) d = e;
    if (d.empty()) d = ".";
    fs::create_directories(d);
    return fs::path(d);
}

// Relative output names land in the output directory.
std::string outPath(const Globals& g, const std::string& name) {
    fs::path p(name);
    if (p.is_absolute() || p.has_parent_path()) return name;
    return (outDir(g) / p).string();
}

void applyConfigParams(const Globals& g, const std::string& section, ExperimentSpec& s) {
    auto merge = [&](const json& obj) {
        for (auto& [k, v] : obj.items()) s.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (g.cfg.contains("params")) merge(g.cfg.at("params"));
    if (g.cfg.contains(section) && g.cfg.at(section).is_object() && g.cfg.at(section).contains("params"))
        merge(g.cfg.at(section).at("params"));
}

void parseKv(const std::vector<std::string>& kvs, ExperimentSpec& s) {
    for (auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--param expects key=value, got '" + kv + "'");
        s.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
}

int finish(const TrialRecord& r, const json& summary) {
    std::cout << summary.dump(2) << "\n";
    if (!r.valid) std::cerr << "audit failed: " << r.message << "\n";
    return r.valid ? 0 : 1;
}

SvgScene sceneOf(const RunLog& log, const TrialRecord& r) {
    SvgScene sc{log.placements, log.boxes, log.frames, {}};
    sc.legend.push_back(r.spec.kind + " " + r.spec.algo + " " + r.spec.adversary + " n=" + std::to_string(r.spec.n));
    sc.legend.push_back("cost " + decimal(r.cost) + "  bound " + decimal(r.bound) + "  ratio " + decimal(r.ratio));
    return sc;
}

json sceneJson(const RunLog& log) {
    json j;
    j["placements"] = placementsToJson(log.placements);
    json boxes = json::array();
    for (auto& b : log.boxes)
        boxes.push_back({{"x", b.anchor.x.str()}, {"y", b.anchor.y.str()}, {"base", b.base.str()}, {"shear", b.shear.str()},
                         {"height", b.height.str()}});
    j["boxes"] = boxes;
    json frames = json::array();
    for (auto& f : log.frames)
        frames.push_back({{"x0", f.x0.str()}, {"y0", f.y0.str()}, {"x1", f.x1.str()}, {"y1", f.y1.str()}, {"label", f.label}});
    j["frames"] = frames;
    return j;
}

json cellsJson(const SortArray& a) {
    json cells = json::array();
    for (size_t i = 0; i < a.capacity(); ++i) cells.push_back(a.filled(i) ? json(a.at(i).str()) : json(nullptr));
    return cells;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online sorting and translational packing experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out-dir", g.outDir, "output directory (default: $FANPACK_OUT_DIR or .)");
    app.add_option("--threads", g.threads, "worker threads for sweeps (0 = all cores)");

    // sort-duel
    auto* duel = app.add_subcommand("sort-duel", "run a sorter against an adversary or stream");
    std::string dSorter = "balanced", dAdv = "unit", dStream, dSvg, dTag = "duel";
    size_t dN = 1000;
    uint64_t dSeed = 0;
    std::vector<std::string> dParams;
    duel->add_option("--sorter", dSorter, "balanced | boxsorter | reduce-greedy | reduce-onlinepacker | reduce-randomfit");
    duel->add_option("--adversary", dAdv, "unit | coarsen | stream family");
    duel->add_option("--input", dStream, "stream JSON file (overrides --adversary)")->check(CLI::ExistingFile);
    auto* dNOpt = duel->add_option("-n,--n", dN, "number of reals (default: 1000, or the length of --input)");
    duel->add_option("--seed", dSeed, "seed");
    duel->add_option("--param", dParams, "key=value (gamma, epsilon, k, s, delta, istar)");
    duel->add_option("--svg", dSvg, "render the final array");
    duel->add_option("--tag", dTag, "prefix for output files");

    // pack-bench
    auto* pack = app.add_subcommand("pack-bench", "online strip packing of a piece stream");
    std::string pAlgo = "onlinepacker", pStream = "alternating", pInput, pSvg, pTag = "pack";
    size_t pN = 1000;
    uint64_t pSeed = 0;
    pack->add_option("--algorithm", pAlgo, "greedy | onlinepacker | randomfit");
    pack->add_option("--stream", pStream, "piece family");
    pack->add_option("--input", pInput, "pieces JSON file (overrides --stream)")->check(CLI::ExistingFile);
    pack->add_option("-n,--n", pN, "number of pieces");
    pack->add_option("--seed", pSeed, "seed");
    pack->add_option("--svg", pSvg, "render the packing");
    pack->add_option("--tag", pTag, "prefix for output files");

    // reduce-run
    auto* red = app.add_subcommand("reduce-run", "sort through a strip packer");
    std::string rPacker = "onlinepacker", rAdv = "uniform", rStream, rSvg, rTag = "reduce";
    size_t rN = 500;
    uint64_t rSeed = 0;
    red->add_option("--packer", rPacker, "greedy | onlinepacker | randomfit");
    red->add_option("--adversary", rAdv, "unit | coarsen | stream family");
    red->add_option("--input", rStream, "stream JSON file (overrides --adversary)")->check(CLI::ExistingFile);
    auto* rNOpt = red->add_option("-n,--n", rN, "number of reals (default: 500, or the length of --input)");
    red->add_option("--seed", rSeed, "seed");
    red->add_option("--svg", rSvg, "render the packing");
    red->add_option("--tag", rTag, "prefix for output files");

    // offline
    auto* off = app.add_subcommand("offline", "offline packing of a piece set");
    std::string oProblem = "strip", oInput, oFamily = "random", oSvg, oTag = "offline";
    size_t oN = 100;
    uint64_t oSeed = 0;
    std::vector<std::string> oParams;
    off->add_option("--problem", oProblem, "strip | bins | square | perimeter");
    off->add_option("--input", oInput, "pieces JSON file")->check(CLI::ExistingFile);
    off->add_option("--family", oFamily, "random | triangles | squares | alternating (without --input)");
    off->add_option("-n,--n", oN, "number of generated pieces");
    off->add_option("--seed", oSeed, "seed");
    off->add_option("--param", oParams, "key=value (delta, alpha, c)");
    off->add_option("--svg", oSvg, "render the packing");
    off->add_option("--tag", oTag, "prefix for output files");

    // sweep
    auto* sw = app.add_subcommand("sweep", "run a list of experiments");
    std::string sSpec, sCsv = "sweep.csv", sFits = "fits.csv", sJson;
    sw->add_option("--spec", sSpec, "sweep JSON (default: the config's \"sweep\" entry)")->check(CLI::ExistingFile);
    sw->add_option("--csv", sCsv, "result table");
    sw->add_option("--fits", sFits, "log-log slope table");
    sw->add_option("--json", sJson, "per-trial records as JSON");

    // render
    auto* ren = app.add_subcommand("render", "render a saved packing or array to SVG");
    std::string vInput, vSvg = "render.svg";
    ren->add_option("--input", vInput, "snapshot or pieces JSON")->required()->check(CLI::ExistingFile);
    ren->add_option("--svg", vSvg, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // help and version requests are not failures
        return code == 0 ? 0 : 2;
    }

    try {
        if (!g.config.empty()) g.cfg = readJsonFile(g.config);
        if (g.threads == 0 && g.cfg.contains("threads")) g.threads = g.cfg.at("threads").get<unsigned>();

        if (*duel) {
            if (!dStream.empty() && dNOpt->count() == 0) dN = streamFromJson(readJsonFile(dStream)).size();
            ExperimentSpec s{"sort-duel", dSorter, dStream.empty() ? dAdv : "file:" + dStream, dN, dSeed, {}};
            applyConfigParams(g, "sort-duel", s);
            parseKv(dParams, s);
            RunLog log;
            TrialRecord r = runSortDuel(s, nullptr, &log);
            std::string tr = "step,issued_value,placed_cell,phase,marked_cells_total\n", pl = "step,value,cell\n";
            for (auto& st : log.duel) {
                tr += std::to_string(st.step) + "," + st.value.str() + "," + std::to_string(st.cell) + "," +
                      std::to_string(st.phase) + "," + std::to_string(st.marked) + "\n";
                pl += std::to_string(st.step) + "," + st.value.str() + "," + std::to_string(st.cell) + "\n";
            }
            writeTextFile(outPath(g, dTag + "_transcript.csv"), tr);
            writeTextFile(outPath(g, dTag + "_placements.csv"), pl);
            json sum = recordToJson(r);
            json full = sum;
            full["cells"] = cellsJson(*log.array);
            writeTextFile(outPath(g, dTag + "_summary.json"), full.dump(2) + "\n");
            if (!dSvg.empty())
                writeTextFile(outPath(g, dSvg), renderArraySvg(*log.array, s.algo + " vs " + s.adversary + ", cost " + decimal(r.cost)));
            return finish(r, sum);
        }

        if (*pack) {
            ExperimentSpec s{"pack-run", pAlgo, pInput.empty() ? pStream : "file:" + pInput, pN, pSeed, {}};
            applyConfigParams(g, "pack-bench", s);
            RunLog log;
            TrialRecord r = runPackBench(s, nullptr, &log);
            json snap = sceneJson(log);
            snap["algorithm"] = pAlgo;
            snap["summary"] = recordToJson(r);
            writeTextFile(outPath(g, pTag + "_snapshot.json"), snap.dump(1) + "\n");
            if (!pSvg.empty()) writeTextFile(outPath(g, pSvg), renderSvg(sceneOf(log, r)));
            return finish(r, recordToJson(r));
        }

        if (*red) {
            if (!rStream.empty() && rNOpt->count() == 0) rN = streamFromJson(readJsonFile(rStream)).size();
            ExperimentSpec s{"reduction-run", "reduce-" + rPacker, rStream.empty() ? rAdv : "file:" + rStream, rN, rSeed, {}};
            applyConfigParams(g, "reduce-run", s);
            RunLog log;
            TrialRecord r = runReduction(s, nullptr, &log);
            std::string csv = "i,s,x,cell\n";
            for (size_t i = 0; i < log.reduction.size(); ++i) {
                const ReductionStep& st = log.reduction[i];
                csv += std::to_string(i) + "," + st.s.str() + "," + st.x.str() + "," + std::to_string(st.cell) + "\n";
            }
            writeTextFile(outPath(g, rTag + "_steps.csv"), csv);
            json sum = {{"cost", decimal(r.cost)}, {"cost_exact", r.cost.str()}};
            for (auto& [k, v] : r.extra) {
                if (k == "width") sum["width"] = v;
                if (k == "gamma") sum["gamma"] = v;
                if (k == "holds") sum["holds"] = v == "true";
            }
            sum["valid"] = r.valid;
            if (!r.message.empty()) sum["message"] = r.message;
            writeTextFile(outPath(g, rTag + "_summary.json"), sum.dump(2) + "\n");
            if (!rSvg.empty()) writeTextFile(outPath(g, rSvg), renderSvg(sceneOf(log, r)));
            return finish(r, sum);
        }

        if (*off) {
            ExperimentSpec s{"offline-run", oProblem, oInput.empty() ? oFamily : "file:" + oInput, oN, oSeed, {}};
            applyConfigParams(g, "offline", s);
            parseKv(oParams, s);
            RunLog log;
            OfflineResult res;
            TrialRecord r = runOffline(s, nullptr, &log, &res);
            json sum = {{"problem", oProblem},
                        {"cost", decimal(res.cost)},
                        {"cost_exact", res.cost.str()},
                        {"lower_bound", res.lowerBound.str()},
                        {"ratio", decimal(res.ratio)},
                        {"layout_cost", decimal(res.layoutCost)},
                        {"containers", res.containers.containers.size()},
                        {"container_area", decimal(res.containers.totalArea)},
                        {"container_bound", decimal(res.containers.bound)},
                        {"valid", r.valid}};
            if (res.problem == Problem::Bins) sum["bins"] = res.bins;
            if (res.problem == Problem::Square) sum["fits"] = res.fits;
            if (!r.message.empty()) sum["message"] = r.message;
            json full = sum;
            full["scene"] = sceneJson(log);
            writeTextFile(outPath(g, oTag + "_result.json"), full.dump(1) + "\n");
            if (!oSvg.empty()) writeTextFile(outPath(g, oSvg), renderSvg(sceneOf(log, r)));
            return finish(r, sum);
        }

        if (*sw) {
            json spec;
            if (!sSpec.empty())
                spec = readJsonFile(sSpec);
            else if (g.cfg.contains("sweep"))
                spec = g.cfg;
            else
                throw InputError("sweep needs --spec or a \"sweep\" entry in the config");
            auto specs = specsFromJson(spec);
            for (auto& s : specs) applyConfigParams(g, "sweep", s);
            auto recs = sweep(specs, g.threads);
            writeTextFile(outPath(g, sCsv), sweepCsv(recs));
            writeTextFile(outPath(g, sFits), fitsCsv(recs));
            size_t bad = 0;
            json all = json::array();
            for (auto& r : recs) {
                if (!r.valid) {
                    ++bad;
                    std::cerr << "audit failed: " << r.spec.kind << " " << r.spec.algo << " " << r.spec.adversary
                              << " n=" << r.spec.n << " seed=" << r.spec.seed << ": " << r.message << "\n";
                }
                all.push_back(recordToJson(r));
            }
            if (!sJson.empty()) writeTextFile(outPath(g, sJson), all.dump(1) + "\n");
            std::cout << json({{"trials", recs.size()}, {"failed", bad}, {"csv", outPath(g, sCsv)}}).dump(2) << "\n";
            return bad ? 1 : 0;
        }

        if (*ren) {
            json j = readJsonFile(vInput);
            if (j.contains("scene")) j = j.at("scene");
            std::string svg;
            if (j.is_object() && j.contains("cells")) {
                SortArray a(0, j.at("cells").size());
                for (size_t i = 0; i < j.at("cells").size(); ++i)
                    if (!j.at("cells")[i].is_null()) a.place(i, ratFromJson(j.at("cells")[i]));
                svg = renderArraySvg(a, fs::path(vInput).filename().string());
            } else {
                SvgScene sc;
                if (j.is_object() && j.contains("placements")) {
                    sc.pieces = placementsFromJson(j.at("placements"));
                    for (auto& b : j.value("boxes", json::array()))
                        sc.boxes.push_back({{ratFromJson(b.at("x")), ratFromJson(b.at("y"))}, ratFromJson(b.at("base")),
                                            ratFromJson(b.at("shear")), ratFromJson(b.at("height"))});
                    for (auto& f : j.value("frames", json::array()))
                        sc.frames.push_back({ratFromJson(f.at("x0")), ratFromJson(f.at("y0")), ratFromJson(f.at("x1")),
                                             ratFromJson(f.at("y1")), f.value("label", "")});
                } else {
                    // bare piece set: lay the pieces side by side
                    Rat x;
                    for (auto& p : piecesFromJson(j)) {
                        sc.pieces.push_back({p, x - p.xmin(), -p.ymin()});
                        x += p.width() + Rat(1, 10);
                    }
                }
                auto v = validatePlacements(sc.pieces, std::nullopt);
                sc.legend.push_back(fs::path(vInput).filename().string() + ": " + std::to_string(sc.pieces.size()) +
                                    " pieces" + (v.ok ? "" : ", " + v.message));
                svg = renderSvg(sc);
            }
            writeTextFile(outPath(g, vSvg), svg);
            std::cout << outPath(g, vSvg) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

// Command-line front end: parse JSON documents, dispatch the calculus
// operations, run the verification suites, emit canonical reports.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sgeom/json_io.hpp"
#include "sgeom/verify.hpp"

using namespace sgeom;

namespace {

Json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open input file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw parse_error(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return j;
}

void emit(const Json& j, const std::string& out_path) {
    std::string text = jio::dump_canonical(j);
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw parse_error("cannot open output file: " + out_path);
    out << text;
}

struct Options {
    std::uint64_t seed = 7;
    int max_q = 3;
    int max_n = 4;
    int grid = 2;
    int level = 0;
    std::string out;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact skeleton calculus for functor-of-points supergeometry"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--seed", opt.seed, "seed for the randomized suites")->envname("SGEOM_SEED");
    app.add_option("--max-q", opt.max_q, "odd dimension cap for random cases")
        ->envname("SGEOM_MAX_Q");
    app.add_option("--max-n", opt.max_n, "Grassmann level cap")->envname("SGEOM_MAX_N");
    app.add_option("--grid", opt.grid, "sample grid size")->envname("SGEOM_GRID");
    app.add_option("--level", opt.level, "truncation or extraction level")
        ->envname("SGEOM_LEVEL");
    app.add_option("--out", opt.out, "output file (default stdout)")->envname("SGEOM_OUT");

    std::string f_path, g_path, point_path, atlas_path, hint_path, element_path, manifold_path,
        morphism_path, method = "partition";
    int k_order = 1;

    auto* c_eval = app.add_subcommand("eval", "evaluate a skeleton at a super point");
    c_eval->add_option("--skeleton", f_path)->required();
    c_eval->add_option("--point", point_path)->required();
    c_eval->add_option("--method", method)->check(CLI::IsMember({"partition", "taylor", "both"}));

    auto* c_compose = app.add_subcommand("compose", "compose two skeletons g after f");
    c_compose->add_option("--g", g_path)->required();
    c_compose->add_option("--f", f_path)->required();

    auto* c_invert = app.add_subcommand("invert", "invert a skeleton");
    c_invert->add_option("--f", f_path)->required();
    c_invert->add_option("--g0", hint_path, "rational inverse of the base component");

    auto* c_diff = app.add_subcommand("diff", "differential of a skeleton");
    c_diff->add_option("--f", f_path)->required();

    auto* c_parity = app.add_subcommand("parity", "parity change of a fiberwise-linear family");
    c_parity->add_option("--f", f_path)->required();

    auto* c_tangent = app.add_subcommand("tangent", "tangent atlas with bundle certificate");
    c_tangent->add_option("--atlas", atlas_path)->required();

    auto* c_ccompose = app.add_subcommand("cube-compose", "compose two cube morphisms g after f");
    c_ccompose->add_option("--g", g_path)->required();
    c_ccompose->add_option("--f", f_path)->required();

    auto* c_cinvert = app.add_subcommand("cube-invert", "invert a cube morphism");
    c_cinvert->add_option("--f", f_path)->required();

    auto* c_extract = app.add_subcommand("bundle-extract", "extract the level bundle of an atlas");
    c_extract->add_option("--atlas", atlas_path)->required();

    auto* c_trunc = app.add_subcommand("truncate", "truncate an atlas to a level");
    c_trunc->add_option("--atlas", atlas_path)->required();

    auto* c_cocycle = app.add_subcommand("cocycle-check", "verify atlas or morphism identities");
    c_cocycle->add_option("--atlas", atlas_path);
    c_cocycle->add_option("--morphism", morphism_path);

    auto* c_limit = app.add_subcommand("limit-check", "verify coherence of a limit element");
    c_limit->add_option("--element", element_path)->required();

    auto* c_even = app.add_subcommand("even-model", "compare the purely even model routes");
    c_even->add_option("--manifold", manifold_path)->required();
    c_even->add_option("--k", k_order, "tangent order");

    auto* c_verify = app.add_subcommand("verify", "run the full oracle suite");

    // global options may follow the subcommand name
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_eval->parsed()) {
            Skeleton f = jio::decode_skeleton(load(f_path));
            SuperPoint v = jio::decode_point(load(point_path));
            Json j;
            if (method == "partition" || method == "both")
                j["partition"] = jio::encode(eval_partition(f, v));
            if (method == "taylor" || method == "both")
                j["taylor"] = jio::encode(eval_taylor(f, v));
            if (method == "both") j["agree"] = eval_partition(f, v) == eval_taylor(f, v);
            emit(j, opt.out);
        } else if (c_compose->parsed()) {
            Skeleton g = jio::decode_skeleton(load(g_path));
            Skeleton f = jio::decode_skeleton(load(f_path));
            emit(jio::encode(compose(g, f, opt.grid)), opt.out);
        } else if (c_invert->parsed()) {
            Skeleton f = jio::decode_skeleton(load(f_path));
            std::optional<RationalMap> hint;
            if (!hint_path.empty()) hint = jio::decode_rational_map(load(hint_path));
            emit(jio::encode(invert(f, hint)), opt.out);
        } else if (c_diff->parsed()) {
            emit(jio::encode(differential(jio::decode_skeleton(load(f_path)))), opt.out);
        } else if (c_parity->parsed()) {
            emit(jio::encode(parity_change(jio::decode_skeleton(load(f_path)))), opt.out);
        } else if (c_tangent->parsed()) {
            SuperAtlas a = jio::decode_atlas(load(atlas_path));
            SuperAtlas t = tangent_atlas(a);
            Json j;
            j["atlas"] = jio::encode(t);
            auto rep = svbundle_validate(t);
            j["svbundle"] = jio::encode_report(rep);
            emit(j, opt.out);
            if (!rep.pass) return 1;
        } else if (c_ccompose->parsed()) {
            CubeMorphism g = jio::decode_cube_morphism(load(g_path));
            CubeMorphism f = jio::decode_cube_morphism(load(f_path));
            emit(jio::encode(cube_compose(g, f)), opt.out);
        } else if (c_cinvert->parsed()) {
            CubeMorphism f = jio::decode_cube_morphism(load(f_path));
            auto res = cube_invert(f);
            Json j;
            j["invertible"] = res.invertible;
            if (res.inverse) j["inverse"] = jio::encode(*res.inverse);
            emit(j, opt.out);
        } else if (c_extract->parsed()) {
            SuperAtlas a = jio::decode_atlas(load(atlas_path));
            emit(jio::encode(extract_bundle(a, opt.level)), opt.out);
        } else if (c_trunc->parsed()) {
            SuperAtlas a = jio::decode_atlas(load(atlas_path));
            emit(jio::encode(truncate(a, opt.level)), opt.out);
        } else if (c_cocycle->parsed()) {
            if (atlas_path.empty() == morphism_path.empty())
                throw parse_error("cocycle-check needs exactly one of --atlas or --morphism");
            AtlasReport rep;
            if (!atlas_path.empty())
                rep = cocycle_check(jio::decode_atlas(load(atlas_path)), opt.grid);
            else
                rep = cocycle_check(jio::decode_morphism(load(morphism_path)));
            emit(jio::encode_report(rep), opt.out);
            if (!rep.pass) return 1;
        } else if (c_limit->parsed()) {
            auto e = jio::decode_limit_element(load(element_path));
            bool ok = limit_check(e);
            Json j;
            j["status"] = ok ? "pass" : "fail";
            j["witness"] = Json::array();
            if (!ok) j["witness"].push_back("levels fail the projection coherence");
            emit(j, opt.out);
            if (!ok) return 1;
        } else if (c_even->parsed()) {
            ManifoldData m = jio::decode_manifold(load(manifold_path));
            auto rep = even_model_iso(m, k_order, opt.level);
            Json j;
            j["status"] = rep.pass ? "pass" : "fail";
            j["witness"] = rep.witnesses;
            emit(j, opt.out);
            if (!rep.pass) return 1;
        } else if (c_verify->parsed()) {
            VerifyOptions vo;
            vo.seed = opt.seed;
            vo.max_q = opt.max_q;
            vo.max_n = opt.max_n;
            vo.grid = opt.grid;
            auto results = run_all_suites(vo);
            Json suites = Json::array();
            bool all = true;
            for (const auto& s : results) {
                Json sj;
                sj["name"] = s.name;
                sj["status"] = s.pass ? "pass" : "fail";
                sj["cases"] = s.cases;
                if (!s.detail.empty()) sj["detail"] = s.detail;
                suites.push_back(std::move(sj));
                all = all && s.pass;
            }
            Json j;
            j["status"] = all ? "pass" : "fail";
            j["suites"] = std::move(suites);
            emit(j, opt.out);
            if (!all) return 1;
        }
    } catch (const parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const pole_error& e) {
        std::cerr << "pole error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const dimension_error& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

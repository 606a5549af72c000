#include "geomcoder/cli/app.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "geomcoder/core/error.hpp"
#include "geomcoder/fit/fitting.hpp"
#include "geomcoder/geom/json.hpp"
#include "geomcoder/plan/synthesis.hpp"
#include "geomcoder/render/svg.hpp"
#include "geomcoder/scene/io.hpp"
#include "geomcoder/sim/sim.hpp"

namespace geomcoder::cli {

namespace {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    return (c == "parse-error" || c == "schema-error" || c == "dimension-mismatch") ? 2 : 1;
}

std::string default_cache_path() {
    if (const char* env = std::getenv("GEOMCODER_CACHE")) return env;
    return "skills.json";
}

void write_text(const std::string& path, const std::string& text) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

json fit_result_to_json(const fit::FitResult& r) {
    return json{{"primitive", primitive_to_json(r.primitive)},
                {"rmse", r.rmse},
                {"inlier_fraction", r.inlier_fraction}};
}

plan::Subtask subtask_from_json(const json& j) {
    plan::Subtask st;
    const std::string verb = require_field(j, "verb", "subtask").get<std::string>();
    const auto v = plan::verb_from_name(verb);
    if (!v) throw SchemaError("subtask.verb: unknown verb '" + verb + "'");
    st.verb = *v;
    for (const auto& t : require_field(j, "targets", "subtask"))
        st.target_ids.push_back(t.get<std::string>());
    if (j.contains("params")) st.params = j.at("params");
    return st;
}

// --- fit ------------------------------------------------------------------

struct FitArgs {
    std::string cloud_path;
    std::string kind;
    std::string labels_path;
    int label = -1;
    bool ransac = false;
    int iterations = 512;
    double threshold = 0.005;
    double min_inlier_fraction = 0.3;
    std::uint64_t seed = 0;
    std::string inliers_path;
    std::string out_path;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const auto kind = fit::primitive_kind_from_name(a.kind);
    if (!kind) throw ParseError("unknown primitive kind '" + a.kind + "'");

    fit::PointCloud cloud = scene::read_ply(a.cloud_path);
    if (!a.labels_path.empty()) {
        if (a.label < 0) throw ParseError("--labels requires --label");
        const json sidecar = load_json_file(a.labels_path);
        fit::PointCloud cropped;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const std::string key = std::to_string(i);
            if (sidecar.contains(key) && sidecar.at(key).get<int>() == a.label)
                cropped.points.push_back(cloud.points[i]);
        }
        cloud = std::move(cropped);
        if (cloud.empty()) throw LabelNotFound("no points with label " + std::to_string(a.label));
    }

    fit::FitResult result;
    std::vector<std::uint8_t> mask;
    if (a.ransac) {
        fit::RansacConfig cfg;
        cfg.max_iterations = a.iterations;
        cfg.inlier_threshold = a.threshold;
        cfg.min_inlier_fraction = a.min_inlier_fraction;
        cfg.seed = a.seed;
        fit::RobustFitResult robust = fit::robust_fit(cloud, *kind, cfg);
        result = robust.fit;
        mask = std::move(robust.inlier_mask);
    } else {
        result = fit::fit_kind(*kind, cloud);
    }

    const std::string text = canonical_dump(fit_result_to_json(result));
    out << text;
    if (!a.out_path.empty()) write_text(a.out_path, text);
    if (!a.inliers_path.empty()) {
        if (!a.ransac) throw ParseError("--inliers requires --ransac");
        write_text(a.inliers_path, canonical_dump(json(mask)));
    }
    return 0;
}

// --- scene ------------------------------------------------------------------

struct SceneArgs {
    std::string depth_path;
    std::string mask_path;
    std::string out_dir = ".";
    double birdseye = 0.1;
    double z_lo = 0.02;
    double z_hi = 1.8;
    bool svg = false;
};

int cmd_scene(const SceneArgs& a, std::ostream& out) {
    if (!(a.birdseye > 0.0)) throw ParseError("--birdseye cell size must be > 0");
    const scene::DepthFrame frame = scene::read_depth(a.depth_path);
    const scene::SemanticMask mask = scene::read_pgm16(a.mask_path);
    const scene::LabeledPointCloud cloud = scene::project_mask(mask, frame);

    fs::create_directories(a.out_dir);
    const std::string ply_path = (fs::path(a.out_dir) / "cloud.ply").string();
    scene::write_labeled_ply(ply_path, cloud);

    const scene::BirdsEyeMap map = scene::build_birdseye(cloud, a.birdseye, a.z_lo, a.z_hi);
    const std::string map_path = (fs::path(a.out_dir) / "map.json").string();
    save_json_file(map_path, scene::birdseye_to_json(map));
    if (a.svg)
        write_text((fs::path(a.out_dir) / "map.svg").string(), render::map_svg(map));

    out << canonical_dump(json{{"points", cloud.size()},
                               {"cloud", ply_path},
                               {"map", map_path},
                               {"map_cells", static_cast<int>(map.cell_label.size())}});
    return 0;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string subtask_path;
    std::string objects_path;
    std::string constraints_path;
    std::string cache_path;
    std::string out_dir = ".";
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    const plan::Subtask subtask = subtask_from_json(load_json_file(a.subtask_path));
    std::vector<ParamObject> objects;
    for (const auto& o : load_json_file(a.objects_path)) objects.push_back(param_object_from_json(o));
    const traj::ConstraintSet constraints =
        plan::constraints_from_json(load_json_file(a.constraints_path));

    plan::SkillCache cache = plan::SkillCache::load_file(a.cache_path);
    plan::TemplateSynthesizer provider;
    const plan::SynthesisResult result = plan::synthesize_subtask(
        subtask, objects, constraints, constraints.robot, cache, provider);
    cache.save_file(a.cache_path);

    fs::create_directories(a.out_dir);
    write_text((fs::path(a.out_dir) / "spec.json").string(),
               canonical_dump(traj::spec_to_json(result.spec)));
    const std::vector<traj::Waypoint> wps = traj::sample_waypoints(result.spec, constraints);
    write_text((fs::path(a.out_dir) / "waypoints.csv").string(), traj::waypoints_to_csv(wps));
    write_text((fs::path(a.out_dir) / "trajectory.svg").string(),
               render::curve_svg(result.spec.curve, constraints.obstacles));

    out << "provenance: "
        << (result.provenance == plan::Provenance::cached ? "cached" : "generated") << "\n";
    return 0;
}

// --- run --------------------------------------------------------------------

struct RunArgs {
    std::string scene_path;
    std::string plan_path;
    std::string profile_path;
    std::string cache_path;
    std::string trace_dir;
    std::string out_dir = ".";
    double margin = 0.015;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
    sim::SceneWorld world = sim::world_from_json(load_json_file(a.scene_path));
    const plan::Plan the_plan = plan::plan_from_json(load_json_file(a.plan_path));
    RobotProfile profile;
    if (!a.profile_path.empty())
        profile = robot_profile_from_json(load_json_file(a.profile_path));

    plan::SkillCache cache = plan::SkillCache::load_file(a.cache_path);
    plan::TemplateSynthesizer provider;
    sim::PipelineOptions options;
    options.clearance_margin = a.margin;

    sim::PipelineResult result;
    try {
        result = sim::run_pipeline(world, the_plan, profile, cache, provider, options);
    } catch (const Error& e) {
        // synthesis failures still produce a results document
        json doc{{"long_term_success", false}, {"error", e.what()}, {"results", json::array()}};
        const std::string text = canonical_dump(doc);
        out << text;
        fs::create_directories(a.out_dir);
        write_text((fs::path(a.out_dir) / "results.json").string(), text);
        cache.save_file(a.cache_path);
        return exit_code_for(e);
    }
    cache.save_file(a.cache_path);

    if (!result.issues.empty()) {
        json issues = json::array();
        for (const plan::PlanIssue& issue : result.issues)
            issues.push_back(json{{"code", issue.code},
                                  {"subtask_index", issue.subtask_index},
                                  {"message", issue.message}});
        out << canonical_dump(json{{"plan_issues", issues}});
        return 2;
    }

    json results = json::array();
    for (const sim::SubtaskResult& r : result.execution.results)
        results.push_back(sim::subtask_result_to_json(r));
    json provenance = json::object();
    for (const auto& [idx, p] : result.provenance)
        provenance[std::to_string(idx)] = p == plan::Provenance::cached ? "cached" : "generated";
    const json doc{{"long_term_success", result.execution.long_term_success},
                   {"results", results},
                   {"provenance", provenance}};
    const std::string text = canonical_dump(doc);
    out << text;
    fs::create_directories(a.out_dir);
    write_text((fs::path(a.out_dir) / "results.json").string(), text);

    if (!a.trace_dir.empty()) {
        fs::create_directories(a.trace_dir);
        write_text((fs::path(a.trace_dir) / "trace.jsonl").string(),
                   sim::trace_to_jsonl(result.execution.trace));
        for (std::size_t i = 0; i < result.execution.trace.world_snapshots.size(); ++i) {
            const sim::SceneWorld snapshot =
                sim::world_from_json(result.execution.trace.world_snapshots[i]);
            write_text((fs::path(a.trace_dir) / ("world-" + std::to_string(i) + ".svg")).string(),
                       render::scene_svg(snapshot, {}));
        }
    }
    return result.execution.long_term_success ? 0 : 1;
}

// --- cache ------------------------------------------------------------------

struct CacheArgs {
    std::string action;
    std::string cache_path;
    std::string out_path;
};

int cmd_cache(const CacheArgs& a, std::ostream& out) {
    if (a.action == "stats") {
        if (!fs::exists(a.cache_path)) throw ParseError("cache file not found: " + a.cache_path);
        const plan::SkillCache cache = plan::SkillCache::load_file(a.cache_path);
        out << canonical_dump(json{{"records", cache.size()},
                                   {"hits", cache.hits()},
                                   {"misses", cache.misses()}});
        return 0;
    }
    if (a.action == "clear") {
        plan::SkillCache().save_file(a.cache_path);
        return 0;
    }
    if (a.action == "export") {
        if (!fs::exists(a.cache_path)) throw ParseError("cache file not found: " + a.cache_path);
        if (a.out_path.empty()) throw ParseError("cache export requires --out");
        const plan::SkillCache cache = plan::SkillCache::load_file(a.cache_path);
        write_text(a.out_path, canonical_dump(cache.to_json()));
        return 0;
    }
    throw ParseError("unknown cache action '" + a.action + "' (stats|clear|export)");
}

// --- render -----------------------------------------------------------------

struct RenderArgs {
    std::string scene_path;
    std::string map_path;
    std::string spec_path;
    std::string out_path = "render.svg";
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
    std::string svg;
    if (!a.scene_path.empty()) {
        const sim::SceneWorld world = sim::world_from_json(load_json_file(a.scene_path));
        std::vector<traj::Curve> curves;
        if (!a.spec_path.empty())
            curves.push_back(traj::spec_from_json(load_json_file(a.spec_path)).curve);
        svg = render::scene_svg(world, curves);
    } else if (!a.map_path.empty()) {
        svg = render::map_svg(scene::birdseye_from_json(load_json_file(a.map_path)));
    } else if (!a.spec_path.empty()) {
        svg = render::curve_svg(traj::spec_from_json(load_json_file(a.spec_path)).curve, {});
    } else {
        throw ParseError("render needs --scene, --map, or --spec");
    }
    write_text(a.out_path, svg);
    out << a.out_path << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"geometric parameterization and trajectory synthesis pipeline"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a primitive to a point cloud");
    fit_cmd->add_option("cloud", fit_args.cloud_path, "ASCII PLY point cloud")->required();
    fit_cmd->add_option("--kind", fit_args.kind, "sphere|cylinder|cuboid|plane|envelope")
        ->required();
    fit_cmd->add_option("--labels", fit_args.labels_path, "JSON label sidecar");
    fit_cmd->add_option("--label", fit_args.label, "label to crop before fitting");
    fit_cmd->add_flag("--ransac", fit_args.ransac, "robust RANSAC fit");
    fit_cmd->add_option("--iterations", fit_args.iterations, "RANSAC iterations");
    fit_cmd->add_option("--threshold,--tolerance", fit_args.threshold, "inlier threshold (m)");
    fit_cmd->add_option("--min-inlier-fraction", fit_args.min_inlier_fraction,
                        "consensus floor");
    fit_cmd->add_option("--seed", fit_args.seed, "RANSAC seed");
    fit_cmd->add_option("--inliers", fit_args.inliers_path, "write inlier mask JSON here");
    fit_cmd->add_option("--out", fit_args.out_path, "also write the result JSON here");

    SceneArgs scene_args;
    CLI::App* scene_cmd = app.add_subcommand("scene", "build labeled cloud and bird's-eye map");
    scene_cmd->add_option("--depth", scene_args.depth_path, "depth header JSON")->required();
    scene_cmd->add_option("--mask", scene_args.mask_path, "16-bit PGM semantic mask")->required();
    scene_cmd->add_option("--out", scene_args.out_dir, "output directory");
    scene_cmd->add_option("--birdseye", scene_args.birdseye, "map cell size (m)");
    scene_cmd->add_option("--z-lo", scene_args.z_lo, "band lower bound (m)");
    scene_cmd->add_option("--z-hi", scene_args.z_hi, "band upper bound (m)");
    scene_cmd->add_flag("--svg", scene_args.svg, "also render the map");

    SynthArgs synth_args;
    synth_args.cache_path = default_cache_path();
    CLI::App* synth_cmd = app.add_subcommand("synth", "synthesize a subtask trajectory");
    synth_cmd->add_option("--subtask", synth_args.subtask_path, "subtask JSON")->required();
    synth_cmd->add_option("--objects", synth_args.objects_path, "objects JSON")->required();
    synth_cmd->add_option("--constraints", synth_args.constraints_path, "constraints JSON")
        ->required();
    synth_cmd->add_option("--cache", synth_args.cache_path, "skill cache path");
    synth_cmd->add_option("--out", synth_args.out_dir, "output directory");

    RunArgs run_args;
    run_args.cache_path = default_cache_path();
    CLI::App* run_cmd = app.add_subcommand("run", "validate, synthesize, and execute a plan");
    run_cmd->add_option("--scene", run_args.scene_path, "scene JSON")->required();
    run_cmd->add_option("--plan", run_args.plan_path, "plan JSON")->required();
    run_cmd->add_option("--profile", run_args.profile_path, "robot profile JSON");
    run_cmd->add_option("--cache", run_args.cache_path, "skill cache path");
    run_cmd->add_option("--trace", run_args.trace_dir, "write execution trace here");
    run_cmd->add_option("--out", run_args.out_dir, "output directory");
    run_cmd->add_option("--margin,--tolerance", run_args.margin, "clearance margin (m)");

    CacheArgs cache_args;
    cache_args.cache_path = default_cache_path();
    CLI::App* cache_cmd = app.add_subcommand("cache", "skill cache maintenance");
    cache_cmd->add_option("action", cache_args.action, "stats|clear|export")->required();
    cache_cmd->add_option("--cache", cache_args.cache_path, "skill cache path");
    cache_cmd->add_option("--out", cache_args.out_path, "export destination");

    RenderArgs render_args;
    CLI::App* render_cmd = app.add_subcommand("render", "render scenes, maps, or trajectories");
    render_cmd->add_option("--scene", render_args.scene_path, "scene JSON");
    render_cmd->add_option("--map", render_args.map_path, "map JSON");
    render_cmd->add_option("--spec", render_args.spec_path, "trajectory spec JSON");
    render_cmd->add_option("--out", render_args.out_path, "output SVG path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_args, out);
        if (*scene_cmd) return cmd_scene(scene_args, out);
        if (*synth_cmd) return cmd_synth(synth_args, out);
        if (*run_cmd) return cmd_run(run_args, out);
        if (*cache_cmd) return cmd_cache(cache_args, out);
        if (*render_cmd) return cmd_render(render_args, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace geomcoder::cli

// Command-line front end: plan, infer, run, sweep.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dabsp/episode.hpp"
#include "dabsp/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void writeFile(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

json breakdownJson(const dabsp::CostBreakdown& b) {
    return {{"c_u", b.control}, {"c_G", b.goal}, {"c_sigma", b.sigma}, {"c_w", b.ambiguity},
            {"total", b.total}};
}

json planJson(const dabsp::PlanReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"action", e.action.id},
                           {"J", e.objective},
                           {"J_unnormalized", e.objectiveUnnormalized},
                           {"stderr", e.stdError},
                           {"cost", breakdownJson(e.meanBreakdown)},
                           {"modes_mean", e.meanModesPostPrune},
                           {"modes_total_pre_prune", e.totalModesPrePrune}});
    }
    return {{"chosen", report.chosen().action.id},
            {"tie_break", report.tieBreakNote},
            {"entries", entries}};
}

std::string planCsv(const dabsp::PlanReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "action,J,c_u,c_G,c_sigma,c_w,modes_mean,stderr,chosen\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        out << e.action.id << ',' << e.objective << ',' << e.meanBreakdown.control << ','
            << e.meanBreakdown.goal << ',' << e.meanBreakdown.sigma << ','
            << e.meanBreakdown.ambiguity << ',' << e.meanModesPostPrune << ',' << e.stdError << ','
            << (static_cast<int>(i) == report.chosenIndex ? 1 : 0) << '\n';
    }
    return out.str();
}

struct CommonOptions {
    std::string configPath;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<std::string> outDir;
};

void addCommon(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-c,--config", opts.configPath, "scenario config (JSON)")->required();
    cmd->add_option("--seed", opts.seed, "override the scenario seed");
    cmd->add_option("--samples", opts.samples, "override the planning sample count");
    cmd->add_option("-o,--out", opts.outDir, "override the output directory");
}

dabsp::ScenarioConfig loadConfig(const CommonOptions& opts) {
    dabsp::ScenarioConfig cfg = dabsp::loadScenarioFile(opts.configPath, opts.seed, opts.samples);
    if (opts.outDir) cfg.outputDir = *opts.outDir;
    return cfg;
}

int cmdPlan(const CommonOptions& opts) {
    const dabsp::ScenarioConfig cfg = loadConfig(opts);
    const dabsp::RandomStream rng(cfg.seed);
    const dabsp::PlanReport report =
        dabsp::selectAction(cfg.prior(), cfg.actions, cfg.world, cfg.cost, cfg.samples,
                            rng.fork("plan"), cfg.pruneThreshold, cfg.quad);
    const fs::path dir(cfg.outputDir);
    writeFile(dir / "plan.json", planJson(report).dump(2) + "\n");
    writeFile(dir / "plan.csv", planCsv(report));
    std::cout << "chosen action: " << report.chosen().action.id
              << " (J=" << report.chosen().objective << ")\n";
    return 0;
}

int cmdInfer(const CommonOptions& opts, const std::string& obsPath) {
    const dabsp::ScenarioConfig cfg = loadConfig(opts);

    std::ifstream in(obsPath);
    if (!in) throw dabsp::ConfigError("$", "cannot open observation file '" + obsPath + "'");
    json obsDoc;
    try {
        in >> obsDoc;
    } catch (const json::exception& e) {
        throw dabsp::ConfigError("$", std::string("invalid observation JSON: ") + e.what());
    }

    dabsp::GmmBelief belief = cfg.prior();
    if (obsDoc.contains("action") && !obsDoc.at("action").is_null()) {
        const std::string actionId = obsDoc.at("action").get<std::string>();
        const dabsp::Action* found = nullptr;
        for (const auto& a : cfg.actions) {
            if (a.id == actionId) found = &a;
        }
        if (!found) throw dabsp::ConfigError("$.action", "unknown action id '" + actionId + "'");
        belief = dabsp::propagate(belief, cfg.world.motion(), *found);
    }
    dabsp::Observation z;
    if (obsDoc.contains("z") && !obsDoc.at("z").is_null()) {
        const auto values = obsDoc.at("z").get<std::vector<double>>();
        z = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
        if (z->size() != cfg.world.dim()) {
            throw dabsp::ConfigError("$.z", "observation dimension does not match world");
        }
    }

    const dabsp::PosteriorDetail detail =
        dabsp::posteriorUpdateDetailed(belief, z, cfg.world, cfg.pruneThreshold, cfg.quad);

    json components = json::array();
    for (const auto& c : detail.belief.components()) {
        json mean = json::array();
        for (Eigen::Index i = 0; i < c.component.mean().size(); ++i) {
            mean.push_back(c.component.mean()[i]);
        }
        components.push_back(
            {{"weight", c.weight},
             {"mean", mean},
             {"scene", c.lineage.empty() ? json() : json(c.lineage.back().sceneId)}});
    }
    json termA = json::array();
    for (const auto& [id, w] : detail.likelihoodWeights.entries) {
        termA.push_back({{"scene", id}, {"w", w}});
    }
    const json out = {{"null_observation", detail.nullObservation},
                      {"term_a", termA},
                      {"modes_pre_prune", detail.prePruneCount},
                      {"modes_post_prune", detail.postPruneCount},
                      {"supported_scenes", detail.supportedScenes},
                      {"posterior", components}};
    writeFile(fs::path(cfg.outputDir) / "posterior.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmdRun(const CommonOptions& opts) {
    const dabsp::ScenarioConfig cfg = loadConfig(opts);
    const dabsp::EpisodeLog log = dabsp::runEpisode(cfg);
    const fs::path dir(cfg.outputDir);
    writeFile(dir / "episode.jsonl", dabsp::serializeJsonl(log));
    writeFile(dir / "results.csv", dabsp::episodeCsv(log));
    writeFile(dir / "summary.json", dabsp::episodeSummary(log).dump(2) + "\n");
    std::cout << "episode: " << log.steps.size() << " step(s), "
              << (log.disambiguated ? "disambiguated" : "still ambiguous") << ", outputs in "
              << dir.string() << "\n";
    return 0;
}

int cmdSweep(const CommonOptions& opts) {
    const dabsp::ScenarioConfig cfg = loadConfig(opts);
    const std::vector<dabsp::SweepCell> cells = dabsp::runSweep(cfg);
    const fs::path dir(cfg.outputDir);
    writeFile(dir / "sweep.csv", dabsp::sweepCsv(cells));
    std::cout << "sweep: " << cells.size() << " cell(s), outputs in " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"belief-space planner under ambiguous data association"};
    app.require_subcommand(1);

    CommonOptions planOpts, inferOpts, runOpts, sweepOpts;
    std::string obsPath;

    CLI::App* plan = app.add_subcommand("plan", "evaluate candidate actions and pick one");
    addCommon(plan, planOpts);
    CLI::App* infer = app.add_subcommand("infer", "single measurement update of the prior");
    addCommon(infer, inferOpts);
    infer->add_option("--obs", obsPath, "observation file (JSON: {\"action\": ..., \"z\": [...]})")
        ->required();
    CLI::App* run = app.add_subcommand("run", "closed-loop plan-act-infer episode");
    addCommon(run, runOpts);
    CLI::App* sweep = app.add_subcommand("sweep", "alias-set x action grid on the abstract world");
    addCommon(sweep, sweepOpts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (plan->parsed()) return cmdPlan(planOpts);
        if (infer->parsed()) return cmdInfer(inferOpts, obsPath);
        if (run->parsed()) return cmdRun(runOpts);
        if (sweep->parsed()) return cmdSweep(sweepOpts);
    } catch (const dabsp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const dabsp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

#include <CLI11.hpp>
#include <iostream>

#include "cfmimo/config_io.hpp"
#include "cfmimo/experiment.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string methods;
    std::string thresholds;
    std::uint64_t seed = 0;
    int deployments = 0;
    int iters = 0;
    int threads = 0;
    bool seed_set = false, out_set = false;
};

void attach_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
    auto* copt = cmd->add_option("--config", o.config_path, "flat key = value config file");
    if (config_required) copt->required();
    cmd->add_option("--seed", o.seed, "master seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--out", o.out_dir, "output directory")->each([&](const std::string&) {
        o.out_set = true;
    });
    cmd->add_option("--methods", o.methods, "comma-separated method list");
    cmd->add_option("--deployments", o.deployments, "number of deployments");
    cmd->add_option("--iters", o.iters, "Monte-Carlo iterations per deployment");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_option("--thresholds", o.thresholds, "comma-separated thresholds in dB");
}

cfmimo::ExperimentSpec load_spec(const CommonOpts& o) {
    std::map<std::string, std::string> kv;
    if (!o.config_path.empty()) kv = cfmimo::parse_kv_file(o.config_path);
    cfmimo::apply_env_overrides(kv);
    if (!o.methods.empty()) kv["methods"] = o.methods;
    if (!o.thresholds.empty()) kv["thresholds_db"] = o.thresholds;
    cfmimo::ExperimentSpec spec = cfmimo::spec_from_kv(kv);
    if (o.seed_set) spec.master_seed = o.seed;
    if (o.out_set) spec.output_dir = o.out_dir;
    if (o.deployments > 0) spec.mc_deployments = o.deployments;
    if (o.iters > 0) spec.mc_iters = o.iters;
    if (o.threads > 0) spec.n_threads = o.threads;
    return spec;
}

int run_with_methods(const CommonOpts& o, std::set<cfmimo::Method> forced,
                     bool keep_configured) {
    cfmimo::ExperimentSpec spec = load_spec(o);
    if (!keep_configured || spec.methods.empty()) {
        if (!forced.empty()) spec.methods = std::move(forced);
    } else if (!forced.empty()) {
        for (auto m : forced) spec.methods.insert(m);
    }
    return cfmimo::run_experiment(spec, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cell-free massive MIMO uplink outage/rate engine"};
    app.require_subcommand(1);

    CommonOpts sim_o, ana_o, cmp_o, swp_o;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo simulation only");
    attach_common(sim, sim_o, true);
    auto* ana = app.add_subcommand("analytic", "analytic approximations only");
    attach_common(ana, ana_o, true);
    auto* cmp = app.add_subcommand("compare", "simulation vs analytics with deviation report");
    attach_common(cmp, cmp_o, true);
    auto* swp = app.add_subcommand("sweep", "sweep over the configured axis");
    attach_common(swp, swp_o, true);

    auto* ver = app.add_subcommand("verify", "cross-method consistency battery");
    std::string level = "fast";
    int ver_threads = 1;
    ver->add_option("--level", level, "fast | full")
        ->check(CLI::IsMember({"fast", "full"}));
    ver->add_option("--threads", ver_threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            cfmimo::ExperimentSpec spec = load_spec(sim_o);
            spec.methods = {cfmimo::Method::mc};
            return cfmimo::run_experiment(spec, std::cout);
        }
        if (ana->parsed()) {
            cfmimo::ExperimentSpec spec = load_spec(ana_o);
            spec.methods.erase(cfmimo::Method::mc);
            if (spec.methods.empty())
                throw std::invalid_argument("analytic: no analytic methods configured");
            return cfmimo::run_experiment(spec, std::cout);
        }
        if (cmp->parsed()) {
            cfmimo::ExperimentSpec spec = load_spec(cmp_o);
            spec.methods.insert(cfmimo::Method::mc);
            if (spec.methods.size() < 2)
                throw std::invalid_argument("compare: need at least one analytic method");
            return cfmimo::run_experiment(spec, std::cout);
        }
        if (swp->parsed()) {
            cfmimo::ExperimentSpec spec = load_spec(swp_o);
            return cfmimo::run_experiment(spec, std::cout);
        }
        if (ver->parsed()) {
            cfmimo::VerifyOptions opt;
            opt.n_threads = ver_threads;
            const auto report = cfmimo::verify_suite(
                level == "fast" ? cfmimo::VerifyLevel::fast : cfmimo::VerifyLevel::full,
                std::cout, opt);
            if (!report.all_passed()) {
                for (const auto& c : report.checks)
                    if (!c.passed) std::cerr << "failed invariant: " << c.name << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

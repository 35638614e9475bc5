// arwlab: seeded, reproducible activated-random-walk experiments.
//
// Subcommands: stabilize (one window), sweep (exit-density curve over
// radii), fv (return-weight estimate and activity criterion), verify
// (property suites), oracle (derived reference fixtures).  Every command
// is a pure function of its spec and seed up to the "meta" field; exit
// codes are 0 ok, 1 suite failure, 2 invalid spec, 3 guard tripped.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "arw/harness.hpp"

namespace {

struct CommonFlags {
    std::string spec_path;
    std::optional<int> dim;
    std::optional<double> p_right;
    bool symmetric = false;
    std::optional<double> lambda;
    std::optional<std::string> law;
    std::optional<double> mu;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> radii;
    std::optional<std::string> strategy;
    std::optional<double> horizon;
    std::optional<std::int64_t> samples;
    std::optional<std::int64_t> replicas;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::int64_t> direction;
    std::optional<std::int64_t> topplings;
    std::optional<std::int64_t> population;
    std::optional<std::int64_t> max_steps;
    int threads = 0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--spec", f.spec_path, "JSON spec file; flags override its fields");
    cmd->add_option("--dim", f.dim, "lattice dimension (1-4)")->check(CLI::Range(1, 4));
    cmd->add_option("--p", f.p_right,
                    "nearest-neighbor kernel on Z with P(+1) = p, biased toward +1");
    cmd->add_flag("--symmetric", f.symmetric, "symmetric nearest-neighbor kernel");
    cmd->add_option("--lambda", f.lambda, "sleep rate (>= 0)");
    cmd->add_option("--law", f.law, "initial law: constant, bernoulli, poisson, empirical");
    cmd->add_option("--mu", f.mu, "initial law mean");
    cmd->add_option("--counts", f.counts, "counts for the empirical law");
    cmd->add_option("--radius", f.radii, "window radius; repeat for a sweep");
    cmd->add_option("--strategy", f.strategy, "toppling order: greedy, rolling, random");
    cmd->add_option("--horizon", f.horizon, "time horizon (default: run to absorption)");
    cmd->add_option("--samples", f.samples, "Monte Carlo sample count");
    cmd->add_option("--replicas", f.replicas, "replicas per sweep radius");
    cmd->add_option("--seed", f.seed, "root seed; fixes every random stream");
    cmd->add_option("--out", f.out, "output file (default: stdout)");
    cmd->add_option("--direction", f.direction, "direction v for half-space estimates");
    cmd->add_option("--budget", f.topplings, "toppling budget guard");
    cmd->add_option("--population", f.population, "population cap guard");
    cmd->add_option("--max-steps", f.max_steps, "per-walk step guard");
    cmd->add_option("--threads", f.threads, "worker threads (default: hardware)");
}

arw::ExperimentSpec build_spec(const CommonFlags& f) {
    arw::ExperimentSpec spec;
    spec.kernel = arw::kernel_spec_1d(0.75);
    if (!f.spec_path.empty()) spec = arw::spec_from_file(f.spec_path);

    const int dim = f.dim.value_or(spec.kernel.dim);
    if (f.p_right) {
        if (dim != 1) throw arw::ValidationError("--p defines a one-dimensional kernel");
        spec.kernel = arw::kernel_spec_1d(*f.p_right);
    } else if (f.symmetric) {
        spec.kernel = arw::kernel_spec_symmetric(dim);
    } else if (f.dim && *f.dim != spec.kernel.dim) {
        throw arw::ValidationError("--dim disagrees with the kernel; pass --symmetric or --p");
    }
    if (f.lambda) spec.lambda = *f.lambda;
    if (f.law) spec.law.kind = *f.law;
    if (f.mu) spec.law.mu = *f.mu;
    if (!f.counts.empty()) spec.law.counts = f.counts;
    if (!f.radii.empty()) spec.radii = f.radii;
    if (f.strategy) spec.strategy = *f.strategy;
    if (f.horizon) spec.horizon = *f.horizon;
    if (f.samples) spec.samples = *f.samples;
    if (f.replicas) spec.replicas = *f.replicas;
    if (f.seed) spec.seed = *f.seed;
    if (f.out) spec.out = *f.out;
    if (!f.direction.empty()) spec.direction = f.direction;
    if (f.topplings) spec.guards.topplings = *f.topplings;
    if (f.population) spec.guards.population = *f.population;
    if (f.max_steps) spec.guards.max_steps = *f.max_steps;
    return spec;
}

int thread_count(const CommonFlags& f) {
    if (f.threads > 0) return f.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw arw::ValidationError("cannot write output file: " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"activated random walk laboratory"};
    app.require_subcommand(1);

    CommonFlags stab_flags;
    std::string stab_csv;
    CLI::App* stabilize = app.add_subcommand(
        "stabilize", "stabilize one seeded window and write the report\n"
                     "  JSON report to --out; per-site CSV (x...,count,sleeping,topplings)"
                     " to --csv");
    add_common_flags(stabilize, stab_flags);
    stabilize->add_option("--csv", stab_csv, "also write the per-site table here");

    CommonFlags sweep_flags;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "exit-density curve over --radius values\n"
                 "  CSV columns: n,volume,mean,stderr,replicas,strategy,seed\n"
                 "  per-radius progress on stderr; <out>.ckpt.json resumes interrupted runs");
    add_common_flags(sweep, sweep_flags);

    CommonFlags fv_flags;
    std::string fv_method = "both";
    CLI::App* fv = app.add_subcommand(
        "fv", "return-weight estimate F_v(lambda) and the activity criterion");
    add_common_flags(fv, fv_flags);
    fv->add_option("--method", fv_method, "mc, exact, or both")
        ->check(CLI::IsMember({"mc", "exact", "both"}));

    std::string verify_suite = "all";
    std::uint64_t verify_seed = 20'260'816;
    std::string verify_json;
    CLI::App* verify = app.add_subcommand(
        "verify", "run property suites: abelian, coupling, branching, particlewise, all");
    verify->add_option("suite", verify_suite, "suite name")
        ->check(CLI::IsMember({"abelian", "coupling", "branching", "particlewise", "all"}));
    verify->add_option("--seed", verify_seed, "seed for the suite randomness");
    verify->add_option("--json", verify_json, "also write the JSON report here");

    std::string oracle_dir = "fixtures";
    CLI::App* oracle = app.add_subcommand(
        "oracle", "write derived reference fixtures (exact return-weight brackets,\n"
                  "  closed-form exit means) for the test suites to check against");
    oracle->add_option("--dir", oracle_dir, "fixture directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (stabilize->parsed()) {
            const arw::ExperimentSpec spec = build_spec(stab_flags);
            const arw::CommandResult r = arw::run_stabilize(spec);
            write_text(spec.out, r.report.dump(2) + "\n");
            if (!stab_csv.empty()) write_text(stab_csv, r.csv);
        } else if (sweep->parsed()) {
            const arw::ExperimentSpec spec = build_spec(sweep_flags);
            const arw::CommandResult r =
                arw::run_sweep(spec, &std::cerr, thread_count(sweep_flags));
            write_text(spec.out, r.csv);
        } else if (fv->parsed()) {
            const arw::ExperimentSpec spec = build_spec(fv_flags);
            const arw::CommandResult r =
                arw::run_fv(spec, fv_method, thread_count(fv_flags));
            write_text(spec.out, r.report.dump(2) + "\n");
        } else if (verify->parsed()) {
            const arw::VerifyOutput r = arw::run_verify_command(verify_suite, verify_seed);
            std::cout << r.text;
            if (!verify_json.empty()) write_text(verify_json, r.report.dump(2) + "\n");
            return r.passed ? 0 : 1;
        } else if (oracle->parsed()) {
            const arw::Json index = arw::run_oracle(oracle_dir);
            std::cout << index.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return arw::exit_code_for(e);
    }
    return 0;
}

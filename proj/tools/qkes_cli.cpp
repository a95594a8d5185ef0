// qkes command-line front end: run Monte-Carlo experiment batches, replay
// the verification suite, or re-aggregate a transcript log.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qkes/harness.hpp"
#include "qkes/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qkes - private-communication protocol simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run an experiment batch");
    std::string spec_path, out_dir, adversary, protocol;
    std::uint64_t seed = 0, sessions = 0;
    bool have_seed = false, have_sessions = false;
    run->add_option("--spec", spec_path, "experiment spec file (key = value sections)");
    run->add_option("--seed", seed, "override the experiment seed")
        ->each([&](const std::string&) { have_seed = true; });
    run->add_option("--sessions", sessions, "override the session count")
        ->each([&](const std::string&) { have_sessions = true; });
    run->add_option("--out-dir", out_dir, "output directory for summary/transcripts/report");
    run->add_option("--adversary", adversary, "override the adversary kind");
    run->add_option("--protocol", protocol, "override the protocol (p1|p2|p3|naive_baseline)");

    // verify
    auto* verify = app.add_subcommand("verify", "run the equation/oracle verification suite");

    // report
    auto* report = app.add_subcommand("report", "re-aggregate a transcripts.log");
    std::string transcripts_path;
    report->add_option("--transcripts", transcripts_path, "path to transcripts.log")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            qkes::harness::ExperimentSpec spec;
            if (!spec_path.empty()) spec = qkes::harness::load_experiment_spec(spec_path);
            if (have_seed) {
                spec.seed = seed;
                spec.session.seed = seed;
            }
            if (have_sessions) spec.num_sessions = sessions;
            if (!out_dir.empty()) spec.out_dir = out_dir;
            if (!adversary.empty())
                spec.adversary.kind = qkes::adv::adversary_kind_from_name(adversary);
            if (!protocol.empty())
                spec.session.protocol = qkes::harness::protocol_from_name(protocol);
            const auto rep = qkes::harness::run_experiment(spec);
            std::cout << qkes::harness::report_text(rep, &spec);
            std::cout << "outputs written under " << spec.out_dir << "\n";
            return 0;
        }
        if (*verify) {
            const auto sum = qkes::harness::verify_suite(std::cout);
            return sum.ok() ? 0 : 1;
        }
        if (*report) {
            std::ifstream in(transcripts_path);
            if (!in) {
                std::cerr << "cannot open " << transcripts_path << "\n";
                return 1;
            }
            const auto rep = qkes::harness::reaggregate_transcripts(in);
            std::cout << qkes::harness::report_text(rep, nullptr);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkes/harness.hpp"
#include "qkes/verify.hpp"

using namespace qkes;
using namespace qkes::harness;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* kSampleSpec = R"(
# experiment description
[session]
protocol = p3
N = 16
t_x = 0.07
t_z = 0.07
delta = 0.03
r = 1.0

[channel]
p_x = 0.01
p_y = 0.0
p_z = 0.01

[adversary]
kind = identity

[experiment]
sessions = 5
seed = 4242
out_dir = build/test_out
)";

} // namespace

TEST_CASE("experiment spec parsing") {
    std::istringstream in(kSampleSpec);
    const ExperimentSpec spec = parse_experiment_spec(in);
    REQUIRE(spec.session.protocol == proto::ProtocolKind::p3);
    REQUIRE(spec.session.N == 16);
    REQUIRE(spec.session.t_x == 0.07);
    REQUIRE(spec.channel.p_x == 0.01);
    REQUIRE(spec.adversary.kind == adv::AdversaryKind::identity);
    REQUIRE(spec.num_sessions == 5);
    REQUIRE(spec.seed == 4242);
    REQUIRE(spec.session.seed == 4242);
    REQUIRE(spec.out_dir == "build/test_out");

    std::istringstream bad("[session]\nbogus = 1\n");
    REQUIRE_THROWS_AS(parse_experiment_spec(bad), std::invalid_argument);
    std::istringstream loose("x = 1\n");
    REQUIRE_THROWS_AS(parse_experiment_spec(loose), std::invalid_argument);
}

TEST_CASE("run_experiment writes the three outputs and reconciles") {
    std::istringstream in(kSampleSpec);
    ExperimentSpec spec = parse_experiment_spec(in);
    spec.out_dir = "build/test_out_run";
    std::filesystem::remove_all(spec.out_dir);

    std::vector<proto::SessionTranscript> transcripts;
    const AggregateReport rep = run_experiment(spec, &transcripts);
    REQUIRE(rep.sessions == 5);
    REQUIRE(rep.delivered + rep.aborted_by_bob + rep.aborted_by_alice +
                rep.decode_failure ==
            5);
    REQUIRE(transcripts.size() == 5);

    const std::string csv = slurp(spec.out_dir + "/summary.csv");
    REQUIRE(csv.rfind("session_id,outcome,t_x0,t_z0,decode_errors_corrected,"
                      "bits_consumed,bits_recycled,eve_bits_learned\n",
                      0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows

    // Re-aggregation from the transcript log matches the live counts.
    std::ifstream log(spec.out_dir + "/transcripts.log");
    const AggregateReport again = reaggregate_transcripts(log);
    REQUIRE(again.sessions == rep.sessions);
    REQUIRE(again.delivered == rep.delivered);
    REQUIRE(again.decode_failure == rep.decode_failure);
    REQUIRE(again.mean_t_x0 == Catch::Approx(rep.mean_t_x0).margin(1e-5));

    const std::string report = slurp(spec.out_dir + "/report.txt");
    REQUIRE(report.find("delivered fraction") != std::string::npos);
}

TEST_CASE("identical spec and seed give byte-identical outputs") {
    std::istringstream in(kSampleSpec);
    ExperimentSpec spec = parse_experiment_spec(in);
    spec.num_sessions = 20;
    spec.channel.p_x = 0.03;
    spec.channel.p_z = 0.03;

    spec.out_dir = "build/test_out_a";
    std::filesystem::remove_all(spec.out_dir);
    run_experiment(spec);
    spec.out_dir = "build/test_out_b";
    std::filesystem::remove_all(spec.out_dir);
    run_experiment(spec);

    REQUIRE(slurp("build/test_out_a/summary.csv") ==
            slurp("build/test_out_b/summary.csv"));
    REQUIRE(slurp("build/test_out_a/transcripts.log") ==
            slurp("build/test_out_b/transcripts.log"));
    REQUIRE(slurp("build/test_out_a/report.txt") ==
            slurp("build/test_out_b/report.txt"));
}

TEST_CASE("a changed seed changes the transcript stream") {
    std::istringstream in(kSampleSpec);
    ExperimentSpec spec = parse_experiment_spec(in);
    spec.channel.p_x = 0.05;
    spec.out_dir = "build/test_out_c";
    std::filesystem::remove_all(spec.out_dir);
    run_experiment(spec);
    spec.seed = 999;
    spec.session.seed = 999;
    spec.out_dir = "build/test_out_d";
    std::filesystem::remove_all(spec.out_dir);
    run_experiment(spec);
    REQUIRE(slurp("build/test_out_c/transcripts.log") !=
            slurp("build/test_out_d/transcripts.log"));
}

TEST_CASE("per-session stores isolate forgery damage") {
    ExperimentSpec spec;
    spec.session.protocol = proto::ProtocolKind::p3;
    spec.session.N = 8;
    spec.adversary.kind = adv::AdversaryKind::forge_classical;
    spec.adversary.forge_mode = adv::ForgeMode::random;
    spec.per_session_stores = true;
    spec.num_sessions = 25;
    spec.seed = 7;
    spec.session.seed = 7;
    spec.out_dir = "build/test_out_forge";
    std::filesystem::remove_all(spec.out_dir);
    const AggregateReport rep = run_experiment(spec);
    REQUIRE(rep.aborted_by_alice == 25);
}

TEST_CASE("naive baseline experiment surfaces leakage in the aggregate") {
    ExperimentSpec spec;
    spec.session.protocol = proto::ProtocolKind::naive_baseline;
    spec.session.N = 30;
    spec.session.r = 10.0 / 30.0;
    spec.adversary.kind = adv::AdversaryKind::intercept_one_z;
    spec.num_sessions = 200;
    spec.seed = 11;
    spec.session.seed = 11;
    spec.out_dir = "build/test_out_naive";
    std::filesystem::remove_all(spec.out_dir);
    const AggregateReport rep = run_experiment(spec);
    REQUIRE(rep.eve_bits_learned > 100);  // ~3/4 of sessions hit a message qubit
    REQUIRE(rep.delivered > 150);
}

TEST_CASE("leakage audit separates the padded protocol from the baseline") {
    ExperimentSpec spec;
    spec.session.N = 8;
    spec.adversary.kind = adv::AdversaryKind::measure_all_z;
    spec.num_sessions = 4000;
    spec.seed = 13;
    spec.session.seed = 13;

    spec.session.protocol = proto::ProtocolKind::p3;
    const LeakageAuditResult padded = run_leakage_audit(spec);
    REQUIRE(padded.sessions == 4000);
    REQUIRE(padded.message_mi_bits < 0.05);

    spec.session.protocol = proto::ProtocolKind::naive_baseline;
    const LeakageAuditResult exposed = run_leakage_audit(spec);
    REQUIRE(exposed.message_mi_bits > 7.5);

    spec.session.protocol = proto::ProtocolKind::p1;
    const LeakageAuditResult otp = run_leakage_audit(spec);
    REQUIRE(otp.message_mi_bits < 0.05);
}

TEST_CASE("every strategy stays below the audit line against the padded protocol") {
    for (const adv::AdversaryKind kind :
         {adv::AdversaryKind::identity, adv::AdversaryKind::intercept_one_z,
          adv::AdversaryKind::intercept_fraction, adv::AdversaryKind::measure_all_z,
          adv::AdversaryKind::forge_classical}) {
        ExperimentSpec spec;
        spec.session.protocol = proto::ProtocolKind::p3;
        spec.session.N = 8;
        spec.adversary.kind = kind;
        spec.adversary.fraction = 0.25;
        spec.num_sessions = 20000;
        spec.seed = 19 + static_cast<std::uint64_t>(kind);
        spec.session.seed = spec.seed;
        const LeakageAuditResult res = run_leakage_audit(spec);
        INFO(adv::adversary_kind_name(kind));
        REQUIRE(res.message_mi_bits < 0.02);
        REQUIRE(res.recycled_mi_bits < 0.02);
    }
}

TEST_CASE("recycled-key audit sees no correlation under partial intercepts") {
    ExperimentSpec spec;
    spec.session.protocol = proto::ProtocolKind::p3;
    spec.session.N = 8;
    spec.adversary.kind = adv::AdversaryKind::intercept_fraction;
    spec.adversary.fraction = 0.1;
    spec.num_sessions = 3000;
    spec.seed = 17;
    spec.session.seed = 17;
    const LeakageAuditResult res = run_leakage_audit(spec);
    REQUIRE(res.delivered > 500);  // enough delivered sessions to estimate on
    REQUIRE(res.recycled_mi_bits < 0.05);
}

TEST_CASE("verification suite passes and the corrupted gate is caught") {
    std::ostringstream quiet;
    const VerifySummary good = verify_suite(quiet);
    REQUIRE(good.ok());
    REQUIRE(good.passed >= 14);

    // Negative control: a control/target swap must break the propagation rows.
    std::ostringstream quiet2;
    const VerifySummary bad = verify_suite(quiet2, [](const sv::StateVector& s, int c,
                                                      int t) {
        return sv::apply_cnot(s, t, c);
    });
    REQUIRE_FALSE(bad.ok());
    REQUIRE(quiet2.str().find("FAIL") != std::string::npos);
}

TEST_CASE("verify suite output is stable across runs") {
    std::ostringstream a, b;
    verify_suite(a);
    verify_suite(b);
    REQUIRE(a.str() == b.str());
}

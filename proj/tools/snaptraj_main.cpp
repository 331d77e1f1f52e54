// snaptraj command line: plan trajectories from waypoint documents, generate
// random-walk inputs, report basis conditioning, and benchmark the solvers.
// Exit codes: 0 success, 2 bad input (parse/validation/conditioning/caps),
// 3 ill-posed problem.

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snaptraj/snaptraj.hpp"

namespace {

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    if (!os)
        throw snaptraj::Error("cannot open output file: " + path);
    os << body;
    if (!os.good())
        throw snaptraj::Error("failed writing output file: " + path);
}

int run_plan(const std::string& waypoints_path, double rate,
             const std::string& out_path, std::string report_path,
             int deriv_orders) {
    std::ifstream in(waypoints_path);
    if (!in)
        throw snaptraj::Error("cannot read waypoint file: " + waypoints_path);
    const nlohmann::json j = nlohmann::json::parse(in);
    const snaptraj::WaypointDocument doc = snaptraj::parse_waypoints(j);

    std::vector<std::pair<std::string, snaptraj::Spline>> solved;
    nlohmann::json report;
    double total_wall = 0.0;
    for (const auto& [name, ch] : doc.channels) {
        const snaptraj::ProblemSpec spec = snaptraj::channel_problem(doc, ch);
        try {
            auto [spline, rep] = snaptraj::solve_minimum_snap(spec);
            solved.emplace_back(name, std::move(spline));
            report["channels"][name] = {
                {"cost", rep.cost},
                {"max_continuity_residual", rep.max_continuity_residual},
                {"max_constraint_residual", rep.max_constraint_residual},
                {"kkt_residual", rep.kkt_residual},
                {"wall_time", rep.wall_time},
                {"condition_estimate", rep.condition_estimate},
            };
            total_wall += rep.wall_time;
        } catch (const snaptraj::IllPosedError& e) {
            throw snaptraj::IllPosedError("channel \"" + name +
                                              "\": " + e.what(),
                                          e.segment());
        }
    }
    report["total_wall_time"] = total_wall;

    const snaptraj::TrajectoryTable table =
        snaptraj::sample_trajectories(solved, rate, deriv_orders);
    std::ostringstream csv;
    snaptraj::write_csv(csv, table);
    write_text_file(out_path, csv.str());
    if (report_path.empty())
        report_path = out_path + ".report.json";
    write_text_file(report_path, report.dump(2) + "\n");
    std::cout << "wrote " << table.times.size() << " rows to " << out_path
              << " and report to " << report_path << "\n";
    return 0;
}

int run_randomwalk(int k, std::uint64_t seed, const std::string& out_path) {
    const snaptraj::WaypointDocument doc =
        snaptraj::random_walk_document(k, seed);
    write_text_file(out_path, snaptraj::to_json(doc).dump(2) + "\n");
    std::cout << "wrote " << k << "-segment walk to " << out_path << "\n";
    return 0;
}

int run_cond(double t0, double t1, int n, int s) {
    if (!(t0 < t1))
        throw snaptraj::GridError("need t0 < t1");
    const double kappa_dim =
        snaptraj::condition_number(snaptraj::build_A(t0, t1, n, s));
    const Eigen::MatrixXd scaled =
        snaptraj::build_Gamma((t1 - t0) / 2.0, n, s).asDiagonal() *
        snaptraj::build_A(-1.0, 1.0, n, s);
    const double kappa_scaled = snaptraj::condition_number(scaled);
    std::cout << "t0,t1,n,s,kappa_dimensional,kappa_scaled\n"
              << snaptraj::format_sig(t0) << "," << snaptraj::format_sig(t1)
              << "," << n << "," << s << ","
              << snaptraj::format_sig(kappa_dim) << ","
              << snaptraj::format_sig(kappa_scaled) << "\n";
    return 0;
}

int run_bench(const std::vector<int>& ks, const std::string& method, int reps,
              std::uint64_t seed, const std::string& out_path) {
    snaptraj::BenchMethod m = snaptraj::BenchMethod::both;
    if (method == "structured")
        m = snaptraj::BenchMethod::structured;
    else if (method == "dense")
        m = snaptraj::BenchMethod::dense;
    const auto rows = snaptraj::run_bench(ks, m, reps, seed);
    std::ostringstream csv;
    snaptraj::write_bench_csv(csv, rows);
    write_text_file(out_path, csv.str());
    std::cout << "wrote " << rows.size() << " timings to " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-snap piecewise-polynomial trajectory generator"};
    app.require_subcommand(1);

    // plan
    std::string waypoints_path, plan_out, plan_report;
    double rate = 20.0;
    int deriv_orders = 2;
    auto* plan = app.add_subcommand(
        "plan", "solve a waypoint document and sample the trajectory");
    plan->add_option("--waypoints", waypoints_path, "waypoint JSON document")
        ->required();
    plan->add_option("--rate", rate, "sample rate in Hz")
        ->check(CLI::PositiveNumber);
    plan->add_option("--out", plan_out, "trajectory CSV path")->required();
    plan->add_option("--report", plan_report,
                     "report JSON path (default: <out>.report.json)");
    plan->add_option("--derivatives", deriv_orders,
                     "derivative columns per channel (0-2)")
        ->check(CLI::Range(0, 2));

    // randomwalk
    int walk_k = 1;
    std::uint64_t walk_seed = 0;
    std::string walk_out;
    auto* walk = app.add_subcommand(
        "randomwalk", "generate a random-walk waypoint document");
    walk->add_option("--k", walk_k, "segment count")
        ->required()
        ->check(CLI::PositiveNumber);
    walk->add_option("--seed", walk_seed, "RNG seed");
    walk->add_option("--out", walk_out, "output JSON path")->required();

    // cond
    double t0 = 0.0, t1 = 0.0;
    int cond_n = 10, cond_s = 5;
    auto* cond = app.add_subcommand(
        "cond", "conditioning of the endpoint matrix on an interval");
    cond->add_option("--t0", t0, "interval start")->required();
    cond->add_option("--t1", t1, "interval end")->required();
    cond->add_option("--n", cond_n, "coefficients per segment");
    cond->add_option("--s", cond_s, "continuity depth");

    // bench
    std::vector<int> bench_ks;
    std::string bench_method = "both", bench_out;
    int bench_reps = 3;
    std::uint64_t bench_seed = 0;
    auto* bench =
        app.add_subcommand("bench", "time the structured and dense solvers");
    bench->add_option("--k", bench_ks, "segment counts (comma separated)")
        ->required()
        ->delimiter(',');
    bench->add_option("--method", bench_method, "structured | dense | both")
        ->check(CLI::IsMember({"structured", "dense", "both"}));
    bench->add_option("--reps", bench_reps, "repetitions per timing")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--out", bench_out, "timing CSV path")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(plan))
            return run_plan(waypoints_path, rate, plan_out, plan_report,
                            deriv_orders);
        if (app.got_subcommand(walk))
            return run_randomwalk(walk_k, walk_seed, walk_out);
        if (app.got_subcommand(cond))
            return run_cond(t0, t1, cond_n, cond_s);
        if (app.got_subcommand(bench))
            return run_bench(bench_ks, bench_method, bench_reps, bench_seed,
                             bench_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const snaptraj::IllPosedError& e) {
        std::cerr << "error: " << e.what() << " (segment " << e.segment()
                  << ")\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const snaptraj::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}

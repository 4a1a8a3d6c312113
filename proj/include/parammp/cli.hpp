#pragma once
// Command dispatch for the `parammp` tool. Kept in a header so the command
// handlers can be driven from tests with in-memory streams.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "parammp/config_space.hpp"
#include "parammp/error.hpp"
#include "parammp/io.hpp"
#include "parammp/planner.hpp"
#include "parammp/verification.hpp"

namespace parammp::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

namespace detail {

inline std::string read_all(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string read_input(const std::string& file, std::istream& in) {
    if (file.empty() || file == "-") return read_all(in);
    std::ifstream stream(file);
    if (!stream) throw Error(ErrorKind::Validation, "cannot open input file '" + file + "'");
    return read_all(stream);
}

inline void write_file(const std::string& file, const std::string& text) {
    std::ofstream stream(file);
    if (!stream) throw Error(ErrorKind::Validation, "cannot write '" + file + "'");
    stream << text;
}

inline void emit(const std::string& file, const std::string& text, std::ostream& out) {
    if (file.empty() || file == "-")
        out << text << (text.empty() || text.back() != '\n' ? "\n" : "");
    else
        write_file(file, text);
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const std::optional<std::uint64_t>& doc) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PARAMMP_SEED"); env != nullptr && *env != '\0') return std::stoull(env);
    if (doc) return *doc;
    return 1;
}

inline json certificate_json(const SeparationCertificate& cert) {
    json pairs = json::array();
    for (const auto& p : cert.pairs)
        pairs.push_back({{"kind", p.kind == PairBound::Kind::RobotRobot ? "robot_robot" : "robot_obstacle"},
                         {"first", p.first},
                         {"second", p.second},
                         {"sampled_min", p.sampled_min},
                         {"certified_lower_bound", p.certified_lower_bound}});
    return {{"samples_per_segment", cert.samples_per_segment},
            {"pass", cert.pass},
            {"min_certified", cert.min_certified()},
            {"pairs", pairs}};
}

}  // namespace detail

struct Options {
    std::string input;
    std::string mode;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string svg;
    std::string csv;
    // components
    unsigned n = 0;
    unsigned m = 0;
    // verify without an input file: random battery
    std::size_t trials = 0;
    std::size_t robots = 1;
    std::size_t obstacles = 2;
    std::size_t dim = 3;
};

inline FrameMode choose_mode(const Options& opts, const io::ProblemDocument& doc) {
    if (!opts.mode.empty()) {
        const auto mode = io::parse_mode(opts.mode);
        if (!mode) throw Error(ErrorKind::Validation, "--mode must be fixed or obstacle-pair");
        return *mode;
    }
    return doc.mode.value_or(default_mode(doc.query));
}

inline int run_plan(const Options& opts, std::istream& in, std::ostream& out) {
    const auto doc = io::parse_problem(detail::read_input(opts.input, in));
    const auto result = plan(doc.query, choose_mode(opts, doc), {doc.options.snap_tolerance});
    detail::emit(opts.output, io::serialize_plan(result), out);
    if (!opts.svg.empty()) detail::write_file(opts.svg, io::render_svg(result));
    if (!opts.csv.empty()) detail::write_file(opts.csv, io::plan_csv(result, opts.samples.value_or(256)));
    return kExitOk;
}

inline int run_classify(const Options& opts, std::istream& in, std::ostream& out) {
    const auto doc = io::parse_problem(detail::read_input(opts.input, in));
    const auto mode = choose_mode(opts, doc);
    const auto frame = make_frame(doc.query, mode);
    const double snap = doc.options.snap_tolerance;
    const auto label = classify(doc.query, frame, snap);
    json root{{"version", io::kFormatVersion},
              {"mode", to_string(mode)},
              {"region", {{"j", label.j}, {"t", label.t}, {"c", label.c}}},
              {"min_gap", min_gap(doc.query, frame, snap)},
              {"generic", label.j == 2 * static_cast<int>(doc.query.robot_count())}};
    if (root["generic"].get<bool>()) {
        const auto pair = orderings(doc.query, frame, snap);
        json sigma = json::array(), sigma_prime = json::array();
        for (const auto& tok : pair.sigma) sigma.push_back(to_string(tok));
        for (const auto& tok : pair.sigma_prime) sigma_prime.push_back(to_string(tok));
        root["ordering"] = {{"sigma", sigma}, {"sigma_prime", sigma_prime}};
    }
    detail::emit(opts.output, root.dump(2), out);
    return kExitOk;
}

inline int run_verify(const Options& opts, std::istream& in, std::ostream& out) {
    if (!opts.input.empty() || opts.trials == 0) {
        const auto doc = io::parse_problem(detail::read_input(opts.input, in));
        const auto result = plan(doc.query, choose_mode(opts, doc), {doc.options.snap_tolerance});
        const auto cert = certify_separation(result.path, opts.samples.value_or(doc.options.samples_per_segment));
        const double endpoints = endpoint_error(result.path);
        const bool ok = cert.pass && endpoints <= 1e-9 && result.path.query.obstacles == doc.query.obstacles;
        json root{{"version", io::kFormatVersion},
                  {"region", {{"j", result.region.j}, {"t", result.region.t}, {"c", result.region.c}}},
                  {"swap_count", result.swap_count},
                  {"endpoint_error", endpoints},
                  {"certificate", detail::certificate_json(cert)},
                  {"pass", ok}};
        detail::emit(opts.output, root.dump(2), out);
        return ok ? kExitOk : kExitInternal;
    }

    // Random battery.
    const std::uint64_t seed = detail::resolve_seed(opts.seed, std::nullopt);
    FrameMode mode = FrameMode::Fixed;
    if (!opts.mode.empty()) {
        const auto parsed = io::parse_mode(opts.mode);
        if (!parsed) throw Error(ErrorKind::Validation, "--mode must be fixed or obstacle-pair");
        mode = *parsed;
    }
    std::mt19937_64 rng(seed);
    std::size_t passed = 0;
    double worst_bound = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opts.trials; ++k) {
        const auto q = random_query(opts.robots, opts.obstacles, opts.dim, rng);
        const auto result = plan(q, mode);
        const auto cert = certify_separation(result.path, opts.samples.value_or(64));
        worst_bound = std::min(worst_bound, cert.min_certified());
        if (cert.pass && endpoint_error(result.path) <= 1e-9) ++passed;
    }
    const auto partition = check_partition(opts.robots, opts.obstacles, opts.dim, mode, opts.trials, seed);
    json histogram = json::object();
    for (const auto& [c, count] : partition.histogram) histogram[std::to_string(c)] = count;
    json root{{"version", io::kFormatVersion},
              {"seed", seed},
              {"trials", opts.trials},
              {"passed", passed},
              {"worst_certified_bound", worst_bound},
              {"partition", {{"violations", partition.violations}, {"histogram", histogram}}},
              {"pass", passed == opts.trials && partition.violations == 0}};
    detail::emit(opts.output, root.dump(2), out);
    return passed == opts.trials && partition.violations == 0 ? kExitOk : kExitInternal;
}

inline int run_components(const Options& opts, std::ostream& out) {
    out << component_count(opts.n, opts.m) << "\n";
    return kExitOk;
}

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Parametrized motion planning for point robots among point obstacles", "parammp"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", opts.input, "Problem JSON (default: stdin)");
        sub->add_option("--mode", opts.mode, "fixed | obstacle-pair")->check(CLI::IsMember({"fixed", "obstacle-pair", "obstacle_pair"}));
        sub->add_option("--output", opts.output, "Output file (default: stdout)");
    };
    auto* plan_cmd = app.add_subcommand("plan", "Plan a problem and print the plan JSON");
    add_common(plan_cmd);
    plan_cmd->add_option("--svg", opts.svg, "Write an SVG rendering");
    plan_cmd->add_option("--csv", opts.csv, "Write sampled positions as CSV");
    plan_cmd->add_option("--samples", opts.samples, "CSV samples per unit time (default 256)");

    auto* classify_cmd = app.add_subcommand("classify", "Print the stratum and orderings of a problem");
    add_common(classify_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "Plan and certify a problem, or run a random battery");
    add_common(verify_cmd);
    verify_cmd->add_option("--samples", opts.samples, "Samples per segment for the certificate");
    verify_cmd->add_option("--seed", opts.seed, "Seed for the random battery (fallback: PARAMMP_SEED)");
    verify_cmd->add_option("--trials", opts.trials, "Random battery size (used when --input is absent)");
    verify_cmd->add_option("--robots", opts.robots, "Robots per random query");
    verify_cmd->add_option("--obstacles", opts.obstacles, "Obstacles per random query");
    verify_cmd->add_option("--dim", opts.dim, "Dimension of random queries");

    auto* components_cmd = app.add_subcommand("components", "Print ((n+m)!)^2 / m!");
    components_cmd->add_option("n", opts.n, "Robots")->required()->check(CLI::PositiveNumber);
    components_cmd->add_option("m", opts.m, "Obstacles")->required()->check(CLI::PositiveNumber);

    std::vector<std::string> reversed_args(args.rbegin(), args.rend());
    try {
        app.parse(reversed_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*plan_cmd) return run_plan(opts, in, out);
        if (*classify_cmd) return run_classify(opts, in, out);
        if (*verify_cmd) return run_verify(opts, in, out);
        return run_components(opts, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Consistency: return kExitInternal;
            default: return kExitValidation;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace parammp::cli

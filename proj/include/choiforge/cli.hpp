#pragma once

// Command-line front end. Exit codes:
//   0 ok, 1 internal error, 2 parse / usage error, 3 complete-positivity violation,
//   4 check failure, 5 invalid tomography configuration.
// Failures print {"error": {"code": ..., "kind": ..., "message": ...}} on the error stream.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "choiforge/io.hpp"

namespace choiforge::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_parse = 2,
    exit_not_cp = 3,
    exit_check_failed = 4,
    exit_config = 5,
};

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::not_completely_positive:
            return exit_not_cp;
        case ErrorKind::config:
            return exit_config;
        case ErrorKind::parse:
        case ErrorKind::dimension_mismatch:
        case ErrorKind::not_hermitian:
        case ErrorKind::invalid_argument:
            return exit_parse;
    }
    return exit_internal;
}

inline const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension_mismatch:
            return "dimension_mismatch";
        case ErrorKind::not_hermitian:
            return "not_hermitian";
        case ErrorKind::not_completely_positive:
            return "not_completely_positive";
        case ErrorKind::invalid_argument:
            return "invalid_argument";
        case ErrorKind::parse:
            return "parse";
        case ErrorKind::config:
            return "config";
    }
    return "internal";
}

inline int report_error(std::ostream& err, int code, const std::string& kind, const std::string& message,
                        io::Json extra = io::Json::object()) {
    io::Json body;
    body["code"] = code;
    body["kind"] = kind;
    body["message"] = message;
    for (auto& [k, v] : extra.items()) body[k] = v;
    io::Json j;
    j["error"] = std::move(body);
    err << j.dump() << "\n";
    return code;
}

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string output;
    std::string format = "json";
};

namespace detail {

// Writes the payload to --output (printing a short status object on stdout) or to stdout.
inline void emit(const io::Json& payload, const GlobalOptions& g, std::ostream& out, io::Json summary = {}) {
    if (g.output.empty()) {
        out << io::dump(payload);
        return;
    }
    io::write_text_file(g.output, io::dump(payload));
    io::Json status;
    status["status"] = "ok";
    status["output"] = g.output;
    if (summary.is_object())
        for (auto& [k, v] : summary.items()) status[k] = v;
    out << io::dump(status);
}

}  // namespace detail

inline int cmd_convert(const std::string& input, const std::string& to, const GlobalOptions& g, std::ostream& out) {
    const auto channel = io::channel_from_json(io::read_json_file(input));
    io::AnyChannel converted;
    if (to == "choi") {
        converted = io::to_choi(channel);
    } else {
        converted = io::to_kraus(channel);
    }
    detail::emit(io::channel_to_json(converted), g, out);
    return exit_ok;
}

inline int cmd_check(const std::string& input, std::ostream& out, std::ostream& err) {
    const auto channel = io::channel_from_json(io::read_json_file(input));
    const auto* k = std::get_if<KrausSet>(&channel);
    const auto verdict = k ? check_cp_tp(*k) : check_cp_tp(io::to_choi(channel));
    out << io::dump(io::verdict_to_json(verdict));
    if (verdict.ok()) return exit_ok;
    const std::string why = !verdict.is_cp ? "channel is not completely positive" : "channel increases trace";
    return report_error(err, exit_check_failed, "check_failed", why, io::verdict_to_json(verdict));
}

inline int cmd_tomograph(const std::string& experiment_path, const GlobalOptions& g, std::ostream& out) {
    auto experiment = io::experiment_from_json(io::read_json_file(experiment_path));
    if (g.seed) experiment.config.seed = *g.seed;
    const auto result = run_tomography(io::to_opaque(experiment.channel), experiment.config);
    const auto payload = io::tomography_result_to_json(result, experiment.config);
    io::Json summary;
    summary["kraus_count"] = result.kraus.size();
    summary["choi_eigenvalues"] = payload["tomography"]["choi_eigenvalues"];
    summary["success_trace"] = result.success_trace;
    summary["trace_decreasing"] = result.trace_decreasing;
    detail::emit(payload, g, out, summary);
    return exit_ok;
}

inline int cmd_compare(const std::string& a, const std::string& b, const GlobalOptions& g, std::ostream& out) {
    const auto ja = io::to_choi(io::channel_from_json(io::read_json_file(a)));
    const auto jb = io::to_choi(io::channel_from_json(io::read_json_file(b)));
    const double tol = g.tol.value_or(1e-6);
    const double distance = choi_distance(ja, jb);
    io::Json j;
    j["choi_distance"] = distance;
    j["process_fidelity"] = process_fidelity(ja, jb);
    j["equivalent"] = distance < tol;
    j["tolerance"] = tol;
    detail::emit(j, g, out);
    return exit_ok;
}

inline int cmd_zoo(const std::string& name, const std::vector<double>& params, const std::vector<std::size_t>& dims,
                   const GlobalOptions& g, std::ostream& out) {
    if (dims.empty() || dims.size() > 2) throw Error(ErrorKind::parse, "--dims expects one or two dimensions");
    const std::size_t n1 = dims[0];
    const std::size_t n2 = dims.size() == 2 ? dims[1] : dims[0];
    detail::emit(io::channel_to_json(zoo_channel(name, params, n1, n2)), g, out);
    return exit_ok;
}

inline int cmd_resources(const std::vector<std::size_t>& dims, const GlobalOptions& g, std::ostream& out) {
    if (dims.size() != 2) throw Error(ErrorKind::parse, "--dims expects two dimensions");
    detail::emit(io::resources_to_json(resource_report(dims[0], dims[1])), g, out);
    return exit_ok;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum channel conversion, checking and simulated process tomography", "choiforge"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Root seed (overrides the experiment seed)");
    app.add_option("--tol", g.tol, "Choi-distance tolerance for compare (default 1e-6)");
    app.add_option("--output", g.output, "Write the result here instead of standard output");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json"}));

    std::string convert_input, convert_to;
    auto* convert = app.add_subcommand("convert", "Convert a channel file to another representation");
    convert->add_option("input", convert_input, "Channel file")->required();
    convert->add_option("--to", convert_to, "Target representation")
        ->required()
        ->check(CLI::IsMember({"kraus", "choi"}));

    std::string check_input;
    auto* check = app.add_subcommand("check", "Report complete positivity and trace conditions");
    check->add_option("input", check_input, "Channel file")->required();

    std::string experiment_path;
    auto* tomograph = app.add_subcommand("tomograph", "Run simulated process tomography");
    tomograph->add_option("experiment", experiment_path, "Experiment file")->required();

    std::string file_a, file_b;
    auto* compare = app.add_subcommand("compare", "Compare two channels via their Choi matrices");
    compare->add_option("a", file_a, "First channel file")->required();
    compare->add_option("b", file_b, "Second channel file")->required();

    std::string zoo_name;
    std::vector<double> zoo_params;
    std::vector<std::size_t> zoo_dims{2};
    auto* zoo = app.add_subcommand("zoo", "Write a named channel as a Kraus file");
    zoo->add_option("--name", zoo_name, "Channel name: " + zoo_names_joined())->required();
    zoo->add_option("--params", zoo_params, "Channel parameters")->delimiter(',');
    zoo->add_option("--dims", zoo_dims, "n1 [n2]")->expected(1, 2);

    std::vector<std::size_t> resource_dims;
    auto* resources = app.add_subcommand("resources", "Measurement resource accounting");
    resources->add_option("--dims", resource_dims, "n1 n2")->expected(2)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        return report_error(err, exit_parse, "usage", e.what());
    }

    try {
        if (*convert) return cmd_convert(convert_input, convert_to, g, out);
        if (*check) return cmd_check(check_input, out, err);
        if (*tomograph) return cmd_tomograph(experiment_path, g, out);
        if (*compare) return cmd_compare(file_a, file_b, g, out);
        if (*zoo) return cmd_zoo(zoo_name, zoo_params, zoo_dims, g, out);
        if (*resources) return cmd_resources(resource_dims, g, out);
    } catch (const NotCompletelyPositive& e) {
        io::Json extra;
        extra["min_eigenvalue"] = e.min_eigenvalue();
        return report_error(err, exit_not_cp, kind_name(e.kind()), e.what(), extra);
    } catch (const Error& e) {
        return report_error(err, exit_code_for(e.kind()), kind_name(e.kind()), e.what());
    } catch (const std::exception& e) {
        return report_error(err, exit_internal, "internal", e.what());
    }
    return report_error(err, exit_parse, "usage", "no subcommand given");
}

}  // namespace choiforge::cli

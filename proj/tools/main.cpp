#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "quasiode/error.hpp"

using namespace quasiode;
using namespace quasiode::cli;

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs `fn` with the destination stream; output goes to a file only when the command succeeds.
template <class Fn>
int with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") return fn(std::cout);
    std::ostringstream buffer;
    const int rc = fn(buffer);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file '" << path << "'\n";
        return kUsage;
    }
    out << buffer.str();
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-derivative tools for odd-order differential expressions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "quasiode 0.1.0");

    std::string input, output, format;
    int jobs = 1;
    auto add_io = [&](CLI::App* sub, bool needs_input) {
        auto* opt = sub->add_option("-i,--input", input, "problem document (JSON), '-' for stdin");
        if (needs_input) opt->required();
        sub->add_option("-o,--output", output, "write the result here instead of stdout");
        sub->add_option("-f,--format", format, "output format: json, csv or text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
    };

    auto* verify = app.add_subcommand("verify", "check the expanded quasi-derivative identity for n = 1..n_max");
    int n_max = symbolic::kDefaultVerifyCap;
    verify->add_option("--n-max", n_max, "largest n to verify")->check(CLI::PositiveNumber);
    verify->add_option("-o,--output", output, "write the report here instead of stdout");
    verify->add_option("-f,--format", format, "output format: json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));

    auto* matrix = app.add_subcommand("matrix", "print the sparsity pattern or numeric values of F");
    add_io(matrix, false);
    bool pattern = false;
    std::optional<int> pattern_n;
    std::vector<double> xs;
    std::string side = "none";
    matrix->add_flag("--pattern", pattern, "print entry kinds instead of values");
    matrix->add_option("-n,--n", pattern_n, "order parameter for --pattern without a document")
        ->check(CLI::PositiveNumber);
    matrix->add_option("-x,--x", xs, "evaluation points (repeatable)");
    matrix->add_option("--side", side, "one-sided limit at breakpoints: none, left or right")
        ->check(CLI::IsMember({"none", "left", "right"}));

    auto* apply = app.add_subcommand("apply", "evaluate tau y on a grid");
    add_io(apply, true);
    bool cross_check = false;
    std::string method = "expanded";
    apply->add_flag("--cross-check", cross_check, "evaluate by both methods and report their deviation");
    apply->add_option("--method", method, "expanded or chain")->check(CLI::IsMember({"expanded", "chain"}));
    apply->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* solve = app.add_subcommand("solve", "integrate u' = (F + lambda E) u from x0 to x1");
    add_io(solve, true);

    auto* eig = app.add_subcommand("eig", "locate eigenvalues of the boundary problem in a search region");
    add_io(eig, true);
    eig->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    if (format.empty()) format = apply->parsed() ? "csv" : "json";

    if (verify->parsed()) {
        return guarded(std::cerr, [&] {
            VerifyOptions o;
            o.n_max = n_max;
            o.format = parse_format(format);
            return with_output(output, [&](std::ostream& out) { return cmd_verify(o, out, std::cerr); });
        });
    }
    if (matrix->parsed()) {
        return guarded(std::cerr, [&] {
            std::optional<ProblemDocument> doc;
            if (!input.empty()) doc = parse_document(read_input(input));
            MatrixOptions o;
            o.pattern = pattern;
            o.n = pattern_n;
            o.x = xs;
            o.side = side == "left" ? Side::Left : side == "right" ? Side::Right : Side::None;
            o.format = parse_format(format);
            return with_output(output, [&](std::ostream& out) { return cmd_matrix(doc, o, out, std::cerr); });
        });
    }
    if (apply->parsed()) {
        return guarded(std::cerr, [&] {
            const ProblemDocument doc = parse_document(read_input(input));
            ApplyOptions o;
            o.cross_check = cross_check;
            o.method = method == "chain" ? TauMethod::Chain : TauMethod::Expanded;
            o.jobs = jobs;
            o.format = parse_format(format);
            return with_output(output, [&](std::ostream& out) { return cmd_apply(doc, o, out, std::cerr); });
        });
    }
    if (solve->parsed()) {
        return guarded(std::cerr, [&] {
            if (parse_format(format) != Format::Json) throw ValidationError("solve writes JSON only");
            const ProblemDocument doc = parse_document(read_input(input));
            return with_output(output, [&](std::ostream& out) { return cmd_solve(doc, out, std::cerr); });
        });
    }
    return guarded(std::cerr, [&] {
        if (parse_format(format) != Format::Json) throw ValidationError("eig writes JSON only");
        const ProblemDocument doc = parse_document(read_input(input));
        return with_output(output, [&](std::ostream& out) { return cmd_eig(doc, jobs, out, std::cerr); });
    });
}

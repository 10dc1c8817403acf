#pragma once

// Subcommand implementations for the quasiode tool. Each command writes its
// result to `out`, diagnostics to `err`, and returns a process exit code.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "quasiode/quasi.hpp"
#include "quasiode/solver.hpp"
#include "quasiode/symbolic.hpp"

namespace quasiode::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kMismatch = 2, kNumeric = 3 };

enum class Format { Json, Csv, Text };

Format parse_format(std::string_view s);

struct Tolerances {
    double rtol = 1e-9;
    double atol = 1e-12;
    double refine_tol = 1e-10;
    int max_iter = 50;
};

/// A schema-validated problem document.
struct ProblemDocument {
    nlohmann::json raw;
    std::shared_ptr<const CoefficientSet> cs;
    std::optional<std::string> y;
    std::vector<double> grid;  // apply; defaults to 101 points on [a, b]
    std::vector<double> x;     // matrix
    cplx lambda{};
    std::optional<double> x0, x1;
    std::optional<std::vector<cplx>> u0;
    std::optional<BoundaryProblem> boundary;
    std::optional<SearchRegion> search;
    Tolerances tolerances;
};

/// Throws ValidationError / ParseError on any schema violation (unknown keys included).
ProblemDocument parse_document(std::string_view text);

/// Checks an output report of the given command ("verify", "matrix", "solve", "eig")
/// against its schema; throws ValidationError on mismatch.
void validate_output(std::string_view command, const nlohmann::json& report);

nlohmann::json complex_json(cplx v);

struct VerifyOptions {
    int n_max = symbolic::kDefaultVerifyCap;
    Format format = Format::Json;
};
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

struct MatrixOptions {
    bool pattern = false;
    std::optional<int> n;       // pattern without a document
    std::vector<double> x;      // overrides the document's "x"
    Side side = Side::None;
    Format format = Format::Json;
};
int cmd_matrix(const std::optional<ProblemDocument>& doc, const MatrixOptions& opts, std::ostream& out,
               std::ostream& err);

struct ApplyOptions {
    bool cross_check = false;
    TauMethod method = TauMethod::Expanded;
    int jobs = 1;
    Format format = Format::Csv;
};
int cmd_apply(const ProblemDocument& doc, const ApplyOptions& opts, std::ostream& out, std::ostream& err);

int cmd_solve(const ProblemDocument& doc, std::ostream& out, std::ostream& err);

int cmd_eig(const ProblemDocument& doc, int jobs, std::ostream& out, std::ostream& err);

/// Runs `fn`, mapping exceptions to exit codes and printing them to `err`.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn);

}  // namespace quasiode::cli

#include "commands_impl.hpp"

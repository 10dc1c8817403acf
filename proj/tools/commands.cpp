#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "log.hpp"
#include "quasiode/error.hpp"
#include "quasiode/quasi.hpp"
#include "quasiode/symbolic.hpp"

namespace quasiode::cli {

using json = nlohmann::json;

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
    }
}

void require_keys(const json& j, std::initializer_list<const char*> required, const std::string& where) {
    for (const char* k : required)
        if (!j.contains(k)) throw ValidationError(where + ": missing key '" + k + "'");
}

double real_of(const json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(where + ": not finite");
    return v;
}

int int_of(const json& j, const std::string& where, int min) {
    if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
    const auto v = j.get<long long>();
    if (v < min || v > 1'000'000'000) throw ValidationError(where + ": out of range");
    return static_cast<int>(v);
}

double positive_of(const json& j, const std::string& where) {
    const double v = real_of(j, where);
    if (!(v > 0.0)) throw ValidationError(where + ": must be positive");
    return v;
}

cplx complex_of(const json& j, const std::string& where) {
    if (j.is_number()) return real_of(j, where);
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_object()) {
        only_keys(j, {"re", "im"}, where);
        double re = 0.0, im = 0.0;
        if (j.contains("re")) re = real_of(j["re"], where + ".re");
        if (j.contains("im")) im = real_of(j["im"], where + ".im");
        return {re, im};
    }
    throw ValidationError(where + ": expected a complex value");
}

std::vector<double> reals_of(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real_of(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    if (count > 1) out.back() = hi;
    return out;
}

Eigen::MatrixXcd matrix_of(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ValidationError(where + ": expected " + std::to_string(dim) + " rows");
    Eigen::MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw ValidationError(where + ": row " + std::to_string(r + 1) + " must have " + std::to_string(dim) +
                                  " entries");
        for (int c = 0; c < dim; ++c)
            m(r, c) = complex_of(row[static_cast<std::size_t>(c)],
                                 where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(cplx v) {
    std::string s = fmt(v.real());
    s += v.imag() < 0 || std::signbit(v.imag()) ? "-" : "+";
    s += fmt(std::abs(v.imag())) + "i";
    return s;
}

std::string elapsed_log(const char* what, std::chrono::steady_clock::time_point t0) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::string(what) + " took " + fmt(s) + " s";
}

IntegratorOptions integrator_options(const Tolerances& t) {
    IntegratorOptions o;
    o.rtol = t.rtol;
    o.atol = t.atol;
    return o;
}

json liouville_json(const FundamentalMatrix& fm, const CoefficientSet& cs) {
    const cplx got = fm.Y.determinant();
    const cplx expected = liouville_determinant(cs, fm.a, fm.b);
    return json{{"lambda", complex_json(fm.lambda)},
                {"det_Y", complex_json(got)},
                {"expected", complex_json(expected)},
                {"relative_error", std::abs(got - expected) / std::abs(expected)}};
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace

Format parse_format(std::string_view s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "text") return Format::Text;
    throw ValidationError("unknown format '" + std::string(s) + "' (json, csv, text)");
}

json complex_json(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

ProblemDocument parse_document(std::string_view text) {
    ProblemDocument doc;
    try {
        doc.raw = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
    const json& j = doc.raw;
    only_keys(j, {"n", "interval", "coefficients", "y", "grid", "x", "lambda", "x0", "x1", "u0", "boundary", "search",
                  "tolerances"},
              "document");
    doc.cs = std::make_shared<const CoefficientSet>(load_coefficient_set(text));
    const CoefficientSet& cs = *doc.cs;
    const int dim = 2 * cs.n() + 1;
    auto in_range = [&](double x, const std::string& where) {
        if (!(x >= cs.a() && x <= cs.b())) throw ValidationError(where + ": " + fmt(x) + " outside [a, b]");
        return x;
    };

    if (j.contains("y")) {
        if (!j["y"].is_string()) throw ValidationError("y: expected an expression string");
        doc.y = j["y"].get<std::string>();
        parse_expression(*doc.y);
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.is_array()) {
            doc.grid = reals_of(g, "grid");
        } else {
            only_keys(g, {"start", "stop", "count"}, "grid");
            require_keys(g, {"start", "stop", "count"}, "grid");
            doc.grid = linspace(real_of(g["start"], "grid.start"), real_of(g["stop"], "grid.stop"),
                                int_of(g["count"], "grid.count", 1));
        }
        if (doc.grid.empty()) throw ValidationError("grid: empty");
        for (double x : doc.grid) in_range(x, "grid");
    } else {
        doc.grid = linspace(cs.a(), cs.b(), 101);
    }

    if (j.contains("x")) {
        doc.x = j["x"].is_array() ? reals_of(j["x"], "x") : std::vector<double>{real_of(j["x"], "x")};
        for (double x : doc.x) in_range(x, "x");
    }

    if (j.contains("lambda")) doc.lambda = complex_of(j["lambda"], "lambda");
    if (j.contains("x0")) doc.x0 = in_range(real_of(j["x0"], "x0"), "x0");
    if (j.contains("x1")) doc.x1 = in_range(real_of(j["x1"], "x1"), "x1");
    if (j.contains("u0")) {
        const json& u = j["u0"];
        if (!u.is_array() || static_cast<int>(u.size()) != dim)
            throw ValidationError("u0: expected " + std::to_string(dim) + " complex values");
        std::vector<cplx> v;
        for (std::size_t i = 0; i < u.size(); ++i) v.push_back(complex_of(u[i], "u0[" + std::to_string(i) + "]"));
        doc.u0 = std::move(v);
    }

    if (j.contains("boundary")) {
        const json& b = j["boundary"];
        only_keys(b, {"preset", "A", "B"}, "boundary");
        if (b.contains("preset")) {
            if (b.contains("A") || b.contains("B")) throw ValidationError("boundary: give either preset or A and B");
            if (!b["preset"].is_string()) throw ValidationError("boundary.preset: expected a string");
            const auto preset = b["preset"].get<std::string>();
            if (preset == "periodic")
                doc.boundary = BoundaryProblem::periodic(doc.cs);
            else if (preset == "antiperiodic")
                doc.boundary = BoundaryProblem::antiperiodic(doc.cs);
            else
                throw ValidationError("boundary.preset: unknown preset '" + preset + "'");
        } else {
            require_keys(b, {"A", "B"}, "boundary");
            doc.boundary =
                BoundaryProblem::from_matrices(doc.cs, matrix_of(b["A"], dim, "boundary.A"), matrix_of(b["B"], dim, "boundary.B"));
        }
    }

    if (j.contains("search")) {
        const json& s = j["search"];
        only_keys(s, {"real_interval", "complex_rect"}, "search");
        if (s.size() != 1) throw ValidationError("search: give exactly one of real_interval, complex_rect");
        if (s.contains("real_interval")) {
            const json& r = s["real_interval"];
            only_keys(r, {"lo", "hi", "samples"}, "search.real_interval");
            require_keys(r, {"lo", "hi"}, "search.real_interval");
            RealInterval ri;
            ri.lo = real_of(r["lo"], "search.real_interval.lo");
            ri.hi = real_of(r["hi"], "search.real_interval.hi");
            ri.samples = r.contains("samples") ? int_of(r["samples"], "search.real_interval.samples", 2) : 400;
            if (!(ri.lo < ri.hi)) throw ValidationError("search.real_interval: lo must be below hi");
            doc.search = ri;
        } else {
            const json& r = s["complex_rect"];
            only_keys(r, {"lower_left", "upper_right", "re_samples", "im_samples"}, "search.complex_rect");
            require_keys(r, {"lower_left", "upper_right"}, "search.complex_rect");
            ComplexRect cr;
            cr.lower_left = complex_of(r["lower_left"], "search.complex_rect.lower_left");
            cr.upper_right = complex_of(r["upper_right"], "search.complex_rect.upper_right");
            cr.re_samples = r.contains("re_samples") ? int_of(r["re_samples"], "search.complex_rect.re_samples", 2) : 40;
            cr.im_samples = r.contains("im_samples") ? int_of(r["im_samples"], "search.complex_rect.im_samples", 2) : 40;
            if (!(cr.lower_left.real() < cr.upper_right.real() && cr.lower_left.imag() < cr.upper_right.imag()))
                throw ValidationError("search.complex_rect: lower_left must lie below and left of upper_right");
            doc.search = cr;
        }
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        only_keys(t, {"rtol", "atol", "refine_tol", "max_iter"}, "tolerances");
        if (t.contains("rtol")) doc.tolerances.rtol = positive_of(t["rtol"], "tolerances.rtol");
        if (t.contains("atol")) doc.tolerances.atol = positive_of(t["atol"], "tolerances.atol");
        if (t.contains("refine_tol")) doc.tolerances.refine_tol = positive_of(t["refine_tol"], "tolerances.refine_tol");
        if (t.contains("max_iter")) doc.tolerances.max_iter = int_of(t["max_iter"], "tolerances.max_iter", 1);
    }
    return doc;
}

// ---------------------------------------------------------------------------
// output schemas

namespace {

void check_complex(const json& j, const std::string& where) {
    only_keys(j, {"re", "im"}, where);
    require_keys(j, {"re", "im"}, where);
    if (!(j["re"].is_number() || j["re"].is_null()) || !(j["im"].is_number() || j["im"].is_null()))
        throw ValidationError(where + ": re and im must be numbers");
}

void check_liouville(const json& j, const std::string& where) {
    only_keys(j, {"lambda", "det_Y", "expected", "relative_error"}, where);
    require_keys(j, {"lambda", "det_Y", "expected", "relative_error"}, where);
    check_complex(j["lambda"], where + ".lambda");
    check_complex(j["det_Y"], where + ".det_Y");
    check_complex(j["expected"], where + ".expected");
}

}  // namespace

void validate_output(std::string_view command, const json& r) {
    if (command == "verify") {
        only_keys(r, {"n_max", "passed", "results", "total_seconds"}, "verify");
        require_keys(r, {"n_max", "passed", "results", "total_seconds"}, "verify");
        if (!r["passed"].is_boolean() || !r["results"].is_array()) throw ValidationError("verify: bad field types");
        for (const auto& e : r["results"]) {
            only_keys(e, {"n", "equal", "term_count", "atom_count", "seconds", "difference"}, "verify.results");
            require_keys(e, {"n", "equal", "term_count", "atom_count", "seconds"}, "verify.results");
            if (!e["n"].is_number_integer() || !e["equal"].is_boolean() || !e["term_count"].is_number_integer())
                throw ValidationError("verify.results: bad field types");
        }
    } else if (command == "matrix") {
        only_keys(r, {"n", "dim", "pattern", "matrices"}, "matrix");
        require_keys(r, {"n", "dim"}, "matrix");
        if (r.contains("pattern") == r.contains("matrices"))
            throw ValidationError("matrix: exactly one of pattern, matrices");
        const int dim = r["dim"].get<int>();
        if (r.contains("pattern")) {
            for (const auto& e : r["pattern"]) {
                only_keys(e, {"row", "col", "kind"}, "matrix.pattern");
                require_keys(e, {"row", "col", "kind"}, "matrix.pattern");
            }
        } else {
            for (const auto& m : r["matrices"]) {
                only_keys(m, {"x", "entries"}, "matrix.matrices");
                require_keys(m, {"x", "entries"}, "matrix.matrices");
                if (static_cast<int>(m["entries"].size()) != dim) throw ValidationError("matrix: wrong row count");
                for (const auto& row : m["entries"]) {
                    if (static_cast<int>(row.size()) != dim) throw ValidationError("matrix: wrong column count");
                    for (const auto& v : row) check_complex(v, "matrix.entries");
                }
            }
        }
    } else if (command == "solve") {
        only_keys(r, {"lambda", "x0", "x1", "u0", "u1", "stats", "liouville_check"}, "solve");
        require_keys(r, {"lambda", "x0", "x1", "u0", "u1", "stats", "liouville_check"}, "solve");
        check_complex(r["lambda"], "solve.lambda");
        if (r["u0"].size() != r["u1"].size()) throw ValidationError("solve: u0 and u1 differ in length");
        for (const auto& v : r["u1"]) check_complex(v, "solve.u1");
        only_keys(r["stats"], {"accepted", "rejected", "segments", "max_error_estimate"}, "solve.stats");
        check_liouville(r["liouville_check"], "solve.liouville_check");
    } else if (command == "eig") {
        only_keys(r, {"eigenvalues", "liouville_check", "warnings", "evaluations"}, "eig");
        require_keys(r, {"eigenvalues", "liouville_check", "warnings", "evaluations"}, "eig");
        for (const auto& e : r["eigenvalues"]) {
            only_keys(e, {"re", "im", "residual", "iterations"}, "eig.eigenvalues");
            require_keys(e, {"re", "im", "residual"}, "eig.eigenvalues");
        }
        check_liouville(r["liouville_check"], "eig.liouville_check");
        if (!r["warnings"].is_array()) throw ValidationError("eig.warnings: expected an array");
    } else {
        throw ValidationError("no output schema for '" + std::string(command) + "'");
    }
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.n_max < 1) throw ValidationError("--n-max must be >= 1");
    const auto t_all = std::chrono::steady_clock::now();
    json results = json::array();
    bool passed = true;
    for (int n = 1; n <= opts.n_max; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto ade = symbolic::divergent_form(n);
        const auto lhs = symbolic::quasi_tau(n);
        const auto rhs = symbolic::expand(ade);
        const auto cmp = symbolic::expr_equal(lhs, rhs);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log(err, LogLevel::Info, "n=" + std::to_string(n) + ": " + (cmp.equal ? "equal" : "MISMATCH") + ", " +
                                     std::to_string(lhs.size()) + " terms");
        json entry{{"n", n},
                   {"equal", cmp.equal},
                   {"term_count", lhs.size()},
                   {"atom_count", ade.size()},
                   {"seconds", secs}};
        if (!cmp.equal) {
            passed = false;
            entry["difference"] = cmp.difference.str();
        }
        results.push_back(std::move(entry));
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_all).count();
    json report{{"n_max", opts.n_max}, {"passed", passed}, {"results", results}, {"total_seconds", total}};

    if (opts.format == Format::Json) {
        write_json(out, report);
    } else if (opts.format == Format::Text) {
        for (const auto& e : results) {
            out << "n=" << e["n"].get<int>() << "  " << (e["equal"].get<bool>() ? "equal" : "MISMATCH") << "  terms="
                << e["term_count"].get<std::size_t>() << "  time=" << std::setprecision(3) << e["seconds"].get<double>() * 1e3 << std::setprecision(6)
                << " ms\n";
            if (e.contains("difference")) out << "  difference: " << e["difference"].get<std::string>() << '\n';
        }
    } else {
        out << "n,equal,term_count,atom_count,seconds\n";
        for (const auto& e : results)
            out << e["n"].get<int>() << ',' << (e["equal"].get<bool>() ? "true" : "false") << ','
                << e["term_count"].get<std::size_t>() << ',' << e["atom_count"].get<std::size_t>() << ','
                << fmt(e["seconds"].get<double>()) << '\n';
    }
    if (!passed) {
        for (const auto& e : results)
            if (e.contains("difference"))
                err << "mismatch at n=" << e["n"].get<int>() << ": " << e["difference"].get<std::string>() << '\n';
        return kMismatch;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// matrix

int cmd_matrix(const std::optional<ProblemDocument>& doc, const MatrixOptions& opts, std::ostream& out,
               std::ostream& err) {
    if (opts.pattern) {
        int n = 0;
        if (opts.n)
            n = *opts.n;
        else if (doc)
            n = doc->cs->n();
        else
            throw ValidationError("matrix --pattern needs --n or --input");
        if (n < 1) throw ValidationError("n must be >= 1");
        const SparsityPattern pat = sparsity_pattern(n);
        const int dim = pat.dim();
        log(err, LogLevel::Info, "pattern of F_" + std::to_string(dim) + ": " + std::to_string(pat.nonzeros()) +
                                     " nonzero entries");
        if (opts.format == Format::Json) {
            json entries = json::array();
            for (int r = 1; r <= dim; ++r)
                for (int c = 1; c <= dim; ++c)
                    if (pat.at(r, c).tag != EntryKind::Tag::Zero)
                        entries.push_back(json{{"row", r}, {"col", c}, {"kind", to_string(pat.at(r, c))}});
            write_json(out, json{{"n", n}, {"dim", dim}, {"pattern", entries}});
        } else if (opts.format == Format::Csv) {
            out << "row,col,kind\n";
            for (int r = 1; r <= dim; ++r)
                for (int c = 1; c <= dim; ++c)
                    if (pat.at(r, c).tag != EntryKind::Tag::Zero)
                        out << r << ',' << c << ",\"" << to_string(pat.at(r, c)) << "\"\n";
        } else {
            std::size_t width = 1;
            for (int r = 1; r <= dim; ++r)
                for (int c = 1; c <= dim; ++c)
                    if (pat.at(r, c).tag != EntryKind::Tag::Zero) width = std::max(width, to_string(pat.at(r, c)).size());
            for (int r = 1; r <= dim; ++r) {
                for (int c = 1; c <= dim; ++c) {
                    const auto& k = pat.at(r, c);
                    out << std::setw(static_cast<int>(width)) << (k.tag == EntryKind::Tag::Zero ? "." : to_string(k))
                        << (c == dim ? "\n" : "  ");
                }
            }
        }
        return kOk;
    }

    if (!doc) throw ValidationError("matrix needs --input (or --pattern)");
    std::vector<double> xs = opts.x.empty() ? doc->x : opts.x;
    if (xs.empty()) throw ValidationError("matrix: no evaluation points (use --x or the document's \"x\")");
    const CoefficientSet& cs = *doc->cs;
    for (double x : xs)
        if (!(x >= cs.a() && x <= cs.b())) throw ValidationError("matrix: x = " + fmt(x) + " outside [a, b]");
    const ShinZettlMatrix m(doc->cs);
    const int dim = m.dim();

    json mats = json::array();
    std::ostringstream text;
    for (double x : xs) {
        const Eigen::MatrixXcd F = eval_matrix(m, x, opts.side);
        json rows = json::array();
        for (int r = 0; r < dim; ++r) {
            json row = json::array();
            for (int c = 0; c < dim; ++c) row.push_back(complex_json(F(r, c)));
            rows.push_back(std::move(row));
        }
        mats.push_back(json{{"x", x}, {"entries", rows}});
        if (opts.format == Format::Text) {
            text << "x = " << fmt(x) << '\n';
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) text << fmt(F(r, c)) << (c + 1 == dim ? "\n" : "  ");
        } else if (opts.format == Format::Csv) {
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    text << fmt(x) << ',' << r + 1 << ',' << c + 1 << ',' << fmt(F(r, c).real()) << ','
                         << fmt(F(r, c).imag()) << '\n';
        }
    }
    if (opts.format == Format::Json)
        write_json(out, json{{"n", cs.n()}, {"dim", dim}, {"matrices", mats}});
    else if (opts.format == Format::Csv)
        out << "x,row,col,re,im\n" << text.str();
    else
        out << text.str();
    return kOk;
}

// ---------------------------------------------------------------------------
// apply

int cmd_apply(const ProblemDocument& doc, const ApplyOptions& opts, std::ostream& out, std::ostream& err) {
    if (!doc.y) throw ValidationError("apply: the document needs a test function \"y\"");
    const CoefficientSet& cs = *doc.cs;
    const SmoothFunction y = SmoothFunction::parse(*doc.y, 2 * cs.n() + 1);
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<cplx> primary = apply_tau(cs, y, doc.grid, opts.method, opts.jobs);
    std::vector<cplx> other;
    double deviation = 0.0;
    if (opts.cross_check) {
        const TauMethod alt = opts.method == TauMethod::Expanded ? TauMethod::Chain : TauMethod::Expanded;
        other = apply_tau(cs, y, doc.grid, alt, opts.jobs);
        if (opts.method == TauMethod::Chain) std::swap(primary, other);  // primary is always the expanded form
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < primary.size(); ++i) {
            num = std::max(num, std::abs(primary[i] - other[i]));
            den = std::max(den, std::abs(primary[i]));
        }
        deviation = den > 0.0 ? num / den : num;
    }
    log(err, LogLevel::Info, elapsed_log("apply", t0));

    if (opts.format == Format::Json) {
        json rows = json::array();
        for (std::size_t i = 0; i < doc.grid.size(); ++i) {
            json row{{"x", doc.grid[i]}};
            if (opts.cross_check) {
                row["expanded"] = complex_json(primary[i]);
                row["chain"] = complex_json(other[i]);
            } else {
                row["tau"] = complex_json(primary[i]);
            }
            rows.push_back(std::move(row));
        }
        json report{{"values", rows}};
        if (opts.cross_check) report["max_relative_deviation"] = deviation;
        write_json(out, report);
        return kOk;
    }
    const char sep = opts.format == Format::Csv ? ',' : ' ';
    if (opts.cross_check)
        out << "x" << sep << "re_expanded" << sep << "im_expanded" << sep << "re_chain" << sep << "im_chain\n";
    else
        out << "x" << sep << "re" << sep << "im\n";
    for (std::size_t i = 0; i < doc.grid.size(); ++i) {
        out << fmt(doc.grid[i]) << sep << fmt(primary[i].real()) << sep << fmt(primary[i].imag());
        if (opts.cross_check) out << sep << fmt(other[i].real()) << sep << fmt(other[i].imag());
        out << '\n';
    }
    if (opts.cross_check) out << "max_relative_deviation" << sep << fmt(deviation) << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const ProblemDocument& doc, std::ostream& out, std::ostream& err) {
    const CoefficientSet& cs = *doc.cs;
    const int dim = 2 * cs.n() + 1;
    const double x0 = doc.x0.value_or(cs.a());
    const double x1 = doc.x1.value_or(cs.b());
    Eigen::VectorXcd u0 = Eigen::VectorXcd::Zero(dim);
    if (doc.u0)
        for (int k = 0; k < dim; ++k) u0(k) = (*doc.u0)[static_cast<std::size_t>(k)];
    else
        u0(0) = 1.0;

    const IntegratorOptions iopts = integrator_options(doc.tolerances);
    const SpectralSystem sys(doc.cs, doc.lambda);
    IntegrationStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXcd u1 = integrate_system(sys, x0, u0, x1, iopts, &stats);
    const FundamentalMatrix fm = fundamental_matrix(doc.cs, doc.lambda, x0, x1, iopts);
    log(err, LogLevel::Info, elapsed_log("solve", t0));
    log(err, LogLevel::Debug, "accepted " + std::to_string(stats.accepted) + " steps, rejected " +
                                  std::to_string(stats.rejected));

    json u0j = json::array(), u1j = json::array();
    for (int k = 0; k < dim; ++k) {
        u0j.push_back(complex_json(u0(k)));
        u1j.push_back(complex_json(u1(k)));
    }
    write_json(out, json{{"lambda", complex_json(doc.lambda)},
                         {"x0", x0},
                         {"x1", x1},
                         {"u0", u0j},
                         {"u1", u1j},
                         {"stats",
                          {{"accepted", stats.accepted},
                           {"rejected", stats.rejected},
                           {"segments", stats.segments},
                           {"max_error_estimate", stats.max_error_estimate}}},
                         {"liouville_check", liouville_json(fm, cs)}});
    return kOk;
}

// ---------------------------------------------------------------------------
// eig

int cmd_eig(const ProblemDocument& doc, int jobs, std::ostream& out, std::ostream& err) {
    if (!doc.boundary) throw ValidationError("eig: the document needs \"boundary\"");
    if (!doc.search) throw ValidationError("eig: the document needs \"search\"");
    EigenOptions eopts;
    eopts.integrator = integrator_options(doc.tolerances);
    eopts.refine_tol = doc.tolerances.refine_tol;
    eopts.max_iter = doc.tolerances.max_iter;
    eopts.jobs = std::max(1, jobs);

    const auto t0 = std::chrono::steady_clock::now();
    const EigenSearchResult res = find_eigenvalues(*doc.boundary, *doc.search, eopts);
    log(err, LogLevel::Info, elapsed_log("eig", t0) + ", " + std::to_string(res.evaluations) + " determinant evaluations");
    for (const auto& w : res.warnings) log(err, LogLevel::Info, "warning: " + w);

    json eigs = json::array();
    for (const auto& e : res.eigenvalues)
        eigs.push_back(json{{"re", e.lambda.real()}, {"im", e.lambda.imag()}, {"residual", e.residual},
                            {"iterations", e.iterations}});

    cplx probe;
    if (!res.eigenvalues.empty())
        probe = res.eigenvalues.front().lambda;
    else if (const auto* ri = std::get_if<RealInterval>(&*doc.search))
        probe = 0.5 * (ri->lo + ri->hi);
    else {
        const auto& cr = std::get<ComplexRect>(*doc.search);
        probe = 0.5 * (cr.lower_left + cr.upper_right);
    }
    const CoefficientSet& cs = *doc.cs;
    const FundamentalMatrix fm = fundamental_matrix(doc.cs, probe, cs.a(), cs.b(), eopts.integrator);

    write_json(out, json{{"eigenvalues", eigs},
                         {"liouville_check", liouville_json(fm, cs)},
                         {"warnings", res.warnings},
                         {"evaluations", res.evaluations}});
    return kOk;
}

}  // namespace quasiode::cli

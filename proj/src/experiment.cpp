#include "krylreg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include "krylreg/csv.hpp"
#include "krylreg/sketch.hpp"
#include "krylreg/spectral.hpp"
#include "krylreg/svgplot.hpp"

namespace krylreg {

namespace {

namespace fs = std::filesystem;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Cell {
    const ProblemToken* tok = nullptr;
    double eps = 0.0;
    std::uint64_t seed = 0;
};

std::vector<Cell> expand_grid(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (const ProblemToken& tok : cfg.problems)
        for (double eps : cfg.epsilons)
            for (std::uint64_t seed : cfg.seeds)
                cells.push_back({&tok, eps, seed});
    return cells;
}

// Runs body(i) for i in [0, count) on a small pool; the caller's body must
// not throw (workers store their own failures).
template <typename F>
void parallel_for(std::size_t count, F&& body) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(count, hw ? hw : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
        });
    for (std::thread& t : pool) t.join();
}

struct MethodOut {
    Method method = Method::Lsqr;
    SolverTrace trace;
    double wall_ms = 0.0;
};

struct CellOut {
    std::vector<MethodOut> methods;
    Index k0 = -1;
    double wall_ms = 0.0;
    std::string error;  // nonempty marks the whole cell failed
};

CellOut compute_cell(const Cell& cell, const ExperimentConfig& cfg) {
    using clock = std::chrono::steady_clock;
    CellOut out;
    const auto cell_start = clock::now();
    try {
        const ProblemInstance inst = instantiate(*cell.tok, cell.eps, cell.seed);
        for (Method m : cfg.methods) {
            MethodOut mo;
            mo.method = m;
            const auto t0 = clock::now();
            mo.trace = run_method(m, inst, cfg.kmax);
            mo.wall_ms =
                std::chrono::duration<double, std::milli>(clock::now() - t0)
                    .count();
            if (m == Method::Tsvd) out.k0 = mo.trace.k_star;
            out.methods.push_back(std::move(mo));
        }
    } catch (const std::exception& e) {
        out.methods.clear();
        out.k0 = -1;
        out.error = e.what();
    }
    out.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - cell_start)
            .count();
    return out;
}

bool write_trace_csv(const fs::path& path, const MethodOut& mo,
                     std::ostream& log) {
    std::ofstream os(path);
    if (!os) {
        log << "cannot open " << path.string() << "\n";
        return false;
    }
    os << "# residual column: " << residual_description(mo.method) << "\n";
    os << "k,rel_error,residual\n";
    const std::size_t steps = mo.trace.rel_errors.size();
    for (std::size_t i = 0; i < steps; ++i)
        os << (i + 1) << ',' << format_double(mo.trace.rel_errors[i]) << ','
           << format_double(mo.trace.residuals[i]) << '\n';
    return true;
}

bool summary_order(const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.problem, a.epsilon, a.seed, a.method) <
           std::tie(b.problem, b.epsilon, b.seed, b.method);
}

// Problem tokens like picard(20,severe,1.5,1) contain commas, so text cells
// follow RFC 4180: fields holding a comma or quote are quoted, embedded
// quotes doubled. Numeric cells never need it.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "problem,n,epsilon,seed,method,k_star,best_error,k0\n";
    for (const SummaryRow& r : rows) {
        os << csv_field(r.problem) << ',' << r.n << ','
           << format_double(r.epsilon) << ',' << r.seed << ','
           << csv_field(r.method) << ',' << r.k_star << ','
           << format_double(r.best_error) << ',';
        if (r.k0 >= 0) os << r.k0;
        os << '\n';
    }
}

void write_timings_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "problem,n,epsilon,seed,method,wall_time_ms\n";
    for (const SummaryRow& r : rows)
        os << csv_field(r.problem) << ',' << r.n << ','
           << format_double(r.epsilon) << ',' << r.seed << ','
           << csv_field(r.method) << ','
           << format_double(r.wall_time_ms) << '\n';
}

struct AuditOutcome {
    bool any_error = false;
    bool any_below_threshold = false;
};

// Shared by the audit verb and by run with audits = true: per-cell
// inequality tables plus the sketch sharpness study.
AuditOutcome audit_cells(const ExperimentConfig& cfg, std::ostream& log) {
    AuditOutcome outcome;
    const std::vector<Cell> cells = expand_grid(cfg);

    struct AuditOut {
        AuditReport report;
        std::string error;
    };
    std::vector<AuditOut> results(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        try {
            const ProblemInstance inst =
                instantiate(*cells[i].tok, cells[i].eps, cells[i].seed);
            const Vector sigma = singular_values(inst.A);
            const BidiagFactorization fact =
                bidiagonalize(inst.A, inst.b, inst.A.cols(), true, false);
            results[i].report =
                audit_inequalities(inst.A, fact, sigma, cfg.kmax);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        if (!results[i].error.empty()) {
            log << "audit " << c.tok->token << " eps=" << fmt_g(c.eps)
                << " seed=" << c.seed << " failed: " << results[i].error
                << "\n";
            outcome.any_error = true;
            continue;
        }
        const AuditReport& rep = results[i].report;
        const fs::path path =
            cfg.output_dir / audit_filename(c.tok->token, c.eps, c.seed);
        std::ofstream os(path);
        if (!os) {
            log << "cannot open " << path.string() << "\n";
            outcome.any_error = true;
            continue;
        }
        write_audit_csv(os, rep);
        char rates[96];
        std::snprintf(rates, sizeof rates, "%.6f, above-floor %.6f",
                      rep.pass_rate(), rep.pass_rate_above_floor());
        log << "audit " << c.tok->token << " eps=" << fmt_g(c.eps)
            << " seed=" << c.seed << ": " << rep.passed << "/" << rep.total
            << " pass rate " << rates << "\n";
        if (rep.pass_rate() < 0.999) outcome.any_below_threshold = true;
    }

    try {
        std::vector<SpectrumSpec> spectra(4);
        spectra[0] = {SpectrumSpec::Kind::Severe, 1.5, 60, 0.5};
        spectra[1] = {SpectrumSpec::Kind::Severe, 2.0, 60, 0.5};
        spectra[2] = {SpectrumSpec::Kind::Moderate, 2.0, 60, 0.5};
        spectra[3] = {SpectrumSpec::Kind::Mild, 0.8, 60, 0.5};
        const SharpnessStudy study =
            sharpness_study(spectra, 5, 5, 100, cfg.seeds.at(0));
        const fs::path path = cfg.output_dir / "sharpness.csv";
        std::ofstream os(path);
        if (!os) {
            log << "cannot open " << path.string() << "\n";
            outcome.any_error = true;
        } else {
            write_sharpness_csv(os, study);
            for (const SharpnessSummary& s : study.medians) {
                char line[160];
                std::snprintf(line, sizeof line,
                              "sharpness %s: median gap ratio %.4f, "
                              "indicator fraction %.2f",
                              s.spectrum.c_str(), s.median_gap_ratio,
                              s.indicator_fraction);
                log << line << "\n";
            }
        }
    } catch (const std::exception& e) {
        log << "sharpness study failed: " << e.what() << "\n";
        outcome.any_error = true;
    }
    return outcome;
}

}  // namespace

std::string trace_filename(const std::string& token, Method method,
                           double epsilon, std::uint64_t seed) {
    return "trace_" + token + "_" + method_name(method) + "_" +
           fmt_g(epsilon) + "_" + std::to_string(seed) + ".csv";
}

std::string audit_filename(const std::string& token, double epsilon,
                           std::uint64_t seed) {
    return "audit_" + token + "_" + fmt_g(epsilon) + "_" +
           std::to_string(seed) + ".csv";
}

std::string plot_filename(const std::string& token, const std::string& epsilon,
                          const std::string& seed) {
    return "plot_" + token + "_" + epsilon + "_" + seed + ".svg";
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        log << "cannot create " << cfg.output_dir.string() << ": "
            << ec.message() << "\n";
        return 1;
    }

    const std::vector<Cell> cells = expand_grid(cfg);
    std::vector<CellOut> results(cells.size());
    parallel_for(cells.size(),
                 [&](std::size_t i) { results[i] = compute_cell(cells[i], cfg); });

    bool any_failed = false;
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        const CellOut& out = results[i];
        SummaryRow base;
        base.problem = c.tok->token;
        base.n = c.tok->n;
        base.epsilon = c.eps;
        base.seed = c.seed;
        base.k0 = out.k0;
        if (!out.error.empty()) {
            log << c.tok->token << " eps=" << fmt_g(c.eps) << " seed=" << c.seed
                << " failed: " << out.error << "\n";
            any_failed = true;
            SummaryRow row = base;
            row.method = "failed";
            row.k_star = 0;
            row.best_error = std::numeric_limits<double>::quiet_NaN();
            row.k0 = -1;
            row.wall_time_ms = out.wall_ms;
            rows.push_back(std::move(row));
            continue;
        }
        for (const MethodOut& mo : out.methods) {
            if (!write_trace_csv(cfg.output_dir / trace_filename(
                                     c.tok->token, mo.method, c.eps, c.seed),
                                 mo, log)) {
                any_failed = true;
                continue;
            }
            SummaryRow row = base;
            row.method = method_name(mo.method);
            row.k_star = mo.trace.k_star;
            row.best_error = mo.trace.best_error;
            row.wall_time_ms = mo.wall_ms;
            rows.push_back(std::move(row));
        }
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.0f", out.wall_ms);
        log << c.tok->token << " eps=" << fmt_g(c.eps) << " seed=" << c.seed
            << ": " << out.methods.size() << " methods in " << ms << " ms\n";
    }

    std::sort(rows.begin(), rows.end(), summary_order);
    {
        std::ofstream os(cfg.output_dir / "summary.csv");
        if (!os) {
            log << "cannot open summary.csv\n";
            return 1;
        }
        write_summary_csv(os, rows);
    }
    {
        std::ofstream os(cfg.output_dir / "timings.csv");
        if (!os) {
            log << "cannot open timings.csv\n";
            return 1;
        }
        write_timings_csv(os, rows);
    }
    log << "wrote summary.csv (" << rows.size() << " rows)\n";

    if (cfg.audits) {
        const AuditOutcome audits = audit_cells(cfg, log);
        any_failed = any_failed || audits.any_error;
        if (audits.any_below_threshold)
            log << "warning: an audit pass rate fell below 0.999\n";
    }
    return any_failed ? 1 : 0;
}

int run_audit(const ExperimentConfig& cfg, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        log << "cannot create " << cfg.output_dir.string() << ": "
            << ec.message() << "\n";
        return 1;
    }
    const AuditOutcome outcome = audit_cells(cfg, log);
    return (outcome.any_error || outcome.any_below_threshold) ? 1 : 0;
}

int plot_traces(const std::filesystem::path& dir, std::ostream& log) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        log << "plot: not a directory: " << dir.string() << "\n";
        return 2;
    }

    struct TraceRef {
        Method method = Method::Lsqr;
        fs::path path;
    };
    // Grouped by (problem token, epsilon text, seed text); the map keeps the
    // render order deterministic regardless of directory iteration order.
    std::map<std::tuple<std::string, std::string, std::string>,
             std::vector<TraceRef>>
        groups;
    bool bad = false;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("trace_", 0) != 0) continue;
        if (name.size() < 11 || name.substr(name.size() - 4) != ".csv")
            continue;
        // trace_{token}_{method}_{eps}_{seed}.csv, split from the right since
        // only the token may be long; canonical tokens contain no '_'.
        const std::string core = name.substr(6, name.size() - 10);
        const std::size_t p3 = core.rfind('_');
        const std::size_t p2 = p3 == std::string::npos
                                   ? std::string::npos
                                   : core.rfind('_', p3 - 1);
        const std::size_t p1 = p2 == std::string::npos || p2 == 0
                                   ? std::string::npos
                                   : core.rfind('_', p2 - 1);
        if (p1 == std::string::npos || p1 == 0) {
            log << "plot: unrecognized trace name " << name << "\n";
            bad = true;
            continue;
        }
        const std::string token = core.substr(0, p1);
        const std::string method_str = core.substr(p1 + 1, p2 - p1 - 1);
        const std::string eps_str = core.substr(p2 + 1, p3 - p2 - 1);
        const std::string seed_str = core.substr(p3 + 1);
        const bool seed_ok =
            !seed_str.empty() &&
            std::all_of(seed_str.begin(), seed_str.end(), [](unsigned char c) {
                return std::isdigit(c);
            });
        Method m;
        try {
            m = parse_method(method_str);
        } catch (const std::invalid_argument&) {
            log << "plot: unrecognized trace name " << name << "\n";
            bad = true;
            continue;
        }
        if (!seed_ok) {
            log << "plot: unrecognized trace name " << name << "\n";
            bad = true;
            continue;
        }
        groups[{token, eps_str, seed_str}].push_back({m, entry.path()});
    }

    if (groups.empty()) {
        log << "plot: no trace files in " << dir.string() << "\n";
        return 1;
    }

    for (auto& [key, refs] : groups) {
        const auto& [token, eps_str, seed_str] = key;
        std::sort(refs.begin(), refs.end(),
                  [](const TraceRef& a, const TraceRef& b) {
                      return static_cast<int>(a.method) <
                             static_cast<int>(b.method);
                  });
        std::vector<PlotSeries> series;
        for (const TraceRef& ref : refs) {
            try {
                const CsvTable table = read_csv(ref.path);
                const Index kc = table.column("k");
                const Index vc = table.column("rel_error");
                PlotSeries s;
                s.label = method_name(ref.method);
                for (const std::vector<double>& row : table.rows) {
                    s.k.push_back(row[static_cast<std::size_t>(kc)]);
                    s.value.push_back(row[static_cast<std::size_t>(vc)]);
                }
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < s.value.size(); ++i) {
                    if (s.value[i] < best) {
                        best = s.value[i];
                        s.k_star = static_cast<long long>(s.k[i]);
                    }
                }
                series.push_back(std::move(s));
            } catch (const std::exception& e) {
                log << "plot: " << e.what() << "\n";
                bad = true;
            }
        }
        if (series.empty()) {
            bad = true;
            continue;
        }
        const std::string title =
            token + ", eps=" + eps_str + ", seed=" + seed_str;
        const fs::path out_path =
            dir / plot_filename(token, eps_str, seed_str);
        std::ofstream os(out_path);
        if (!os) {
            log << "cannot open " << out_path.string() << "\n";
            bad = true;
            continue;
        }
        try {
            write_svg_plot(os, title, series);
        } catch (const std::exception& e) {
            log << "plot: " << e.what() << "\n";
            bad = true;
            continue;
        }
        log << "wrote " << out_path.filename().string() << "\n";
    }
    return bad ? 1 : 0;
}

}  // namespace krylreg

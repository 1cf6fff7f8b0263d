// skwidths: batch computations over the analytic-kernel convolution classes.
// Subcommands: widths, thresholds, verify, spline, sweep, selfcheck.
// Exit codes: 0 success, 1 usage error, 2 certification failure, 3 numerical failure.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skw/kushpel.hpp"
#include "skw/selfcheck.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNotCertified = 2, kNumerical = 3 };

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
std::string fmt(std::int64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%" PRId64, v);
    return buf;
}
std::string fmt(bool v) { return v ? "true" : "false"; }

// inclusive arithmetic progression "a:b:c", or a single value
std::vector<double> parse_drange(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    auto num = [](const std::string& t) {
        std::size_t pos = 0;
        double v = std::stod(t, &pos);
        if (pos != t.size()) throw CLI::ValidationError("range", "bad number: " + t);
        return v;
    };
    if (parts.size() == 1) return {num(parts[0])};
    if (parts.size() != 3) throw CLI::ValidationError("range", "expected VALUE or START:STOP:STEP");
    double a = num(parts[0]), b = num(parts[1]), c = num(parts[2]);
    if (!(c > 0.0) || b < a) throw CLI::ValidationError("range", "need STOP >= START and STEP > 0");
    auto count = static_cast<std::size_t>(std::floor((b - a) / c + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * c);
    return out;
}

std::vector<std::int64_t> parse_irange(const std::string& s) {
    std::vector<std::int64_t> out;
    for (double v : parse_drange(s)) {
        auto n = static_cast<std::int64_t>(std::llround(v));
        if (std::abs(v - static_cast<double>(n)) > 1e-9)
            throw CLI::ValidationError("range", "expected integers in n range");
        out.push_back(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// row-oriented writers with a fixed field order
// ---------------------------------------------------------------------------

struct Field {
    std::string key, value;
    bool quoted = false;  // JSON: emit as string
};
using Row = std::vector<Field>;

Field fnum(const std::string& k, double v) { return {k, fmt(v), false}; }
Field fint(const std::string& k, std::int64_t v) { return {k, fmt(v), false}; }
Field fbool(const std::string& k, bool v) { return {k, fmt(v), false}; }
Field fstr(const std::string& k, const std::string& v) { return {k, v, true}; }

std::string json_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += c;
    }
    return o;
}

void write_json(std::ostream& os, const std::string& command, const std::vector<Field>& params,
                const std::vector<Row>& rows, const std::vector<Row>& checks) {
    os << "{\"command\":\"" << command << "\",\"params\":{";
    for (std::size_t i = 0; i < params.size(); ++i) {
        os << (i ? "," : "") << "\"" << params[i].key << "\":";
        if (params[i].quoted)
            os << "\"" << json_escape(params[i].value) << "\"";
        else
            os << params[i].value;
    }
    os << "},\"rows\":[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << (r ? "," : "") << "{";
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            os << (i ? "," : "") << "\"" << rows[r][i].key << "\":";
            if (rows[r][i].quoted)
                os << "\"" << json_escape(rows[r][i].value) << "\"";
            else
                os << rows[r][i].value;
        }
        os << "}";
    }
    os << "],\"checks\":[";
    for (std::size_t r = 0; r < checks.size(); ++r) {
        os << (r ? "," : "") << "{";
        for (std::size_t i = 0; i < checks[r].size(); ++i) {
            os << (i ? "," : "") << "\"" << checks[r][i].key << "\":";
            if (checks[r][i].quoted)
                os << "\"" << json_escape(checks[r][i].value) << "\"";
            else
                os << checks[r][i].value;
        }
        os << "}";
    }
    os << "]}\n";
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
    if (rows.empty()) return;
    for (std::size_t i = 0; i < rows[0].size(); ++i) os << (i ? "," : "") << rows[0][i].key;
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i].value;
        os << "\n";
    }
}

void write_text(std::ostream& os, const std::vector<Row>& rows) {
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "  " : "") << row[i].key << "=" << row[i].value;
        os << "\n";
    }
}

void emit(const std::string& command, const std::string& format, const std::string& out_path,
          const std::vector<Field>& params, const std::vector<Row>& rows,
          const std::vector<Row>& checks = {}) {
    std::ostringstream buf;
    if (format == "json")
        write_json(buf, command, params, rows, checks);
    else if (format == "csv") {
        write_csv(buf, rows);
        if (!checks.empty()) write_csv(buf, checks);
    } else {
        write_text(buf, rows);
        write_text(buf, checks);
    }
    if (out_path.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + out_path);
        f << buf.str();
    }
}

struct CommonOpts {
    std::string h, beta = "0", n;
    double tol = 1e-14;
    std::string format = "text", out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_n) {
    cmd->add_option("--h", o.h, "strip half-width h > 0, value or START:STOP:STEP")->required();
    cmd->add_option("--beta", o.beta, "phase parameter, value or range");
    auto* n = cmd->add_option("--n", o.n, "order n >= 1, value or range");
    if (need_n) n->required();
    cmd->add_option("--tol", o.tol, "series tail tolerance (default 1e-14)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--out", o.out, "write output to PATH instead of stdout");
}

skw::SeriesConfig make_cfg(double tol) {
    if (!(tol > 0.0)) throw CLI::ValidationError("--tol", "must be > 0");
    skw::SeriesConfig cfg;
    cfg.abs_tol = tol;
    return cfg;
}

int cmd_widths(const CommonOpts& o, bool with_threshold_cols) {
    auto hs = parse_drange(o.h);
    auto bs = parse_drange(o.beta);
    auto ns = parse_irange(o.n);
    make_cfg(o.tol);
    struct Key {
        double h, beta;
        std::int64_t n;
    };
    std::vector<Key> keys;
    for (double h : hs)
        for (double b : bs)
            for (std::int64_t n : ns) keys.push_back({h, b, n});
    std::vector<Row> rows(keys.size());
    skw::parallel_for(keys.size(), [&](std::size_t i) {
        const auto& k = keys[i];
        skw::KernelParams p(k.h, k.beta);
        auto w = skw::extremal::best_approx_value(k.n, p);
        Row row{fint("n", w.n),
                fnum("h", k.h),
                fnum("beta", k.beta),
                fnum("value", w.value),
                fnum("theta", w.theta.theta),
                fnum("gamma_n", w.gamma_n),
                fint("n_star", w.n_star),
                fint("n_h", w.n_h),
                fbool("valid_E", w.valid_E),
                fbool("valid_width", w.valid_width)};
        if (with_threshold_cols) {
            row.push_back(fbool("remainder_ok", skw::thresholds::check_remainder_condition(k.n, p.q)));
            row.push_back(fbool("best_approx_ok", skw::thresholds::check_best_approx_condition(k.n, p)));
            row.push_back(fbool("classical_range", skw::thresholds::check_classical_range(k.h, k.beta)));
        }
        rows[i] = std::move(row);
    });
    std::vector<Field> params{fstr("h", o.h), fstr("beta", o.beta), fstr("n", o.n), fnum("tol", o.tol)};
    emit(with_threshold_cols ? "sweep" : "widths", o.format, o.out, params, rows);
    return kOk;
}

int cmd_thresholds(const CommonOpts& o) {
    auto hs = parse_drange(o.h);
    auto bs = parse_drange(o.beta);
    std::vector<Row> rows(hs.size());
    skw::parallel_for(hs.size(), [&](std::size_t i) {
        auto t = skw::thresholds::compute(hs[i]);
        double beta = bs.front();
        rows[i] = Row{fnum("h", t.h),
                      fint("n_star", t.n_star),
                      fint("n_h", t.n_h),
                      fstr("branch", t.branch == skw::thresholds::Branch::direct ? "direct" : "scanned"),
                      fbool("rho_condition_met", t.rho_condition_met),
                      fnum("beta", beta),
                      fbool("classical_range", skw::thresholds::check_classical_range(t.h, beta))};
    });
    std::vector<Field> params{fstr("h", o.h), fstr("beta", o.beta)};
    emit("thresholds", o.format, o.out, params, rows);
    return kOk;
}

int cmd_verify(const CommonOpts& o) {
    auto hs = parse_drange(o.h);
    auto bs = parse_drange(o.beta);
    auto ns = parse_irange(o.n);
    auto cfg = make_cfg(o.tol);
    bool all_certified = true;
    std::vector<Row> rows;
    std::vector<Row> checks;
    for (double h : hs)
        for (double beta : bs)
            for (std::int64_t n : ns) {
                skw::KernelParams p(h, beta);
                auto rep = skw::kushpel::verify_C(n, p, cfg);
                all_certified = all_certified && rep.certified;
                std::string pattern;
                if (!rep.summarized) {
                    std::size_t cap = std::min<std::size_t>(rep.signs.size(), 256);
                    for (std::size_t i = 0; i < cap; ++i)
                        pattern += rep.signs[i] > 0 ? '+' : (rep.signs[i] < 0 ? '-' : '0');
                    if (cap < rep.signs.size()) pattern += "...";
                } else {
                    pattern = "(summarized: global minimum over the period)";
                }
                rows.push_back(Row{fint("n", n),
                                   fnum("h", h),
                                   fnum("beta", beta),
                                   fnum("theta", rep.theta.theta),
                                   fnum("y0", rep.y0),
                                   fbool("satisfied", rep.satisfied),
                                   fbool("certified", rep.certified),
                                   fint("epsilon", rep.epsilon),
                                   fnum("margin", rep.margin),
                                   fbool("sufficient_ok", rep.sufficient_ok),
                                   fnum("lower_bound", rep.lower_bound),
                                   fbool("summarized", rep.summarized),
                                   fstr("signs", pattern)});
                skw::spline::NodeGrid grid(n, rep.y0);
                auto bd = skw::spline::gamma_breakdown(grid, p, cfg);
                checks.push_back(Row{fint("n", n),
                                     fnum("h", h),
                                     fnum("beta", beta),
                                     fnum("gamma1", bd.gamma[0]),
                                     fnum("gamma2", bd.gamma[1]),
                                     fnum("gamma3", bd.gamma[2]),
                                     fnum("gamma4", bd.gamma[3]),
                                     fnum("gamma5", bd.gamma[4]),
                                     fnum("sum_abs", bd.sum_abs),
                                     fnum("gamma_bound", bd.gamma_bound),
                                     fbool("bound_holds", bd.sum_abs <= bd.gamma_bound),
                                     fbool("remainder_ok", bd.remainder_ok),
                                     fbool("n_ok", bd.n_ok),
                                     fbool("exact", bd.exact)});
            }
    std::vector<Field> params{fstr("h", o.h), fstr("beta", o.beta), fstr("n", o.n), fnum("tol", o.tol)};
    emit("verify", o.format, o.out, params, rows, checks);
    return all_certified ? kOk : kNotCertified;
}

int cmd_spline(const CommonOpts& o, const std::optional<double>& y_opt) {
    auto hs = parse_drange(o.h);
    auto bs = parse_drange(o.beta);
    auto ns = parse_irange(o.n);
    auto cfg = make_cfg(o.tol);
    std::vector<Row> rows;
    for (double h : hs)
        for (double beta : bs)
            for (std::int64_t n : ns) {
                skw::KernelParams p(h, beta);
                double y = y_opt ? *y_opt
                                 : skw::extremal::solve_theta(n, p).theta * skw::kPi /
                                       static_cast<double>(n);
                skw::spline::NodeGrid grid(n, y);
                auto sys = skw::spline::build_fundamental_spline(grid, p, cfg);
                double interp_res = 0.0;
                for (std::int64_t k = 0; k < 2 * n; ++k) {
                    double want = k == 0 ? 1.0 : 0.0;
                    interp_res = std::max(interp_res,
                                          std::abs(sys.evaluate(grid.shifted_node(k)) - want));
                }
                double sum_alpha = 0.0;
                for (std::int64_t k = 1; k <= 2 * n; ++k)
                    sum_alpha += sys.alpha[static_cast<std::size_t>(k)];
                Row row{fint("n", n), fnum("h", h), fnum("beta", beta), fnum("y", y),
                        fnum("interp_residual", interp_res), fnum("sum_alpha", sum_alpha),
                        fnum("alpha0", sys.alpha[0])};
                for (std::int64_t l = 1; l <= 2 * n; ++l) {
                    auto lv = sys.lambda[static_cast<std::size_t>(l - 1)];
                    row.push_back(fnum("lambda" + std::to_string(l) + "_re", lv.real()));
                    row.push_back(fnum("lambda" + std::to_string(l) + "_im", lv.imag()));
                }
                for (std::int64_t k = 1; k <= 2 * n; ++k)
                    row.push_back(fnum("alpha" + std::to_string(k),
                                       sys.alpha[static_cast<std::size_t>(k)]));
                rows.push_back(std::move(row));
            }
    std::vector<Field> params{fstr("h", o.h), fstr("beta", o.beta), fstr("n", o.n), fnum("tol", o.tol)};
    emit("spline", o.format, o.out, params, rows);
    return kOk;
}

int cmd_selfcheck(const CommonOpts& o) {
    if (o.tol < 1e-16) {
        std::cerr << "selfcheck: tolerance " << o.tol << " is unreachable in binary64\n";
        return kNumerical;
    }
    auto results = skw::selfcheck::run_all(make_cfg(o.tol));
    std::vector<Row> checks;
    bool all = true;
    std::vector<std::string> failed;
    for (const auto& r : results) {
        all = all && r.pass;
        if (!r.pass) failed.push_back(r.name);
        checks.push_back(Row{fint("id", r.id), fstr("name", r.name), fbool("pass", r.pass),
                             fnum("seconds", r.seconds), fstr("detail", r.detail)});
    }
    std::vector<Field> params{fnum("tol", o.tol)};
    emit("selfcheck", o.format, o.out, params, {}, checks);
    if (!all) {
        std::cerr << "selfcheck failed:";
        for (const auto& name : failed) std::cerr << " " << name;
        std::cerr << "\n";
        return kNumerical;
    }
    return kOk;
}

int run_main(int argc, char** argv) {
    CLI::App app{"widths of analytic-kernel convolution classes: values, thresholds, "
                 "SK-spline sign certification"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // --h is a parameter, not help

    CommonOpts wo, to, vo, so, swo, sco;
    std::optional<double> spline_y;

    auto* widths = app.add_subcommand("widths", "best-approximation / width values");
    widths->set_help_flag("--help", "print help");
    add_common(widths, wo, true);
    auto* thresh = app.add_subcommand("thresholds", "validity thresholds n_h*, n_h and range flags");
    thresh->set_help_flag("--help", "print help");
    thresh->add_option("--h", to.h, "h, value or range")->required();
    thresh->add_option("--beta", to.beta, "beta for the classical-range flag");
    thresh->add_option("--format", to.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    thresh->add_option("--out", to.out, "output path");
    auto* verify = app.add_subcommand("verify", "certify the sign condition C_{y0,2n}");
    verify->set_help_flag("--help", "print help");
    add_common(verify, vo, true);
    auto* spline = app.add_subcommand("spline", "fundamental SK-spline system");
    spline->set_help_flag("--help", "print help");
    add_common(spline, so, true);
    spline->add_option("--y", spline_y, "node shift y in [0, pi/n) (default: y0 = theta pi/n)");
    auto* sweep = app.add_subcommand("sweep", "width rows plus threshold/condition columns");
    sweep->set_help_flag("--help", "print help");
    add_common(sweep, swo, true);
    auto* selfcheck = app.add_subcommand("selfcheck", "run the full oracle-equivalence suite");
    selfcheck->set_help_flag("--help", "print help");
    selfcheck->add_option("--tol", sco.tol, "series tail tolerance");
    selfcheck->add_option("--format", sco.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    selfcheck->add_option("--out", sco.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    try {
        if (widths->parsed()) return cmd_widths(wo, false);
        if (thresh->parsed()) return cmd_thresholds(to);
        if (verify->parsed()) return cmd_verify(vo);
        if (spline->parsed()) return cmd_spline(so, spline_y);
        if (sweep->parsed()) return cmd_widths(swo, true);
        if (selfcheck->parsed()) return cmd_selfcheck(sco);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return kNumerical;
    } catch (...) {
        std::cerr << "fatal: unknown error\n";
        return kNumerical;
    }
}

#include "pertkit/commands.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "pertkit/borel.hpp"
#include "pertkit/distribution.hpp"
#include "pertkit/extension.hpp"
#include "pertkit/saddle.hpp"
#include "pertkit/series.hpp"
#include "pertkit/toy_model.hpp"

namespace pertkit::cli {

namespace {

constexpr int kFormatVersion = 1;

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& w) : std::runtime_error(w) {}
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_fields(const nlohmann::json& cfg, const std::set<std::string>& allowed) {
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, val] : cfg.items()) {
        (void)val;
        if (!allowed.count(key)) throw ConfigError("unknown config field: \"" + key + "\"");
    }
    if (cfg.contains("format_version") && cfg["format_version"].get<int>() != kFormatVersion)
        throw ConfigError("unsupported format_version (expected " +
                          std::to_string(kFormatVersion) + ")");
}

std::string csv_header(const std::string& command, const nlohmann::json& effective,
                       const std::vector<std::string>& columns) {
    nlohmann::json meta{{"format_version", kFormatVersion},
                        {"command", command},
                        {"config", effective},
                        {"schema", columns}};
    std::ostringstream os;
    os << "# " << meta.dump() << "\n";
    for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    return os.str();
}

std::string json_output(const std::string& command, const nlohmann::json& effective,
                        nlohmann::json payload) {
    payload["metadata"] = {{"format_version", kFormatVersion},
                           {"command", command},
                           {"config", effective}};
    return payload.dump(2) + "\n";
}

// ---- series ---------------------------------------------------------------

CommandResult cmd_series(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "lambda", "max_order"});
    const double lambda = cfg.value("lambda", 0.02);
    const int max_order = cfg.value("max_order", 40);
    if (!(lambda > 0)) throw ConfigError("series: lambda must be positive");
    if (max_order < 0 || max_order > 400) throw ConfigError("series: max_order out of range");

    nlohmann::json eff{{"format_version", kFormatVersion},
                       {"lambda", lambda},
                       {"max_order", max_order}};
    const auto s = series::toy_series(max_order);
    const auto exact = toy::z_exact(lambda);

    std::ostringstream os;
    os << csv_header("series", eff, {"N", "Z_N", "abs_err"});
    for (int N = 0; N <= max_order; ++N) {
        const double zn = series::partial_sum(s, lambda, N);
        os << N << "," << fmt(zn) << "," << fmt(std::abs(zn - exact.value)) << "\n";
    }
    return {0, os.str(), ""};
}

// ---- sweep ----------------------------------------------------------------

CommandResult cmd_sweep(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "lambda_grid", "max_order", "borel_order"});
    std::vector<double> grid = cfg.value("lambda_grid", std::vector<double>{});
    if (grid.empty())
        for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
    const int max_order = cfg.value("max_order", 40);
    const int borel_order = cfg.value("borel_order", 12);
    for (double l : grid)
        if (!(l > 0) || l > 1.0) throw ConfigError("sweep: lambda grid must lie in (0, 1]");

    nlohmann::json eff{{"format_version", kFormatVersion},
                       {"lambda_grid", grid},
                       {"max_order", max_order},
                       {"borel_order", borel_order}};
    const auto s = series::toy_series(max_order);

    std::vector<std::string> cols{"lambda", "Z_exact"};
    for (int N = 1; N <= 12; ++N) cols.push_back("Z_" + std::to_string(N));
    cols.push_back("BorelSum");

    std::ostringstream os;
    os << csv_header("sweep", eff, cols);
    for (double lambda : grid) {
        os << fmt(lambda) << "," << fmt(toy::z_exact(lambda).value);
        for (int N = 1; N <= 12; ++N) os << "," << fmt(series::partial_sum(s, lambda, N));
        os << "," << fmt(borel::borel_sum(s, lambda, borel_order, borel_order).value) << "\n";
    }
    return {0, os.str(), ""};
}

// ---- borel ----------------------------------------------------------------

CommandResult cmd_borel(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "lambda", "L", "M", "max_order"});
    const double lambda = cfg.value("lambda", 0.02);
    const int L = cfg.value("L", 12);
    const int M = cfg.value("M", 12);
    const int max_order = cfg.value("max_order", 40);
    if (!(lambda > 0)) throw ConfigError("borel: lambda must be positive");
    if (L < 0 || M < 0 || L + M + 1 > max_order + 1) throw ConfigError("borel: bad orders");

    nlohmann::json eff{{"format_version", kFormatVersion},
                       {"lambda", lambda},
                       {"L", L},
                       {"M", M},
                       {"max_order", max_order}};
    const auto s = series::toy_series(max_order);
    const auto r = borel::borel_sum(s, lambda, L, M);
    const auto exact = toy::z_exact(lambda);

    nlohmann::json payload{{"value", r.value},
                           {"z_exact", exact.value},
                           {"abs_err_vs_exact", std::abs(r.value - exact.value)},
                           {"diagnostics", r.diagnostics.to_json()}};
    return {0, json_output("borel", eff, payload), ""};
}

// ---- saddle ---------------------------------------------------------------

CommandResult cmd_saddle(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "lambda"});
    const double lambda = cfg.value("lambda", 0.02);
    if (!(lambda > 0)) throw ConfigError("saddle: lambda must be positive");
    nlohmann::json eff{{"format_version", kFormatVersion}, {"lambda", lambda}};

    nlohmann::json payload = saddle::saddle_table_json(lambda);
    if (lambda < 1.0) {
        const auto k = saddle::crossover_order(lambda);
        payload["crossover"] = {{"k_paper", k.k_paper}, {"k_exact", k.k_exact}};
    }
    return {0, json_output("saddle", eff, payload), ""};
}

// ---- sd -------------------------------------------------------------------

CommandResult cmd_sd(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "distribution", "probes", "grid_levels"});
    if (!cfg.contains("distribution")) throw ConfigError("sd: missing \"distribution\"");
    dist::Distribution T = dist::Distribution::from_json(cfg["distribution"]);

    std::vector<dist::TestFunction> probes;
    if (cfg.contains("probes"))
        for (const auto& jp : cfg["probes"]) probes.push_back(dist::TestFunction::from_json(jp));
    if (probes.empty()) {
        probes.push_back(dist::TestFunction::bump(T.dimension(), 0.4, 0.25));
        probes.push_back(dist::TestFunction::bump(T.dimension(), 0.6, 0.3));
    }
    const int levels = cfg.value("grid_levels", 10);

    nlohmann::json jp = nlohmann::json::array();
    for (const auto& p : probes) jp.push_back(p.to_json());
    nlohmann::json eff{{"format_version", kFormatVersion},
                       {"distribution", cfg["distribution"]},
                       {"probes", jp},
                       {"grid_levels", levels}};

    dist::ScalingReport rep =
        dist::estimate_scaling_degree(T, probes, dist::dyadic_lambda_grid(levels));

    std::ostringstream os;
    std::vector<std::string> cols{"lambda"};
    for (size_t i = 0; i < probes.size(); ++i) cols.push_back("probe_" + std::to_string(i));
    nlohmann::json meta{{"format_version", kFormatVersion},
                        {"command", "sd"},
                        {"config", eff},
                        {"schema", cols},
                        {"fitted_degree", rep.fitted_degree},
                        {"regression_r2", rep.regression_r2},
                        {"confident", rep.confident},
                        {"exact", rep.exact}};
    os << "# " << meta.dump() << "\n";
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (size_t i = 0; i < rep.lambda_grid.size(); ++i) {
        os << fmt(rep.lambda_grid[i]);
        for (const auto& s : rep.samples) os << "," << fmt(i < s.size() ? s[i] : 0.0);
        os << "\n";
    }
    return {0, os.str(), ""};
}

// ---- extend (renormalization report) ---------------------------------------

struct KernelChoice {
    dist::KernelFn kernel;
    int n;
    double expected_sd;
};

KernelChoice kernel_choice(const std::string& tag) {
    if (tag == "inv_abs") return {dist::kernel_from_tag("inv_abs"), 1, 1.0};
    if (tag == "inv_r4") return {dist::kernel_from_tag("inv_r4"), 4, 4.0};
    if (tag == "inv_r6") return {dist::kernel_from_tag("inv_r6"), 4, 6.0};
    throw ConfigError("extend: unknown kernel tag \"" + tag +
                      "\" (expected inv_abs, inv_r4 or inv_r6)");
}

CommandResult cmd_extend(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "kernel", "cutoff", "counterterms", "probes", "rg"});
    const std::string tag = cfg.value("kernel", std::string("inv_abs"));
    KernelChoice kc = kernel_choice(tag);

    renorm::CutoffFunction w;
    if (cfg.contains("cutoff")) w = renorm::CutoffFunction::from_json(cfg["cutoff"]);

    renorm::CountertermMap cts;
    if (cfg.contains("counterterms"))
        for (const auto& [key, val] : cfg["counterterms"].items())
            cts[std::stoi(key)] = val.get<double>();

    std::vector<dist::TestFunction> probes;
    if (cfg.contains("probes"))
        for (const auto& jp : cfg["probes"]) probes.push_back(dist::TestFunction::from_json(jp));
    if (probes.empty())
        probes.push_back(dist::TestFunction::normalized_bump(kc.n, 0.0, 0.8));

    nlohmann::json jprobes = nlohmann::json::array();
    for (const auto& p : probes) jprobes.push_back(p.to_json());
    nlohmann::json jcts = nlohmann::json::object();
    for (const auto& [k, v] : cts) jcts[std::to_string(k)] = v;
    nlohmann::json eff{{"format_version", kFormatVersion}, {"kernel", tag},
                       {"cutoff", w.to_json()},            {"counterterms", jcts},
                       {"probes", jprobes}};

    // estimated scaling degree from punctured probes
    dist::Distribution T0 =
        dist::Distribution::regular(kc.n, kc.kernel, /*punctured=*/true);
    std::vector<dist::TestFunction> punctured{
        dist::TestFunction::bump(kc.n, 0.4, 0.25), dist::TestFunction::bump(kc.n, 0.6, 0.3)};
    dist::ScalingReport sd_rep = dist::estimate_scaling_degree(T0, punctured);
    const double omega = std::max(0.0, kc.expected_sd - kc.n);

    renorm::ExtendedDistribution ext =
        renorm::extend_renormalized(kc.kernel, kc.n, omega, w, cts);

    nlohmann::json values = nlohmann::json::array();
    for (const auto& p : probes) values.push_back(ext.apply(p));

    // w-independence residual on an order-omega-vanishing probe
    renorm::CutoffFunction w_alt = w;
    if (w.kind == renorm::CutoffKind::smoothed_step)
        w_alt.M = w.M * 1.7;
    else
        w_alt.radius = w.radius * 0.6;
    std::vector<double> vanish_poly(static_cast<size_t>(std::floor(omega)) + 2, 0.0);
    vanish_poly.back() = 1.0;  // x^{floor(omega)+1} prefactor
    dist::TestFunction vanishing =
        dist::TestFunction::bump(kc.n, 0.0, 0.8, vanish_poly);
    const double w_resid =
        renorm::w_independence_check(kc.kernel, kc.n, omega, w, w_alt, vanishing);

    const auto counts = renorm::counterterm_dimension(kc.n, omega);

    nlohmann::json payload{
        {"kernel", tag},
        {"dimension", kc.n},
        {"estimated_sd", sd_rep.fitted_degree},
        {"sd_regression_r2", sd_rep.regression_r2},
        {"omega", omega},
        {"counterterm_count",
         {{"total", counts.total}, {"rotation_invariant", counts.rotation_invariant}}},
        {"extension_values", values},
        {"w_independence_residual", w_resid},
        {"descriptor", ext.descriptor()}};

    // RG-flow table for the n=1 log-divergent kernel
    if (tag == "inv_abs") {
        nlohmann::json rg_cfg = cfg.value("rg", nlohmann::json::object());
        const double M0 = rg_cfg.value("M0", 1000.0);
        const double ratio = rg_cfg.value("ratio", 2.0);
        const int count = rg_cfg.value("count", 4);
        const double smoothing = rg_cfg.value("smoothing", 1e-3);
        eff["rg"] = {{"M0", M0}, {"ratio", ratio}, {"count", count}, {"smoothing", smoothing}};

        dist::TestFunction probe = dist::TestFunction::normalized_bump(1, 0.0, 1.0);
        const double phi0 = probe(0.0);
        nlohmann::json rows = nlohmann::json::array();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::vector<double> Ms, vals;
        double Mcur = M0;
        for (int i = 0; i < count; ++i, Mcur *= ratio) Ms.push_back(Mcur);
        for (double Mv : Ms) {
            renorm::CutoffFunction wm{renorm::CutoffKind::smoothed_step, Mv, smoothing, 1.0};
            renorm::ExtendedDistribution tm =
                renorm::extend_renormalized(kc.kernel, 1, 0.0, wm, cts);
            const double v = tm.apply(probe);
            vals.push_back(v);
            rows.push_back({{"M", Mv}, {"value", v}});
            const double x = std::log(Mv);
            sx += x; sy += v; sxx += x * x; sxy += x * v;
        }
        const int m = static_cast<int>(Ms.size());
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        payload["rg_flow"] = {{"table", rows},
                              {"fitted_slope", slope},
                              {"slope_over_phi0", slope / phi0},
                              {"expected_slope_over_phi0", 2.0}};
    }

    return {0, json_output("extend", eff, payload), ""};
}

// ---- rgflow ----------------------------------------------------------------

CommandResult cmd_rgflow(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version", "M0", "ratio", "count", "smoothing", "probe"});
    const double M0 = cfg.value("M0", 1000.0);
    const double ratio = cfg.value("ratio", 2.0);
    const int count = cfg.value("count", 5);
    const double smoothing = cfg.value("smoothing", 1e-3);
    if (!(M0 > 0) || !(ratio > 1) || count < 2) throw ConfigError("rgflow: bad grid parameters");

    dist::TestFunction probe = cfg.contains("probe")
                                   ? dist::TestFunction::from_json(cfg["probe"])
                                   : dist::TestFunction::normalized_bump(1, 0.0, 1.0);
    const double phi0 = probe(0.0);

    nlohmann::json eff{{"format_version", kFormatVersion}, {"M0", M0},
                       {"ratio", ratio},                   {"count", count},
                       {"smoothing", smoothing},           {"probe", probe.to_json()}};

    std::ostringstream os;
    os << csv_header("rgflow", eff, {"M", "value", "predicted_2lnM_law"});
    dist::KernelFn kernel = dist::kernel_from_tag("inv_abs");
    double Mv = M0;
    double base = 0.0;
    for (int i = 0; i < count; ++i, Mv *= ratio) {
        renorm::CutoffFunction wm{renorm::CutoffKind::smoothed_step, Mv, smoothing, 1.0};
        renorm::ExtendedDistribution tm = renorm::extend_renormalized(kernel, 1, 0.0, wm, {});
        const double v = tm.apply(probe);
        if (i == 0) base = v;
        const double predicted = base + 2.0 * std::log(Mv / M0) * phi0;
        os << fmt(Mv) << "," << fmt(v) << "," << fmt(predicted) << "\n";
    }
    return {0, os.str(), ""};
}

// ---- report ----------------------------------------------------------------

CommandResult cmd_report(const nlohmann::json& cfg) {
    check_fields(cfg, {"format_version"});
    nlohmann::json eff{{"format_version", kFormatVersion}};

    nlohmann::json checks = nlohmann::json::array();
    bool all_pass = true;
    auto check = [&](const std::string& name, double value, double expected, double tol) {
        const bool pass = std::abs(value - expected) <= tol;
        all_pass = all_pass && pass;
        checks.push_back({{"name", name},
                          {"value", value},
                          {"expected", expected},
                          {"tolerance", tol},
                          {"pass", pass}});
    };

    const auto s = series::toy_series(40);
    const double sqrt_pi = std::sqrt(M_PI);
    check("z_exact(1/50)", toy::z_exact(0.02).value, 1.7478812, 5e-7);
    check("Z_5(1/50)", series::partial_sum(s, 0.02, 5), 1.7478728, 1e-7);
    check("Z_10(1/50)", series::partial_sum(s, 0.02, 10), 1.7478818, 1e-7);
    check("z_exact(0)", toy::z_exact(0.0).value, sqrt_pi, 1e-10);
    check("borel[12/12](1/50)", borel::borel_sum(s, 0.02, 12, 12).value,
          toy::z_exact(0.02).value, 1e-5);

    const auto fit = series::fit_strong_asymptotic(s);
    check("growth_sigma", fit.sigma, 4.0, 0.2);

    const auto saddles = saddle::find_saddles();
    check("saddle_scale(1/50)", saddle::nonperturbative_scale(saddles[1], 0.02),
          std::exp(-12.5), 1e-14 * std::exp(-12.5));
    check("saddle_u0_contribution", saddle::leading_contribution(saddles[0], 0.02).real(),
          sqrt_pi, 1e-12);

    const auto c42 = renorm::counterterm_dimension(4, 2.0);
    check("counterterms(4,2)_total", static_cast<double>(c42.total), 15.0, 0.0);
    check("counterterms(4,2)_invariant", static_cast<double>(c42.rotation_invariant), 2.0, 0.0);

    dist::TestFunction probe = dist::TestFunction::normalized_bump(1, 0.0, 1.0);
    const double flow = renorm::rg_flow_difference(1000.0, 2000.0, 1e-3, probe);
    check("rg_flow(M,2M)/phi0", flow / probe(0.0), 2.0 * std::log(2.0), 1e-3);

    nlohmann::json payload{{"checks", checks}, {"all_pass", all_pass}};
    CommandResult res{0, json_output("report", eff, payload), ""};
    if (!all_pass) {
        res.exit_code = 3;
        res.error_json =
            nlohmann::json{{"error", {{"code", "numerical"}, {"message", "report checks failed"}}}}
                .dump();
    }
    return res;
}

}  // namespace

bool known_command(const std::string& command) {
    static const std::set<std::string> cmds{"series", "sweep", "borel", "saddle",
                                            "sd",     "extend", "rgflow", "report"};
    return cmds.count(command) > 0;
}

std::string command_list() { return "series|sweep|borel|saddle|sd|extend|rgflow|report"; }

CommandResult run_command(const std::string& command, const nlohmann::json& config) {
    try {
        if (command == "series") return cmd_series(config);
        if (command == "sweep") return cmd_sweep(config);
        if (command == "borel") return cmd_borel(config);
        if (command == "saddle") return cmd_saddle(config);
        if (command == "sd") return cmd_sd(config);
        if (command == "extend") return cmd_extend(config);
        if (command == "rgflow") return cmd_rgflow(config);
        if (command == "report") return cmd_report(config);
        return {2, "",
                nlohmann::json{{"error",
                                {{"code", "config"},
                                 {"message", "unknown command: " + command},
                                 {"commands", command_list()}}}}
                    .dump()};
    } catch (const ConfigError& e) {
        return {2, "",
                nlohmann::json{{"error", {{"code", "config"}, {"message", e.what()}}}}.dump()};
    } catch (const nlohmann::json::exception& e) {
        return {2, "",
                nlohmann::json{{"error", {{"code", "config"}, {"message", e.what()}}}}.dump()};
    } catch (const std::invalid_argument& e) {
        return {2, "",
                nlohmann::json{{"error", {{"code", "config"}, {"message", e.what()}}}}.dump()};
    } catch (const std::exception& e) {
        return {3, "",
                nlohmann::json{{"error", {{"code", "numerical"}, {"message", e.what()}}}}.dump()};
    }
}

}  // namespace pertkit::cli

#include "periscope/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "periscope/frobenius.hpp"
#include "periscope/trace.hpp"

namespace periscope {

using nlohmann::ordered_json;

namespace {

/// Locale-free shortest round-trip formatting; CSV and console numbers.
std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

[[noreturn]] void config_error(const std::string& message) {
    throw Error(ErrorCode::invalid_argument, "config: " + message);
}

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            config_error("unknown key '" + item.key() + "' in " + context);
}

double finite_number(const ordered_json& j, const std::string& context) {
    if (!j.is_number()) config_error(context + " must be a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) config_error(context + " must be finite");
    return v;
}

Vec vec_field(const ordered_json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) config_error(context + " must be a non-empty array");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = finite_number(j[i], context);
    return v;
}

ScalarField parse_mirror(const ordered_json& mirror, std::size_t field_dim) {
    reject_unknown_keys(mirror, {"family", "params", "gradient-mode", "fd-step"}, "mirror");
    if (!mirror.contains("family") || !mirror["family"].is_string())
        config_error("mirror.family must be a string");
    FieldFamily family = field_family_from_string(mirror["family"].get<std::string>());
    if (!mirror.contains("params") || !mirror["params"].is_object())
        config_error("mirror.params must be an object");
    const ordered_json& params = mirror["params"];

    ScalarField field = ScalarField::constant(field_dim, 0.0);
    switch (family) {
        case FieldFamily::constant: {
            reject_unknown_keys(params, {"value"}, "mirror.params");
            field = ScalarField::constant(field_dim, finite_number(params.at("value"), "value"));
            break;
        }
        case FieldFamily::affine: {
            reject_unknown_keys(params, {"offset", "coeffs"}, "mirror.params");
            Vec coeffs = vec_field(params.at("coeffs"), "coeffs");
            if (coeffs.dim() != field_dim) config_error("coeffs length must match the dimension");
            field = ScalarField::affine(finite_number(params.at("offset"), "offset"), coeffs);
            break;
        }
        case FieldFamily::quadratic: {
            reject_unknown_keys(params, {"offset", "linear", "quad"}, "mirror.params");
            Vec linear = vec_field(params.at("linear"), "linear");
            if (linear.dim() != field_dim) config_error("linear length must match the dimension");
            const ordered_json& rows = params.at("quad");
            if (!rows.is_array() || rows.size() != field_dim)
                config_error("quad must be a dim x dim matrix");
            std::vector<double> quad;
            for (const auto& r : rows) {
                Vec row = vec_field(r, "quad row");
                if (row.dim() != field_dim) config_error("quad must be a dim x dim matrix");
                for (std::size_t i = 0; i < field_dim; ++i) quad.push_back(row[i]);
            }
            field = ScalarField::quadratic(finite_number(params.at("offset"), "offset"), linear,
                                           std::move(quad));
            break;
        }
        case FieldFamily::gaussian_bump: {
            reject_unknown_keys(params, {"offset", "amplitude", "center", "sigma"}, "mirror.params");
            Vec center = vec_field(params.at("center"), "center");
            if (center.dim() != field_dim) config_error("center length must match the dimension");
            field = ScalarField::gaussian_bump(finite_number(params.at("offset"), "offset"),
                                               finite_number(params.at("amplitude"), "amplitude"),
                                               center, finite_number(params.at("sigma"), "sigma"));
            break;
        }
        case FieldFamily::sum_of_bumps: {
            reject_unknown_keys(params, {"offset", "bumps"}, "mirror.params");
            const ordered_json& bumps_json = params.at("bumps");
            if (!bumps_json.is_array()) config_error("bumps must be an array");
            std::vector<Bump> bumps;
            for (const auto& b : bumps_json) {
                reject_unknown_keys(b, {"amplitude", "center", "sigma"}, "bump");
                Vec center = vec_field(b.at("center"), "bump center");
                if (center.dim() != field_dim)
                    config_error("bump center length must match the dimension");
                bumps.push_back(Bump{finite_number(b.at("amplitude"), "amplitude"), center,
                                     finite_number(b.at("sigma"), "sigma")});
            }
            field = ScalarField::sum_of_bumps(field_dim, finite_number(params.at("offset"), "offset"),
                                              std::move(bumps));
            break;
        }
    }
    return field;
}

ordered_json mirror_to_json(const ScenarioConfig& config) {
    ordered_json mirror;
    mirror["family"] = to_string(config.mirror.family());
    ordered_json params;
    const ScalarField& f = config.mirror;
    switch (f.family()) {
        case FieldFamily::constant:
            params["value"] = f.offset();
            break;
        case FieldFamily::affine:
            params["offset"] = f.offset();
            params["coeffs"] = f.linear().components();
            break;
        case FieldFamily::quadratic: {
            params["offset"] = f.offset();
            params["linear"] = f.linear().components();
            ordered_json rows = ordered_json::array();
            for (std::size_t i = 0; i < f.dim(); ++i) {
                ordered_json row = ordered_json::array();
                for (std::size_t j = 0; j < f.dim(); ++j) row.push_back(f.quad()[i * f.dim() + j]);
                rows.push_back(row);
            }
            params["quad"] = rows;
            break;
        }
        case FieldFamily::gaussian_bump:
            params["offset"] = f.offset();
            params["amplitude"] = f.bumps()[0].amplitude;
            params["center"] = f.bumps()[0].center.components();
            params["sigma"] = f.bumps()[0].sigma;
            break;
        case FieldFamily::sum_of_bumps: {
            params["offset"] = f.offset();
            ordered_json bumps = ordered_json::array();
            for (const Bump& b : f.bumps()) {
                ordered_json bj;
                bj["amplitude"] = b.amplitude;
                bj["center"] = b.center.components();
                bj["sigma"] = b.sigma;
                bumps.push_back(bj);
            }
            params["bumps"] = bumps;
            break;
        }
    }
    mirror["params"] = params;
    mirror["gradient-mode"] = config.gradient_mode;
    if (config.gradient_mode == "finite-difference") mirror["fd-step"] = config.fd_step;
    return mirror;
}

} // namespace

const char* to_string(ScenarioKind kind) {
    return kind == ScenarioKind::spherical ? "spherical" : "reversed";
}

const char* to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::synthesize: return "synthesize";
        case CheckKind::trace: return "trace";
        case CheckKind::frobenius: return "frobenius";
    }
    return "unknown";
}

std::map<std::string, double> default_tolerances() {
    return {{"synthesize", 1e-10}, {"trace", 1e-9}, {"frobenius", 1e-5}};
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    ordered_json root;
    try {
        root = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        // Parse errors carry line/column diagnostics; overflow of literals
        // like 1e999 surfaces here as well.
        throw Error(ErrorCode::invalid_argument, std::string("config: ") + e.what());
    }
    if (!root.is_object()) config_error("top level must be an object");
    reject_unknown_keys(root,
                        {"scenario", "dimension", "C", "mirror", "patch", "domain", "grid",
                         "checks", "tolerances", "frobenius", "output"},
                        "config");

    ScenarioConfig config;
    if (!root.contains("scenario") || !root["scenario"].is_string())
        config_error("scenario must be \"spherical\" or \"reversed\"");
    std::string kind = root["scenario"].get<std::string>();
    if (kind == "spherical")
        config.scenario = ScenarioKind::spherical;
    else if (kind == "reversed")
        config.scenario = ScenarioKind::reversed;
    else
        config_error("scenario must be \"spherical\" or \"reversed\"");

    if (!root.contains("dimension") || !root["dimension"].is_number_integer())
        config_error("dimension must be an integer");
    long long dim = root["dimension"].get<long long>();
    if (dim < 2 || dim > 16) config_error("dimension must lie in [2, 16]");
    config.dimension = static_cast<std::size_t>(dim);
    const std::size_t chart_dim = config.dimension - 1;
    const std::size_t field_dim =
        config.scenario == ScenarioKind::spherical ? config.dimension : chart_dim;

    if (!root.contains("C")) config_error("C is required");
    config.C = finite_number(root["C"], "C");

    if (!root.contains("mirror") || !root["mirror"].is_object())
        config_error("mirror must be an object");
    config.mirror = parse_mirror(root["mirror"], field_dim);
    config.mirror_family = to_string(config.mirror.family());
    if (root["mirror"].contains("gradient-mode")) {
        if (!root["mirror"]["gradient-mode"].is_string())
            config_error("gradient-mode must be a string");
        config.gradient_mode = root["mirror"]["gradient-mode"].get<std::string>();
    }
    if (config.gradient_mode != "analytic" && config.gradient_mode != "finite-difference")
        config_error("gradient-mode must be \"analytic\" or \"finite-difference\"");
    if (root["mirror"].contains("fd-step"))
        config.fd_step = finite_number(root["mirror"]["fd-step"], "fd-step");
    if (!(config.fd_step > 0.0)) config_error("fd-step must be positive");
    if (config.gradient_mode == "finite-difference")
        config.mirror = config.mirror.with_fd_gradient(config.fd_step);

    if (config.scenario == ScenarioKind::spherical) {
        if (!root.contains("patch") || !root["patch"].is_object())
            config_error("spherical scenarios require a patch object");
        if (root.contains("domain")) config_error("spherical scenarios take no domain");
        reject_unknown_keys(root["patch"], {"base", "radius"}, "patch");
        config.patch_base = vec_field(root["patch"].at("base"), "patch.base");
        if (config.patch_base.dim() != config.dimension)
            config_error("patch.base length must equal the dimension");
        config.patch_radius = finite_number(root["patch"].at("radius"), "patch.radius");
    } else {
        if (!root.contains("domain") || !root["domain"].is_object())
            config_error("reversed scenarios require a domain object");
        if (root.contains("patch")) config_error("reversed scenarios take no patch");
        reject_unknown_keys(root["domain"], {"min", "max"}, "domain");
        config.domain_min = vec_field(root["domain"].at("min"), "domain.min");
        config.domain_max = vec_field(root["domain"].at("max"), "domain.max");
        if (config.domain_min.dim() != chart_dim || config.domain_max.dim() != chart_dim)
            config_error("domain.min/max length must equal dimension - 1");
    }

    if (!root.contains("grid") || !root["grid"].is_object())
        config_error("grid must be an object");
    reject_unknown_keys(root["grid"], {"counts"}, "grid");
    const ordered_json& counts = root["grid"].at("counts");
    if (!counts.is_array() || counts.size() != chart_dim)
        config_error("grid.counts must list one count per chart axis (dimension - 1)");
    for (const auto& c : counts) {
        if (!c.is_number_integer()) config_error("grid.counts entries must be integers");
        long long v = c.get<long long>();
        if (v < 1 || v > 10000) config_error("grid.counts entries must lie in [1, 10000]");
        config.grid_counts.push_back(static_cast<std::size_t>(v));
    }

    if (!root.contains("checks") || !root["checks"].is_array())
        config_error("checks must be an array");
    for (const auto& c : root["checks"]) {
        if (!c.is_string()) config_error("checks entries must be strings");
        std::string name = c.get<std::string>();
        if (name == "synthesize")
            config.checks.push_back(CheckKind::synthesize);
        else if (name == "trace")
            config.checks.push_back(CheckKind::trace);
        else if (name == "frobenius")
            config.checks.push_back(CheckKind::frobenius);
        else
            config_error("unknown check '" + name + "'");
    }

    config.tolerances = default_tolerances();
    if (root.contains("tolerances")) {
        reject_unknown_keys(root["tolerances"], {"synthesize", "trace", "frobenius"}, "tolerances");
        for (const auto& item : root["tolerances"].items()) {
            double v = finite_number(item.value(), "tolerance " + item.key());
            if (!(v > 0.0)) config_error("tolerances must be positive");
            config.tolerances[item.key()] = v;
        }
    }

    if (root.contains("frobenius")) {
        reject_unknown_keys(root["frobenius"], {"chart-radius", "step"}, "frobenius");
        if (root["frobenius"].contains("chart-radius"))
            config.frobenius_chart_radius =
                finite_number(root["frobenius"]["chart-radius"], "frobenius.chart-radius");
        if (root["frobenius"].contains("step"))
            config.frobenius_step = finite_number(root["frobenius"]["step"], "frobenius.step");
        if (!(config.frobenius_chart_radius > 0.0) || !(config.frobenius_step > 0.0))
            config_error("frobenius.chart-radius and step must be positive");
    }

    if (root.contains("output")) {
        reject_unknown_keys(root["output"], {"path", "format"}, "output");
        if (root["output"].contains("path")) {
            if (!root["output"]["path"].is_string()) config_error("output.path must be a string");
            config.output_path = root["output"]["path"].get<std::string>();
        }
        if (root["output"].contains("format")) {
            if (!root["output"]["format"].is_string())
                config_error("output.format must be a string");
            config.output_format = root["output"]["format"].get<std::string>();
        }
        if (config.output_format != "csv") config_error("output.format must be \"csv\"");
    }
    return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

std::string scenario_to_json(const ScenarioConfig& config) {
    ordered_json root;
    root["scenario"] = to_string(config.scenario);
    root["dimension"] = config.dimension;
    root["C"] = config.C;
    root["mirror"] = mirror_to_json(config);
    if (config.scenario == ScenarioKind::spherical) {
        root["patch"] = {{"base", config.patch_base.components()},
                         {"radius", config.patch_radius}};
    } else {
        root["domain"] = {{"min", config.domain_min.components()},
                          {"max", config.domain_max.components()}};
    }
    root["grid"] = {{"counts", config.grid_counts}};
    ordered_json checks = ordered_json::array();
    for (CheckKind c : config.checks) checks.push_back(to_string(c));
    root["checks"] = checks;
    root["tolerances"] = config.tolerances;
    bool wants_frobenius = false;
    for (CheckKind c : config.checks) wants_frobenius |= (c == CheckKind::frobenius);
    if (wants_frobenius)
        root["frobenius"] = {{"chart-radius", config.frobenius_chart_radius},
                             {"step", config.frobenius_step}};
    root["output"] = {{"path", config.output_path}, {"format", config.output_format}};
    return root.dump(2);
}

namespace {

spherical::Spec make_spherical_spec(const ScenarioConfig& config) {
    return spherical::Spec(config.mirror, config.C,
                           spherical::Patch{config.patch_base, config.patch_radius});
}

reversed::Spec make_reversed_spec(const ScenarioConfig& config) {
    return reversed::Spec(config.mirror, config.C,
                          reversed::Box{config.domain_min, config.domain_max});
}

std::string csv_cell(const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : format_double(it->second);
}

void write_rows_csv(const std::filesystem::path& path, const ScenarioConfig& config,
                    const std::vector<SweepRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
    static const char* index_names[] = {"i", "j", "k", "l", "m", "n"};
    const std::size_t axes = config.grid_counts.size();
    for (std::size_t a = 0; a < axes; ++a) {
        if (a < std::size(index_names))
            out << index_names[a] << ",";
        else
            out << "i" << a << ",";
    }
    const std::size_t coord_dim = rows.empty() ? 0 : rows.front().point.dim();
    for (std::size_t c = 0; c < coord_dim; ++c) out << "x" << c << ",";
    if (config.scenario == ScenarioKind::spherical)
        out << "e_g,grad_g_mag,d";
    else
        out << "g,grad_g_mag,u_norm";
    for (const std::string& name : residual_names()) out << "," << name;
    out << ",flag\n";

    for (const SweepRow& row : rows) {
        for (std::size_t a = 0; a < axes; ++a) out << row.indices[a] << ",";
        for (std::size_t c = 0; c < coord_dim; ++c) out << format_double(row.point[c]) << ",";
        bool synthesized = row.flag.empty() || row.flag == "antipodal";
        if (synthesized)
            out << format_double(row.value_a) << "," << format_double(row.value_b) << ","
                << format_double(row.value_c);
        else
            out << ",,";
        for (const std::string& name : residual_names()) out << "," << csv_cell(row.residuals, name);
        out << "," << row.flag << "\n";
    }
}

struct FrobeniusRow {
    std::vector<std::size_t> indices;
    Vec point;
    double defect = 0.0;
    double scale_invariant = 0.0;
    std::string flag;
};

void write_frobenius_csv(const std::filesystem::path& path, const std::vector<FrobeniusRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
    out << "i,j,k,u0,u1,u2,defect,scale_invariant_defect,flag\n";
    for (const FrobeniusRow& row : rows) {
        for (std::size_t a = 0; a < row.indices.size(); ++a) out << row.indices[a] << ",";
        for (std::size_t c = 0; c < row.point.dim(); ++c) out << format_double(row.point[c]) << ",";
        if (row.flag.empty())
            out << format_double(row.defect) << "," << format_double(row.scale_invariant);
        else
            out << ",";
        out << "," << row.flag << "\n";
    }
}

ordered_json residuals_json(const std::map<std::string, double>& m) {
    ordered_json j;
    for (const std::string& name : residual_names()) {
        auto it = m.find(name);
        if (it != m.end()) j[name] = it->second;
    }
    return j;
}

/// Identity defects of one synthesized point; the synthesize check verifies
/// the internal closed-form relations rather than traced rays.
double spherical_identity_defect(const spherical::Spec& spec, const spherical::Synthesis& syn) {
    double defect = 0.0;
    double mf = syn.grad_f_mag;
    double mg = syn.grad_g_mag;
    // Common value of e^f |grad f| / (1 + |grad f|^2) on both mirrors.
    double lhs = syn.e_f * mf / (1.0 + mf * mf);
    double rhs = syn.e_g * mg / (1.0 + mg * mg);
    defect = std::max(defect, std::abs(lhs - rhs));
    if (mf + mg > 1e-9)
        defect = std::max(defect, std::abs(syn.S - spec.C() * mf * mg / (mf + mg)));
    // Perimeter of the O P Q triangle.
    Vec P = syn.e_f * syn.x;
    Vec Q = syn.e_g * syn.y;
    defect = std::max(defect, std::abs(syn.e_f + (Q - P).norm() + syn.e_g - 2.0 * spec.C()));
    return defect;
}

double reversed_identity_defect(const reversed::Spec& spec, const reversed::Synthesis& syn) {
    double m = syn.grad_f_mag;
    double defect =
        std::abs(syn.displacement.norm() -
                 2.0 * (syn.f_val - syn.g_val) * m / (1.0 - m * m));
    defect = std::max(defect, std::abs(syn.path_length - 2.0 * spec.C()));
    return defect;
}

} // namespace

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names = {"spherical-bump", "reversed-affine",
                                                   "frobenius-contact", "s3-pullback"};
    return names;
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    RunResult result;
    std::filesystem::path out_dir = options.output_override.value_or(config.output_path);

    bool wants_synth = false, wants_trace = false, wants_frob = false;
    for (CheckKind c : config.checks) {
        wants_synth |= c == CheckKind::synthesize;
        wants_trace |= c == CheckKind::trace;
        wants_frob |= c == CheckKind::frobenius;
    }

    std::vector<SweepRow> rows;
    std::vector<FrobeniusRow> frob_rows;
    double frob_max = 0.0, frob_scale_max = 0.0;
    Vec frob_worst;

    if (config.scenario == ScenarioKind::spherical) {
        spherical::Spec spec = make_spherical_spec(config);
        rows = sweep_spherical(spec, config.grid_counts, options.jobs);
        if (wants_synth) {
            CheckOutcome outcome;
            outcome.tolerance = config.tolerances.at("synthesize");
            double worst = -1.0;
            for (const SweepRow& row : rows) {
                if (!(row.flag.empty() || row.flag == "antipodal")) continue;
                double d = spherical_identity_defect(spec, spherical::synthesize(spec, row.point));
                outcome.max_residuals["identity_defect"] =
                    std::max(outcome.max_residuals["identity_defect"], d);
                if (d > worst) {
                    worst = d;
                    outcome.worst_point = row.point;
                }
            }
            outcome.pass = outcome.max_residuals["identity_defect"] <= outcome.tolerance;
            result.checks["synthesize"] = outcome;
        }
        if (wants_frob) {
            if (config.dimension != 4)
                throw Error(ErrorCode::dimension_mismatch,
                            "frobenius check requires dimension 4 (a 3-dimensional chart)");
            double reach = std::atan((config.frobenius_chart_radius + config.frobenius_step) *
                                     std::sqrt(3.0));
            if (reach > config.patch_radius)
                throw Error(ErrorCode::outside_patch,
                            "frobenius chart plus differencing step exceeds the patch radius");
            GnomonicChart chart(config.patch_base, config.frobenius_chart_radius);
            VectorField3 field = periscope_field_pullback(spec, chart);
            BoxGrid grid = centered_grid(config.frobenius_chart_radius, config.grid_counts);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                FrobeniusRow row;
                row.indices = grid.indices(k);
                row.point = grid.point(k);
                try {
                    FrobeniusReport rep = frobenius_report(field, row.point, config.frobenius_step);
                    row.defect = rep.defect;
                    row.scale_invariant = rep.scale_invariant_defect;
                    if (std::abs(row.defect) >= frob_max) {
                        frob_max = std::abs(row.defect);
                        frob_worst = row.point;
                    }
                    frob_scale_max = std::max(frob_scale_max, std::abs(row.scale_invariant));
                } catch (const Error& e) {
                    row.flag = to_string(e.code());
                }
                frob_rows.push_back(std::move(row));
            }
        }
    } else {
        reversed::Spec spec = make_reversed_spec(config);
        rows = sweep_reversed(spec, config.grid_counts, options.jobs);
        if (wants_synth) {
            CheckOutcome outcome;
            outcome.tolerance = config.tolerances.at("synthesize");
            double worst = -1.0;
            for (const SweepRow& row : rows) {
                if (!row.flag.empty()) continue;
                double d = reversed_identity_defect(spec, reversed::synthesize(spec, row.point));
                outcome.max_residuals["identity_defect"] =
                    std::max(outcome.max_residuals["identity_defect"], d);
                if (d > worst) {
                    worst = d;
                    outcome.worst_point = row.point;
                }
            }
            outcome.pass = outcome.max_residuals["identity_defect"] <= outcome.tolerance;
            result.checks["synthesize"] = outcome;
        }
        if (wants_frob) {
            if (config.dimension != 4)
                throw Error(ErrorCode::dimension_mismatch,
                            "frobenius check requires dimension 4 (a 3-dimensional chart)");
            VectorField3 field = reversed_displacement_field(spec);
            // Central differences need room inside the domain box.
            BoxGrid grid{spec.domain().min, spec.domain().max, config.grid_counts};
            double pad = 2.0 * config.frobenius_step;
            for (std::size_t i = 0; i < 3; ++i) {
                grid.lo[i] += pad;
                grid.hi[i] -= pad;
            }
            for (std::size_t k = 0; k < grid.size(); ++k) {
                FrobeniusRow row;
                row.indices = grid.indices(k);
                row.point = grid.point(k);
                try {
                    FrobeniusReport rep = frobenius_report(field, row.point, config.frobenius_step);
                    row.defect = rep.defect;
                    row.scale_invariant = rep.scale_invariant_defect;
                    if (std::abs(row.defect) >= frob_max) {
                        frob_max = std::abs(row.defect);
                        frob_worst = row.point;
                    }
                    frob_scale_max = std::max(frob_scale_max, std::abs(row.scale_invariant));
                } catch (const Error& e) {
                    row.flag = to_string(e.code());
                }
                frob_rows.push_back(std::move(row));
            }
        }
    }

    VerifyReport report = summarize(rows);
    result.points = report.points;
    result.failures = report.failed;

    if (wants_trace) {
        CheckOutcome outcome;
        outcome.tolerance = config.tolerances.at("trace");
        double overall = 0.0;
        for (const auto& [name, stats] : report.residuals) {
            outcome.max_residuals[name] = stats.max;
            outcome.mean_residuals[name] = stats.mean;
            if (stats.max >= overall) {
                overall = stats.max;
                outcome.worst_point = stats.worst_point;
            }
        }
        outcome.pass = overall <= outcome.tolerance && report.failed == 0 && report.traced > 0;
        if (report.points == 0) outcome.pass = true; // empty grid: nothing to fail
        result.checks["trace"] = outcome;
    }
    if (wants_frob) {
        CheckOutcome outcome;
        outcome.tolerance = config.tolerances.at("frobenius");
        outcome.max_residuals["abs_defect"] = frob_max;
        outcome.max_residuals["scale_invariant_defect"] = frob_scale_max;
        outcome.worst_point = frob_worst;
        bool any_error = false;
        for (const FrobeniusRow& row : frob_rows) any_error |= !row.flag.empty();
        outcome.pass = frob_max <= outcome.tolerance && !any_error;
        result.checks["frobenius"] = outcome;
    }

    result.pass = true;
    for (const auto& [name, outcome] : result.checks) result.pass &= outcome.pass;
    if (wants_synth || wants_trace) result.pass &= (report.failed == 0);

    if (options.write_files) {
        std::filesystem::create_directories(out_dir);
        std::filesystem::path csv_path = out_dir / "report.csv";
        write_rows_csv(csv_path, config, rows);
        result.csv_path = csv_path.string();
        if (wants_frob) {
            std::filesystem::path fpath = out_dir / "frobenius.csv";
            write_frobenius_csv(fpath, frob_rows);
            result.frobenius_csv_path = fpath.string();
        }

        ordered_json summary;
        summary["config"] = ordered_json::parse(scenario_to_json(config));
        ordered_json checks;
        for (const auto& [name, outcome] : result.checks) {
            ordered_json cj;
            cj["pass"] = outcome.pass;
            cj["tolerance"] = outcome.tolerance;
            // Canonical residual names first, then check-specific extras.
            ordered_json max_res = residuals_json(outcome.max_residuals);
            for (const auto& [key, value] : outcome.max_residuals)
                if (!max_res.contains(key)) max_res[key] = value;
            cj["max_residuals"] = max_res;
            if (!outcome.mean_residuals.empty()) cj["mean_residuals"] = outcome.mean_residuals;
            if (outcome.worst_point.dim() > 0) cj["worst_point"] = outcome.worst_point.components();
            checks[name] = cj;
        }
        summary["checks"] = checks;
        summary["grid_points"] = result.points;
        ordered_json failures = ordered_json::array();
        for (const auto& [index, code] : report.failures)
            failures.push_back({{"index", index}, {"code", code}});
        summary["failures"] = failures;
        summary["pass"] = result.pass;

        std::filesystem::path summary_path = out_dir / "summary.json";
        std::ofstream out(summary_path, std::ios::binary);
        if (!out)
            throw Error(ErrorCode::invalid_argument, "cannot write " + summary_path.string());
        out << summary.dump(2) << "\n";
        result.summary_path = summary_path.string();
    }
    return result;
}

namespace {

ScenarioConfig spherical_bump_config() {
    ScenarioConfig config;
    config.scenario = ScenarioKind::spherical;
    config.dimension = 3;
    config.C = 2.0;
    config.mirror = ScalarField::gaussian_bump(0.0, 0.12, Vec{0.24, -0.15, 0.96}, 0.35);
    config.mirror_family = to_string(config.mirror.family());
    config.patch_base = Vec{0.0, 0.0, 1.0};
    config.patch_radius = 0.5;
    config.grid_counts = {21, 21};
    config.checks = {CheckKind::synthesize, CheckKind::trace};
    config.tolerances = default_tolerances();
    return config;
}

ScenarioConfig reversed_affine_config() {
    ScenarioConfig config;
    config.scenario = ScenarioKind::reversed;
    config.dimension = 3;
    config.C = 3.0;
    config.mirror = ScalarField::affine(1.0, Vec{0.5, 0.0});
    config.mirror_family = to_string(config.mirror.family());
    config.domain_min = Vec{-1.0, -1.0};
    config.domain_max = Vec{1.0, 1.0};
    config.grid_counts = {7, 3};
    config.checks = {CheckKind::synthesize, CheckKind::trace};
    config.tolerances = default_tolerances();
    config.tolerances["trace"] = 1e-12;
    config.tolerances["synthesize"] = 1e-12;
    return config;
}

ScenarioConfig s3_pullback_config() {
    ScenarioConfig config;
    config.scenario = ScenarioKind::spherical;
    config.dimension = 4;
    config.C = 2.2;
    // Asymmetric bump mix: a single radial bump would make the pulled-back
    // field an exact gradient and defeat the perturbation control.
    config.mirror = ScalarField::sum_of_bumps(
        4, 0.2,
        {Bump{0.10, Vec{0.45, 0.30, -0.35, 1.0}.normalized(), 0.55},
         Bump{-0.08, Vec{-0.30, 0.40, 0.25, 1.0}.normalized(), 0.50},
         Bump{0.06, Vec{0.10, -0.45, 0.30, 1.0}.normalized(), 0.45}});
    config.mirror_family = to_string(config.mirror.family());
    config.patch_base = Vec{0.0, 0.0, 0.0, 1.0};
    config.patch_radius = 0.5;
    config.grid_counts = {5, 5, 5};
    config.checks = {CheckKind::frobenius};
    config.tolerances = default_tolerances();
    config.frobenius_chart_radius = 0.15;
    config.frobenius_step = 1e-4;
    return config;
}

RunResult run_contact_demo(const std::string& output_dir, std::ostream& out) {
    const double h = 1e-4;
    const double tolerance = 1e-8;
    VectorField3 field = contact_field();
    BoxGrid grid = centered_grid(1.0, {3, 3, 3});
    std::vector<FrobeniusRow> rows;
    double worst = 0.0;
    double defect_at_origin = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        FrobeniusRow row;
        row.indices = grid.indices(k);
        row.point = grid.point(k);
        FrobeniusReport rep = frobenius_report(field, row.point, h);
        row.defect = rep.defect;
        row.scale_invariant = rep.scale_invariant_defect;
        worst = std::max(worst, std::abs(rep.defect + 1.0));
        if (k == grid.size() / 2) defect_at_origin = rep.defect;
        rows.push_back(std::move(row));
    }

    RunResult result;
    result.points = rows.size();
    CheckOutcome outcome;
    outcome.tolerance = tolerance;
    outcome.max_residuals["defect_offset"] = worst;
    outcome.pass = worst <= tolerance;
    result.checks["frobenius"] = outcome;
    result.pass = outcome.pass;

    std::filesystem::path dir(output_dir);
    std::filesystem::create_directories(dir);
    write_frobenius_csv(dir / "frobenius.csv", rows);
    result.frobenius_csv_path = (dir / "frobenius.csv").string();

    ordered_json summary;
    summary["demo"] = "frobenius-contact";
    summary["checks"] = {{"frobenius",
                          {{"pass", outcome.pass},
                           {"tolerance", tolerance},
                           {"max_residuals", {{"defect_offset", worst}}}}}};
    summary["grid_points"] = result.points;
    summary["pass"] = result.pass;
    std::ofstream summary_out(dir / "summary.json", std::ios::binary);
    summary_out << summary.dump(2) << "\n";
    result.summary_path = (dir / "summary.json").string();

    char line[160];
    std::snprintf(line, sizeof(line), "contact field defect %.6f (max |defect + 1| = %.3g)",
                  defect_at_origin, worst);
    out << line << "\n";
    out << (outcome.pass ? "[PASS]" : "[FAIL]") << " frobenius: |defect + 1| <= "
        << format_double(tolerance) << " at " << rows.size() << " points\n";
    return result;
}

void print_outcomes(const RunResult& result, std::ostream& out) {
    for (const auto& [name, outcome] : result.checks) {
        out << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << ":";
        for (const auto& [k, v] : outcome.max_residuals)
            out << " " << k << " = " << format_double(v);
        out << " (tolerance " << format_double(outcome.tolerance) << ")\n";
    }
}

} // namespace

RunResult run_demo(const std::string& name, const std::string& output_dir, std::ostream& out,
                   std::size_t jobs) {
    RunOptions options;
    options.output_override = output_dir;
    options.jobs = jobs;

    if (name == "frobenius-contact") return run_contact_demo(output_dir, out);

    ScenarioConfig config;
    if (name == "spherical-bump") {
        config = spherical_bump_config();
    } else if (name == "reversed-affine") {
        config = reversed_affine_config();
    } else if (name == "s3-pullback") {
        config = s3_pullback_config();
    } else {
        std::string known;
        for (const std::string& n : demo_names()) known += (known.empty() ? "" : ", ") + n;
        throw Error(ErrorCode::invalid_argument,
                    "unknown demo '" + name + "' (available: " + known + ")");
    }

    RunResult result = run_scenario(config, options);
    if (name == "reversed-affine") {
        reversed::Spec spec = make_reversed_spec(config);
        reversed::Synthesis syn = reversed::synthesize(spec, Vec{0.0, 0.0});
        out << "path identity at x = 0: f + g + |PQ| = " << format_double(syn.path_length)
            << " = 2C = " << format_double(2.0 * config.C) << "\n";
    }
    if (name == "spherical-bump") {
        double worst = 0.0;
        if (result.checks.count("trace"))
            for (const auto& [k, v] : result.checks.at("trace").max_residuals)
                worst = std::max(worst, v);
        out << "max closure residual " << format_double(worst) << " (tolerance "
            << format_double(result.checks.at("trace").tolerance) << ")\n";
    }
    print_outcomes(result, out);
    return result;
}

} // namespace periscope

#include "nsv/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "nsv/error.hpp"
#include "nsv/io_util.hpp"

namespace nsv {

using nlohmann::json;

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::vacuum_blob: return "vacuum-blob";
        case Scenario::uniform: return "uniform";
        case Scenario::custom_table: return "custom-table";
    }
    return "?";
}

std::int64_t SimConfig::steps() const {
    // ceil(t_end / dt) with protection against 3.0/0.1 style rounding.
    const double raw = t_end / dt;
    const double eps = 1e-9 * std::max(1.0, raw);
    return static_cast<std::int64_t>(std::ceil(raw - eps));
}

namespace {

void require_object(const json& j, const std::string& key) {
    if (!j.is_object()) fail_config("config section '" + key + "' must be a JSON object");
}

void check_known_keys(const json& j, const std::string& section, const std::set<std::string>& known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            fail_config("unknown key '" + (section.empty() ? it.key() : section + "." + it.key()) + "' in config");
    }
}

double get_num(const json& j, const std::string& section, const std::string& key, std::optional<double> dflt = {}) {
    if (!j.contains(key)) {
        if (dflt) return *dflt;
        fail_config("missing required key '" + section + "." + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_number()) fail_config("key '" + section + "." + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail_config("key '" + section + "." + key + "' is not finite");
    return x;
}

std::int64_t get_int(const json& j, const std::string& section, const std::string& key,
                     std::optional<std::int64_t> dflt = {}) {
    if (!j.contains(key)) {
        if (dflt) return *dflt;
        fail_config("missing required key '" + section + "." + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail_config("key '" + section + "." + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string get_str(const json& j, const std::string& section, const std::string& key,
                    std::optional<std::string> dflt = {}) {
    if (!j.contains(key)) {
        if (dflt) return *dflt;
        fail_config("missing required key '" + section + "." + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_string()) fail_config("key '" + section + "." + key + "' must be a string");
    return v.get<std::string>();
}

std::array<double, 3> get_point(const json& j, const std::string& section, const std::string& key, int dim,
                                std::array<double, 3> dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        fail_config("key '" + section + "." + key + "' must be an array of " + std::to_string(dim) + " numbers");
    std::array<double, 3> out = dflt;
    for (int a = 0; a < dim; ++a) {
        if (!v[a].is_number()) fail_config("key '" + section + "." + key + "' must contain numbers");
        out[a] = v[a].get<double>();
        if (!std::isfinite(out[a])) fail_config("key '" + section + "." + key + "' is not finite");
    }
    return out;
}

}  // namespace

SimConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail_config("cannot parse " + origin + ": " + e.what());
    }
    if (!root.is_object()) fail_config(origin + ": top level must be a JSON object");
    check_known_keys(root, "", {"domain", "fluid", "kinetic", "theory", "output"});
    for (const char* k : {"domain", "fluid", "kinetic", "theory", "output"})
        if (!root.contains(k)) fail_config("missing required section '" + std::string(k) + "'");

    SimConfig c;

    // ---- domain ----
    const json& dom = root.at("domain");
    require_object(dom, "domain");
    check_known_keys(dom, "domain", {"dimension", "box_length", "cells", "dt", "t_end"});
    c.dim = static_cast<int>(get_int(dom, "domain", "dimension"));
    // Checked immediately: every later point-valued key is validated against
    // the dimension, and those errors would mask the actual mistake.
    if (c.dim != 2 && c.dim != 3) fail_config("key 'domain.dimension' must be 2 or 3");
    c.box = get_num(dom, "domain", "box_length");
    c.cells = get_int(dom, "domain", "cells");
    c.dt = get_num(dom, "domain", "dt");
    c.t_end = get_num(dom, "domain", "t_end");

    // ---- fluid ----
    const json& fl = root.at("fluid");
    require_object(fl, "fluid");
    check_known_keys(fl, "fluid",
                     {"viscosity", "scenario", "rho_max", "blob_center", "blob_radius", "u0_amplitude", "u0_center",
                      "u0_radius", "table_path", "solver_tol", "div_tol", "max_iters", "freeze"});
    c.mu = get_num(fl, "fluid", "viscosity");
    const std::string sc = get_str(fl, "fluid", "scenario");
    if (sc == "vacuum-blob") c.scenario = Scenario::vacuum_blob;
    else if (sc == "uniform") c.scenario = Scenario::uniform;
    else if (sc == "custom-table") c.scenario = Scenario::custom_table;
    else fail_config("key 'fluid.scenario' must be one of vacuum-blob, uniform, custom-table (got '" + sc + "')");

    const std::array<double, 3> mid{0.5 * c.box, 0.5 * c.box, 0.5 * c.box};
    if (c.scenario == Scenario::custom_table) {
        c.table_path = get_str(fl, "fluid", "table_path");
        c.rho_max = get_num(fl, "fluid", "rho_max", 0.0);  // informational for tables
        if (fl.contains("blob_radius") || fl.contains("blob_center"))
            fail_config("fluid.blob_* keys are not valid with scenario custom-table");
    } else {
        c.rho_max = get_num(fl, "fluid", "rho_max");
        if (c.scenario == Scenario::vacuum_blob) {
            c.rho_radius = get_num(fl, "fluid", "blob_radius");
            c.rho_center = get_point(fl, "fluid", "blob_center", c.dim, mid);
        } else if (fl.contains("blob_radius") || fl.contains("blob_center")) {
            fail_config("fluid.blob_* keys are not valid with scenario uniform");
        }
        if (fl.contains("table_path")) fail_config("fluid.table_path is only valid with scenario custom-table");
    }
    c.u0_amplitude = get_num(fl, "fluid", "u0_amplitude", 0.0);
    c.u0_center = get_point(fl, "fluid", "u0_center", c.dim, mid);
    c.u0_radius = get_num(fl, "fluid", "u0_radius", c.box / 3.0);
    c.eps_lin = get_num(fl, "fluid", "solver_tol", 1e-9);
    c.eps_div = get_num(fl, "fluid", "div_tol", 1e-10);
    c.max_solver_iters = static_cast<int>(get_int(fl, "fluid", "max_iters", 400));
    if (fl.contains("freeze")) {
        if (!fl.at("freeze").is_boolean()) fail_config("key 'fluid.freeze' must be a boolean");
        c.freeze_fluid = fl.at("freeze").get<bool>();
    }

    // ---- kinetic ----
    const json& kin = root.at("kinetic");
    require_object(kin, "kinetic");
    check_known_keys(kin, "kinetic",
                     {"drag", "particles", "seed", "mass", "blob_center", "blob_radius", "velocity_radius"});
    c.kappa = get_num(kin, "kinetic", "drag");
    c.particles = get_int(kin, "kinetic", "particles");
    c.seed = static_cast<std::uint64_t>(get_int(kin, "kinetic", "seed"));
    c.f_mass = get_num(kin, "kinetic", "mass");
    c.f_center = get_point(kin, "kinetic", "blob_center", c.dim, mid);
    if (c.f_mass > 0.0) {
        c.f_radius = get_num(kin, "kinetic", "blob_radius");
        c.v_radius = get_num(kin, "kinetic", "velocity_radius");
    } else {
        c.f_radius = get_num(kin, "kinetic", "blob_radius", 0.0);
        c.v_radius = get_num(kin, "kinetic", "velocity_radius", 0.0);
    }

    // ---- theory ----
    const json& th = root.at("theory");
    require_object(th, "theory");
    check_known_keys(th, "theory", {"sobolev_const", "cstar", "smallness_margin", "fit_window", "slack", "tol"});
    if (th.contains("sobolev_const")) c.sobolev_const = get_num(th, "theory", "sobolev_const");
    if (th.contains("cstar")) c.cstar = get_num(th, "theory", "cstar");
    c.smallness_margin = get_num(th, "theory", "smallness_margin", 1.0);
    if (th.contains("fit_window")) {
        const json& w = th.at("fit_window");
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            fail_config("key 'theory.fit_window' must be [t0, t1]");
        c.fit_t0 = w[0].get<double>();
        c.fit_t1 = w[1].get<double>();
    }
    c.slack = get_num(th, "theory", "slack", 0.05);
    c.tol = get_num(th, "theory", "tol", 0.05);

    // ---- output ----
    const json& out = root.at("output");
    require_object(out, "output");
    check_known_keys(out, "output", {"dir", "snapshot_every"});
    c.out_dir = get_str(out, "output", "dir");
    c.snapshot_every = get_int(out, "output", "snapshot_every", std::int64_t{0});

    validate_config(c);
    return c;
}

SimConfig load_config_file(const std::string& path) {
    // An unreadable configuration file is a usage error (exit 2), not an
    // I/O failure of the run itself.
    try {
        return parse_config(read_file(path), path);
    } catch (const SimError& e) {
        if (e.kind() == ErrorKind::io) fail_config("cannot read config file: " + path);
        throw;
    }
}

void validate_config(const SimConfig& c) {
    if (c.dim != 2 && c.dim != 3) fail_config("key 'domain.dimension' must be 2 or 3");
    if (!(c.box > 0.0)) fail_config("key 'domain.box_length' must be positive");
    if (c.cells < 4) fail_config("key 'domain.cells' must be at least 4");
    if (c.cells > 1024) fail_config("key 'domain.cells' is too large for a desk-scale run (max 1024)");
    if (!(c.dt > 0.0)) fail_config("key 'domain.dt' must be positive");
    if (!(c.t_end > 0.0)) fail_config("key 'domain.t_end' must be positive");
    if (!(c.mu > 0.0)) fail_config("key 'fluid.viscosity' must be positive");
    if (c.rho_max < 0.0) fail_config("key 'fluid.rho_max' must be nonnegative");
    if (c.scenario == Scenario::vacuum_blob) {
        if (!(c.rho_radius > 0.0)) fail_config("key 'fluid.blob_radius' must be positive");
        for (int a = 0; a < c.dim; ++a) {
            if (!(c.rho_center[a] - c.rho_radius > 0.0) || !(c.rho_center[a] + c.rho_radius < c.box))
                fail_config("key 'fluid.blob_radius': initial density support touches the box boundary");
        }
    }
    if (c.u0_amplitude < 0.0) fail_config("key 'fluid.u0_amplitude' must be nonnegative");
    if (c.u0_amplitude > 0.0 && !(c.u0_radius > 0.0)) fail_config("key 'fluid.u0_radius' must be positive");
    if (!(c.eps_lin > 0.0)) fail_config("key 'fluid.solver_tol' must be positive");
    if (!(c.eps_div > 0.0)) fail_config("key 'fluid.div_tol' must be positive");
    if (c.max_solver_iters < 1) fail_config("key 'fluid.max_iters' must be at least 1");
    if (!(c.kappa > 0.0)) fail_config("key 'kinetic.drag' must be positive");
    if (c.particles < 1) fail_config("key 'kinetic.particles' must be at least 1");
    if (c.f_mass < 0.0) fail_config("key 'kinetic.mass' must be nonnegative");
    if (c.has_particles()) {
        if (!(c.f_radius > 0.0)) fail_config("key 'kinetic.blob_radius' must be positive");
        if (!(c.v_radius > 0.0)) fail_config("key 'kinetic.velocity_radius' must be positive");
        for (int a = 0; a < c.dim; ++a) {
            if (!(c.f_center[a] - c.f_radius > 0.0) || !(c.f_center[a] + c.f_radius < c.box))
                fail_config("key 'kinetic.blob_radius': initial phase-space support touches the box boundary");
        }
    }
    if (c.sobolev_const && !(*c.sobolev_const > 0.0)) fail_config("key 'theory.sobolev_const' must be positive");
    if (c.cstar && !(*c.cstar > 0.0)) fail_config("key 'theory.cstar' must be positive");
    if (!(c.smallness_margin > 0.0)) fail_config("key 'theory.smallness_margin' must be positive");
    if (c.fit_t0 && c.fit_t1 && !(*c.fit_t0 < *c.fit_t1)) fail_config("key 'theory.fit_window' must have t0 < t1");
    if (!(c.slack > 0.0 && c.slack < 1.0)) fail_config("key 'theory.slack' must lie in (0,1)");
    if (!(c.tol > 0.0)) fail_config("key 'theory.tol' must be positive");
    if (c.out_dir.empty()) fail_config("key 'output.dir' must be non-empty");
    if (c.snapshot_every < 0) fail_config("key 'output.snapshot_every' must be nonnegative");

    // Advective CFL guard from the declared velocity scales.  The bound is
    // re-checked against the realised fields both at initialisation and on
    // every transport step.
    const double vmax = std::max(c.u0_amplitude, c.has_particles() ? c.v_radius : 0.0);
    if (vmax > 0.0 && c.dt * vmax / c.h() > 1.0)
        fail_config("key 'domain.dt': advective CFL exceeds 1 for the declared velocity scales (dt*vmax/h = " +
                    format_double(c.dt * vmax / c.h()) + ")");
}

std::string config_to_json(const SimConfig& c) {
    json root;
    json dom;
    dom["dimension"] = c.dim;
    dom["box_length"] = c.box;
    dom["cells"] = c.cells;
    dom["dt"] = c.dt;
    dom["t_end"] = c.t_end;
    root["domain"] = dom;

    json fl;
    fl["viscosity"] = c.mu;
    fl["scenario"] = scenario_name(c.scenario);
    fl["rho_max"] = c.rho_max;
    if (c.scenario == Scenario::vacuum_blob) {
        fl["blob_center"] = std::vector<double>(c.rho_center.begin(), c.rho_center.begin() + c.dim);
        fl["blob_radius"] = c.rho_radius;
    }
    if (c.scenario == Scenario::custom_table) fl["table_path"] = c.table_path;
    fl["u0_amplitude"] = c.u0_amplitude;
    fl["u0_center"] = std::vector<double>(c.u0_center.begin(), c.u0_center.begin() + c.dim);
    fl["u0_radius"] = c.u0_radius;
    fl["solver_tol"] = c.eps_lin;
    fl["div_tol"] = c.eps_div;
    fl["max_iters"] = c.max_solver_iters;
    fl["freeze"] = c.freeze_fluid;
    root["fluid"] = fl;

    json kin;
    kin["drag"] = c.kappa;
    kin["particles"] = c.particles;
    kin["seed"] = c.seed;
    kin["mass"] = c.f_mass;
    kin["blob_center"] = std::vector<double>(c.f_center.begin(), c.f_center.begin() + c.dim);
    kin["blob_radius"] = c.f_radius;
    kin["velocity_radius"] = c.v_radius;
    root["kinetic"] = kin;

    json th;
    if (c.sobolev_const) th["sobolev_const"] = *c.sobolev_const;
    if (c.cstar) th["cstar"] = *c.cstar;
    th["smallness_margin"] = c.smallness_margin;
    if (c.fit_t0 && c.fit_t1) th["fit_window"] = std::vector<double>{*c.fit_t0, *c.fit_t1};
    th["slack"] = c.slack;
    th["tol"] = c.tol;
    root["theory"] = th;

    json out;
    out["dir"] = c.out_dir;
    out["snapshot_every"] = c.snapshot_every;
    root["output"] = out;
    return root.dump(2);
}

}  // namespace nsv

#include "skidncs/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace skidncs {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ScenarioParseError(key, what);
}

void check_keys(const ordered_json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail(scope.empty() ? item.key() : scope + "." + item.key(), "unknown key");
        }
    }
}

const ordered_json& get_field(const ordered_json& obj, const std::string& scope,
                              const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        fail(scope.empty() ? key : scope + "." + key, "missing required key");
    }
    return *it;
}

double get_number(const ordered_json& obj, const std::string& scope, const char* key) {
    const ordered_json& v = get_field(obj, scope, key);
    if (!v.is_number()) {
        fail(scope.empty() ? key : scope + "." + key, "expected a number");
    }
    return v.get<double>();
}

std::int64_t get_integer(const ordered_json& obj, const std::string& scope,
                         const char* key) {
    const ordered_json& v = get_field(obj, scope, key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        fail(scope.empty() ? key : scope + "." + key, "expected an integer");
    }
    return v.get<std::int64_t>();
}

const ordered_json& get_object(const ordered_json& obj, const std::string& scope,
                               const char* key) {
    const ordered_json& v = get_field(obj, scope, key);
    if (!v.is_object()) {
        fail(scope.empty() ? key : scope + "." + key, "expected an object");
    }
    return v;
}

std::string get_string(const ordered_json& obj, const std::string& scope,
                       const char* key) {
    const ordered_json& v = get_field(obj, scope, key);
    if (!v.is_string()) {
        fail(scope.empty() ? key : scope + "." + key, "expected a string");
    }
    return v.get<std::string>();
}

Pose parse_pose(const ordered_json& obj, const std::string& scope) {
    check_keys(obj, scope, {"x", "y", "theta"});
    return Pose{get_number(obj, scope, "x"), get_number(obj, scope, "y"),
                get_number(obj, scope, "theta")};
}

SlipProfile parse_slip_profile(const ordered_json& obj, const std::string& scope) {
    const std::string type = get_string(obj, scope, "type");
    if (type == "constant") {
        check_keys(obj, scope, {"type", "d_mu_r", "d_mu_l"});
        return ConstantSlip{get_number(obj, scope, "d_mu_r"),
                            get_number(obj, scope, "d_mu_l")};
    }
    if (type == "sinusoid") {
        check_keys(obj, scope, {"type", "amplitude", "period"});
        return SinusoidSlip{get_number(obj, scope, "amplitude"),
                            get_number(obj, scope, "period")};
    }
    if (type == "random_walk") {
        check_keys(obj, scope, {"type", "step_size"});
        return RandomWalkSlip{get_number(obj, scope, "step_size")};
    }
    fail(scope + ".type", "expected one of constant, sinusoid, random_walk");
}

DelayProfile parse_delay_profile(const ordered_json& obj, const std::string& scope) {
    const std::string type = get_string(obj, scope, "type");
    if (type == "constant") {
        check_keys(obj, scope, {"type", "tau"});
        return ConstantDelay{get_number(obj, scope, "tau")};
    }
    if (type == "uniform_random") {
        check_keys(obj, scope, {"type"});
        return UniformRandomDelay{};
    }
    if (type == "triangle_wave") {
        check_keys(obj, scope, {"type", "period"});
        return TriangleWaveDelay{get_number(obj, scope, "period")};
    }
    fail(scope + ".type", "expected one of constant, uniform_random, triangle_wave");
}

ControllerSpec parse_controller(const ordered_json& obj, const std::string& scope) {
    const std::string type = get_string(obj, scope, "type");
    if (type == "open_loop") {
        check_keys(obj, scope, {"type"});
        return OpenLoop{};
    }
    if (type == "static_gain") {
        check_keys(obj, scope, {"type", "K"});
        const ordered_json& rows = get_field(obj, scope, "K");
        if (!rows.is_array() || rows.size() != 2) {
            fail(scope + ".K", "expected 2 rows of 5 numbers");
        }
        Mat k(2, 5);
        for (int r = 0; r < 2; ++r) {
            const ordered_json& row = rows[static_cast<size_t>(r)];
            if (!row.is_array() || row.size() != 5) {
                fail(scope + ".K", "expected 2 rows of 5 numbers");
            }
            for (int c = 0; c < 5; ++c) {
                const ordered_json& v = row[static_cast<size_t>(c)];
                if (!v.is_number()) fail(scope + ".K", "expected a number");
                k(r, c) = v.get<double>();
            }
        }
        return StaticGain{k};
    }
    fail(scope + ".type", "expected one of open_loop, static_gain");
}

const char* slip_profile_name(const SlipProfile& p) {
    if (std::holds_alternative<ConstantSlip>(p)) return "constant";
    if (std::holds_alternative<SinusoidSlip>(p)) return "sinusoid";
    return "random_walk";
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    ordered_json root = ordered_json::parse(json_text, nullptr, false);
    if (root.is_discarded()) {
        throw ScenarioParseError("<document>", "not valid JSON");
    }
    if (!root.is_object()) {
        throw ScenarioParseError("<document>", "top level must be an object");
    }
    check_keys(root, "",
               {"geometry", "segment", "bounds", "initial_error", "delta_mu_max",
                "horizon_steps", "seed", "slip_profile", "delay_profile", "controller",
                "sim_substeps"});

    const ordered_json& geom = get_object(root, "", "geometry");
    check_keys(geom, "geometry", {"gear_radius_R", "track_distance_D"});
    RobotGeometry geometry{get_number(geom, "geometry", "gear_radius_R"),
                           get_number(geom, "geometry", "track_distance_D")};

    const ordered_json& seg = get_object(root, "", "segment");
    check_keys(seg, "segment", {"origin", "v_desired"});
    TrajectorySegment segment{
        parse_pose(get_object(seg, "segment", "origin"), "segment.origin"),
        get_number(seg, "segment", "v_desired")};

    const ordered_json& bnd = get_object(root, "", "bounds");
    check_keys(bnd, "bounds", {"tau_min", "tau_max", "sample_time_Ts"});
    const double tau_min = get_number(bnd, "bounds", "tau_min");
    const double tau_max = get_number(bnd, "bounds", "tau_max");
    const double ts = get_number(bnd, "bounds", "sample_time_Ts");

    const ordered_json& err = get_object(root, "", "initial_error");
    check_keys(err, "initial_error", {"e_x", "e_y", "e_theta"});
    TrackingError initial_error{get_number(err, "initial_error", "e_x"),
                                get_number(err, "initial_error", "e_y"),
                                get_number(err, "initial_error", "e_theta")};

    const std::int64_t horizon = get_integer(root, "", "horizon_steps");
    if (horizon < 1 || horizon > 100000000) {
        fail("horizon_steps", "expected an integer in [1, 1e8]");
    }
    const std::int64_t substeps = get_integer(root, "", "sim_substeps");
    if (substeps < 1 || substeps > 100000000) {
        fail("sim_substeps", "expected an integer in [1, 1e8]");
    }
    const ordered_json& seed_field = get_field(root, "", "seed");
    if (!seed_field.is_number_integer() && !seed_field.is_number_unsigned()) {
        fail("seed", "expected an integer");
    }

    DelayBounds bounds = [&] {
        try {
            return DelayBounds(tau_min, tau_max, ts);
        } catch (const std::invalid_argument& e) {
            fail("bounds", e.what());
        }
    }();

    Scenario sc{geometry,
                segment,
                bounds,
                initial_error,
                get_number(root, "", "delta_mu_max"),
                static_cast<int>(horizon),
                seed_field.get<std::uint64_t>(),
                parse_slip_profile(get_object(root, "", "slip_profile"), "slip_profile"),
                parse_delay_profile(get_object(root, "", "delay_profile"), "delay_profile"),
                parse_controller(get_object(root, "", "controller"), "controller"),
                static_cast<int>(substeps)};
    try {
        validate_scenario(sc);
    } catch (const std::invalid_argument& e) {
        throw ScenarioParseError("<scenario>", e.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
    ordered_json root;
    root["geometry"] = {{"gear_radius_R", sc.geometry.gear_radius_R},
                        {"track_distance_D", sc.geometry.track_distance_D}};
    root["segment"] = {{"origin",
                        {{"x", sc.segment.origin.x},
                         {"y", sc.segment.origin.y},
                         {"theta", sc.segment.origin.theta}}},
                       {"v_desired", sc.segment.v_desired}};
    root["bounds"] = {{"tau_min", sc.bounds.tau_min},
                      {"tau_max", sc.bounds.tau_max},
                      {"sample_time_Ts", sc.bounds.sample_time_Ts}};
    root["initial_error"] = {{"e_x", sc.initial_error.e_x},
                             {"e_y", sc.initial_error.e_y},
                             {"e_theta", sc.initial_error.e_theta}};
    root["delta_mu_max"] = sc.delta_mu_max;
    root["horizon_steps"] = sc.horizon_steps;
    root["seed"] = sc.seed;

    ordered_json slip;
    slip["type"] = slip_profile_name(sc.slip_profile);
    if (const auto* c = std::get_if<ConstantSlip>(&sc.slip_profile)) {
        slip["d_mu_r"] = c->d_mu_r;
        slip["d_mu_l"] = c->d_mu_l;
    } else if (const auto* s = std::get_if<SinusoidSlip>(&sc.slip_profile)) {
        slip["amplitude"] = s->amplitude;
        slip["period"] = s->period;
    } else if (const auto* w = std::get_if<RandomWalkSlip>(&sc.slip_profile)) {
        slip["step_size"] = w->step_size;
    }
    root["slip_profile"] = slip;

    ordered_json delay;
    if (const auto* c = std::get_if<ConstantDelay>(&sc.delay_profile)) {
        delay["type"] = "constant";
        delay["tau"] = c->tau;
    } else if (std::holds_alternative<UniformRandomDelay>(sc.delay_profile)) {
        delay["type"] = "uniform_random";
    } else if (const auto* t = std::get_if<TriangleWaveDelay>(&sc.delay_profile)) {
        delay["type"] = "triangle_wave";
        delay["period"] = t->period;
    }
    root["delay_profile"] = delay;

    ordered_json controller;
    if (std::holds_alternative<OpenLoop>(sc.controller)) {
        controller["type"] = "open_loop";
    } else {
        const Mat& k = std::get<StaticGain>(sc.controller).K;
        controller["type"] = "static_gain";
        ordered_json rows = ordered_json::array();
        for (int r = 0; r < 2; ++r) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < 5; ++c) row.push_back(k(r, c));
            rows.push_back(row);
        }
        controller["K"] = rows;
    }
    root["controller"] = controller;
    root["sim_substeps"] = sc.sim_substeps;
    return root.dump(2) + "\n";
}

std::string trace_to_csv(const SimTrace& trace) {
    std::string out =
        "k,t,tau_k,d_mu_r,d_mu_l,delta_v,omega,ex_nl,ey_nl,eth_nl,"
        "ex_lin,ey_lin,eth_lin,ex_nb,ey_nb,eth_nb,div_lin,div_nb\n";
    for (size_t k = 0; k < trace.size(); ++k) {
        out += std::to_string(k);
        const double fields[] = {
            trace.t[k],                  trace.tau[k],
            trace.d[k][0],               trace.d[k][1],
            trace.du[k][0],              trace.du[k][1],
            trace.e_nonlinear[k].e_x,    trace.e_nonlinear[k].e_y,
            trace.e_nonlinear[k].e_theta, trace.e_linear[k].e_x,
            trace.e_linear[k].e_y,       trace.e_linear[k].e_theta,
            trace.e_norm_bounded[k].e_x, trace.e_norm_bounded[k].e_y,
            trace.e_norm_bounded[k].e_theta, trace.div_linear[k],
            trace.div_norm_bounded[k]};
        for (double v : fields) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

void write_trace_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open trace file for writing: " + path);
    }
    out << trace_to_csv(trace);
}

}  // namespace skidncs

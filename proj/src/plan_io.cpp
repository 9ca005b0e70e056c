#include "ortacplus/plan_io.hpp"

#include <charconv>

namespace ortac::plan_io {

std::string encode_location(const Location &l) {
    if (is_node(l)) return "n:" + std::to_string(std::get<NodeId>(l).value);
    const EdgeId &e = std::get<EdgeId>(l);
    return "e:" + std::to_string(e.a.value) + "-" + std::to_string(e.b.value);
}

namespace {

int parse_id(std::string_view s) {
    int value = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || p != s.data() + s.size() || value < 0)
        throw PlanFormatError("malformed location id '" + std::string(s) + "'");
    return value;
}

}  // namespace

Location decode_location(const std::string &text) {
    if (text.size() >= 3 && text[0] == 'n' && text[1] == ':')
        return NodeId{parse_id(std::string_view(text).substr(2))};
    if (text.size() >= 3 && text[0] == 'e' && text[1] == ':') {
        std::string_view body = std::string_view(text).substr(2);
        size_t dash = body.find('-');
        if (dash == std::string_view::npos)
            throw PlanFormatError("malformed edge location '" + text + "'");
        int u = parse_id(body.substr(0, dash));
        int v = parse_id(body.substr(dash + 1));
        if (u >= v)
            throw PlanFormatError("edge location '" + text +
                                  "' is not in canonical order (u < v)");
        return EdgeId{NodeId{u}, NodeId{v}};
    }
    throw PlanFormatError("malformed location '" + text + "' (want n:<id> or e:<u>-<v>)");
}

nlohmann::ordered_json plan_to_json(const Plan &p) {
    nlohmann::ordered_json j;
    j["format"] = "ortacplus-plan/1";
    j["horizon"] = p.horizon;
    nlohmann::ordered_json agents = nlohmann::ordered_json::object();
    for (const auto &[name, traj] : p.traj) {
        nlohmann::ordered_json steps = nlohmann::ordered_json::array();
        for (const Location &l : traj) steps.push_back(encode_location(l));
        agents[name] = std::move(steps);
    }
    j["agents"] = std::move(agents);
    return j;
}

std::string plan_to_string(const Plan &p) { return plan_to_json(p).dump(2) + "\n"; }

Plan plan_from_json(const nlohmann::json &j) {
    if (!j.is_object()) throw PlanFormatError("plan must be a JSON object");
    if (!j.contains("format") || !j["format"].is_string() ||
        j["format"].get<std::string>() != "ortacplus-plan/1")
        throw PlanFormatError("missing or unsupported plan format marker");
    if (!j.contains("horizon") || !j["horizon"].is_number_integer() ||
        j["horizon"].get<long long>() < 0)
        throw PlanFormatError("'horizon' must be a non-negative integer");
    if (!j.contains("agents") || !j["agents"].is_object())
        throw PlanFormatError("'agents' must be an object");

    Plan p;
    p.horizon = j["horizon"].get<int>();
    for (const auto &[name, steps] : j["agents"].items()) {
        if (!steps.is_array()) throw PlanFormatError("trajectory of '" + name + "' must be an array");
        std::vector<Location> traj;
        for (const auto &step : steps) {
            if (!step.is_string())
                throw PlanFormatError("trajectory entries of '" + name + "' must be strings");
            traj.push_back(decode_location(step.get<std::string>()));
        }
        p.traj[name] = std::move(traj);
    }
    return p;
}

Plan plan_from_string(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw PlanFormatError("plan file is not valid JSON");
    return plan_from_json(j);
}

nlohmann::ordered_json violations_to_json(const std::vector<validator::Violation> &vs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const validator::Violation &v : vs) {
        nlohmann::ordered_json item;
        item["kind"] = validator::to_string(v.kind);
        item["agent"] = v.agent ? nlohmann::ordered_json(*v.agent) : nullptr;
        item["location"] =
            v.location ? nlohmann::ordered_json(encode_location(*v.location)) : nullptr;
        item["timestep"] = v.timestep ? nlohmann::ordered_json(*v.timestep) : nullptr;
        item["constraint_index"] =
            v.constraint_index ? nlohmann::ordered_json(*v.constraint_index) : nullptr;
        item["message"] = v.message;
        arr.push_back(std::move(item));
    }
    return arr;
}

}  // namespace ortac::plan_io

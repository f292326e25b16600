#include <json.hpp>

#include "pseudorot/torusmap.hpp"

namespace pseudorot {

namespace {

using nlohmann::json;

json rat_json(const BigRat& r) { return to_string(r); }

BigRat rat_field(const json& j, const std::string& field, const std::string& where) {
    if (!j.contains(field))
        throw std::runtime_error("parse error: missing field '" + field + "' in " + where);
    if (!j[field].is_string())
        throw std::runtime_error("parse error: field '" + field + "' in " + where +
                                 " must be an exact rational string");
    return rat_from_string(j[field].get<std::string>());
}

json profile_json(const PeriodicProfile& p) {
    json bumps = json::array();
    for (const auto& b : p.bumps()) {
        bumps.push_back({{"center", rat_json(b.center)},
                         {"half_width", rat_json(b.half_width)},
                         {"amplitude", b.amplitude}});
    }
    return {{"period", rat_json(p.period())}, {"bumps", bumps}};
}

PeriodicProfile profile_from_json(const json& j, const std::string& where) {
    PeriodicProfile p(rat_field(j, "period", where));
    if (!j.contains("bumps"))
        throw std::runtime_error("parse error: missing field 'bumps' in " + where);
    for (const auto& b : j["bumps"]) {
        if (!b.contains("amplitude"))
            throw std::runtime_error("parse error: missing field 'amplitude' in " + where);
        p.add_bump(rat_field(b, "center", where), rat_field(b, "half_width", where),
                   b["amplitude"].get<double>());
    }
    return p;
}

} // namespace

std::string serialize(const AreaPreservingMap& map) {
    json gens = json::array();
    for (const Generator& g : map.generators()) {
        switch (g.kind) {
        case Generator::Kind::Translation:
            gens.push_back({{"type", "translation"},
                            {"v", {rat_json(g.shift.x), rat_json(g.shift.y)}}});
            break;
        case Generator::Kind::ShearX:
            gens.push_back({{"type", "shear_x"}, {"profile", profile_json(g.profile[0])}});
            break;
        case Generator::Kind::ShearY:
            gens.push_back({{"type", "shear_y"}, {"profile", profile_json(g.profile[0])}});
            break;
        case Generator::Kind::Linear:
            gens.push_back({{"type", "linear"},
                            {"matrix", {g.matrix.a, g.matrix.b, g.matrix.c, g.matrix.d}}});
            break;
        }
    }
    json doc{{"schema", 1}, {"generators", gens}};
    return doc.dump(2) + "\n";
}

AreaPreservingMap deserialize(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("parse error: ") + e.what());
    }
    if (!doc.contains("generators"))
        throw std::runtime_error("parse error: missing field 'generators'");

    AreaPreservingMap map;
    std::size_t idx = 0;
    for (const auto& g : doc["generators"]) {
        std::string where = "generator " + std::to_string(idx++);
        if (!g.contains("type"))
            throw std::runtime_error("parse error: missing field 'type' in " + where);
        std::string type = g["type"].get<std::string>();
        if (type == "translation") {
            if (!g.contains("v") || !g["v"].is_array() || g["v"].size() != 2)
                throw std::runtime_error("parse error: missing field 'v' in " + where);
            map.append(Generator::translation(
                RatVec2{rat_from_string(g["v"][0].get<std::string>()),
                        rat_from_string(g["v"][1].get<std::string>())}));
        } else if (type == "shear_x" || type == "shear_y") {
            if (!g.contains("profile"))
                throw std::runtime_error("parse error: missing field 'profile' in " + where);
            PeriodicProfile p = profile_from_json(g["profile"], where);
            map.append(type == "shear_x" ? Generator::shear_x(std::move(p))
                                         : Generator::shear_y(std::move(p)));
        } else if (type == "linear") {
            if (!g.contains("matrix") || g["matrix"].size() != 4)
                throw std::runtime_error("parse error: missing field 'matrix' in " + where);
            Mat2i A{g["matrix"][0].get<std::int64_t>(), g["matrix"][1].get<std::int64_t>(),
                    g["matrix"][2].get<std::int64_t>(), g["matrix"][3].get<std::int64_t>()};
            map.append(Generator::linear(A));
        } else {
            throw std::runtime_error("parse error: unknown generator type '" + type +
                                     "' in " + where);
        }
    }
    return map;
}

} // namespace pseudorot
